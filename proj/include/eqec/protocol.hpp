#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqec/dynamics.hpp"
#include "eqec/pulse_design.hpp"
#include "eqec/state.hpp"

namespace eqec {

// Single-atom disturbance amplitudes: the affected reservoir atom evolves into
// c0|0> + c1|1> + cs|s> + c_perp|leak>, where |leak> is orthogonal to every
// driven level.
struct DisturbanceCoeffs {
  Complex c0;
  Complex c1;
  Complex cs;
  Complex c_perp;

  void validate() const;
};

enum class Branch {
  NoErrorDetected,
  R0DetectedIon,
  R0DetectedNoIon,
  R1DetectedIon,
  R1DetectedNoIon,
};

std::string_view branch_name(Branch branch);

struct MeasurementRecord {
  std::string observable;
  int outcome = 0;
  double probability = 0.0;  // pre-measurement probability of this outcome
};

struct TrajectoryOutcome {
  Branch branch = Branch::NoErrorDetected;
  std::vector<MeasurementRecord> measurements;
  PureState final_state;
  int atoms_consumed = 0;  // atoms removed by ionization
  int rydberg_ions = 0;    // ions from the r0/r1 pulses
  int cleanup_ions = 0;    // ions from the single-atom 0_i/1_i pulses
  std::optional<int> repaired_qubit;
};

// Outcome source for every probabilistic step. The sampled chooser draws from
// a seeded generator; the tree chooser replays scripted prefixes so that the
// whole outcome tree can be enumerated with exact probabilities.
class Chooser {
 public:
  virtual ~Chooser() = default;
  // probs need not be normalized beyond rounding; returns the chosen index.
  virtual std::size_t choose(std::span<const double> probs, std::string_view label) = 0;
};

class SampledChooser final : public Chooser {
 public:
  explicit SampledChooser(std::uint64_t seed) : rng_(seed) {}
  std::size_t choose(std::span<const double> probs, std::string_view label) override;

 private:
  std::mt19937_64 rng_;
};

struct BranchOutcome {
  double probability = 0.0;
  TrajectoryOutcome outcome;
};

// Runs `protocol` once per outcome path and returns every terminal branch
// with its exact probability. Paths whose running probability falls below
// `prune_probability` are dropped (they arise only as exact zeros plus
// rounding dust).
std::vector<BranchOutcome> enumerate_branches(
    const std::function<TrajectoryOutcome(Chooser&)>& protocol,
    double prune_probability = 1e-18);

enum class LossMode { Coherent, MixtureBranch };

// Removes one atom from the symmetric ensemble. Coherent mode returns the
// amplitude-level superposition of all removal channels (renormalized);
// mixture mode selects the internal level the lost atom occupied through the
// chooser, which keeps channels that would otherwise interfere separate.
PureState apply_atom_loss(const PureState& state, LossMode mode, Chooser* chooser = nullptr);

// All loss channels with their probabilities, keyed by the lost level.
std::vector<std::pair<double, PureState>> atom_loss_branches(const PureState& state);

// Moves one reservoir atom into the distinguished sector in the given
// single-atom state, targeting qubit `qubit`'s level pair. Components where a
// register atom is hit instead are O(1/sqrt K) and are dropped.
PureState apply_disturbance(const PureState& state, const DisturbanceCoeffs& coeffs,
                            int qubit = 1);

// Projective measurement of "any atom in `level`". False negatives occur with
// probability 1 - detector_efficiency on the occupied branch; false positives
// do not occur. Returns the reported outcome and the post-measurement state.
std::pair<bool, PureState> measure_rydberg_content(const PureState& state, Level level,
                                                   const RegisterConfig& config,
                                                   Chooser& chooser,
                                                   std::vector<MeasurementRecord>* log = nullptr);

enum class IonizationScope { AnyAtom, DistinguishedOnly };

// Projective ionization of `level`: with probability equal to the population
// holding at least one atom there (within scope), one atom is removed and an
// ion is seen; otherwise the unoccupied component survives.
std::pair<bool, PureState> ionize_level(const PureState& state, Level level, Chooser& chooser,
                                        IonizationScope scope = IonizationScope::AnyAtom,
                                        std::vector<MeasurementRecord>* log = nullptr);

// Projective measurement of "qubit manifold `qubit` holds at least one atom",
// distinguished atom included.
std::pair<bool, PureState> measure_manifold_occupied(const PureState& state, int qubit,
                                                     Chooser& chooser,
                                                     std::vector<MeasurementRecord>* log = nullptr);

// One detection/correction cycle on qubit i:
//  (i)   the composite discrimination sequence on 0_i<->r0 and 1_i<->r1,
//  (ii)  Rydberg content measurement of r0, else r1; on detection a collective
//        pi-pulse s<->r_x calibrated to the reservoir,
//  (iii) ionization of r_x; with an ion the register is kept, without one the
//        single-atom levels 0_i, 1_i are ionized and the manifold is refilled
//        to |0_i> if the occupation test finds it empty.
TrajectoryOutcome run_detection_cycle(const PureState& state, int qubit,
                                      const PulseParams& params, const RegisterConfig& config,
                                      Chooser& chooser);

// Runs the detection cycle on every qubit in ascending order, then scans all
// manifolds for loss (occupation test + refill of empty manifolds).
TrajectoryOutcome run_full_correction(const PureState& state, const PulseParams& params,
                                      const RegisterConfig& config, Chooser& chooser);

// Two-ensemble-qubit logical code word
//   alpha (|00> + |11>)/sqrt2 + beta (|01> + |10>)/sqrt2.
PureState encode_logical_pair(Complex alpha, Complex beta, const RegisterConfig& config);

// Rebuilds the full code word from the post-correction form
// |0_repaired> (x) (alpha|0> + beta|1>) by a Hadamard-equivalent rotation on
// the repaired qubit followed by a CNOT-equivalent with it as control.
PureState reconstruct_codeword(const PureState& state, int repaired,
                               const RegisterConfig& config);

// Designated target of a terminal branch, decided from the ion record alone
// (which is all an experimenter sees): a Rydberg ion preserves the register
// at one atom fewer; a cleanup ion means the manifold was reset to |0_i>;
// no ion at all leaves the register untouched.
struct BranchTarget {
  bool reset_to_zero = false;  // target is |0_i>-reset on repaired_qubit
  int atom_count = 0;          // total atoms of the target
};
BranchTarget designated_target(const TrajectoryOutcome& outcome, int initial_atoms);

// Convenience: fidelity of a terminal branch against its designated target.
double branch_fidelity(const TrajectoryOutcome& outcome,
                       std::span<const QubitAmplitudes> input_amplitudes,
                       const RegisterConfig& config, int initial_atoms);

}  // namespace eqec
