#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "eqec/levels.hpp"

namespace eqec {

using Complex = std::complex<double>;

inline constexpr double kDefaultPruneThreshold = 1e-15;
inline constexpr double kNormTolerance = 1e-12;

// Occupation numbers of the ensemble part of a basis state: a sorted sparse
// (level, count) list with all-positive counts. Hard blockade is built into
// the basis: no vector with more than one atom across Rydberg levels is valid.
class OccupationVector {
 public:
  OccupationVector() = default;
  explicit OccupationVector(std::vector<std::pair<Level, int>> counts);

  int count(Level level) const;
  int total() const;
  int rydberg_count() const;

  OccupationVector with_added(Level level, int delta = 1) const;
  OccupationVector with_removed(Level level) const;      // count must be > 0
  OccupationVector with_move(Level from, Level to) const;  // one atom from -> to

  const std::vector<std::pair<Level, int>>& entries() const { return counts_; }

  auto operator<=>(const OccupationVector&) const = default;

 private:
  std::vector<std::pair<Level, int>> counts_;
};

struct SectorKey {
  int atom_count = 0;
  bool has_distinguished = false;
  auto operator<=>(const SectorKey&) const = default;
};

// One basis vector of the hybrid representation: an optional distinguished
// atom (the symmetry-breaking atom produced by a disturbance) tensored with
// a symmetric Fock state of the remaining atoms. The joint Rydberg content
// of both factors is capped at one excitation.
class HybridBasisState {
 public:
  HybridBasisState() = default;
  explicit HybridBasisState(OccupationVector ensemble,
                            std::optional<Level> distinguished = std::nullopt);

  const std::optional<Level>& distinguished() const { return distinguished_; }
  const OccupationVector& ensemble() const { return ensemble_; }

  int total_atoms() const { return ensemble_.total() + (distinguished_ ? 1 : 0); }
  int rydberg_count() const {
    return ensemble_.rydberg_count() +
           (distinguished_ && distinguished_->is_rydberg() ? 1 : 0);
  }
  bool satisfies_blockade() const { return rydberg_count() <= 1; }
  SectorKey sector() const { return {total_atoms(), distinguished_.has_value()}; }

  // Total count in a level, distinguished atom included.
  int level_count(Level level) const {
    return ensemble_.count(level) + (distinguished_ == level ? 1 : 0);
  }
  // Atoms in the {0_i, 1_i} manifold, distinguished atom included.
  int manifold_count(int qubit) const;

  HybridBasisState with_ensemble(OccupationVector occ) const {
    return HybridBasisState(std::move(occ), distinguished_);
  }
  HybridBasisState with_distinguished(std::optional<Level> level) const {
    return HybridBasisState(ensemble_, std::move(level));
  }

  auto operator<=>(const HybridBasisState&) const = default;

 private:
  std::optional<Level> distinguished_;
  OccupationVector ensemble_;
};

// A normalized pure state as a sparse amplitude map over hybrid basis states.
// Basis states whose sectors (atom count, distinguished flag) differ never
// interfere; inner products across sectors are exactly zero. Amplitudes below
// the prune threshold are dropped after every operation.
class PureState {
 public:
  using AmplitudeMap = std::map<HybridBasisState, Complex>;

  PureState() = default;
  explicit PureState(double prune_threshold) : prune_threshold_(prune_threshold) {}

  static PureState single(HybridBasisState basis, Complex amplitude = 1.0);

  void add(const HybridBasisState& basis, Complex amplitude);
  void set(const HybridBasisState& basis, Complex amplitude);
  Complex amplitude(const HybridBasisState& basis) const;

  double squared_norm() const;
  void normalize();  // throws on the zero state
  void prune();
  double prune_threshold() const { return prune_threshold_; }

  bool empty() const { return amps_.empty(); }
  std::size_t size() const { return amps_.size(); }
  const AmplitudeMap& amplitudes() const { return amps_; }

  std::vector<SectorKey> sectors() const;

  // Asserts the norm-one invariant (within kNormTolerance).
  void check_normalized() const;

 private:
  AmplitudeMap amps_;
  double prune_threshold_ = kDefaultPruneThreshold;
};

struct QubitAmplitudes {
  Complex zero;
  Complex one;
};

// Product register state: one atom per qubit manifold in a_i|0_i> + b_i|1_i>,
// all remaining atoms in the reservoir. Purely symmetric, no distinguished atom.
PureState new_logical_state(const RegisterConfig& config,
                            std::span<const QubitAmplitudes> qubit_amplitudes);

// Same construction at an explicit total atom count (used for sector targets).
PureState logical_state_at(const RegisterConfig& config,
                           std::span<const QubitAmplitudes> qubit_amplitudes,
                           int atom_count);

Complex inner_product(const PureState& x, const PureState& y);

// Sector policy for register fidelities. Atom counts refer to the total
// (distinguished atom included). A distinguished atom parked in the reservoir
// or leaked level is a bystander: when count_parked_bystander is set, such
// components contribute the overlap of their ensemble factor with the target;
// a distinguished atom sitting in a register or Rydberg level never counts.
struct SectorPolicy {
  enum class Kind { FixedAtomCount, BestSector, SumOverSectors };
  Kind kind = Kind::FixedAtomCount;
  int atom_count = 0;
  bool count_parked_bystander = true;

  static SectorPolicy fixed(int atom_count, bool count_parked = true) {
    return {Kind::FixedAtomCount, atom_count, count_parked};
  }
  static SectorPolicy best(bool count_parked = true) {
    return {Kind::BestSector, 0, count_parked};
  }
  static SectorPolicy sum(bool count_parked = true) {
    return {Kind::SumOverSectors, 0, count_parked};
  }
};

double fidelity_to_logical(const PureState& state,
                           std::span<const QubitAmplitudes> target_amplitudes,
                           const RegisterConfig& config, const SectorPolicy& policy);

// Plain-text state serialization, one basis state per line:
//   sectorK distinguished_level occupation_csv re im
// where occupation_csv lists counts over RegisterConfig::ensemble_levels()
// and distinguished_level is "-" when absent.
std::string state_to_text(const PureState& state, const RegisterConfig& config);
PureState state_from_text(const std::string& text, const RegisterConfig& config);

}  // namespace eqec
