#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "eqec/state.hpp"

namespace eqec {

// A resonant drive: one or more transitions sharing a common Rabi scale,
// applied collectively (every atom whose level matches a transition couples,
// the distinguished atom included). The pulse is parameterized by the
// single-atom area theta = Omega * t under the convention
//   H = (Omega/2) * sum_k sum_t w_t (e^{i phi_t} |b_t><a_t|_k + h.c.),
// so a lone atom on an isolated transition undergoes the SU(2) rotation
//   R(theta, phi) = exp(-i (theta/2) (cos phi X + sin phi Y)).
// Collective matrix elements pick up the bosonic factor sqrt(n_a (n_b + 1)).
struct DriveTransition {
  Level from;
  Level to;
  double phase = 0.0;
  double weight = 1.0;
};

struct Drive {
  std::vector<DriveTransition> transitions;
  double area = 0.0;

  Drive(std::vector<DriveTransition> transitions, double area);
};

struct CompositeSequence {
  std::vector<Drive> pulses;

  explicit CompositeSequence(std::vector<Drive> pulses);
};

// Breadth-first closure of the state's support under the drive's single-atom
// moves, with blockade-violating targets excluded. Closure stays within each
// sector; the basis is returned in deterministic (sorted) order.
std::vector<HybridBasisState> reachable_basis(const PureState& state, const Drive& drive);

// Hermitian coupling matrix of the drive over an explicit basis. Throws if a
// move escapes the basis (other than by blockade exclusion).
Eigen::MatrixXcd build_coupling_matrix(const Drive& drive,
                                       std::span<const HybridBasisState> basis);

// Exact evolution exp(-i (theta/2) M) on the reachable subspace.
PureState apply_drive(const PureState& state, const Drive& drive);
PureState apply_sequence(const PureState& state, const CompositeSequence& sequence);

// SU(2) rotation R(theta, phi) on the {0_i, 1_i} occupation pair. Requires the
// manifold to be singly occupied in every ensemble component; anything else
// signals an uncorrected register error.
PureState single_qubit_gate(const PureState& state, int qubit, double theta, double phi);

// Blockade-mediated controlled phase between qubit manifolds i and j:
//   pi(1_i -> r), 2pi(1_j <-> r0, blockaded by r), pi(r -> 1_i).
// Net phases on the logical basis are (1, -1, -1, -1) for |00>,|01>,|10>,|11>,
// i.e. controlled-Z up to the single-qubit phase pattern Z_i Z_j.
PureState cz_gate(const PureState& state, int qubit_i, int qubit_j);

// Moves exactly one atom from the reservoir into `target` through the
// blockaded Rydberg level r: a collectively calibrated pi-pulse s -> r
// followed by a pi-pulse r -> target. Also the refill step after atom loss.
PureState encode_one_atom(const PureState& state, Level target);

// Total reservoir population (ensemble plus a distinguished bystander in s).
// Throws unless all components agree; the encode pulse area depends on it.
int uniform_reservoir_count(const PureState& state);

}  // namespace eqec
