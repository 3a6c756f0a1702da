#pragma once

#include <Eigen/Dense>
#include <vector>

#include "eqec/dynamics.hpp"
#include "eqec/state.hpp"

namespace eqec {

// Brute-force simulator on the full K-atom product space, used to validate
// the symmetric-subspace engine at small sizes. The atom at position 0 hosts
// the distinguished atom when one exists; symmetric components expand into
// normalized sums over distinct permutations of the remaining positions.
struct OracleCaps {
  int max_atoms = 5;
  long max_dimension = 100000;
};

class FullState {
 public:
  FullState(int n_atoms, std::vector<Level> levels, Eigen::VectorXcd amplitudes);

  int n_atoms() const { return n_atoms_; }
  const std::vector<Level>& levels() const { return levels_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Eigen::VectorXcd& amplitudes() { return amps_; }
  long dimension() const { return amps_.size(); }

  // index <-> per-atom level assignment (atom 0 is the fastest digit)
  std::vector<int> digits(long index) const;
  long index(const std::vector<int>& digits) const;

 private:
  int n_atoms_;
  std::vector<Level> levels_;  // single-atom level order (includes leak)
  Eigen::VectorXcd amps_;
};

FullState embed_symmetric(const PureState& state, const RegisterConfig& config,
                          const OracleCaps& caps = {});

// Evolution under the sum of single-atom drive terms, projected onto the
// <= 1 total Rydberg excitation subspace (hard blockade). Dense
// diagonalization at small dimension, Lanczos exponentiation above it.
FullState apply_drive_full(const FullState& state, const Drive& drive);

// |<embed(symmetric)|full>|^2
double overlap_with_symmetric(const FullState& full, const PureState& state,
                              const RegisterConfig& config);

// Largest amplitude change under transpositions of ensemble positions
// (position 0 is excluded when the state hosts a distinguished atom).
double permutation_symmetry_error(const FullState& full, bool exclude_first);

}  // namespace eqec
