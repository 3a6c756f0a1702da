#include "eqec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace eqec {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

constexpr Complex kImag{0.0, 1.0};

struct Move {
  HybridBasisState target;
  Complex element;  // w * e^{i phi} * sqrt factor (for the from->to direction)
};

// All single-atom moves generated by the drive from one basis state, in both
// transition directions, blockade-excluded targets dropped.
std::vector<Move> moves_from(const HybridBasisState& basis, const Drive& drive) {
  std::vector<Move> moves;
  auto emit = [&](HybridBasisState target, Complex element) {
    if (!target.satisfies_blockade()) return;
    moves.push_back({std::move(target), element});
  };

  for (const auto& t : drive.transitions) {
    const Complex fwd = t.weight * std::exp(kImag * t.phase);
    const Complex bwd = std::conj(fwd);

    // Ensemble moves with bosonic enhancement.
    const int n_from = basis.ensemble().count(t.from);
    const int n_to = basis.ensemble().count(t.to);
    if (n_from > 0) {
      double factor = std::sqrt(double(n_from) * double(n_to + 1));
      emit(basis.with_ensemble(basis.ensemble().with_move(t.from, t.to)), fwd * factor);
    }
    if (n_to > 0) {
      double factor = std::sqrt(double(n_to) * double(n_from + 1));
      emit(basis.with_ensemble(basis.ensemble().with_move(t.to, t.from)), bwd * factor);
    }

    // Distinguished-atom moves, unit element. The leaked level is drive-dark
    // by construction and never appears in a transition.
    if (basis.distinguished() == t.from) {
      emit(basis.with_distinguished(t.to), fwd);
    } else if (basis.distinguished() == t.to) {
      emit(basis.with_distinguished(t.from), bwd);
    }
  }
  return moves;
}

}  // namespace

Drive::Drive(std::vector<DriveTransition> transitions_in, double area_in)
    : transitions(std::move(transitions_in)), area(area_in) {
  if (transitions.empty()) throw std::invalid_argument("drive needs at least one transition");
  for (const auto& t : transitions) {
    if (t.from == t.to) throw std::invalid_argument("transition levels must be distinct");
    if (t.from.is_leaked() || t.to.is_leaked()) {
      throw std::invalid_argument("the leaked level couples to no drive");
    }
  }
}

CompositeSequence::CompositeSequence(std::vector<Drive> pulses_in)
    : pulses(std::move(pulses_in)) {
  if (pulses.empty()) throw std::invalid_argument("composite sequence must be non-empty");
}

std::vector<HybridBasisState> reachable_basis(const PureState& state, const Drive& drive) {
  std::vector<HybridBasisState> basis;
  std::deque<HybridBasisState> frontier;
  auto try_insert = [&](const HybridBasisState& b) {
    auto it = std::lower_bound(basis.begin(), basis.end(), b);
    if (it != basis.end() && *it == b) return false;
    basis.insert(it, b);
    return true;
  };
  for (const auto& [b, amp] : state.amplitudes()) {
    if (try_insert(b)) frontier.push_back(b);
  }
  while (!frontier.empty()) {
    HybridBasisState b = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& move : moves_from(b, drive)) {
      if (try_insert(move.target)) frontier.push_back(move.target);
    }
  }
  return basis;
}

Eigen::MatrixXcd build_coupling_matrix(const Drive& drive,
                                       std::span<const HybridBasisState> basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  MatrixXcd m = MatrixXcd::Zero(n, n);
  auto index_of = [&](const HybridBasisState& b) -> Eigen::Index {
    auto it = std::lower_bound(basis.begin(), basis.end(), b);
    if (it == basis.end() || !(*it == b)) return -1;
    return static_cast<Eigen::Index>(it - basis.begin());
  };
  // basis must be sorted for the lookup
  for (std::size_t i = 1; i < basis.size(); ++i) {
    if (!(basis[i - 1] < basis[i])) throw std::invalid_argument("basis must be sorted");
  }
  for (Eigen::Index col = 0; col < n; ++col) {
    for (const auto& move : moves_from(basis[col], drive)) {
      Eigen::Index row = index_of(move.target);
      if (row < 0) throw std::invalid_argument("basis not closed under the drive");
      m(row, col) += move.element;
    }
  }
  return m;
}

PureState apply_drive(const PureState& state, const Drive& drive) {
  const auto basis = reachable_basis(state, drive);
  const auto n = static_cast<Eigen::Index>(basis.size());
  MatrixXcd m = build_coupling_matrix(drive, basis);

  VectorXcd v = VectorXcd::Zero(n);
  for (const auto& [b, amp] : state.amplitudes()) {
    auto it = std::lower_bound(basis.begin(), basis.end(), b);
    v[static_cast<Eigen::Index>(it - basis.begin())] = amp;
  }

  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  VectorXcd w = solver.eigenvectors().adjoint() * v;
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] *= std::exp(-kImag * (drive.area / 2.0) * solver.eigenvalues()[i]);
  }
  VectorXcd out = solver.eigenvectors() * w;

  PureState result(state.prune_threshold());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(out[i]) >= state.prune_threshold()) result.add(basis[i], out[i]);
  }
  result.check_normalized();
  return result;
}

PureState apply_sequence(const PureState& state, const CompositeSequence& sequence) {
  PureState current = state;
  for (const auto& pulse : sequence.pulses) current = apply_drive(current, pulse);
  return current;
}

PureState single_qubit_gate(const PureState& state, int qubit, double theta, double phi) {
  const Level zero = Level::qubit(qubit, 0);
  const Level one = Level::qubit(qubit, 1);
  for (const auto& [basis, amp] : state.amplitudes()) {
    if (basis.ensemble().count(zero) + basis.ensemble().count(one) != 1) {
      throw std::runtime_error("qubit manifold " + std::to_string(qubit) +
                               " is not singly occupied: uncorrected register error");
    }
  }
  return apply_drive(state, Drive({{zero, one, phi, 1.0}}, theta));
}

PureState cz_gate(const PureState& state, int qubit_i, int qubit_j) {
  const Level one_i = Level::qubit(qubit_i, 1);
  const Level one_j = Level::qubit(qubit_j, 1);
  const Level hold = Level::rydberg(RydbergId::R);
  const Level bounce = Level::rydberg(RydbergId::R0);
  constexpr double pi = std::numbers::pi;

  for (const auto& [basis, amp] : state.amplitudes()) {
    if (basis.level_count(hold) + basis.level_count(bounce) > 0) {
      throw std::runtime_error("Rydberg level occupied at cz_gate entry");
    }
  }

  PureState s = apply_drive(state, Drive({{one_i, hold, 0.0, 1.0}}, pi));
  s = apply_drive(s, Drive({{one_j, bounce, 0.0, 1.0}}, 2.0 * pi));
  s = apply_drive(s, Drive({{one_i, hold, 0.0, 1.0}}, pi));
  return s;
}

int uniform_reservoir_count(const PureState& state) {
  int count = -1;
  for (const auto& [basis, amp] : state.amplitudes()) {
    int c = basis.level_count(Level::reservoir());
    if (count < 0) count = c;
    if (c != count) {
      throw std::runtime_error("reservoir population differs across components");
    }
  }
  if (count < 0) throw std::runtime_error("empty state");
  return count;
}

PureState encode_one_atom(const PureState& state, Level target) {
  constexpr double pi = std::numbers::pi;
  const Level s = Level::reservoir();
  const Level r = Level::rydberg(RydbergId::R);

  if (target.is_qubit()) {
    const int q = target.qubit_index();
    for (const auto& [basis, amp] : state.amplitudes()) {
      if (basis.ensemble().count(Level::qubit(q, 0)) +
              basis.ensemble().count(Level::qubit(q, 1)) >
          0) {
        throw std::runtime_error("target manifold already occupied");
      }
    }
  } else {
    for (const auto& [basis, amp] : state.amplitudes()) {
      if (basis.ensemble().count(target) > 0) {
        throw std::runtime_error("target level already occupied");
      }
    }
  }

  const int reservoir = uniform_reservoir_count(state);
  if (reservoir < 1) throw std::runtime_error("empty reservoir, cannot encode");

  PureState out = apply_drive(state, Drive({{s, r, 0.0, 1.0}}, pi / std::sqrt(double(reservoir))));
  out = apply_drive(out, Drive({{r, target, 0.0, 1.0}}, pi));
  return out;
}

}  // namespace eqec
