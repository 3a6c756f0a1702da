#include "eqec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace eqec {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

constexpr Complex kImag{0.0, 1.0};

std::vector<Level> oracle_levels(const RegisterConfig& config) {
  auto levels = config.ensemble_levels();
  levels.push_back(Level::leaked());
  return levels;
}

int level_index(const std::vector<Level>& levels, Level level) {
  auto it = std::find(levels.begin(), levels.end(), level);
  if (it == levels.end()) throw std::invalid_argument("level not in oracle basis");
  return static_cast<int>(it - levels.begin());
}

long int_pow(long base, int exp) {
  long out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// Sparse action of the blockade-projected drive Hamiltonian.
class DriveAction {
 public:
  DriveAction(const FullState& state, const Drive& drive)
      : levels_(state.levels()), n_atoms_(state.n_atoms()) {
    for (const auto& t : drive.transitions) {
      terms_.push_back({level_index(levels_, t.from), level_index(levels_, t.to),
                        t.weight * std::exp(kImag * t.phase)});
    }
    strides_.resize(n_atoms_);
    long s = 1;
    for (int a = 0; a < n_atoms_; ++a) {
      strides_[a] = s;
      s *= static_cast<long>(levels_.size());
    }
  }

  VectorXcd apply(const VectorXcd& v) const {
    VectorXcd out = VectorXcd::Zero(v.size());
    std::vector<int> digits(n_atoms_);
    for (long idx = 0; idx < v.size(); ++idx) {
      if (v[idx] == Complex{0.0, 0.0}) continue;
      long rem = idx;
      int source_ryd = 0;
      for (int a = 0; a < n_atoms_; ++a) {
        digits[a] = static_cast<int>(rem % levels_.size());
        rem /= static_cast<long>(levels_.size());
        if (levels_[digits[a]].is_rydberg()) ++source_ryd;
      }
      if (source_ryd > 1) continue;  // projected out
      for (int a = 0; a < n_atoms_; ++a) {
        for (const auto& term : terms_) {
          if (digits[a] == term.from) {
            long target = idx + (term.to - term.from) * strides_[a];
            int target_ryd = source_ryd + (levels_[term.to].is_rydberg() ? 1 : 0) -
                             (levels_[term.from].is_rydberg() ? 1 : 0);
            if (target_ryd <= 1) out[target] += term.element * v[idx];
          } else if (digits[a] == term.to) {
            long target = idx + (term.from - term.to) * strides_[a];
            int target_ryd = source_ryd + (levels_[term.from].is_rydberg() ? 1 : 0) -
                             (levels_[term.to].is_rydberg() ? 1 : 0);
            if (target_ryd <= 1) out[target] += std::conj(term.element) * v[idx];
          }
        }
      }
    }
    return out;
  }

 private:
  struct Term {
    int from;
    int to;
    Complex element;
  };
  std::vector<Level> levels_;
  int n_atoms_;
  std::vector<Term> terms_;
  std::vector<long> strides_;
};

// exp(-i t A) v via the Lanczos process, with sub-stepping to keep the Krylov
// space small. A is Hermitian.
VectorXcd lanczos_expm(const DriveAction& action, const VectorXcd& v0, double t) {
  const int max_krylov = 64;
  const double tol = 1e-15;

  // Crude spectral scale estimate for sub-stepping.
  VectorXcd probe = v0;
  double norm_est = 1.0;
  for (int i = 0; i < 4; ++i) {
    probe = action.apply(probe);
    double n = probe.norm();
    if (n == 0.0) break;
    norm_est = n;
    probe /= n;
  }
  int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(t) * norm_est / 8.0)));

  VectorXcd v = v0;
  const double dt = t / substeps;
  for (int step = 0; step < substeps; ++step) {
    const double beta0 = v.norm();
    if (beta0 == 0.0) return v;

    std::vector<VectorXcd> basis;
    basis.push_back(v / beta0);
    std::vector<double> alpha, beta;
    int m = 0;
    for (; m < max_krylov; ++m) {
      VectorXcd w = action.apply(basis[m]);
      double a = std::real(basis[m].dot(w));
      alpha.push_back(a);
      w -= a * basis[m];
      if (m > 0) w -= beta[m - 1] * basis[m - 1];
      // full reorthogonalization keeps the small space numerically exact
      for (const auto& b : basis) w -= b.dot(w) * b;
      double b = w.norm();
      if (b < tol) break;
      beta.push_back(b);
      basis.push_back(w / b);
    }
    const int dim = static_cast<int>(alpha.size());
    MatrixXcd tmat = MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      tmat(i, i) = alpha[i];
      if (i + 1 < dim) {
        tmat(i, i + 1) = beta[i];
        tmat(i + 1, i) = beta[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(tmat);
    VectorXcd e1 = VectorXcd::Zero(dim);
    e1[0] = beta0;
    VectorXcd w = solver.eigenvectors().adjoint() * e1;
    for (int i = 0; i < dim; ++i) {
      w[i] *= std::exp(-kImag * dt * solver.eigenvalues()[i]);
    }
    VectorXcd small = solver.eigenvectors() * w;
    VectorXcd next = VectorXcd::Zero(v.size());
    for (int i = 0; i < dim; ++i) next += small[i] * basis[i];
    v = std::move(next);
  }
  return v;
}

}  // namespace

FullState::FullState(int n_atoms, std::vector<Level> levels, Eigen::VectorXcd amplitudes)
    : n_atoms_(n_atoms), levels_(std::move(levels)), amps_(std::move(amplitudes)) {
  if (amps_.size() != int_pow(static_cast<long>(levels_.size()), n_atoms_)) {
    throw std::invalid_argument("amplitude vector has wrong dimension");
  }
}

std::vector<int> FullState::digits(long index) const {
  std::vector<int> out(n_atoms_);
  for (int a = 0; a < n_atoms_; ++a) {
    out[a] = static_cast<int>(index % levels_.size());
    index /= static_cast<long>(levels_.size());
  }
  return out;
}

long FullState::index(const std::vector<int>& digits) const {
  long idx = 0;
  for (int a = n_atoms_ - 1; a >= 0; --a) {
    idx = idx * static_cast<long>(levels_.size()) + digits[a];
  }
  return idx;
}

FullState embed_symmetric(const PureState& state, const RegisterConfig& config,
                          const OracleCaps& caps) {
  const auto levels = oracle_levels(config);
  int atoms = -1;
  for (const auto& [basis, amp] : state.amplitudes()) {
    if (atoms < 0) atoms = basis.total_atoms();
    if (basis.total_atoms() != atoms) {
      throw std::invalid_argument("embedding requires a single atom-count sector");
    }
  }
  if (atoms < 1) throw std::invalid_argument("empty state");
  if (atoms > caps.max_atoms) throw std::invalid_argument("atom count exceeds oracle cap");
  const long dim = int_pow(static_cast<long>(levels.size()), atoms);
  if (dim > caps.max_dimension) throw std::invalid_argument("dimension exceeds oracle cap");

  VectorXcd amps = VectorXcd::Zero(dim);
  FullState out(atoms, levels, std::move(amps));

  for (const auto& [basis, amp] : state.amplitudes()) {
    const bool has_dist = basis.distinguished().has_value();
    const int ensemble_atoms = basis.ensemble().total();
    // level assignment of the ensemble atoms, sorted; permutations enumerate
    // the distinct arrangements
    std::vector<int> assignment;
    for (const auto& [level, count] : basis.ensemble().entries()) {
      for (int c = 0; c < count; ++c) assignment.push_back(level_index(levels, level));
    }
    std::sort(assignment.begin(), assignment.end());

    long arrangements = 0;
    {
      std::vector<int> probe = assignment;
      do {
        ++arrangements;
      } while (std::next_permutation(probe.begin(), probe.end()));
    }
    const Complex weight = amp / std::sqrt(static_cast<double>(arrangements));

    std::vector<int> digits(atoms);
    do {
      int offset = 0;
      if (has_dist) {
        digits[0] = level_index(levels, *basis.distinguished());
        offset = 1;
      }
      for (int a = 0; a < ensemble_atoms; ++a) digits[a + offset] = assignment[a];
      out.amplitudes()[out.index(digits)] += weight;
    } while (std::next_permutation(assignment.begin(), assignment.end()));
  }
  return out;
}

FullState apply_drive_full(const FullState& state, const Drive& drive) {
  DriveAction action(state, drive);
  VectorXcd evolved;
  if (state.dimension() <= 1024) {
    // dense exponentiation via the Hermitian eigendecomposition
    MatrixXcd h = MatrixXcd::Zero(state.dimension(), state.dimension());
    VectorXcd unit = VectorXcd::Zero(state.dimension());
    for (long j = 0; j < state.dimension(); ++j) {
      unit[j] = 1.0;
      h.col(j) = action.apply(unit);
      unit[j] = 0.0;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
    VectorXcd w = solver.eigenvectors().adjoint() * state.amplitudes();
    for (long i = 0; i < state.dimension(); ++i) {
      w[i] *= std::exp(-kImag * (drive.area / 2.0) * solver.eigenvalues()[i]);
    }
    evolved = solver.eigenvectors() * w;
  } else {
    evolved = lanczos_expm(action, state.amplitudes(), drive.area / 2.0);
  }
  return FullState(state.n_atoms(), state.levels(), std::move(evolved));
}

double overlap_with_symmetric(const FullState& full, const PureState& state,
                              const RegisterConfig& config) {
  OracleCaps caps;
  caps.max_atoms = full.n_atoms();
  caps.max_dimension = full.dimension();
  FullState embedded = embed_symmetric(state, config, caps);
  if (embedded.dimension() != full.dimension()) {
    throw std::invalid_argument("incompatible shapes");
  }
  return std::norm(embedded.amplitudes().dot(full.amplitudes()));
}

double permutation_symmetry_error(const FullState& full, bool exclude_first) {
  const int start = exclude_first ? 1 : 0;
  double worst = 0.0;
  std::vector<int> digits;
  for (int a = start; a < full.n_atoms(); ++a) {
    for (int b = a + 1; b < full.n_atoms(); ++b) {
      for (long idx = 0; idx < full.dimension(); ++idx) {
        Complex amp = full.amplitudes()[idx];
        digits = full.digits(idx);
        std::swap(digits[a], digits[b]);
        Complex swapped = full.amplitudes()[full.index(digits)];
        worst = std::max(worst, std::abs(amp - swapped));
      }
    }
  }
  return worst;
}

}  // namespace eqec
