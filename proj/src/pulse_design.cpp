#include "eqec/pulse_design.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace eqec {

namespace {

using Eigen::Matrix2cd;
using Eigen::MatrixXd;
using Eigen::Vector4d;
using Eigen::VectorXd;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix2cd rotation(double theta, double phi) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const std::complex<double> e{std::cos(phi), std::sin(phi)};
  Matrix2cd r;
  r << c, std::complex<double>{0.0, -1.0} * std::conj(e) * s,
       std::complex<double>{0.0, -1.0} * e * s, c;
  return r;
}

PulseParams params_from_vector(const VectorXd& x) {
  PulseParams p;
  const auto n = x.size() / 2;
  p.pulses.reserve(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    p.pulses.push_back({std::abs(x[2 * k]), x[2 * k + 1]});
  }
  return p;
}

// Residual system: the slow response's off-diagonal must vanish (identity up
// to global phase) and the fast response's diagonal must vanish (complete
// transfer). Four real equations.
Vector4d residuals(const VectorXd& x, double ratio) {
  PulseParams p = params_from_vector(x);
  Matrix2cd slow = su2_response(p, 1.0);
  Matrix2cd fast = su2_response(p, ratio);
  return Vector4d(slow(0, 1).real(), slow(0, 1).imag(), fast(0, 0).real(),
                  fast(0, 0).imag());
}

double objective_value(const VectorXd& x, double ratio) {
  return residuals(x, ratio).squaredNorm();
}

// Nelder-Mead with fixed iteration budget; deterministic.
VectorXd nelder_mead(VectorXd x0, double ratio, int max_iter) {
  const auto dim = x0.size();
  std::vector<std::pair<double, VectorXd>> simplex;
  simplex.reserve(dim + 1);
  simplex.push_back({objective_value(x0, ratio), x0});
  for (Eigen::Index i = 0; i < dim; ++i) {
    VectorXd xi = x0;
    xi[i] += (i % 2 == 0) ? 0.35 : 0.55;
    simplex.push_back({objective_value(xi, ratio), xi});
  }
  auto by_value = [](const auto& a, const auto& b) { return a.first < b.first; };
  for (int iter = 0; iter < max_iter; ++iter) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    if (simplex.front().first < 1e-30) break;
    VectorXd centroid = VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i) centroid += simplex[i].second;
    centroid /= double(dim);
    auto& worst = simplex.back();

    VectorXd xr = centroid + (centroid - worst.second);
    double fr = objective_value(xr, ratio);
    if (fr < simplex.front().first) {
      VectorXd xe = centroid + 2.0 * (centroid - worst.second);
      double fe = objective_value(xe, ratio);
      worst = fe < fr ? std::pair{fe, xe} : std::pair{fr, xr};
    } else if (fr < simplex[dim - 1].first) {
      worst = {fr, xr};
    } else {
      VectorXd xc = centroid + 0.5 * (worst.second - centroid);
      double fc = objective_value(xc, ratio);
      if (fc < worst.first) {
        worst = {fc, xc};
      } else {
        for (Eigen::Index i = 1; i <= dim; ++i) {
          simplex[i].second = simplex[0].second + 0.5 * (simplex[i].second - simplex[0].second);
          simplex[i].first = objective_value(simplex[i].second, ratio);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  return simplex.front().second;
}

// Damped Gauss-Newton on the four-residual system, numerical Jacobian.
VectorXd gauss_newton(VectorXd x, double ratio, int max_iter = 60) {
  double lambda = 1e-8;
  Vector4d r = residuals(x, ratio);
  for (int iter = 0; iter < max_iter; ++iter) {
    if (r.norm() < 1e-15) break;
    const auto dim = x.size();
    MatrixXd jac(4, dim);
    const double h = 1e-7;
    for (Eigen::Index j = 0; j < dim; ++j) {
      VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      jac.col(j) = (residuals(xp, ratio) - residuals(xm, ratio)) / (2.0 * h);
    }
    MatrixXd jtj = jac.transpose() * jac;
    jtj.diagonal().array() += lambda;
    VectorXd step = jtj.ldlt().solve(jac.transpose() * r);
    VectorXd xn = x - step;
    Vector4d rn = residuals(xn, ratio);
    if (rn.squaredNorm() < r.squaredNorm()) {
      x = xn;
      r = rn;
      lambda = std::max(lambda * 0.25, 1e-12);
    } else {
      lambda *= 8.0;
      if (lambda > 1e8) break;
    }
  }
  return x;
}

VectorXd canonicalize(VectorXd x) {
  const auto n = x.size() / 2;
  for (Eigen::Index k = 0; k < n; ++k) {
    x[2 * k] = std::abs(x[2 * k]);
    double phi = std::fmod(x[2 * k + 1], kTwoPi);
    if (phi < 0) phi += kTwoPi;
    x[2 * k + 1] = phi;
  }
  return x;
}

}  // namespace

Eigen::Matrix2cd su2_response(const PulseParams& params, double scale) {
  Matrix2cd u = Matrix2cd::Identity();
  for (const auto& [theta, phi] : params.pulses) {
    u = rotation(scale * theta, phi) * u;
  }
  return u;
}

DiscriminationReport verify_discriminator(const PulseParams& params,
                                          const DesignObjective& objective) {
  Matrix2cd slow = su2_response(params, 1.0);
  Matrix2cd fast = su2_response(params, objective.ratio);
  DiscriminationReport report;
  report.infidelity_identity = 1.0 - std::norm(slow(0, 0));
  report.infidelity_transfer = 1.0 - std::norm(fast(1, 0));
  report.slow_global_phase = std::arg(slow(0, 0));
  report.fast_transfer_phase = std::arg(fast(1, 0));
  // guard against rounding pushing the values negative
  report.infidelity_identity = std::max(report.infidelity_identity, 0.0);
  report.infidelity_transfer = std::max(report.infidelity_transfer, 0.0);
  return report;
}

PulseParams design_discriminator(const DesignObjective& objective, int max_pulses,
                                 std::uint64_t seed) {
  if (max_pulses < 2) throw std::invalid_argument("max_pulses must be at least 2");
  if (objective.ratio <= 1.0 + 1e-9) {
    if (objective.ratio < 1.0) throw std::invalid_argument("ratio must exceed 1");
    throw DesignError(
        "ratio 1 is infeasible: both scales produce the same response, so identity "
        "and complete transfer are contradictory",
        DiscriminationReport{});
  }

  std::mt19937_64 rng(seed);
  DiscriminationReport best_report;
  double best_value = std::numeric_limits<double>::infinity();

  for (int n = 2; n <= max_pulses; ++n) {
    std::vector<VectorXd> starts;
    // Equal-area seeds: every pulse 2pi at scale 1 is exactly the identity,
    // leaving only the fast transfer conditions for the phases.
    for (int ladder = 0; ladder < 8; ++ladder) {
      VectorXd x(2 * n);
      for (int k = 0; k < n; ++k) {
        x[2 * k] = kTwoPi;
        x[2 * k + 1] = std::fmod(double(k) * (0.4 + 0.7 * ladder), kTwoPi);
      }
      starts.push_back(x);
    }
    std::uniform_real_distribution<double> area_dist(std::numbers::pi / 2, 3 * std::numbers::pi);
    std::uniform_real_distribution<double> phase_dist(0.0, kTwoPi);
    for (int trial = 0; trial < 48; ++trial) {
      VectorXd x(2 * n);
      for (int k = 0; k < n; ++k) {
        x[2 * k] = area_dist(rng);
        x[2 * k + 1] = phase_dist(rng);
      }
      starts.push_back(x);
    }

    for (const auto& start : starts) {
      VectorXd x = nelder_mead(start, objective.ratio, 1500);
      x = gauss_newton(x, objective.ratio);
      x = canonicalize(x);
      PulseParams candidate = params_from_vector(x);
      DiscriminationReport report = verify_discriminator(candidate, objective);
      double value = report.infidelity_identity + report.infidelity_transfer;
      if (value < best_value) {
        best_value = value;
        best_report = report;
      }
      if (report.infidelity_identity <= objective.tolerance &&
          report.infidelity_transfer <= objective.tolerance) {
        return candidate;
      }
    }
  }

  throw DesignError("no composite sequence reached tolerance within the pulse budget",
                    best_report);
}

}  // namespace eqec
