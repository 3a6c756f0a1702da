#include "eqec/zeeman.hpp"

#include <cmath>
#include <stdexcept>

namespace eqec {

namespace {

void check_quantum_numbers(const HyperfineSpecies& species, int f, int m) {
  const double i = species.nuclear_spin;
  const int f_low = static_cast<int>(std::lround(i - 0.5));
  const int f_high = static_cast<int>(std::lround(i + 0.5));
  if (f != f_low && f != f_high) {
    throw std::invalid_argument("f must be I - 1/2 or I + 1/2");
  }
  if (std::abs(m) > f) throw std::invalid_argument("|m| must not exceed f");
}

}  // namespace

HyperfineSpecies HyperfineSpecies::rb87() {
  return {"rb87", 1.5, 6.834682610904290e9, 2.00233113, -0.0009951414};
}

HyperfineSpecies HyperfineSpecies::cs133() {
  return {"cs133", 3.5, 9.192631770e9, 2.00254032, -0.00039885395};
}

std::optional<HyperfineSpecies> HyperfineSpecies::by_name(const std::string& name) {
  if (name == "rb87") return rb87();
  if (name == "cs133") return cs133();
  return std::nullopt;
}

double zeeman_energy_hz(const HyperfineSpecies& species, int f, int m, double b_gauss) {
  check_quantum_numbers(species, f, m);
  const double i = species.nuclear_spin;
  const double de = species.hyperfine_splitting_hz;
  const double x = (species.g_j - species.g_i) * kBohrMagnetonHzPerGauss * b_gauss / de;
  const double base = -de / (2.0 * (2.0 * i + 1.0)) +
                      species.g_i * kBohrMagnetonHzPerGauss * m * b_gauss;
  const bool upper = f == static_cast<int>(std::lround(i + 0.5));

  if (upper && std::abs(m) == f) {
    // stretched states: the square root collapses to |1 +- x|
    const double sign = m > 0 ? 1.0 : -1.0;
    return base + (de / 2.0) * std::abs(1.0 + sign * x);
  }
  const double arg = 1.0 + 4.0 * m * x / (2.0 * i + 1.0) + x * x;
  return base + (upper ? 1.0 : -1.0) * (de / 2.0) * std::sqrt(arg);
}

double zeeman_slope_hz_per_gauss(const HyperfineSpecies& species, int f, int m, double b_gauss) {
  check_quantum_numbers(species, f, m);
  const double i = species.nuclear_spin;
  const double de = species.hyperfine_splitting_hz;
  const double dxdb = (species.g_j - species.g_i) * kBohrMagnetonHzPerGauss / de;
  const double x = dxdb * b_gauss;
  const bool upper = f == static_cast<int>(std::lround(i + 0.5));

  double slope = species.g_i * kBohrMagnetonHzPerGauss * m;
  if (upper && std::abs(m) == f) {
    const double sign = m > 0 ? 1.0 : -1.0;
    const double inner = 1.0 + sign * x;
    slope += (de / 2.0) * (inner >= 0 ? sign : -sign) * dxdb;
    return slope;
  }
  const double arg = 1.0 + 4.0 * m * x / (2.0 * i + 1.0) + x * x;
  const double darg = 4.0 * m * dxdb / (2.0 * i + 1.0) + 2.0 * x * dxdb;
  slope += (upper ? 1.0 : -1.0) * (de / 4.0) * darg / std::sqrt(arg);
  return slope;
}

PairShiftAnalysis pair_shift_analysis(const HyperfineSpecies& species, int m, double b_max_gauss,
                                      int points) {
  const double i = species.nuclear_spin;
  const int f_low = static_cast<int>(std::lround(i - 0.5));
  const int f_high = f_low + 1;
  if (std::abs(m) > f_low) {
    throw std::invalid_argument("pair member |f, m> is out of range for the lower manifold");
  }
  if (b_max_gauss <= 0.0 || points < 3) {
    throw std::invalid_argument("need a positive field range and at least 3 points");
  }

  PairShiftAnalysis out;
  out.linear_low_hz_per_gauss = zeeman_slope_hz_per_gauss(species, f_low, m, 0.0);
  out.linear_high_hz_per_gauss = zeeman_slope_hz_per_gauss(species, f_high, -m, 0.0);
  out.linear_difference_hz_per_gauss =
      out.linear_high_hz_per_gauss - out.linear_low_hz_per_gauss;
  const double denom =
      std::abs(out.linear_low_hz_per_gauss) + std::abs(out.linear_high_hz_per_gauss);
  out.relative_linear_difference =
      denom > 0.0 ? std::abs(out.linear_difference_hz_per_gauss) / denom : 0.0;
  out.nuclear_term_bound =
      std::abs(species.g_i * (2.0 * i + 1.0) / (species.g_j - species.g_i));

  // differential quadratic coefficient from the curvature at B = 0
  {
    const double h = b_max_gauss * 1e-4;
    auto diff = [&](double b) {
      return zeeman_energy_hz(species, f_high, -m, b) - zeeman_energy_hz(species, f_low, m, b);
    };
    out.quadratic_differential_hz_per_gauss2 =
        (diff(2.0 * h) - 2.0 * diff(h) + diff(0.0)) / (2.0 * h * h);
  }

  auto diff_slope = [&](double b) {
    return zeeman_slope_hz_per_gauss(species, f_high, -m, b) -
           zeeman_slope_hz_per_gauss(species, f_low, m, b);
  };

  out.curve.reserve(points);
  double prev_b = 0.0;
  double prev_slope = diff_slope(0.0);
  for (int k = 0; k < points; ++k) {
    const double b = b_max_gauss * double(k + 1) / double(points);
    out.curve.push_back({b, zeeman_energy_hz(species, f_low, m, b),
                         zeeman_energy_hz(species, f_high, -m, b),
                         zeeman_energy_hz(species, f_high, -m, b) -
                             zeeman_energy_hz(species, f_low, m, b)});
    const double slope = diff_slope(b);
    if (!out.magic_field_gauss && prev_slope * slope < 0.0) {
      // bisect the stationary point of the differential shift
      double lo = prev_b, hi = b, slo = prev_slope;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double smid = diff_slope(mid);
        if (slo * smid <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
          slo = smid;
        }
      }
      out.magic_field_gauss = 0.5 * (lo + hi);
    }
    prev_b = b;
    prev_slope = slope;
  }
  return out;
}

}  // namespace eqec
