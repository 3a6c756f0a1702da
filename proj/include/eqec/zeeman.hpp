#pragma once

#include <optional>
#include <string>
#include <vector>

namespace eqec {

// Ground-state hyperfine structure of an alkali species. Energies are
// reported in Hz (E/h), fields in gauss.
struct HyperfineSpecies {
  std::string name;
  double nuclear_spin;             // I, half-integer
  double hyperfine_splitting_hz;   // Delta E_hf / h
  double g_j;                      // electronic g-factor
  double g_i;                      // nuclear g-factor (mu_B convention)

  // Constants: Steck, "Rubidium 87 D Line Data" / "Cesium D Line Data".
  static HyperfineSpecies rb87();
  static HyperfineSpecies cs133();
  static std::optional<HyperfineSpecies> by_name(const std::string& name);
};

inline constexpr double kBohrMagnetonHzPerGauss = 1.3996244936e6;

// Breit-Rabi energy E(f, m; B)/h in Hz for the ground hyperfine manifolds
// f = I -/+ 1/2. Stretched states use the exact linear closed form.
double zeeman_energy_hz(const HyperfineSpecies& species, int f, int m, double b_gauss);

// dE/dB in Hz/gauss, analytic.
double zeeman_slope_hz_per_gauss(const HyperfineSpecies& species, int f, int m, double b_gauss);

struct PairShiftPoint {
  double b_gauss;
  double e_low_hz;   // |f, m>
  double e_high_hz;  // |f+1, -m>
  double diff_hz;
};

// Analysis of the pair {|f, m>, |f+1, -m>} with f = I - 1/2: the B -> 0
// linear coefficients of both members, their difference (the residual nuclear
// term), the differential quadratic coefficient, the differential shift curve
// and any stationary point of it inside (0, b_max].
struct PairShiftAnalysis {
  double linear_low_hz_per_gauss = 0.0;
  double linear_high_hz_per_gauss = 0.0;
  double linear_difference_hz_per_gauss = 0.0;
  double relative_linear_difference = 0.0;  // |c1-c2| / (|c1|+|c2|)
  double nuclear_term_bound = 0.0;          // |g_i (2I+1) / (g_j - g_i)|
  double quadratic_differential_hz_per_gauss2 = 0.0;
  std::optional<double> magic_field_gauss;
  std::vector<PairShiftPoint> curve;
};

PairShiftAnalysis pair_shift_analysis(const HyperfineSpecies& species, int m, double b_max_gauss,
                                      int points = 400);

}  // namespace eqec
