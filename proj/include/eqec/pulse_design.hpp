#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace eqec {

// A composite pulse: ordered (area, phase) pairs applied with a common Rabi
// scale. The same sequence driven at two different Rabi scales produces two
// different SU(2) responses; the design goal is a sequence that acts as the
// identity (up to a global phase) at scale 1 while fully transferring
// population at scale `ratio`.
struct PulseParams {
  std::vector<std::pair<double, double>> pulses;  // (theta_k > 0, phi_k in [0, 2pi))

  std::size_t size() const { return pulses.size(); }
};

struct DesignObjective {
  double ratio = std::numbers::sqrt2;
  double tolerance = 1e-8;
};

struct DiscriminationReport {
  double infidelity_identity = 1.0;  // 1 - |u00|^2 of the scale-1 response
  double infidelity_transfer = 1.0;  // 1 - |u10|^2 of the scale-ratio response
  double slow_global_phase = 0.0;    // arg(u00) of the scale-1 response
  double fast_transfer_phase = 0.0;  // arg(u10) of the scale-ratio response
};

class DesignError : public std::runtime_error {
 public:
  DesignError(const std::string& message, DiscriminationReport best)
      : std::runtime_error(message), best_found(best) {}
  DiscriminationReport best_found;
};

// Product of SU(2) rotations R(scale * theta_k, phi_k), first pulse applied
// first: U = R_n ... R_1 with
//   R(theta, phi) = [[cos(t/2), -i e^{-i phi} sin(t/2)],
//                    [-i e^{i phi} sin(t/2), cos(t/2)]],  t = theta.
Eigen::Matrix2cd su2_response(const PulseParams& params, double scale);

DiscriminationReport verify_discriminator(const PulseParams& params,
                                          const DesignObjective& objective);

// Multi-start local search over (theta_k, phi_k), refined by a damped
// Gauss-Newton polish, growing the pulse count until both infidelities meet
// the tolerance. Deterministic for a fixed (objective, max_pulses, seed).
// Throws DesignError when the budget is exhausted (and always for ratio 1,
// where identity and transfer are contradictory).
PulseParams design_discriminator(const DesignObjective& objective, int max_pulses,
                                 std::uint64_t seed);

}  // namespace eqec
