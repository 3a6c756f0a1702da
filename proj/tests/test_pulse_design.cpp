#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "eqec/pulse_design.hpp"

using namespace eqec;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double sqrt2 = std::numbers::sqrt2;
using Complex = std::complex<double>;
}  // namespace

TEST_CASE("su2 response: single 2pi pulse is -I at scale 1") {
  PulseParams params{{{2.0 * pi, 0.4}}};
  auto u = su2_response(params, 1.0);
  CHECK(std::abs(u(0, 0) - Complex(-1.0, 0.0)) < 1e-14);
  CHECK(std::abs(u(1, 0)) < 1e-14);
  CHECK(std::abs(std::abs(u.determinant()) - 1.0) < 1e-12);
}

TEST_CASE("su2 response: 2pi pulse at scale sqrt2 transfers sin^2(sqrt2 pi)") {
  // closed form: a rotation by 2 sqrt2 pi, transfer sin^2(sqrt2 pi) = 0.9291,
  // so a single pulse cannot satisfy both objectives
  PulseParams params{{{2.0 * pi, 0.0}}};
  auto u = su2_response(params, sqrt2);
  const double transfer = std::norm(u(1, 0));
  const double expected = std::pow(std::sin(sqrt2 * pi), 2);
  CHECK(transfer == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.92911).epsilon(1e-4));

  DesignObjective objective;
  auto report = verify_discriminator(params, objective);
  CHECK(report.infidelity_identity == doctest::Approx(0.0));
  CHECK(report.infidelity_transfer == doctest::Approx(1.0 - expected).epsilon(1e-12));
  CHECK(1.0 - expected == doctest::Approx(0.07089).epsilon(1e-3));
}

TEST_CASE("su2 response: same-axis areas add") {
  PulseParams split{{{0.9, 0.3}, {1.4, 0.3}}};
  PulseParams joined{{{2.3, 0.3}}};
  auto a = su2_response(split, 1.0);
  auto b = su2_response(joined, 1.0);
  CHECK((a - b).norm() < 1e-14);
}

TEST_CASE("verify_discriminator is consistent with su2_response for random params") {
  PulseParams params{{{1.1, 0.2}, {2.7, 4.0}, {0.6, 1.9}}};
  DesignObjective objective;
  auto report = verify_discriminator(params, objective);
  auto slow = su2_response(params, 1.0);
  auto fast = su2_response(params, sqrt2);
  CHECK(report.infidelity_identity ==
        doctest::Approx(1.0 - std::norm(slow(0, 0))).epsilon(1e-12));
  CHECK(report.infidelity_transfer ==
        doctest::Approx(1.0 - std::norm(fast(1, 0))).epsilon(1e-12));
  CHECK(report.infidelity_identity >= 0.0);
  CHECK(report.infidelity_identity <= 1.0);
  CHECK(report.infidelity_transfer >= 0.0);
  CHECK(report.infidelity_transfer <= 1.0);
}

TEST_CASE("design finds a discriminating sequence for ratio sqrt2 within 7 pulses") {
  DesignObjective objective;  // ratio sqrt2, tolerance 1e-8
  PulseParams params = design_discriminator(objective, 7, 20240817);
  REQUIRE(params.size() >= 2);
  REQUIRE(params.size() <= 7);
  auto report = verify_discriminator(params, objective);
  CHECK(report.infidelity_identity <= objective.tolerance);
  CHECK(report.infidelity_transfer <= objective.tolerance);
}

TEST_CASE("design is deterministic for a fixed seed") {
  DesignObjective objective;
  PulseParams a = design_discriminator(objective, 7, 99);
  PulseParams b = design_discriminator(objective, 7, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.pulses[k].first == b.pulses[k].first);
    CHECK(a.pulses[k].second == b.pulses[k].second);
  }
}

TEST_CASE("ratio 1 is rejected as contradictory") {
  DesignObjective objective;
  objective.ratio = 1.0;
  CHECK_THROWS_AS(design_discriminator(objective, 7, 1), DesignError);
}

TEST_CASE("ratio 2 with a single 2pi pulse cannot transfer; the design uses more pulses") {
  // at scale 2 a 2pi pulse rotates by 4pi = identity: no transfer from one pulse
  PulseParams single{{{2.0 * pi, 0.0}}};
  auto u = su2_response(single, 2.0);
  CHECK(std::norm(u(1, 0)) < 1e-14);

  DesignObjective objective;
  objective.ratio = 2.0;
  PulseParams params = design_discriminator(objective, 7, 7);
  REQUIRE(params.size() >= 2);
  auto report = verify_discriminator(params, objective);
  CHECK(report.infidelity_identity <= objective.tolerance);
  CHECK(report.infidelity_transfer <= objective.tolerance);
}

TEST_CASE("max_pulses below 2 is invalid") {
  DesignObjective objective;
  CHECK_THROWS_AS(design_discriminator(objective, 1, 1), std::invalid_argument);
}
