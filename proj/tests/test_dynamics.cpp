#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "eqec/dynamics.hpp"

using namespace eqec;

namespace {

constexpr double pi = std::numbers::pi;

HybridBasisState occ(std::vector<std::pair<Level, int>> counts,
                     std::optional<Level> dist = std::nullopt) {
  return HybridBasisState(OccupationVector(std::move(counts)), dist);
}

const Level s = Level::reservoir();
const Level q10 = Level::qubit(1, 0);
const Level q11 = Level::qubit(1, 1);
const Level r0 = Level::rydberg(RydbergId::R0);
const Level r1 = Level::rydberg(RydbergId::R1);

double fidelity(const PureState& a, const PureState& b) {
  return std::norm(inner_product(a, b));
}

}  // namespace

TEST_CASE("collective matrix element is sqrt(K-1) relative to the single atom") {
  for (int k : {4, 10, 25, 50}) {
    // |S>_{K-1}: the s -> r0 move carries the bosonic factor sqrt(K-1)
    PureState collective = PureState::single(occ({{s, k - 1}}));
    Drive drive({{s, r0, 0.0, 1.0}}, pi);
    auto basis = reachable_basis(collective, drive);
    auto m = build_coupling_matrix(drive, basis);
    REQUIRE(basis.size() == 2);
    double element = std::abs(m(1, 0));
    CHECK(element == doctest::Approx(std::sqrt(double(k - 1))).epsilon(1e-15));
  }
}

TEST_CASE("distinguished atom coupled on both register transitions splits at sqrt 2") {
  // |0>_dist (x) |0bar>_{K-1} under 0<->r0, 1<->r1: a three-state chain whose
  // nonzero eigenvalues are +-sqrt2, against +-1 for the singly coupled block
  const int k = 12;
  PureState doubly = PureState::single(occ({{q10, 1}, {s, k - 2}}, q10));
  Drive drive({{q10, r0, 0.0, 1.0}, {q11, r1, 0.0, 1.0}}, pi);
  auto basis = reachable_basis(doubly, drive);
  auto m = build_coupling_matrix(drive, basis);
  REQUIRE(basis.size() == 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  std::vector<double> eig(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(eig.begin(), eig.end());
  CHECK(eig[0] == doctest::Approx(-std::numbers::sqrt2).epsilon(1e-15));
  CHECK(std::abs(eig[1]) < 1e-14);
  CHECK(eig[2] == doctest::Approx(std::numbers::sqrt2).epsilon(1e-15));

  // |s>_dist (x) |0bar>: the distinguished atom is dark, the block is scale 1
  PureState singly = PureState::single(occ({{q10, 1}, {s, k - 2}}, s));
  auto basis1 = reachable_basis(singly, drive);
  auto m1 = build_coupling_matrix(drive, basis1);
  REQUIRE(basis1.size() == 2);
  CHECK(std::abs(m1(1, 0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("basis not closed is reported") {
  PureState state = PureState::single(occ({{s, 3}}));
  Drive drive({{s, r0, 0.0, 1.0}}, pi);
  std::vector<HybridBasisState> truncated = {occ({{s, 3}})};
  CHECK_THROWS_AS(build_coupling_matrix(drive, truncated), std::invalid_argument);
}

TEST_CASE("2pi pulse on an isolated pair multiplies amplitudes by -1") {
  PureState state = PureState::single(occ({{q10, 1}, {s, 2}}));
  PureState evolved = apply_drive(state, Drive({{q10, q11, 0.0, 1.0}}, 2.0 * pi));
  CHECK(std::abs(evolved.amplitude(occ({{q10, 1}, {s, 2}})) - Complex{-1.0, 0.0}) < 1e-12);
}

TEST_CASE("pi pulse transfers with the -i convention phase") {
  PureState state = PureState::single(occ({{q10, 1}, {s, 2}}));
  PureState evolved = apply_drive(state, Drive({{q10, q11, 0.0, 1.0}}, pi));
  CHECK(std::abs(evolved.amplitude(occ({{q11, 1}, {s, 2}})) - Complex{0.0, -1.0}) < 1e-12);
}

TEST_CASE("collective pi pulse: complete transfer of the symmetric Rydberg component") {
  const int k = 26;  // K total atoms: 1 distinguished + (k-1) ensemble
  const double area = pi / std::sqrt(double(k - 1));

  // |eta>_dist (x) |rbar0>: ensemble {r0:1, s:K-2}, element sqrt(K-1), exact pi
  PureState collective = PureState::single(occ({{r0, 1}, {s, k - 2}}, q10));
  PureState evolved = apply_drive(collective, Drive({{s, r0, 0.0, 1.0}}, area));
  double stay = 0.0;
  for (const auto& [basis, amp] : evolved.amplitudes()) {
    if (basis.level_count(r0) > 0) stay += std::norm(amp);
  }
  CHECK(stay < 1e-20);
}

TEST_CASE("calibrated pulse on an isolated lone atom leaks sin^2(pi/(2 sqrt(K-1)))") {
  // pure two-level configuration: no reservoir atoms, so the only channel is
  // the distinguished atom's own r0 <-> s rotation by pi/sqrt(K-1)
  const int k = 26;
  const double area = pi / std::sqrt(double(k - 1));
  PureState lone = PureState::single(occ({{q10, k - 1}}, r0));
  PureState evolved = apply_drive(lone, Drive({{s, r0, 0.0, 1.0}}, area));
  double transferred = 0.0;
  for (const auto& [basis, amp] : evolved.amplitudes()) {
    if (basis.distinguished() == s) transferred += std::norm(amp);
  }
  const double expected = std::pow(std::sin(pi / (2.0 * std::sqrt(double(k - 1)))), 2);
  CHECK(transferred == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("calibrated pulse on the in-register lone atom follows the three-state chain") {
  // |r0>_dist (x) {q10:1, s:n}: once the distinguished atom de-excites, the
  // reservoir can re-excite, giving the chain r0_d -- s_d -- (s_d, rbar0) with
  // elements (1, sqrt n). At area pi/sqrt(n+1) the eigenphases are -+pi/2 and
  //   P(stay) = (n/(n+1))^2, P(de-excited) = 1/(n+1), P(re-excited) = n/(n+1)^2.
  const int k = 26;
  const int n = k - 2;
  const double area = pi / std::sqrt(double(n + 1));
  PureState lone = PureState::single(occ({{q10, 1}, {s, n}}, r0));
  PureState evolved = apply_drive(lone, Drive({{s, r0, 0.0, 1.0}}, area));

  double p_stay = 0.0, p_deexcite = 0.0, p_reexcite = 0.0;
  for (const auto& [basis, amp] : evolved.amplitudes()) {
    if (basis.distinguished() == r0) {
      p_stay += std::norm(amp);
    } else if (basis.ensemble().count(r0) > 0) {
      p_reexcite += std::norm(amp);
    } else {
      p_deexcite += std::norm(amp);
    }
  }
  const double nn = double(n);
  CHECK(p_stay == doctest::Approx(nn * nn / ((nn + 1) * (nn + 1))).epsilon(1e-12));
  CHECK(p_deexcite == doctest::Approx(1.0 / (nn + 1)).epsilon(1e-12));
  CHECK(p_reexcite == doctest::Approx(nn / ((nn + 1) * (nn + 1))).epsilon(1e-12));
}

TEST_CASE("unitarity: norms and inner products preserved under random drives") {
  RegisterConfig config(2, 8);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  std::vector<QubitAmplitudes> amps_a = {{0.6, 0.8}, {1.0, 0.0}};
  std::vector<QubitAmplitudes> amps_b = {{1.0 / std::sqrt(2), Complex{0.0, 1.0 / std::sqrt(2)}},
                                         {0.0, 1.0}};
  PureState a = new_logical_state(config, amps_a);
  PureState b = new_logical_state(config, amps_b);
  Complex overlap_before = inner_product(a, b);

  std::vector<std::pair<Level, Level>> pairs = {{q10, q11}, {q10, r0}, {q11, r1},
                                                {s, r0},     {s, Level::rydberg(RydbergId::R)}};
  for (int step = 0; step < 12; ++step) {
    const auto& [la, lb] = pairs[rng() % pairs.size()];
    Drive drive({{la, lb, angle(rng), 1.0}}, angle(rng));
    a = apply_drive(a, drive);
    b = apply_drive(b, drive);
    CHECK(std::abs(a.squared_norm() - 1.0) < 1e-12);
    CHECK(std::abs(b.squared_norm() - 1.0) < 1e-12);
  }
  CHECK(std::abs(inner_product(a, b) - overlap_before) < 1e-10);
}

TEST_CASE("single qubit gate: pi flip, composition law, Hadamard map") {
  RegisterConfig config(1, 5);
  std::vector<QubitAmplitudes> zero = {{1.0, 0.0}};
  std::vector<QubitAmplitudes> one = {{0.0, 1.0}};
  PureState z = new_logical_state(config, zero);

  PureState flipped = single_qubit_gate(z, 1, pi, 0.0);
  CHECK(fidelity(flipped, new_logical_state(config, one)) == doctest::Approx(1.0).epsilon(1e-12));

  // composition: two pi/2 rotations about the same axis equal one pi rotation
  PureState twice = single_qubit_gate(single_qubit_gate(z, 1, pi / 2, 0.7), 1, pi / 2, 0.7);
  PureState once = single_qubit_gate(z, 1, pi, 0.7);
  CHECK(fidelity(twice, once) == doctest::Approx(1.0).epsilon(1e-12));

  // R(pi/2, pi/2) maps |0bar> to (|0bar> + |1bar>)/sqrt2
  PureState had = single_qubit_gate(z, 1, pi / 2, pi / 2);
  std::vector<QubitAmplitudes> plus = {{1.0 / std::sqrt(2), 1.0 / std::sqrt(2)}};
  CHECK(fidelity(had, new_logical_state(config, plus)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single qubit gate SU(2) group law on sampled rotations") {
  // oracle: multiply the 2x2 rotation matrices directly
  auto rot = [](double theta, double phi) {
    Eigen::Matrix2cd r;
    const double c = std::cos(theta / 2), sn = std::sin(theta / 2);
    const Complex e{std::cos(phi), std::sin(phi)};
    r << c, Complex{0, -1} * std::conj(e) * sn, Complex{0, -1} * e * sn, c;
    return r;
  };
  RegisterConfig config(1, 4);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  for (int trial = 0; trial < 8; ++trial) {
    double t1 = angle(rng), p1 = angle(rng), t2 = angle(rng), p2 = angle(rng);
    Eigen::Matrix2cd u = rot(t2, p2) * rot(t1, p1);
    Eigen::Vector2cd in(0.37, std::sqrt(1.0 - 0.37 * 0.37));
    Eigen::Vector2cd expect = u * in;

    std::vector<QubitAmplitudes> amps = {{in[0], in[1]}};
    PureState state = new_logical_state(config, amps);
    state = single_qubit_gate(state, 1, t1, p1);
    state = single_qubit_gate(state, 1, t2, p2);
    Complex a0 = state.amplitude(occ({{q10, 1}, {s, 3}}));
    Complex a1 = state.amplitude(occ({{q11, 1}, {s, 3}}));
    CHECK(std::abs(a0 - expect[0]) < 1e-10);
    CHECK(std::abs(a1 - expect[1]) < 1e-10);
  }
}

TEST_CASE("single qubit gate rejects manifolds that are not singly occupied") {
  PureState empty_manifold = PureState::single(occ({{s, 5}}));
  CHECK_THROWS_AS(single_qubit_gate(empty_manifold, 1, pi, 0.0), std::runtime_error);
}

TEST_CASE("cz gate: phase pattern (1,-1,-1,-1) raw, (1,1,1,-1) after Z_i Z_j") {
  RegisterConfig config(2, 6);
  // evaluate the raw phase on each logical basis word
  std::vector<std::array<int, 2>> words = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  std::vector<Complex> raw;
  for (auto [b1, b2] : words) {
    std::vector<QubitAmplitudes> amps = {
        {b1 == 0 ? 1.0 : 0.0, b1 == 1 ? 1.0 : 0.0},
        {b2 == 0 ? 1.0 : 0.0, b2 == 1 ? 1.0 : 0.0},
    };
    PureState word = new_logical_state(config, amps);
    PureState out = cz_gate(word, 1, 2);
    raw.push_back(inner_product(word, out));
  }
  CHECK(std::abs(raw[0] - Complex{1.0, 0.0}) < 1e-10);
  CHECK(std::abs(raw[1] - Complex{-1.0, 0.0}) < 1e-10);
  CHECK(std::abs(raw[2] - Complex{-1.0, 0.0}) < 1e-10);
  CHECK(std::abs(raw[3] - Complex{-1.0, 0.0}) < 1e-10);
  // normalizing by the single-qubit pattern Z_i Z_j = diag(1,-1,-1,1) leaves
  // the controlled-Z pattern diag(1,1,1,-1)
  CHECK(std::abs(raw[1] * Complex{-1.0, 0.0} - Complex{1.0, 0.0}) < 1e-10);
  CHECK(std::abs(raw[3] * Complex{1.0, 0.0} - Complex{-1.0, 0.0}) < 1e-10);
}

TEST_CASE("cz gate applied twice is the identity") {
  RegisterConfig config(2, 7);
  std::vector<QubitAmplitudes> amps = {{0.6, 0.8}, {1.0 / std::sqrt(2), -1.0 / std::sqrt(2)}};
  PureState state = new_logical_state(config, amps);
  PureState twice = cz_gate(cz_gate(state, 1, 2), 1, 2);
  CHECK(fidelity(twice, state) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cz gate rejects occupied Rydberg levels at entry") {
  PureState bad = PureState::single(
      occ({{q10, 1}, {Level::qubit(2, 1), 1}, {Level::rydberg(RydbergId::R), 1}, {s, 3}}));
  CHECK_THROWS_AS(cz_gate(bad, 1, 2), std::runtime_error);
}

TEST_CASE("encode one atom: |S>_K to |0bar_1>, refill at K-1, double use rejected") {
  const int k = 9;
  PureState reservoir_state = PureState::single(occ({{s, k}}));
  PureState encoded = encode_one_atom(reservoir_state, q10);
  double on_target = std::norm(encoded.amplitude(occ({{q10, 1}, {s, k - 1}})));
  CHECK(on_target == doctest::Approx(1.0).epsilon(1e-12));

  // the refill step after loss: |S>_{K-1} -> |0bar>_{K-1}
  PureState smaller = PureState::single(occ({{s, k - 1}}));
  PureState refilled = encode_one_atom(smaller, q10);
  CHECK(std::norm(refilled.amplitude(occ({{q10, 1}, {s, k - 2}}))) ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(encode_one_atom(encoded, q10), std::runtime_error);
  CHECK_THROWS_AS(encode_one_atom(encoded, q11), std::runtime_error);
}

TEST_CASE("encode one atom with a parked bystander keeps the bright-state calibration") {
  // |s>_dist (x) |S>_{K-2} and |S>_{K-1} share the same total reservoir count,
  // so one calibrated pulse pair serves both components exactly
  const int k = 16;
  PureState mixed;
  mixed.add(occ({{s, k - 1}}), std::sqrt(0.75));
  mixed.add(occ({{s, k - 2}}, s), std::sqrt(0.25));
  PureState refilled = encode_one_atom(mixed, q10);
  // no Rydberg population may survive the two pi pulses
  double rydberg = 0.0;
  for (const auto& [basis, amp] : refilled.amplitudes()) {
    if (basis.rydberg_count() > 0) rydberg += std::norm(amp);
  }
  CHECK(rydberg < 1e-20);
  // manifold filled in every component
  for (const auto& [basis, amp] : refilled.amplitudes()) {
    CHECK(basis.manifold_count(1) == 1);
  }
}

TEST_CASE("blockade closure: no reachable state ever exceeds one Rydberg excitation") {
  RegisterConfig config(1, 6);
  std::vector<QubitAmplitudes> plus = {{1.0 / std::sqrt(2), 1.0 / std::sqrt(2)}};
  PureState state = new_logical_state(config, plus);
  Drive drive({{q10, r0, 0.3, 1.0}, {q11, r1, 1.1, 1.0}}, 1.7);
  for (const auto& basis : reachable_basis(state, drive)) {
    CHECK(basis.rydberg_count() <= 1);
  }
  PureState evolved = apply_drive(state, drive);
  evolved = apply_drive(evolved, Drive({{s, r0, 0.0, 1.0}}, 0.9));
  for (const auto& [basis, amp] : evolved.amplitudes()) {
    CHECK(basis.rydberg_count() <= 1);
  }
}
