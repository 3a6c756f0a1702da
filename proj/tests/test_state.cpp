#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "eqec/state.hpp"

using namespace eqec;

namespace {

HybridBasisState occ(std::vector<std::pair<Level, int>> counts,
                     std::optional<Level> dist = std::nullopt) {
  return HybridBasisState(OccupationVector(std::move(counts)), dist);
}

}  // namespace

TEST_CASE("register config invariants") {
  CHECK_NOTHROW(RegisterConfig(1, 3));
  CHECK_THROWS_AS(RegisterConfig(1, 2), std::invalid_argument);   // K < N + 2
  CHECK_THROWS_AS(RegisterConfig(0, 10), std::invalid_argument);
  CHECK_THROWS_AS(RegisterConfig(1, 10, RegisterConfig::default_rydberg_levels(), 1.5),
                  std::invalid_argument);
  auto levels = RegisterConfig::default_rydberg_levels();
  levels[1].blockading = false;
  CHECK_THROWS_AS(RegisterConfig(1, 10, levels), std::invalid_argument);
  levels = {{RydbergId::R, true}};
  CHECK_THROWS_AS(RegisterConfig(1, 10, levels), std::invalid_argument);
}

TEST_CASE("level naming round-trips") {
  for (Level l : {Level::reservoir(), Level::qubit(1, 0), Level::qubit(3, 1),
                  Level::rydberg(RydbergId::R0), Level::leaked()}) {
    auto parsed = Level::parse(l.name());
    REQUIRE(parsed.has_value());
    CHECK(*parsed == l);
  }
  CHECK(!Level::parse("2_1").has_value());
  CHECK(!Level::parse("bogus").has_value());
}

TEST_CASE("blockade truncation is enforced at the basis level") {
  CHECK_THROWS(PureState::single(
      occ({{Level::rydberg(RydbergId::R0), 1}, {Level::rydberg(RydbergId::R1), 1}})));
  CHECK_THROWS(PureState::single(
      occ({{Level::rydberg(RydbergId::R0), 1}}, Level::rydberg(RydbergId::R1))));
  CHECK_NOTHROW(PureState::single(occ({{Level::rydberg(RydbergId::R0), 1}}, Level::qubit(1, 0))));
}

TEST_CASE("logical zero state for K=3, N=1 is the single occupation component") {
  RegisterConfig config(1, 3);
  std::vector<QubitAmplitudes> amps = {{1.0, 0.0}};
  PureState state = new_logical_state(config, amps);
  REQUIRE(state.size() == 1);
  auto basis = occ({{Level::qubit(1, 0), 1}, {Level::reservoir(), 2}});
  CHECK(std::abs(state.amplitude(basis) - Complex{1.0, 0.0}) < 1e-15);
}

TEST_CASE("logical one state for K=2, N=1") {
  RegisterConfig config(1, 3);
  std::vector<QubitAmplitudes> amps = {{0.0, 1.0}};
  PureState state = logical_state_at(config, amps, 2);
  auto basis = occ({{Level::qubit(1, 1), 1}, {Level::reservoir(), 1}});
  CHECK(std::abs(state.amplitude(basis) - Complex{1.0, 0.0}) < 1e-15);
}

TEST_CASE("two-qubit product state expands into the hand-computed components") {
  // oracle: expand (a1|0> + b1|1>)(a2|0> + b2|1>) by hand
  RegisterConfig config(2, 6);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<QubitAmplitudes> amps = {{inv_sqrt2, inv_sqrt2}, {1.0, 0.0}};
  PureState state = new_logical_state(config, amps);
  REQUIRE(state.size() == 2);
  auto c00 = occ({{Level::qubit(1, 0), 1}, {Level::qubit(2, 0), 1}, {Level::reservoir(), 4}});
  auto c10 = occ({{Level::qubit(1, 1), 1}, {Level::qubit(2, 0), 1}, {Level::reservoir(), 4}});
  CHECK(std::abs(state.amplitude(c00) - inv_sqrt2) < 1e-15);
  CHECK(std::abs(state.amplitude(c10) - inv_sqrt2) < 1e-15);
}

TEST_CASE("non-normalized qubit amplitudes are rejected") {
  RegisterConfig config(1, 4);
  std::vector<QubitAmplitudes> amps = {{0.9, 0.2}};
  CHECK_THROWS_AS(new_logical_state(config, amps), std::invalid_argument);
}

TEST_CASE("inner products: normalization, orthogonality, sector orthogonality") {
  RegisterConfig config(1, 20);
  std::vector<QubitAmplitudes> zero = {{1.0, 0.0}};
  std::vector<QubitAmplitudes> one = {{0.0, 1.0}};
  PureState z_full = new_logical_state(config, zero);
  PureState o_full = new_logical_state(config, one);
  PureState z_small = logical_state_at(config, zero, 19);

  CHECK(std::abs(inner_product(z_full, z_full) - Complex{1.0, 0.0}) < 1e-15);
  CHECK(std::abs(inner_product(z_full, o_full)) == 0.0);
  CHECK(std::abs(inner_product(z_full, z_small)) == 0.0);  // different sectors

  // sesquilinearity
  PureState mixed;
  mixed.add(occ({{Level::qubit(1, 0), 1}, {Level::reservoir(), 19}}), Complex{0.0, 0.6});
  mixed.add(occ({{Level::qubit(1, 1), 1}, {Level::reservoir(), 19}}), Complex{0.8, 0.0});
  CHECK(std::abs(inner_product(z_full, mixed) - Complex{0.0, 0.6}) < 1e-15);
  CHECK(std::abs(inner_product(mixed, z_full) - Complex{0.0, -0.6}) < 1e-15);
}

TEST_CASE("fidelity: exact loss population law (K-1)/K") {
  // Post-loss superposition (1/sqrt K)|S> + sqrt((K-1)/K)|0bar> at K-1 atoms
  const int k = 20;
  RegisterConfig config(1, k);
  std::vector<QubitAmplitudes> zero = {{1.0, 0.0}};
  PureState post_loss;
  post_loss.add(occ({{Level::reservoir(), k - 1}}), 1.0 / std::sqrt(double(k)));
  post_loss.add(occ({{Level::qubit(1, 0), 1}, {Level::reservoir(), k - 2}}),
                std::sqrt(double(k - 1) / double(k)));
  post_loss.check_normalized();

  double fid = fidelity_to_logical(post_loss, zero, config, SectorPolicy::fixed(k - 1));
  CHECK(fid == doctest::Approx(double(k - 1) / double(k)).epsilon(1e-14));
  CHECK(fidelity_to_logical(post_loss, zero, config, SectorPolicy::best()) ==
        doctest::Approx(double(k - 1) / double(k)).epsilon(1e-14));
}

TEST_CASE("fidelity: trivial self-fidelity and empty-state error") {
  RegisterConfig config(1, 10);
  std::vector<QubitAmplitudes> zero = {{1.0, 0.0}};
  PureState state = new_logical_state(config, zero);
  CHECK(fidelity_to_logical(state, zero, config, SectorPolicy::fixed(10)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  PureState empty;
  CHECK_THROWS_AS(fidelity_to_logical(empty, zero, config, SectorPolicy::fixed(10)),
                  std::invalid_argument);
}

TEST_CASE("fidelity: parked bystander atom counts toward register content") {
  RegisterConfig config(1, 10);
  std::vector<QubitAmplitudes> zero = {{1.0, 0.0}};
  // |s>_dist (x) |0bar>_9 : register content is logical 0 at 10 total atoms
  PureState parked = PureState::single(
      occ({{Level::qubit(1, 0), 1}, {Level::reservoir(), 8}}, Level::reservoir()));
  CHECK(fidelity_to_logical(parked, zero, config, SectorPolicy::fixed(10)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fidelity_to_logical(parked, zero, config, SectorPolicy::fixed(10, false)) == 0.0);
  // a distinguished atom in a register level never counts
  PureState bad = PureState::single(
      occ({{Level::qubit(1, 0), 1}, {Level::reservoir(), 8}}, Level::qubit(1, 0)));
  CHECK(fidelity_to_logical(bad, zero, config, SectorPolicy::fixed(10)) == 0.0);
}

TEST_CASE("norm bookkeeping: prune threshold and normalization") {
  PureState state;
  state.add(occ({{Level::reservoir(), 3}}), 1.0);
  state.add(occ({{Level::qubit(1, 0), 1}, {Level::reservoir(), 2}}), 1e-16);
  state.prune();
  CHECK(state.size() == 1);
  state.add(occ({{Level::qubit(1, 1), 1}, {Level::reservoir(), 2}}), 1.0);
  state.normalize();
  CHECK(state.squared_norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("state text serialization round-trips") {
  RegisterConfig config(2, 8);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    PureState state;
    state.add(occ({{Level::qubit(1, 0), 1}, {Level::qubit(2, 1), 1}, {Level::reservoir(), 6}}),
              Complex{dist(rng), dist(rng)});
    state.add(occ({{Level::qubit(1, 1), 1}, {Level::qubit(2, 1), 1}, {Level::reservoir(), 5}},
                  Level::leaked()),
              Complex{dist(rng), dist(rng)});
    state.add(occ({{Level::rydberg(RydbergId::R0), 1}, {Level::qubit(2, 0), 1},
                   {Level::reservoir(), 6}}),
              Complex{dist(rng), dist(rng)});
    state.normalize();

    PureState back = state_from_text(state_to_text(state, config), config);
    REQUIRE(back.size() == state.size());
    for (const auto& [basis, amp] : state.amplitudes()) {
      CHECK(std::abs(back.amplitude(basis) - amp) < 1e-15);
    }
  }
}

TEST_CASE("sector keys distinguish atom count and distinguished flag") {
  auto a = occ({{Level::reservoir(), 5}});
  auto b = occ({{Level::reservoir(), 4}}, Level::reservoir());
  CHECK(a.sector().atom_count == 5);
  CHECK(b.sector().atom_count == 5);
  CHECK(a.sector() != b.sector());
  CHECK(b.manifold_count(1) == 0);
  auto c = occ({{Level::qubit(1, 1), 1}, {Level::reservoir(), 3}}, Level::qubit(1, 0));
  CHECK(c.manifold_count(1) == 2);
}
