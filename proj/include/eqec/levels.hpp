#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eqec {

// Internal atomic levels of the (2N+1)+3 level scheme: one reservoir level
// |s>, qubit level pairs {|0_i>, |1_i>} for i = 1..N, and a set of Rydberg
// levels used for blockade-mediated operations. A fourth kind, "leaked",
// stands for any single-atom state orthogonal to all of the above; it is
// reachable only by the disturbance channel and couples to no drive.

enum class LevelKind : std::uint8_t { Reservoir, Qubit, Rydberg, Leaked };

enum class RydbergId : std::uint8_t { R = 0, R0 = 1, R1 = 2 };

class Level {
 public:
  static Level reservoir() { return Level(LevelKind::Reservoir, 0, 0); }
  static Level qubit(int index, int bit) {
    if (index < 1) throw std::invalid_argument("qubit index must be >= 1");
    if (bit != 0 && bit != 1) throw std::invalid_argument("qubit bit must be 0 or 1");
    return Level(LevelKind::Qubit, static_cast<std::uint8_t>(index),
                 static_cast<std::uint8_t>(bit));
  }
  static Level rydberg(RydbergId id) {
    return Level(LevelKind::Rydberg, static_cast<std::uint8_t>(id), 0);
  }
  static Level leaked() { return Level(LevelKind::Leaked, 0, 0); }

  LevelKind kind() const { return kind_; }
  bool is_reservoir() const { return kind_ == LevelKind::Reservoir; }
  bool is_qubit() const { return kind_ == LevelKind::Qubit; }
  bool is_rydberg() const { return kind_ == LevelKind::Rydberg; }
  bool is_leaked() const { return kind_ == LevelKind::Leaked; }

  int qubit_index() const {
    if (!is_qubit()) throw std::logic_error("not a qubit level");
    return index_;
  }
  int bit() const {
    if (!is_qubit()) throw std::logic_error("not a qubit level");
    return bit_;
  }
  RydbergId rydberg_id() const {
    if (!is_rydberg()) throw std::logic_error("not a rydberg level");
    return static_cast<RydbergId>(index_);
  }

  // "0_3" = qubit 3 bit 0; "s", "r", "r0", "r1", "leak".
  std::string name() const;
  static std::optional<Level> parse(std::string_view token);

  auto operator<=>(const Level&) const = default;

 private:
  Level(LevelKind kind, std::uint8_t index, std::uint8_t bit)
      : kind_(kind), index_(index), bit_(bit) {}

  LevelKind kind_;
  std::uint8_t index_;
  std::uint8_t bit_;
};

struct RydbergLevelSpec {
  RydbergId id;
  bool blockading = true;
};

// Static description of one ensemble register: K atoms, N qubit manifolds,
// the available Rydberg levels (all of which must block further Rydberg
// excitation), and the efficiency of the projective Rydberg-content detector.
class RegisterConfig {
 public:
  RegisterConfig(int n_qubits, int n_atoms,
                 std::vector<RydbergLevelSpec> rydberg_levels = default_rydberg_levels(),
                 double detector_efficiency = 1.0);

  int n_qubits() const { return n_qubits_; }
  int n_atoms() const { return n_atoms_; }
  double detector_efficiency() const { return detector_efficiency_; }
  const std::vector<RydbergLevelSpec>& rydberg_levels() const { return rydberg_levels_; }

  // Every level an ensemble atom can occupy, in the canonical order used by
  // the text serialization format and the full-space oracle:
  // s, 0_1, 1_1, ..., 0_N, 1_N, r, r0, r1.
  std::vector<Level> ensemble_levels() const;

  static std::vector<RydbergLevelSpec> default_rydberg_levels() {
    return {{RydbergId::R, true}, {RydbergId::R0, true}, {RydbergId::R1, true}};
  }

 private:
  int n_qubits_;
  int n_atoms_;
  std::vector<RydbergLevelSpec> rydberg_levels_;
  double detector_efficiency_;
};

}  // namespace eqec
