#include "eqec/levels.hpp"

#include <algorithm>

namespace eqec {

std::string Level::name() const {
  switch (kind_) {
    case LevelKind::Reservoir:
      return "s";
    case LevelKind::Leaked:
      return "leak";
    case LevelKind::Rydberg:
      switch (static_cast<RydbergId>(index_)) {
        case RydbergId::R: return "r";
        case RydbergId::R0: return "r0";
        case RydbergId::R1: return "r1";
      }
      return "r?";
    case LevelKind::Qubit:
      return std::to_string(bit_) + "_" + std::to_string(index_);
  }
  return "?";
}

std::optional<Level> Level::parse(std::string_view token) {
  if (token == "s") return reservoir();
  if (token == "leak") return leaked();
  if (token == "r") return rydberg(RydbergId::R);
  if (token == "r0") return rydberg(RydbergId::R0);
  if (token == "r1") return rydberg(RydbergId::R1);
  auto sep = token.find('_');
  if (sep == std::string_view::npos || sep == 0 || sep + 1 >= token.size()) {
    return std::nullopt;
  }
  int bit = 0, index = 0;
  try {
    bit = std::stoi(std::string(token.substr(0, sep)));
    index = std::stoi(std::string(token.substr(sep + 1)));
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if ((bit != 0 && bit != 1) || index < 1) return std::nullopt;
  return qubit(index, bit);
}

RegisterConfig::RegisterConfig(int n_qubits, int n_atoms,
                               std::vector<RydbergLevelSpec> rydberg_levels,
                               double detector_efficiency)
    : n_qubits_(n_qubits),
      n_atoms_(n_atoms),
      rydberg_levels_(std::move(rydberg_levels)),
      detector_efficiency_(detector_efficiency) {
  if (n_qubits_ < 1) throw std::invalid_argument("n_qubits must be positive");
  if (n_atoms_ < n_qubits_ + 2) {
    throw std::invalid_argument(
        "n_atoms must be at least n_qubits + 2 (reservoir needed for encoding and refills)");
  }
  if (detector_efficiency_ < 0.0 || detector_efficiency_ > 1.0) {
    throw std::invalid_argument("detector_efficiency must lie in [0, 1]");
  }
  for (RydbergId required : {RydbergId::R, RydbergId::R0, RydbergId::R1}) {
    auto it = std::find_if(rydberg_levels_.begin(), rydberg_levels_.end(),
                           [&](const RydbergLevelSpec& spec) { return spec.id == required; });
    if (it == rydberg_levels_.end()) {
      throw std::invalid_argument("rydberg_levels must include r, r0 and r1");
    }
  }
  for (const auto& spec : rydberg_levels_) {
    if (!spec.blockading) {
      throw std::invalid_argument("every rydberg level must be blockading");
    }
  }
}

std::vector<Level> RegisterConfig::ensemble_levels() const {
  std::vector<Level> levels;
  levels.push_back(Level::reservoir());
  for (int i = 1; i <= n_qubits_; ++i) {
    levels.push_back(Level::qubit(i, 0));
    levels.push_back(Level::qubit(i, 1));
  }
  for (const auto& spec : rydberg_levels_) {
    levels.push_back(Level::rydberg(spec.id));
  }
  return levels;
}

}  // namespace eqec
