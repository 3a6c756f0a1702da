#include "eqec/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eqec {

OccupationVector::OccupationVector(std::vector<std::pair<Level, int>> counts)
    : counts_(std::move(counts)) {
  std::erase_if(counts_, [](const auto& e) { return e.second == 0; });
  for (const auto& [level, count] : counts_) {
    if (count < 0) throw std::invalid_argument("negative occupation count");
    if (level.is_leaked()) {
      throw std::invalid_argument("leaked level is distinguished-atom only");
    }
  }
  std::sort(counts_.begin(), counts_.end());
  for (std::size_t i = 1; i < counts_.size(); ++i) {
    if (counts_[i - 1].first == counts_[i].first) {
      throw std::invalid_argument("duplicate level in occupation vector");
    }
  }
}

int OccupationVector::count(Level level) const {
  auto it = std::lower_bound(counts_.begin(), counts_.end(), level,
                             [](const auto& e, Level l) { return e.first < l; });
  return (it != counts_.end() && it->first == level) ? it->second : 0;
}

int OccupationVector::total() const {
  int sum = 0;
  for (const auto& [level, count] : counts_) sum += count;
  return sum;
}

int OccupationVector::rydberg_count() const {
  int sum = 0;
  for (const auto& [level, count] : counts_) {
    if (level.is_rydberg()) sum += count;
  }
  return sum;
}

OccupationVector OccupationVector::with_added(Level level, int delta) const {
  auto counts = counts_;
  auto it = std::lower_bound(counts.begin(), counts.end(), level,
                             [](const auto& e, Level l) { return e.first < l; });
  if (it != counts.end() && it->first == level) {
    it->second += delta;
    if (it->second < 0) throw std::logic_error("occupation went negative");
    if (it->second == 0) counts.erase(it);
  } else {
    if (delta < 0) throw std::logic_error("occupation went negative");
    if (delta > 0) counts.insert(it, {level, delta});
  }
  OccupationVector out;
  out.counts_ = std::move(counts);
  return out;
}

OccupationVector OccupationVector::with_removed(Level level) const {
  if (count(level) <= 0) throw std::logic_error("removing atom from empty level");
  return with_added(level, -1);
}

OccupationVector OccupationVector::with_move(Level from, Level to) const {
  return with_removed(from).with_added(to);
}

HybridBasisState::HybridBasisState(OccupationVector ensemble,
                                   std::optional<Level> distinguished)
    : distinguished_(std::move(distinguished)), ensemble_(std::move(ensemble)) {}

int HybridBasisState::manifold_count(int qubit) const {
  return level_count(Level::qubit(qubit, 0)) + level_count(Level::qubit(qubit, 1));
}

PureState PureState::single(HybridBasisState basis, Complex amplitude) {
  PureState state;
  state.set(basis, amplitude);
  return state;
}

void PureState::add(const HybridBasisState& basis, Complex amplitude) {
  if (!basis.satisfies_blockade()) {
    throw std::logic_error("basis state violates the hard-blockade truncation");
  }
  auto [it, inserted] = amps_.try_emplace(basis, amplitude);
  if (!inserted) it->second += amplitude;
}

void PureState::set(const HybridBasisState& basis, Complex amplitude) {
  if (!basis.satisfies_blockade()) {
    throw std::logic_error("basis state violates the hard-blockade truncation");
  }
  amps_[basis] = amplitude;
}

Complex PureState::amplitude(const HybridBasisState& basis) const {
  auto it = amps_.find(basis);
  return it == amps_.end() ? Complex{0.0, 0.0} : it->second;
}

double PureState::squared_norm() const {
  double sum = 0.0;
  for (const auto& [basis, amp] : amps_) sum += std::norm(amp);
  return sum;
}

void PureState::normalize() {
  const double n2 = squared_norm();
  if (n2 <= 0.0) throw std::runtime_error("cannot normalize the zero state");
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& [basis, amp] : amps_) amp *= inv;
  prune();
}

void PureState::prune() {
  std::erase_if(amps_, [&](const auto& e) { return std::abs(e.second) < prune_threshold_; });
}

std::vector<SectorKey> PureState::sectors() const {
  std::vector<SectorKey> keys;
  for (const auto& [basis, amp] : amps_) {
    SectorKey key = basis.sector();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  return keys;
}

void PureState::check_normalized() const {
  if (std::abs(squared_norm() - 1.0) > kNormTolerance) {
    throw std::runtime_error("state norm drifted beyond tolerance");
  }
}

namespace {

void check_qubit_amplitudes(std::span<const QubitAmplitudes> amps) {
  for (const auto& qa : amps) {
    if (std::abs(std::norm(qa.zero) + std::norm(qa.one) - 1.0) > kNormTolerance) {
      throw std::invalid_argument("qubit amplitudes must be normalized");
    }
  }
}

}  // namespace

PureState logical_state_at(const RegisterConfig& config,
                           std::span<const QubitAmplitudes> qubit_amplitudes,
                           int atom_count) {
  const int n = config.n_qubits();
  if (static_cast<int>(qubit_amplitudes.size()) != n) {
    throw std::invalid_argument("expected one amplitude pair per qubit");
  }
  check_qubit_amplitudes(qubit_amplitudes);
  if (atom_count < n) throw std::invalid_argument("fewer atoms than qubits");

  PureState state;
  const int reservoir = atom_count - n;
  // Expand the product over qubit manifolds into occupation components.
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Complex amp = 1.0;
    std::vector<std::pair<Level, int>> counts;
    if (reservoir > 0) counts.push_back({Level::reservoir(), reservoir});
    for (int i = 0; i < n; ++i) {
      const int bit = (mask >> i) & 1;
      amp *= bit ? qubit_amplitudes[i].one : qubit_amplitudes[i].zero;
      counts.push_back({Level::qubit(i + 1, bit), 1});
    }
    if (std::abs(amp) == 0.0) continue;
    state.add(HybridBasisState(OccupationVector(std::move(counts))), amp);
  }
  state.prune();
  state.check_normalized();
  return state;
}

PureState new_logical_state(const RegisterConfig& config,
                            std::span<const QubitAmplitudes> qubit_amplitudes) {
  return logical_state_at(config, qubit_amplitudes, config.n_atoms());
}

Complex inner_product(const PureState& x, const PureState& y) {
  // Iterate over the smaller support.
  const PureState& a = x.size() <= y.size() ? x : y;
  const PureState& b = x.size() <= y.size() ? y : x;
  Complex sum = 0.0;
  for (const auto& [basis, amp] : a.amplitudes()) {
    auto it = b.amplitudes().find(basis);
    if (it != b.amplitudes().end()) {
      sum += (&a == &x) ? std::conj(amp) * it->second : std::conj(it->second) * amp;
    }
  }
  return sum;
}

namespace {

// Register-content overlap of `state` against the logical target with
// `atom_count` total atoms. Components split into blocks by distinguished
// level: the purely symmetric block overlaps the target directly; a
// distinguished bystander (reservoir or leaked level) contributes its
// ensemble-factor overlap; a distinguished atom in a register or Rydberg
// level contributes nothing. Blocks add by probability, not amplitude.
double register_fidelity_at(const PureState& state,
                            std::span<const QubitAmplitudes> target,
                            const RegisterConfig& config, int atom_count,
                            bool count_parked) {
  const int n = config.n_qubits();
  if (atom_count < n) return 0.0;

  PureState target_sym = logical_state_at(config, target, atom_count);
  Complex direct = 0.0;
  std::map<Level, Complex> parked;

  for (const auto& [basis, amp] : state.amplitudes()) {
    if (basis.total_atoms() != atom_count) continue;
    if (!basis.distinguished()) {
      direct += std::conj(target_sym.amplitude(basis)) * amp;
      continue;
    }
    if (!count_parked) continue;
    const Level d = *basis.distinguished();
    if (!(d.is_reservoir() || d.is_leaked())) continue;
    // Ensemble factor holds atom_count - 1 atoms.
    if (atom_count - 1 < n) continue;
    PureState target_ens = logical_state_at(config, target, atom_count - 1);
    Complex t = target_ens.amplitude(HybridBasisState(basis.ensemble()));
    parked[d] += std::conj(t) * amp;
  }

  double fid = std::norm(direct);
  for (const auto& [level, overlap] : parked) fid += std::norm(overlap);
  return fid;
}

}  // namespace

double fidelity_to_logical(const PureState& state,
                           std::span<const QubitAmplitudes> target_amplitudes,
                           const RegisterConfig& config, const SectorPolicy& policy) {
  if (state.empty()) throw std::invalid_argument("fidelity of the empty state");
  check_qubit_amplitudes(target_amplitudes);

  switch (policy.kind) {
    case SectorPolicy::Kind::FixedAtomCount:
      return register_fidelity_at(state, target_amplitudes, config, policy.atom_count,
                                  policy.count_parked_bystander);
    case SectorPolicy::Kind::BestSector:
    case SectorPolicy::Kind::SumOverSectors: {
      std::vector<int> counts;
      for (const auto& sector : state.sectors()) {
        if (std::find(counts.begin(), counts.end(), sector.atom_count) == counts.end()) {
          counts.push_back(sector.atom_count);
        }
      }
      double best = 0.0, sum = 0.0;
      for (int k : counts) {
        double f = register_fidelity_at(state, target_amplitudes, config, k,
                                        policy.count_parked_bystander);
        best = std::max(best, f);
        sum += f;
      }
      return policy.kind == SectorPolicy::Kind::BestSector ? best : sum;
    }
  }
  throw std::logic_error("unreachable");
}

std::string state_to_text(const PureState& state, const RegisterConfig& config) {
  const auto levels = config.ensemble_levels();
  std::ostringstream out;
  out.precision(17);
  for (const auto& [basis, amp] : state.amplitudes()) {
    out << basis.total_atoms() << ' ';
    out << (basis.distinguished() ? basis.distinguished()->name() : "-");
    out << ' ';
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (i) out << ',';
      out << basis.ensemble().count(levels[i]);
    }
    out << ' ' << amp.real() << ' ' << amp.imag() << '\n';
  }
  return out.str();
}

PureState state_from_text(const std::string& text, const RegisterConfig& config) {
  const auto levels = config.ensemble_levels();
  PureState state;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int sector_k = 0;
    std::string dist_token, occ_token;
    double re = 0.0, im = 0.0;
    if (!(ls >> sector_k >> dist_token >> occ_token >> re >> im)) {
      throw std::runtime_error("malformed state line: " + line);
    }
    std::optional<Level> dist;
    if (dist_token != "-") {
      dist = Level::parse(dist_token);
      if (!dist) throw std::runtime_error("unknown level token: " + dist_token);
    }
    std::vector<std::pair<Level, int>> counts;
    std::istringstream os(occ_token);
    std::string field;
    std::size_t idx = 0;
    while (std::getline(os, field, ',')) {
      if (idx >= levels.size()) throw std::runtime_error("too many occupation fields");
      int c = std::stoi(field);
      if (c > 0) counts.push_back({levels[idx], c});
      ++idx;
    }
    if (idx != levels.size()) throw std::runtime_error("too few occupation fields");
    HybridBasisState basis(OccupationVector(std::move(counts)), dist);
    if (basis.total_atoms() != sector_k) {
      throw std::runtime_error("sector atom count mismatch in state line");
    }
    state.add(basis, Complex{re, im});
  }
  return state;
}

}  // namespace eqec
