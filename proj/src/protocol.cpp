#include "eqec/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eqec {

namespace {

constexpr double pi = std::numbers::pi;

int total_atom_count(const PureState& state) {
  int count = -1;
  for (const auto& [basis, amp] : state.amplitudes()) {
    int c = basis.total_atoms();
    if (count < 0) count = c;
    if (c != count) throw std::runtime_error("atom count differs across components");
  }
  if (count < 0) throw std::runtime_error("empty state");
  return count;
}

PureState project(const PureState& state, const std::function<bool(const HybridBasisState&)>& keep) {
  PureState out(state.prune_threshold());
  for (const auto& [basis, amp] : state.amplitudes()) {
    if (keep(basis)) out.add(basis, amp);
  }
  if (out.empty()) throw std::runtime_error("projection onto empty subspace");
  out.normalize();
  return out;
}

double population(const PureState& state, const std::function<bool(const HybridBasisState&)>& pred) {
  double p = 0.0;
  for (const auto& [basis, amp] : state.amplitudes()) {
    if (pred(basis)) p += std::norm(amp);
  }
  return p;
}

void log_record(std::vector<MeasurementRecord>* log, std::string observable, int outcome,
                double probability) {
  if (log) log->push_back({std::move(observable), outcome, probability});
}

}  // namespace

void DisturbanceCoeffs::validate() const {
  const double n2 = std::norm(c0) + std::norm(c1) + std::norm(cs) + std::norm(c_perp);
  if (std::abs(n2 - 1.0) > kNormTolerance) {
    throw std::invalid_argument("disturbance coefficients must be normalized");
  }
}

std::string_view branch_name(Branch branch) {
  switch (branch) {
    case Branch::NoErrorDetected: return "no-error-detected";
    case Branch::R0DetectedIon: return "r0-detected-ion";
    case Branch::R0DetectedNoIon: return "r0-detected-no-ion";
    case Branch::R1DetectedIon: return "r1-detected-ion";
    case Branch::R1DetectedNoIon: return "r1-detected-no-ion";
  }
  return "?";
}

std::size_t SampledChooser::choose(std::span<const double> probs, std::string_view) {
  double total = 0.0;
  for (double p : probs) total += p;
  std::uniform_real_distribution<double> dist(0.0, total);
  double u = dist(rng_);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u <= acc) return i;
  }
  return probs.size() - 1;
}

namespace {

// Chooser that replays a scripted prefix and extends it by the first viable
// option, recording option probabilities so the driver can enumerate paths
// depth-first.
class TreeChooser final : public Chooser {
 public:
  TreeChooser(std::vector<std::size_t> script, double prune)
      : script_(std::move(script)), prune_(prune) {}

  std::size_t choose(std::span<const double> probs, std::string_view) override {
    double total = 0.0;
    for (double p : probs) total += p;
    std::vector<double> normalized(probs.begin(), probs.end());
    if (total > 0.0) {
      for (double& p : normalized) p /= total;
    }

    std::size_t pick;
    if (depth_ < script_.size()) {
      pick = script_[depth_];
    } else {
      pick = first_viable(normalized, 0);
      if (pick == normalized.size()) {
        throw std::runtime_error("no viable measurement outcome");
      }
    }
    taken_.push_back(pick);
    options_.push_back(std::move(normalized));
    probability_ *= options_.back()[pick];
    ++depth_;
    return pick;
  }

  std::size_t first_viable(std::span<const double> normalized, std::size_t from) const {
    for (std::size_t i = from; i < normalized.size(); ++i) {
      if (probability_ * normalized[i] >= prune_) return i;
    }
    return normalized.size();
  }

  double probability() const { return probability_; }
  const std::vector<std::size_t>& taken() const { return taken_; }
  const std::vector<std::vector<double>>& options() const { return options_; }

 private:
  std::vector<std::size_t> script_;
  std::vector<std::size_t> taken_;
  std::vector<std::vector<double>> options_;
  double probability_ = 1.0;
  double prune_;
  std::size_t depth_ = 0;
};

}  // namespace

std::vector<BranchOutcome> enumerate_branches(
    const std::function<TrajectoryOutcome(Chooser&)>& protocol, double prune_probability) {
  std::vector<BranchOutcome> branches;
  std::vector<std::size_t> script;

  while (true) {
    TreeChooser chooser(script, prune_probability);
    TrajectoryOutcome outcome = protocol(chooser);
    branches.push_back({chooser.probability(), std::move(outcome)});

    // Advance the path like an odometer over viable options.
    const auto& taken = chooser.taken();
    const auto& options = chooser.options();
    std::size_t depth = taken.size();
    bool advanced = false;
    while (depth > 0) {
      --depth;
      // Running probability of the prefix before this decision.
      double prefix = 1.0;
      for (std::size_t i = 0; i < depth; ++i) prefix *= options[i][taken[i]];
      std::size_t next = taken[depth] + 1;
      while (next < options[depth].size() && prefix * options[depth][next] < prune_probability) {
        ++next;
      }
      if (next < options[depth].size()) {
        script.assign(taken.begin(), taken.begin() + depth);
        script.push_back(next);
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return branches;
}

std::vector<std::pair<double, PureState>> atom_loss_branches(const PureState& state) {
  const int atoms = total_atom_count(state);
  if (atoms < 2) throw std::invalid_argument("atom loss needs at least two atoms");

  // Channels keyed by the internal level of the lost atom. The environment
  // keeps which-level information, so distinct channels never interfere.
  std::map<Level, PureState> channels;
  std::map<Level, double> weights;
  for (const auto& [basis, amp] : state.amplitudes()) {
    if (basis.distinguished()) {
      throw std::invalid_argument("atom loss acts on the symmetric ensemble");
    }
    const int k = basis.ensemble().total();
    for (const auto& [level, count] : basis.ensemble().entries()) {
      const double w = double(count) / double(k);
      Complex child_amp = amp * std::sqrt(w);
      channels[level].add(HybridBasisState(basis.ensemble().with_removed(level)), child_amp);
      weights[level] += std::norm(amp) * w;
    }
  }

  std::vector<std::pair<double, PureState>> branches;
  for (auto& [level, child] : channels) {
    double p = weights[level];
    if (p <= 0.0) continue;
    child.normalize();
    branches.push_back({p, std::move(child)});
  }
  return branches;
}

PureState apply_atom_loss(const PureState& state, LossMode mode, Chooser* chooser) {
  if (mode == LossMode::MixtureBranch) {
    if (!chooser) throw std::invalid_argument("mixture-branch loss needs a chooser");
    auto branches = atom_loss_branches(state);
    std::vector<double> probs;
    probs.reserve(branches.size());
    for (const auto& [p, child] : branches) probs.push_back(p);
    std::size_t pick = chooser->choose(probs, "atom-loss-level");
    return branches[pick].second;
  }

  // Coherent mode: the amplitude-level superposition of all removal channels.
  // Channels whose children coincide interfere; the result is renormalized.
  const int atoms = total_atom_count(state);
  if (atoms < 2) throw std::invalid_argument("atom loss needs at least two atoms");
  PureState out(state.prune_threshold());
  for (const auto& [basis, amp] : state.amplitudes()) {
    if (basis.distinguished()) {
      throw std::invalid_argument("atom loss acts on the symmetric ensemble");
    }
    const int k = basis.ensemble().total();
    for (const auto& [level, count] : basis.ensemble().entries()) {
      Complex child_amp = amp * std::sqrt(double(count) / double(k));
      out.add(HybridBasisState(basis.ensemble().with_removed(level)), child_amp);
    }
  }
  out.normalize();
  return out;
}

PureState apply_disturbance(const PureState& state, const DisturbanceCoeffs& coeffs,
                            int qubit) {
  coeffs.validate();
  const Level s = Level::reservoir();
  for (const auto& [basis, amp] : state.amplitudes()) {
    if (basis.distinguished()) {
      throw std::invalid_argument("state already carries a disturbed atom");
    }
    if (basis.ensemble().count(s) < 1) {
      throw std::invalid_argument("disturbance needs a populated reservoir");
    }
  }

  struct Channel {
    Level level;
    Complex amplitude;
  };
  const std::array<Channel, 4> channels = {{{Level::qubit(qubit, 0), coeffs.c0},
                                            {Level::qubit(qubit, 1), coeffs.c1},
                                            {Level::reservoir(), coeffs.cs},
                                            {Level::leaked(), coeffs.c_perp}}};

  PureState out(state.prune_threshold());
  for (const auto& [basis, amp] : state.amplitudes()) {
    OccupationVector reduced = basis.ensemble().with_removed(s);
    for (const auto& channel : channels) {
      if (std::abs(channel.amplitude) == 0.0) continue;
      out.add(HybridBasisState(reduced, channel.level), amp * channel.amplitude);
    }
  }
  out.prune();
  out.check_normalized();
  return out;
}

std::pair<bool, PureState> measure_rydberg_content(const PureState& state, Level level,
                                                   const RegisterConfig& config,
                                                   Chooser& chooser,
                                                   std::vector<MeasurementRecord>* log) {
  if (!level.is_rydberg()) throw std::invalid_argument("expected a rydberg level");
  auto occupied = [&](const HybridBasisState& b) { return b.level_count(level) >= 1; };
  const double p = population(state, occupied);
  const double eta = config.detector_efficiency();

  // Outcomes: occupied & reported, occupied & missed (false negative),
  // unoccupied. The projection follows the physical content either way.
  const std::array<double, 3> probs = {p * eta, p * (1.0 - eta), 1.0 - p};
  std::size_t pick = chooser.choose(probs, std::string("detect:") + level.name());
  const bool content = pick != 2;
  const bool reported = pick == 0;
  log_record(log, "detect:" + level.name(), reported ? 1 : 0, probs[pick]);
  PureState post = content ? project(state, occupied)
                           : project(state, [&](const HybridBasisState& b) { return !occupied(b); });
  return {reported, std::move(post)};
}

std::pair<bool, PureState> ionize_level(const PureState& state, Level level, Chooser& chooser,
                                        IonizationScope scope,
                                        std::vector<MeasurementRecord>* log) {
  auto in_scope = [&](const HybridBasisState& b) {
    if (scope == IonizationScope::DistinguishedOnly) return b.distinguished() == level;
    return b.level_count(level) >= 1;
  };
  const double p = population(state, in_scope);
  const std::array<double, 2> probs = {p, 1.0 - p};
  std::size_t pick = chooser.choose(probs, std::string("ionize:") + level.name());
  const bool ion_seen = pick == 0;
  log_record(log, "ionize:" + level.name(), ion_seen ? 1 : 0, probs[pick]);

  if (!ion_seen) {
    return {false, project(state, [&](const HybridBasisState& b) { return !in_scope(b); })};
  }
  PureState out(state.prune_threshold());
  for (const auto& [basis, amp] : state.amplitudes()) {
    if (!in_scope(basis)) continue;
    if (basis.distinguished() == level) {
      out.add(basis.with_distinguished(std::nullopt), amp);
    } else {
      out.add(basis.with_ensemble(basis.ensemble().with_removed(level)), amp);
    }
  }
  out.normalize();
  return {true, std::move(out)};
}

std::pair<bool, PureState> measure_manifold_occupied(const PureState& state, int qubit,
                                                     Chooser& chooser,
                                                     std::vector<MeasurementRecord>* log) {
  auto occupied = [&](const HybridBasisState& b) { return b.manifold_count(qubit) >= 1; };
  const double p = population(state, occupied);
  const std::array<double, 2> probs = {p, 1.0 - p};
  std::size_t pick = chooser.choose(probs, "manifold:" + std::to_string(qubit));
  const bool is_occupied = pick == 0;
  log_record(log, "manifold:" + std::to_string(qubit), is_occupied ? 1 : 0, probs[pick]);
  PureState post = is_occupied
                       ? project(state, occupied)
                       : project(state, [&](const HybridBasisState& b) { return !occupied(b); });
  return {is_occupied, std::move(post)};
}

TrajectoryOutcome run_detection_cycle(const PureState& state, int qubit,
                                      const PulseParams& params, const RegisterConfig& config,
                                      Chooser& chooser) {
  const Level zero = Level::qubit(qubit, 0);
  const Level one = Level::qubit(qubit, 1);
  const Level r0 = Level::rydberg(RydbergId::R0);
  const Level r1 = Level::rydberg(RydbergId::R1);

  TrajectoryOutcome out;
  PureState current = state;

  // (i) composite discrimination pulses on both register transitions at once
  for (const auto& [theta, phi] : params.pulses) {
    current = apply_drive(current, Drive({{zero, r0, phi, 1.0}, {one, r1, phi, 1.0}}, theta));
  }

  // (ii) Rydberg content measurements
  auto [saw_r0, after_r0] = measure_rydberg_content(current, r0, config, chooser, &out.measurements);
  current = std::move(after_r0);
  Level flagged = r0;
  bool detected = saw_r0;
  if (!saw_r0) {
    auto [saw_r1, after_r1] =
        measure_rydberg_content(current, r1, config, chooser, &out.measurements);
    current = std::move(after_r1);
    flagged = r1;
    detected = saw_r1;
  }

  if (!detected) {
    out.branch = Branch::NoErrorDetected;
    out.final_state = std::move(current);
    return out;
  }

  // collective transfer pulse: complete for the symmetric Rydberg component,
  // ~1/sqrt(K) for a lone distinguished atom
  const int atoms = total_atom_count(current);
  const int reservoir_target = atoms - config.n_qubits();
  if (reservoir_target < 1) throw std::runtime_error("too few atoms for the transfer pulse");
  current = apply_drive(
      current, Drive({{Level::reservoir(), flagged, 0.0, 1.0}}, pi / std::sqrt(double(reservoir_target))));

  // (iii) ionization of the flagged Rydberg level
  auto [ion, after_ion] = ionize_level(current, flagged, chooser, IonizationScope::AnyAtom,
                                       &out.measurements);
  current = std::move(after_ion);
  out.repaired_qubit = qubit;

  if (ion) {
    out.rydberg_ions += 1;
    out.atoms_consumed += 1;
    out.branch = flagged == r0 ? Branch::R0DetectedIon : Branch::R1DetectedIon;
    out.final_state = std::move(current);
    return out;
  }

  out.branch = flagged == r0 ? Branch::R0DetectedNoIon : Branch::R1DetectedNoIon;

  // Single-atom cleanup: ionize the disturbed atom out of 0_i, 1_i. These
  // pulses are selective and do not touch the collective register population.
  for (Level level : {zero, one}) {
    auto [cleanup_ion, after_cleanup] = ionize_level(
        current, level, chooser, IonizationScope::DistinguishedOnly, &out.measurements);
    current = std::move(after_cleanup);
    if (cleanup_ion) {
      out.cleanup_ions += 1;
      out.atoms_consumed += 1;
    }
  }

  // Refill the manifold if (and only if) it is now empty; with no ion seen at
  // all the register never lost its atom and must not be double-filled.
  auto [occupied, after_check] = measure_manifold_occupied(current, qubit, chooser,
                                                           &out.measurements);
  current = std::move(after_check);
  if (!occupied) {
    current = encode_one_atom(current, zero);
  }

  out.final_state = std::move(current);
  return out;
}

TrajectoryOutcome run_full_correction(const PureState& state, const PulseParams& params,
                                      const RegisterConfig& config, Chooser& chooser) {
  TrajectoryOutcome out;
  PureState current = state;

  for (int i = 1; i <= config.n_qubits(); ++i) {
    TrajectoryOutcome cycle = run_detection_cycle(current, i, params, config, chooser);
    current = std::move(cycle.final_state);
    for (auto& record : cycle.measurements) {
      record.observable = "q" + std::to_string(i) + "/" + record.observable;
      out.measurements.push_back(std::move(record));
    }
    out.atoms_consumed += cycle.atoms_consumed;
    out.rydberg_ions += cycle.rydberg_ions;
    out.cleanup_ions += cycle.cleanup_ions;
    if (cycle.branch != Branch::NoErrorDetected) {
      out.branch = cycle.branch;
      out.repaired_qubit = i;
    }
  }

  // Loss scan: refill any manifold that lost its atom.
  for (int i = 1; i <= config.n_qubits(); ++i) {
    auto [occupied, after_check] =
        measure_manifold_occupied(current, i, chooser, &out.measurements);
    current = std::move(after_check);
    if (!occupied) {
      current = encode_one_atom(current, Level::qubit(i, 0));
      out.measurements.push_back({"refill:" + std::to_string(i), 1, 1.0});
      if (!out.repaired_qubit) out.repaired_qubit = i;
    }
  }

  out.final_state = std::move(current);
  return out;
}

PureState encode_logical_pair(Complex alpha, Complex beta, const RegisterConfig& config) {
  if (config.n_qubits() < 2) throw std::invalid_argument("the pair code needs two qubits");
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kNormTolerance) {
    throw std::invalid_argument("code amplitudes must be normalized");
  }
  const int reservoir = config.n_atoms() - 2;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  PureState state;
  auto add_word = [&](int b1, int b2, Complex amp) {
    if (std::abs(amp) == 0.0) return;
    std::vector<std::pair<Level, int>> counts = {{Level::qubit(1, b1), 1},
                                                 {Level::qubit(2, b2), 1}};
    if (reservoir > 0) counts.push_back({Level::reservoir(), reservoir});
    state.add(HybridBasisState(OccupationVector(std::move(counts))), amp);
  };
  add_word(0, 0, alpha * inv_sqrt2);
  add_word(1, 1, alpha * inv_sqrt2);
  add_word(0, 1, beta * inv_sqrt2);
  add_word(1, 0, beta * inv_sqrt2);
  state.check_normalized();
  return state;
}

PureState reconstruct_codeword(const PureState& state, int repaired,
                               const RegisterConfig& config) {
  if (config.n_qubits() < 2) throw std::invalid_argument("the pair code needs two qubits");
  if (repaired != 1 && repaired != 2) throw std::invalid_argument("repaired qubit must be 1 or 2");
  const int other = repaired == 1 ? 2 : 1;

  // Expected form: repaired manifold in |0>, the other singly occupied.
  const Level zero_rep = Level::qubit(repaired, 0);
  double p_form = population(state, [&](const HybridBasisState& b) {
    return b.ensemble().count(zero_rep) == 1 &&
           b.ensemble().count(Level::qubit(repaired, 1)) == 0 && b.manifold_count(other) == 1;
  });
  if (p_form < 0.5 + 1e-9) {
    throw std::runtime_error("input is not in the post-correction form |0_rep> (x) qubit");
  }

  // -iZ on a qubit manifold, built from two equatorial pi rotations.
  auto z_gate = [](PureState s, int q) {
    s = single_qubit_gate(s, q, pi, pi / 2);
    return single_qubit_gate(s, q, pi, 0.0);
  };

  // Hadamard-equivalent on the repaired qubit (R(pi/2, pi/2) = H Z acts as H
  // on |0>), then a CNOT with the repaired qubit as control:
  //   CNOT = Z_rep R_other cz_raw R_other Z_other.
  PureState s = single_qubit_gate(state, repaired, pi / 2, pi / 2);
  s = z_gate(std::move(s), other);
  s = single_qubit_gate(s, other, pi / 2, pi / 2);
  s = cz_gate(s, repaired, other);
  s = single_qubit_gate(s, other, pi / 2, pi / 2);
  s = z_gate(std::move(s), repaired);
  return s;
}

BranchTarget designated_target(const TrajectoryOutcome& outcome, int initial_atoms) {
  BranchTarget target;
  target.atom_count = initial_atoms - outcome.atoms_consumed;
  const bool no_ion_branch = outcome.branch == Branch::R0DetectedNoIon ||
                             outcome.branch == Branch::R1DetectedNoIon;
  target.reset_to_zero = no_ion_branch && outcome.cleanup_ions >= 1;
  return target;
}

double branch_fidelity(const TrajectoryOutcome& outcome,
                       std::span<const QubitAmplitudes> input_amplitudes,
                       const RegisterConfig& config, int initial_atoms) {
  BranchTarget target = designated_target(outcome, initial_atoms);
  std::vector<QubitAmplitudes> amps(input_amplitudes.begin(), input_amplitudes.end());
  if (target.reset_to_zero) {
    if (!outcome.repaired_qubit) throw std::logic_error("reset branch without repaired qubit");
    amps[*outcome.repaired_qubit - 1] = {1.0, 0.0};
  }
  return fidelity_to_logical(outcome.final_state, amps, config,
                             SectorPolicy::fixed(target.atom_count));
}

}  // namespace eqec
