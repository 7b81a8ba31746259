#include "sqlayer/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sqlayer/protocol.hpp"

namespace sqlayer {

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::InterceptResend: return "intercept";
    case AttackKind::EntangleMeasure: return "entangle";
    case AttackKind::TwoWayEntangle: return "twoway";
    case AttackKind::LyingParticipant: return "lie";
  }
  return "?";
}

const TargetAttack* EveStrategy::find(std::string_view participant) const {
  for (const auto& t : targets)
    if (t.participant == participant) return &t;
  return nullptr;
}

bool EveStrategy::any_forward() const {
  return std::any_of(targets.begin(), targets.end(), [](const auto& t) { return t.forward; });
}

bool EveStrategy::any_backward() const {
  return std::any_of(targets.begin(), targets.end(), [](const auto& t) { return t.backward; });
}

EveStrategy intercept_resend(std::vector<std::string> targets, bool forward, bool backward) {
  EveStrategy s;
  s.kind = AttackKind::InterceptResend;
  for (auto& t : targets) s.targets.push_back({std::move(t), forward, backward, {}, {}});
  return s;
}

EveStrategy entangle_measure(const NetworkSpec& network, std::vector<std::string> targets) {
  EveStrategy s;
  s.kind = AttackKind::EntangleMeasure;
  for (auto& t : targets) {
    const int d = participant_dimension(network, t);
    s.targets.push_back({std::move(t), true, false, copy_unitary(d), {}});
  }
  return s;
}

EveStrategy two_way(const NetworkSpec& network, std::vector<std::string> targets,
                    const UnitaryFactory& forward, const UnitaryFactory& backward,
                    bool use_forward, bool use_backward) {
  EveStrategy s;
  s.kind = AttackKind::TwoWayEntangle;
  for (auto& t : targets) {
    const int d = participant_dimension(network, t);
    TargetAttack a{std::move(t), use_forward, use_backward, {}, {}};
    if (use_forward) a.forward_unitary = forward(d);
    if (use_backward) a.backward_unitary = backward(d);
    s.targets.push_back(std::move(a));
  }
  return s;
}

EveStrategy lying_participant(std::vector<std::string> liars, LyingPolicy policy) {
  EveStrategy s;
  s.kind = AttackKind::LyingParticipant;
  s.lying = policy;
  for (auto& t : liars) s.targets.push_back({std::move(t), false, false, {}, {}});
  return s;
}

void check_strategy(const EveStrategy& strategy, const NetworkSpec& network) {
  if (strategy.targets.empty()) throw std::invalid_argument("attack has no targets");
  std::vector<std::string> seen;
  for (const auto& t : strategy.targets) {
    const auto* p = network.find(t.participant);
    if (!p || p->role != Role::CP) {
      throw std::invalid_argument("attack target '" + t.participant + "' is not a CP of the network");
    }
    if (std::find(seen.begin(), seen.end(), t.participant) != seen.end()) {
      throw std::invalid_argument("attack target '" + t.participant + "' listed twice");
    }
    seen.push_back(t.participant);
    const int d = participant_dimension(network, t.participant);
    auto check = [&](const std::optional<UnitaryMatrix>& u, bool leg, const char* name) {
      const bool entangling = strategy.kind == AttackKind::EntangleMeasure ||
                              strategy.kind == AttackKind::TwoWayEntangle;
      if (!entangling || !leg) return;
      if (!u) throw std::invalid_argument(std::string(name) + " unitary missing for " + t.participant);
      const Dims& a = u->acting_dims();
      if (a.size() != 2 || a[0] != d) {
        throw std::invalid_argument(std::string(name) + " unitary for " + t.participant +
                                    " must act on (" + std::to_string(d) + " x ancilla)");
      }
    };
    check(t.forward_unitary, t.forward, "forward");
    check(t.backward_unitary, t.backward, "backward");
  }
}

UnitaryMatrix copy_unitary(int d) {
  const std::size_t n = static_cast<std::size_t>(d) * d;
  std::vector<Complex> m(n * n, 0.0);
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a) {
      const std::size_t col = static_cast<std::size_t>(i) * d + a;
      const std::size_t row = static_cast<std::size_t>(i) * d + (a + i) % d;
      m[row * n + col] = 1.0;
    }
  return UnitaryMatrix(Dims{d, d}, std::move(m));
}

UnitaryMatrix controlled_rotation(int d, double theta) {
  const std::size_t n = static_cast<std::size_t>(d) * d;
  std::vector<Complex> m(n * n, 0.0);
  const double c = std::cos(theta), s = std::sin(theta);
  for (int i = 0; i < d; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * d;
    for (int a = 0; a < d; ++a) m[(base + a) * n + base + a] = 1.0;
    if (i == 0) continue;
    m[(base + 0) * n + base + 0] = c;
    m[(base + i) * n + base + 0] = s;
    m[(base + 0) * n + base + i] = -s;
    m[(base + i) * n + base + i] = c;
  }
  return UnitaryMatrix(Dims{d, d}, std::move(m));
}

UnitaryMatrix partial_swap(int d, double phi) {
  const std::size_t n = static_cast<std::size_t>(d) * d;
  std::vector<Complex> m(n * n, 0.0);
  const Complex c = std::cos(phi), is = Complex(0.0, std::sin(phi));
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y) {
      const std::size_t col = static_cast<std::size_t>(x) * d + y;
      const std::size_t swapped = static_cast<std::size_t>(y) * d + x;
      m[col * n + col] += c;
      m[swapped * n + col] += is;
    }
  return UnitaryMatrix(Dims{d, d}, std::move(m));
}

TapEntry* EvePrivateRecord::find(std::string_view participant) {
  for (auto& t : taps)
    if (t.participant == participant) return &t;
  return nullptr;
}

const TapEntry* EvePrivateRecord::find(std::string_view participant) const {
  for (const auto& t : taps)
    if (t.participant == participant) return &t;
  return nullptr;
}

namespace {

QuditState entangle(const QuditState& joint, std::size_t subsystem, const UnitaryMatrix& u,
                    std::optional<std::size_t>& ancilla_slot) {
  const int da = u.acting_dims()[1];
  QuditState with = attach_ancilla(joint, da);
  const std::size_t anc = with.subsystem_count() - 1;
  ancilla_slot = anc;
  return apply_unitary(with, {subsystem, anc}, u);
}

}  // namespace

QuditState tap_forward(const EveStrategy& strategy, const QuditState& joint,
                       std::size_t subsystem, TapEntry& entry, RngStream& rng) {
  const TargetAttack* t = strategy.find(entry.participant);
  if (!t || !t->forward) return joint;
  switch (strategy.kind) {
    case AttackKind::InterceptResend: {
      auto m = measure_computational(joint, {subsystem}, rng);
      entry.forward_outcome = m.outcomes[0];
      return std::move(m.post);
    }
    case AttackKind::EntangleMeasure:
    case AttackKind::TwoWayEntangle:
      return entangle(joint, subsystem, *t->forward_unitary, entry.forward_ancilla);
    case AttackKind::LyingParticipant:
      return joint;
  }
  return joint;
}

QuditState tap_backward(const EveStrategy& strategy, const QuditState& joint,
                        std::size_t subsystem, TapEntry& entry, RngStream& rng) {
  const TargetAttack* t = strategy.find(entry.participant);
  if (!t || !t->backward) return joint;
  switch (strategy.kind) {
    case AttackKind::InterceptResend: {
      auto m = measure_computational(joint, {subsystem}, rng);
      entry.backward_outcome = m.outcomes[0];
      return std::move(m.post);
    }
    case AttackKind::EntangleMeasure:
    case AttackKind::TwoWayEntangle:
      return entangle(joint, subsystem, *t->backward_unitary, entry.backward_ancilla);
    case AttackKind::LyingParticipant:
      return joint;
  }
  return joint;
}

int lying_policy_apply(const LyingPolicy& policy, int true_outcome, int dim, RngStream& rng) {
  switch (policy.mode) {
    case LyingMode::Honest: return true_outcome;
    case LyingMode::Uniform: return rng.below(dim);
    case LyingMode::Offset: return ((true_outcome + policy.offset) % dim + dim) % dim;
  }
  return true_outcome;
}

std::vector<double> lying_distribution(const LyingPolicy& policy, int true_outcome, int dim) {
  std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
  switch (policy.mode) {
    case LyingMode::Honest: p[true_outcome] = 1.0; break;
    case LyingMode::Uniform: std::fill(p.begin(), p.end(), 1.0 / dim); break;
    case LyingMode::Offset: p[((true_outcome + policy.offset) % dim + dim) % dim] = 1.0; break;
  }
  return p;
}

std::map<std::string, int> eve_estimates(const NetworkSpec& network, const EvePrivateRecord& record) {
  std::map<std::string, int> out;
  for (const auto& t : record.taps) {
    const int d = participant_dimension(network, t.participant);
    if (t.true_outcome) out[t.participant] = *t.true_outcome;
    else if (t.forward_outcome) out[t.participant] = *t.forward_outcome;
    else if (t.forward_reading) out[t.participant] = *t.forward_reading % d;
    else if (t.backward_outcome) out[t.participant] = *t.backward_outcome;
    else if (t.backward_reading) out[t.participant] = *t.backward_reading % d;
  }
  return out;
}

std::optional<int> eve_layer_guess(const NetworkSpec& network, ProtocolKind protocol,
                                   const Layer& layer, const std::map<std::string, int>& estimates) {
  const LayerRule rule = layer_rule(network, protocol, layer);
  auto bit = [&](const std::string& id) -> std::optional<int> {
    const auto it = estimates.find(id);
    if (it == estimates.end()) return std::nullopt;
    return routed_bit(network, id, layer.id, it->second);
  };
  for (const auto& h : rule.holders)
    if (auto b = bit(h)) return b;
  if (rule.xor_parties.empty()) return std::nullopt;
  int acc = 0;
  for (const auto& x : rule.xor_parties) {
    auto b = bit(x);
    if (!b) return std::nullopt;
    acc ^= *b;
  }
  return acc;
}

EveGuess eve_guess(const Transcript& transcript, const KeyMaterial& keys, int layer_id) {
  const Session& s = *transcript.session;
  const Layer& layer = s.network().layer(layer_id);  // throws for unknown layers
  const LayerKey& key = keys.layer(layer_id);
  EveGuess g;
  g.layer = layer_id;
  for (std::size_t n = 0; n < key.rounds.size(); ++n) {
    const RoundRecord& r = transcript.rounds[key.rounds[n]];
    std::optional<int> guess;
    if (r.eve) guess = eve_layer_guess(s.network(), s.protocol(), layer, eve_estimates(s.network(), *r.eve));
    if (!guess) {
      RngStream coin(0x5eedf00dULL, r.index);
      guess = coin.below(2);
    }
    g.symbols.push_back(*guess);
    if (*guess == key.symbols[n]) ++g.correct;
  }
  g.rounds = key.rounds.size();
  if (g.rounds) {
    g.accuracy = static_cast<double>(g.correct) / static_cast<double>(g.rounds);
    g.standard_error = std::sqrt(g.accuracy * (1.0 - g.accuracy) / static_cast<double>(g.rounds));
  }
  return g;
}

}  // namespace sqlayer
