#include "sqlayer/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace sqlayer {

std::string_view to_string(Action a) { return a == Action::Ctrl ? "ctrl" : "reflect"; }

std::string_view to_string(AliceChoice c) {
  return c == AliceChoice::Computational ? "computational" : "projective";
}

Session::Session(NetworkSpec network, ProtocolKind protocol)
    : network_(std::move(network)), resource_(synthesize(network_, protocol)) {
  index();
}

Session::Session(NetworkSpec network, ResourceState resource)
    : network_(std::move(network)), resource_(std::move(resource)) {
  if (resource_.subsystems != network_.register_order()) {
    throw std::invalid_argument("resource state does not match the network's register");
  }
  index();
}

void Session::index() {
  for (std::size_t i = 0; i < resource_.subsystems.size(); ++i) {
    const Participant* p = network_.find(resource_.subsystems[i]);
    if (p->role == Role::CP) {
      cps_.push_back(p->id);
      cp_subsystem_.push_back(i);
    } else {
      qp_subsystem_ = i;
    }
  }
  const auto amps = resource_.state.amplitudes();
  support_.resize(amps.size());
  for (std::size_t i = 0; i < amps.size(); ++i) support_[i] = std::norm(amps[i]) > 1e-14;
}

std::optional<std::size_t> Session::cp_index(std::string_view id) const {
  for (std::size_t i = 0; i < cps_.size(); ++i)
    if (cps_[i] == id) return i;
  return std::nullopt;
}

std::size_t Session::subsystem_of(std::string_view id) const {
  for (std::size_t i = 0; i < resource_.subsystems.size(); ++i)
    if (resource_.subsystems[i] == id) return i;
  throw std::out_of_range("'" + std::string(id) + "' holds no register subsystem");
}

bool Session::in_support(std::span<const int> register_digits) const {
  return support_[resource_.state.dims().flatten(register_digits)];
}

namespace {

RoundRecord evolve(const Session& s, QuditState joint, std::span<const Action> actions,
                   AliceChoice choice, const EveStrategy* eve, RngStream& rng, std::size_t index) {
  if (actions.size() != s.cps().size()) {
    throw std::invalid_argument("run_round: need one action per CP");
  }
  RoundRecord r;
  r.index = index;
  r.actions.assign(actions.begin(), actions.end());
  r.choice = choice;
  r.cp_outcomes.assign(actions.size(), std::nullopt);

  const bool liars = eve && eve->kind == AttackKind::LyingParticipant;
  if (eve) {
    r.eve.emplace();
    for (const auto& t : eve->targets) r.eve->taps.push_back(TapEntry{t.participant, {}, {}, {}, {}, {}, {}, {}});
    if (!liars)
      for (auto& entry : r.eve->taps)
        joint = tap_forward(*eve, joint, s.subsystem_of(entry.participant), entry, rng);
  }

  for (std::size_t c = 0; c < actions.size(); ++c) {
    if (actions[c] != Action::Ctrl) continue;
    auto m = measure_computational(joint, {s.cp_subsystem(c)}, rng);
    joint = std::move(m.post);
    int report = m.outcomes[0];
    if (liars) {
      if (TapEntry* entry = r.eve->find(s.cps()[c])) {
        entry->true_outcome = report;
        report = lying_policy_apply(eve->lying, report, s.dim(s.cp_subsystem(c)), rng);
      }
    }
    r.cp_outcomes[c] = report;
  }

  if (eve && !liars)
    for (auto& entry : r.eve->taps)
      joint = tap_backward(*eve, joint, s.subsystem_of(entry.participant), entry, rng);

  const std::size_t reg = s.register_size();
  const std::size_t total = joint.subsystem_count();
  auto read_ancillas = [&](std::span<const int> digits_from_reg) {
    // digits_from_reg[k] is the reading of subsystem reg + k.
    if (!r.eve) return;
    for (auto& entry : r.eve->taps) {
      if (entry.forward_ancilla) entry.forward_reading = digits_from_reg[*entry.forward_ancilla - reg];
      if (entry.backward_ancilla) entry.backward_reading = digits_from_reg[*entry.backward_ancilla - reg];
    }
  };

  std::vector<std::size_t> all(total);
  std::iota(all.begin(), all.end(), 0);
  if (choice == AliceChoice::Computational) {
    auto m = measure_computational(joint, all, rng);
    r.alice_outcomes.emplace(m.outcomes.begin(), m.outcomes.begin() + static_cast<std::ptrdiff_t>(reg));
    read_ancillas(std::span<const int>(m.outcomes).subspan(reg));
  } else {
    Projection p = project_onto(joint, s.state());
    bool pass = p.fail ? rng.bernoulli(p.success_prob) : true;
    if (!p.pass) pass = false;
    r.projective_pass = pass;
    if (total > reg) {
      const QuditState& post = pass ? *p.pass : *p.fail;
      std::vector<std::size_t> anc(all.begin() + static_cast<std::ptrdiff_t>(reg), all.end());
      auto m = measure_computational(post, anc, rng);
      read_ancillas(m.outcomes);
    }
  }
  return r;
}

}  // namespace

RoundRecord run_round(const Session& session, std::span<const Action> actions, AliceChoice choice,
                      const EveStrategy* eve, RngStream& rng, std::size_t index) {
  return evolve(session, session.state(), actions, choice, eve, rng, index);
}

RoundRecord run_decoy_round(const Session& session, std::span<const int> sent,
                            std::span<const Action> actions, const EveStrategy* eve,
                            RngStream& rng, std::size_t index) {
  if (sent.size() != session.register_size()) {
    throw std::invalid_argument("run_decoy_round: need one basis index per register subsystem");
  }
  for (std::size_t i = 0; i < sent.size(); ++i)
    if (sent[i] < 0 || sent[i] >= session.dim(i)) {
      throw std::out_of_range("run_decoy_round: basis index out of range");
    }
  QuditState product = QuditState::basis(session.state().dims(), sent);
  RoundRecord r = evolve(session, std::move(product), actions, AliceChoice::Computational, eve, rng, index);
  r.decoy = true;
  r.decoy_sent.assign(sent.begin(), sent.end());
  return r;
}

RoundRecord run_decoy_round(const Session& session, std::string_view target_cp, int basis_index,
                            const EveStrategy* eve, RngStream& rng, std::size_t index) {
  if (!session.cp_index(target_cp)) {
    throw std::invalid_argument("run_decoy_round: '" + std::string(target_cp) + "' is not a CP");
  }
  const std::size_t target = session.subsystem_of(target_cp);
  std::vector<int> sent(session.register_size());
  for (std::size_t i = 0; i < sent.size(); ++i) sent[i] = rng.below(session.dim(i));
  if (basis_index < 0 || basis_index >= session.dim(target)) {
    throw std::out_of_range("run_decoy_round: basis index out of range");
  }
  sent[target] = basis_index;
  std::vector<Action> actions(session.cps().size());
  for (auto& a : actions) a = rng.bernoulli(0.5) ? Action::Ctrl : Action::Reflect;
  return run_decoy_round(session, sent, actions, eve, rng, index);
}

Transcript run_session(std::shared_ptr<const Session> session, const SessionConfig& config) {
  if (config.rounds == 0) throw std::invalid_argument("run_session: rounds must be >= 1");
  if (config.decoy_rate < 0.0 || config.decoy_rate > 1.0) {
    throw std::invalid_argument("run_session: decoy_rate must lie in [0, 1]");
  }
  if (config.decoy_rate > 0.0 && session->protocol() == ProtocolKind::LSQKD) {
    throw std::invalid_argument("run_session: decoy rounds apply to LSQSS and ILSKSS only");
  }
  if (config.eve) check_strategy(*config.eve, session->network());

  Transcript t;
  t.session = session;
  t.rounds.resize(config.rounds);
  const EveStrategy* eve = config.eve ? &*config.eve : nullptr;
  const Session& s = *session;

  auto one = [&](std::size_t i) {
    RngStream rng(config.seed, i);
    const bool decoy = rng.bernoulli(config.decoy_rate);
    std::vector<Action> actions(s.cps().size());
    for (auto& a : actions) a = rng.bernoulli(config.ctrl_probability) ? Action::Ctrl : Action::Reflect;
    const AliceChoice choice = rng.bernoulli(config.computational_probability)
                                   ? AliceChoice::Computational
                                   : AliceChoice::Projective;
    if (decoy) {
      std::vector<int> sent(s.register_size());
      for (std::size_t k = 0; k < sent.size(); ++k) sent[k] = rng.below(s.dim(k));
      t.rounds[i] = run_decoy_round(s, sent, actions, eve, rng, i);
    } else {
      t.rounds[i] = run_round(s, actions, choice, eve, rng, i);
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(config.workers,
                                                           static_cast<unsigned>(config.rounds)));
  if (workers == 1) {
    for (std::size_t i = 0; i < config.rounds; ++i) one(i);
    return t;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < config.rounds; i += workers) one(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return t;
}

Transcript run_session(const NetworkSpec& network, ProtocolKind protocol,
                       const SessionConfig& config) {
  return run_session(std::make_shared<const Session>(network, protocol), config);
}

double ClassTally::standard_error() const {
  if (trials == 0) return 0.0;
  const double p = rate();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

SiftedData sift(const Transcript& transcript) {
  const Session& s = *transcript.session;
  SiftedData out;
  Tally& tally = out.tally;

  std::map<int, std::vector<std::size_t>> layer_cps;
  for (const auto& l : s.network().layers()) {
    auto& v = layer_cps[l.id];
    for (const auto& m : l.members)
      if (auto c = s.cp_index(m)) v.push_back(*c);
  }

  for (const RoundRecord& r : transcript.rounds) {
    const auto& alice = r.alice_outcomes;
    if (r.decoy) {
      out.decoy_rounds.push_back(r.index);
      for (std::size_t c = 0; c < r.actions.size(); ++c) {
        const std::size_t sub = s.cp_subsystem(c);
        const int sent = r.decoy_sent[sub];
        bool bad = alice && (*alice)[sub] != sent;
        if (r.actions[c] == Action::Ctrl) bad = bad || r.cp_outcomes[c] != sent;
        ++tally.decoy.trials;
        if (bad) ++tally.decoy.events;
      }
      continue;
    }

    const bool all_reflect = std::all_of(r.actions.begin(), r.actions.end(),
                                         [](Action a) { return a == Action::Reflect; });
    if (all_reflect) {
      out.test_rounds.push_back(r.index);
      if (r.choice == AliceChoice::Computational) {
        ++tally.reflect_computational.trials;
        if (!s.in_support(*alice)) ++tally.reflect_computational.events;
      } else {
        ++tally.reflect_projective.trials;
        if (!*r.projective_pass) ++tally.reflect_projective.events;
      }
      continue;
    }

    if (r.choice != AliceChoice::Computational) {
      out.discarded.push_back(r.index);
      continue;
    }
    ++tally.ctrl_mismatch.trials;
    for (std::size_t c = 0; c < r.actions.size(); ++c) {
      if (r.actions[c] == Action::Ctrl && r.cp_outcomes[c] != (*alice)[s.cp_subsystem(c)]) {
        ++tally.ctrl_mismatch.events;
        break;
      }
    }
    bool generated = false;
    for (const auto& [layer, cps] : layer_cps) {
      const bool all_ctrl = std::all_of(cps.begin(), cps.end(),
                                        [&](std::size_t c) { return r.actions[c] == Action::Ctrl; });
      if (all_ctrl) {
        out.generation[layer].push_back(r.index);
        generated = true;
      }
    }
    if (!generated) out.discarded.push_back(r.index);
  }
  return out;
}

DetectionVerdict detect_eavesdropping(const SiftedData& sifted, double tolerance) {
  DetectionVerdict v;
  auto check = [&](const ClassTally& t, const char* name) {
    if (t.trials > 0 && t.rate() > tolerance) {
      v.detected = true;
      v.reasons.push_back(std::string(name) + ": " + std::to_string(t.events) + "/" +
                          std::to_string(t.trials));
    }
  };
  check(sifted.tally.reflect_projective, "projective test failures");
  check(sifted.tally.reflect_computational, "support violations");
  check(sifted.tally.ctrl_mismatch, "CTRL outcome mismatches");
  check(sifted.tally.decoy, "decoy mismatches");
  return v;
}

LayerRule layer_rule(const NetworkSpec& network, ProtocolKind protocol, const Layer& layer) {
  LayerRule rule;
  rule.layer = layer.id;
  rule.kind = layer_kind(network, layer, protocol);
  rule.rule = rule.kind == LayerKind::Dishonest ? ReconstructionRule::Xor : ReconstructionRule::Identity;
  for (const auto& m : layer.members) {
    if (is_dishonest_in(network, m, protocol)) {
      rule.xor_parties.push_back(m);
    } else {
      const auto* p = network.find(m);
      if (p && p->role == Role::QP) rule.holders.insert(rule.holders.begin(), m);
      else rule.holders.push_back(m);
    }
  }
  return rule;
}

int layer_symbol(const NetworkSpec& network, const LayerRule& rule,
                 const std::function<int(const std::string&)>& outcome_of) {
  if (!rule.holders.empty()) {
    return routed_bit(network, rule.holders.front(), rule.layer, outcome_of(rule.holders.front()));
  }
  int acc = 0;
  for (const auto& m : rule.xor_parties) acc ^= routed_bit(network, m, rule.layer, outcome_of(m));
  return acc;
}

bool LayerKey::consistent() const {
  for (std::size_t n = 0; n < symbols.size(); ++n) {
    for (const auto& h : rule.holders)
      if (streams.at(h)[n] != symbols[n]) return false;
    if (!rule.xor_parties.empty()) {
      int acc = 0;
      for (const auto& x : rule.xor_parties) acc ^= streams.at(x)[n];
      if (acc != symbols[n]) return false;
    }
    if (dealer[n] != symbols[n]) return false;
  }
  return true;
}

const LayerKey& KeyMaterial::layer(int id) const {
  for (const auto& l : layers)
    if (l.rule.layer == id) return l;
  throw std::out_of_range("no key material for layer " + std::to_string(id));
}

KeyMaterial derive_keys(const Transcript& transcript, const SiftedData& sifted) {
  const Session& s = *transcript.session;
  const NetworkSpec& net = s.network();
  KeyMaterial km;
  for (int id : net.layer_ids()) {
    const Layer& layer = net.layer(id);
    LayerKey key;
    key.rule = layer_rule(net, s.protocol(), layer);
    for (const auto& m : layer.members) key.streams[m];
    const auto it = sifted.generation.find(id);
    if (it != sifted.generation.end()) {
      for (std::size_t idx : it->second) {
        const RoundRecord& r = transcript.rounds.at(idx);
        if (!r.alice_outcomes) {
          throw std::invalid_argument("derive_keys: round " + std::to_string(idx) +
                                      " has no computational readings");
        }
        auto own = [&](const std::string& p) -> int {
          if (auto c = s.cp_index(p)) {
            if (!r.cp_outcomes[*c]) {
              throw std::invalid_argument("derive_keys: " + p + " has no outcome in round " +
                                          std::to_string(idx));
            }
            return *r.cp_outcomes[*c];
          }
          return (*r.alice_outcomes)[s.subsystem_of(p)];
        };
        auto alice_view = [&](const std::string& p) { return (*r.alice_outcomes)[s.subsystem_of(p)]; };
        for (const auto& m : layer.members) key.streams[m].push_back(routed_bit(net, m, id, own(m)));
        key.symbols.push_back(layer_symbol(net, key.rule, own));
        key.dealer.push_back(layer_symbol(net, key.rule, alice_view));
        key.rounds.push_back(idx);
      }
    }
    km.layers.push_back(std::move(key));
  }
  return km;
}

double stream_entropy(std::span<const int> symbols) {
  if (symbols.empty()) throw std::invalid_argument("entropy of an empty stream is undefined");
  std::map<int, std::size_t> counts;
  for (int v : symbols) ++counts[v];
  double h = 0.0;
  const double n = static_cast<double>(symbols.size());
  for (const auto& [v, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace sqlayer
