#include "sqlayer/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

namespace sqlayer {

std::string_view to_string(RoundClass c) {
  switch (c) {
    case RoundClass::CtrlMismatch: return "ctrl-mismatch";
    case RoundClass::ReflectComputational: return "reflect-computational";
    case RoundClass::ReflectProjective: return "reflect-projective";
    case RoundClass::Overall: return "overall";
  }
  return "?";
}

RoundClass parse_round_class(std::string_view name) {
  for (RoundClass c : {RoundClass::CtrlMismatch, RoundClass::ReflectComputational,
                       RoundClass::ReflectProjective, RoundClass::Overall})
    if (to_string(c) == name) return c;
  throw std::invalid_argument("unknown round class '" + std::string(name) + "'");
}

std::string_view to_string(BackwardShape shape) {
  return shape == BackwardShape::PartialSwap ? "swap" : "rot";
}

const ClassValue& DetectionReport::get(RoundClass c) const {
  switch (c) {
    case RoundClass::CtrlMismatch: return ctrl_mismatch;
    case RoundClass::ReflectComputational: return reflect_computational;
    case RoundClass::ReflectProjective: return reflect_projective;
    case RoundClass::Overall: return overall;
  }
  return overall;
}

double DetectionReport::pattern(unsigned mask, AliceChoice choice) const {
  if (!exact) throw std::logic_error("pattern table exists for exact reports only");
  if (choice == AliceChoice::Projective) {
    if (mask != 0) throw std::invalid_argument("projective rounds with CTRL carry no detection event");
    return projective_all_reflect;
  }
  return computational_patterns.at(mask);
}

namespace {

constexpr double kBranchFloor = 1e-18;
constexpr double kLeafFloor = 1e-30;

struct TargetInfo {
  std::size_t subsystem = 0;
  int dim = 0;
  std::optional<std::size_t> cp;
  bool intercept_forward = false;
  bool intercept_backward = false;
  const UnitaryMatrix* forward = nullptr;
  const UnitaryMatrix* backward = nullptr;
  std::optional<std::size_t> forward_ancilla;
  std::optional<std::size_t> backward_ancilla;
  bool liar = false;
};

struct Branch {
  QuditState state;
  double weight = 1.0;
  std::vector<int> forward_outcome;  // per target, -1 when not intercepted
  std::vector<int> ctrl;             // per CP, -1 when the reading is deferred
};

// Splits a state into its collapsed branches over the listed subsystems.
template <class F>
void split(const QuditState& st, const std::vector<std::size_t>& subsystems, F&& f) {
  if (subsystems.empty()) {
    f(std::vector<int>{}, 1.0, QuditState(st));
    return;
  }
  const Distribution d = outcome_distribution(st, subsystems);
  for (std::size_t k = 0; k < d.probs.size(); ++k) {
    if (d.probs[k] <= kBranchFloor) continue;
    const std::vector<int> digits = d.dims.unflatten(k);
    Collapse c = collapse(st, subsystems, digits);
    if (!c.post) continue;
    f(digits, d.probs[k], std::move(*c.post));
  }
}

struct MemberRef {
  std::optional<std::size_t> cp;  // CP index, else the QP's subsystem
  std::size_t subsystem = 0;
  int shift = 0;
  int target = -1;  // index into the strategy's targets
};

struct LayerPlan {
  int id = 0;
  std::vector<MemberRef> holders;
  std::vector<MemberRef> xor_parties;
  std::vector<std::size_t> cps;  // CP indices of the layer
};

// Exact evolution of one round for every CTRL pattern.  Computational
// readings of CTRL subsystems that nothing but further computational
// measurements touch are read off Alice's final distribution instead of
// being branched on.  Those measurements commute, so the joint statistics
// are unchanged.
class ExactEngine {
 public:
  ExactEngine(const Session& s, const EveStrategy* eve) : s_(s), eve_(eve) {
    const std::size_t reg = s.register_size();
    std::size_t joint = s.state().dims().total();
    std::size_t next = reg;
    cp_target_.assign(s.cps().size(), -1);
    if (eve) {
      check_strategy(*eve, s.network());
      for (std::size_t k = 0; k < eve->targets.size(); ++k) {
        const TargetAttack& t = eve->targets[k];
        TargetInfo info;
        info.subsystem = s.subsystem_of(t.participant);
        info.dim = s.dim(info.subsystem);
        info.cp = s.cp_index(t.participant);
        cp_target_[*info.cp] = static_cast<int>(k);
        switch (eve->kind) {
          case AttackKind::InterceptResend:
            info.intercept_forward = t.forward;
            info.intercept_backward = t.backward;
            break;
          case AttackKind::EntangleMeasure:
          case AttackKind::TwoWayEntangle:
            if (t.forward) info.forward = &*t.forward_unitary;
            if (t.backward) info.backward = &*t.backward_unitary;
            break;
          case AttackKind::LyingParticipant:
            info.liar = true;
            break;
        }
        targets_.push_back(info);
      }
      for (auto& t : targets_)
        if (t.forward) {
          t.forward_ancilla = next++;
          joint *= static_cast<std::size_t>(t.forward->acting_dims()[1]);
        }
      for (auto& t : targets_)
        if (t.backward) {
          t.backward_ancilla = next++;
          joint *= static_cast<std::size_t>(t.backward->acting_dims()[1]);
        }
    }
    if (joint > kMaxRegisterAmplitudes) {
      throw std::length_error("exact evaluation needs " + std::to_string(joint) +
                              " amplitudes; the cap is 2^22, use sampled detection");
    }
    ancilla_total_ = joint / s.state().dims().total();
    for (std::size_t k = 0; k < targets_.size(); ++k)
      if (targets_[k].backward) backward_cp_mask_ |= 1u << *targets_[k].cp;
    for (const auto& t : targets_)
      if (t.liar) {
        std::vector<std::vector<double>> table;
        for (int v = 0; v < t.dim; ++v) table.push_back(lying_distribution(eve->lying, v, t.dim));
        lie_tables_[*t.cp] = std::move(table);
      }
    build_forward();
  }

  std::size_t cp_count() const { return s_.cps().size(); }

  const std::vector<Branch>& computational(unsigned mask) {
    const unsigned key = mask & backward_cp_mask_;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<std::size_t> subs;
    std::vector<std::size_t> which;
    for (std::size_t c = 0; c < cp_count(); ++c)
      if (key & (1u << c)) {
        subs.push_back(s_.cp_subsystem(c));
        which.push_back(c);
      }
    std::vector<Branch> out;
    for (const Branch& b : forward_) {
      split(b.state, subs, [&](const std::vector<int>& digits, double p, QuditState&& post) {
        Branch nb{std::move(post), b.weight * p, b.forward_outcome, b.ctrl};
        for (std::size_t j = 0; j < which.size(); ++j) nb.ctrl[which[j]] = digits[j];
        nb.state = apply_backward_unitaries(nb.state);
        out.push_back(std::move(nb));
      });
    }
    return cache_.emplace(key, std::move(out)).first->second;
  }

  double projective_failure() const {
    std::vector<std::size_t> subs;
    for (const auto& t : targets_)
      if (t.intercept_backward) subs.push_back(t.subsystem);
    double total = 0.0;
    for (const Branch& b : forward_) {
      split(b.state, subs, [&](const std::vector<int>&, double p, QuditState&& post) {
        const QuditState fin = apply_backward_unitaries(post);
        total += b.weight * p * project_onto(fin, s_.state()).failure_prob;
      });
    }
    return total;
  }

  // Visits every joint computational outcome of the branch.
  template <class F>
  void for_each_leaf(const Branch& b, F&& f) const {
    const auto amps = b.state.amplitudes();
    const Dims& dims = b.state.dims();
    std::vector<int> digits(dims.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const double p = std::norm(amps[i]);
      if (p <= kLeafFloor) continue;
      std::size_t rest = i;
      for (std::size_t k = dims.size(); k-- > 0;) {
        digits[k] = static_cast<int>(rest % static_cast<std::size_t>(dims[k]));
        rest /= static_cast<std::size_t>(dims[k]);
      }
      f(b.weight * p, i / ancilla_total_, digits);
    }
  }

  double computational_detection(unsigned mask) {
    double event = 0.0;
    std::vector<std::size_t> ctrl;
    for (std::size_t c = 0; c < cp_count(); ++c)
      if (mask & (1u << c)) ctrl.push_back(c);
    for (const Branch& b : computational(mask)) {
      for_each_leaf(b, [&](double w, std::size_t reg_index, const std::vector<int>& d) {
        if (mask == 0) {
          if (!s_.in_support(reg_index)) event += w;
          return;
        }
        double ok = 1.0;
        for (std::size_t c : ctrl) {
          const int alice = d[s_.cp_subsystem(c)];
          const int truth = b.ctrl[c] >= 0 ? b.ctrl[c] : alice;
          if (auto lt = lie_tables_.find(c); lt != lie_tables_.end()) ok *= lt->second[truth][alice];
          else if (truth != alice) ok = 0.0;
        }
        event += w * (1.0 - ok);
      });
    }
    return event;
  }

  double accuracy(unsigned mask, const LayerPlan& plan) {
    double score = 0.0;
    double weight = 0.0;
    std::vector<std::size_t> liars;
    for (std::size_t c = 0; c < cp_count(); ++c)
      if ((mask & (1u << c)) && lie_tables_.count(c)) liars.push_back(c);
    std::vector<int> reports(cp_count(), -1);
    std::vector<int> estimate(targets_.size(), -1);

    for (const Branch& b : computational(mask)) {
      for_each_leaf(b, [&](double w, std::size_t, const std::vector<int>& d) {
        for (std::size_t c = 0; c < cp_count(); ++c) {
          if (!(mask & (1u << c))) continue;
          const int alice = d[s_.cp_subsystem(c)];
          reports[c] = b.ctrl[c] >= 0 ? b.ctrl[c] : alice;
        }
        for (std::size_t k = 0; k < targets_.size(); ++k) {
          const TargetInfo& t = targets_[k];
          int e = -1;
          if (t.liar) {
            if (mask & (1u << *t.cp)) e = reports[*t.cp];
          } else if (b.forward_outcome[k] >= 0) {
            e = b.forward_outcome[k];
          } else if (t.forward_ancilla) {
            e = d[*t.forward_ancilla] % t.dim;
          } else if (t.intercept_backward) {
            e = d[t.subsystem];
          } else if (t.backward_ancilla) {
            e = d[*t.backward_ancilla] % t.dim;
          }
          estimate[k] = e;
        }
        const std::optional<int> guess = guess_of(plan, estimate);
        // Liars' reports branch on the lying distribution; the truth stays in
        // `estimate`, the reported values decide the reference symbol.
        std::vector<int> truth = reports;
        enumerate_reports(liars, 0, 1.0, truth, reports, [&](double q, const std::vector<int>& rep) {
          const int sym = symbol_of(plan, rep, d);
          const double hit = guess ? (*guess == sym ? 1.0 : 0.0) : 0.5;
          score += w * q * hit;
          weight += w * q;
        });
        reports = truth;
      });
    }
    return weight > 0.0 ? score / weight : 0.5;
  }

  LayerPlan plan(int layer_id) const {
    const NetworkSpec& net = s_.network();
    const Layer& layer = net.layer(layer_id);
    const LayerRule rule = layer_rule(net, s_.protocol(), layer);
    LayerPlan p;
    p.id = layer_id;
    auto ref = [&](const std::string& id) {
      MemberRef m;
      m.cp = s_.cp_index(id);
      m.subsystem = s_.subsystem_of(id);
      m.shift = net.bit_shift(id, layer_id);
      if (m.cp) m.target = cp_target_[*m.cp];
      return m;
    };
    for (const auto& h : rule.holders) p.holders.push_back(ref(h));
    for (const auto& x : rule.xor_parties) p.xor_parties.push_back(ref(x));
    for (const auto& m : layer.members)
      if (auto c = s_.cp_index(m)) p.cps.push_back(*c);
    return p;
  }

 private:
  void build_forward() {
    Branch root{s_.state(), 1.0, std::vector<int>(targets_.size(), -1), std::vector<int>(cp_count(), -1)};
    std::vector<std::size_t> subs;
    std::vector<std::size_t> which;
    for (std::size_t k = 0; k < targets_.size(); ++k)
      if (targets_[k].intercept_forward) {
        subs.push_back(targets_[k].subsystem);
        which.push_back(k);
      }
    split(root.state, subs, [&](const std::vector<int>& digits, double p, QuditState&& post) {
      Branch b{std::move(post), p, root.forward_outcome, root.ctrl};
      for (std::size_t j = 0; j < which.size(); ++j) b.forward_outcome[which[j]] = digits[j];
      for (const auto& t : targets_)
        if (t.forward) {
          b.state = attach_ancilla(b.state, t.forward->acting_dims()[1]);
          b.state = apply_unitary(b.state, {t.subsystem, *t.forward_ancilla}, *t.forward);
        }
      forward_.push_back(std::move(b));
    });
  }

  QuditState apply_backward_unitaries(QuditState st) const {
    for (const auto& t : targets_)
      if (t.backward) {
        st = attach_ancilla(st, t.backward->acting_dims()[1]);
        st = apply_unitary(st, {t.subsystem, *t.backward_ancilla}, *t.backward);
      }
    return st;
  }

  static int bit(const MemberRef& m, int outcome) { return (outcome >> m.shift) & 1; }

  int outcome_of(const MemberRef& m, const std::vector<int>& reports, const std::vector<int>& d) const {
    return m.cp ? reports[*m.cp] : d[m.subsystem];
  }

  int symbol_of(const LayerPlan& p, const std::vector<int>& reports, const std::vector<int>& d) const {
    if (!p.holders.empty()) return bit(p.holders.front(), outcome_of(p.holders.front(), reports, d));
    int acc = 0;
    for (const auto& m : p.xor_parties) acc ^= bit(m, outcome_of(m, reports, d));
    return acc;
  }

  static std::optional<int> guess_of(const LayerPlan& p, const std::vector<int>& estimate) {
    for (const auto& h : p.holders)
      if (h.target >= 0 && estimate[h.target] >= 0) return bit(h, estimate[h.target]);
    if (p.xor_parties.empty()) return std::nullopt;
    int acc = 0;
    for (const auto& m : p.xor_parties) {
      if (m.target < 0 || estimate[m.target] < 0) return std::nullopt;
      acc ^= bit(m, estimate[m.target]);
    }
    return acc;
  }

  template <class F>
  void enumerate_reports(const std::vector<std::size_t>& liars, std::size_t k, double q,
                         const std::vector<int>& truth, std::vector<int>& rep, F&& f) const {
    if (k == liars.size()) {
      f(q, rep);
      return;
    }
    const std::size_t c = liars[k];
    const auto& dist = lie_tables_.at(c)[truth[c]];
    for (std::size_t v = 0; v < dist.size(); ++v) {
      if (dist[v] <= 0.0) continue;
      rep[c] = static_cast<int>(v);
      enumerate_reports(liars, k + 1, q * dist[v], truth, rep, f);
    }
    rep[c] = truth[c];
  }

  const Session& s_;
  const EveStrategy* eve_;
  std::vector<TargetInfo> targets_;
  std::vector<int> cp_target_;
  std::map<std::size_t, std::vector<std::vector<double>>> lie_tables_;
  std::size_t ancilla_total_ = 1;
  unsigned backward_cp_mask_ = 0;
  std::vector<Branch> forward_;
  std::map<unsigned, std::vector<Branch>> cache_;
};

double mask_probability(unsigned mask, std::size_t cps, double q) {
  double p = 1.0;
  for (std::size_t c = 0; c < cps; ++c) p *= (mask & (1u << c)) ? q : 1.0 - q;
  return p;
}

void check_cp_count(const Session& s) {
  if (s.cps().size() > 20) throw std::length_error("exact evaluation supports at most 20 CPs");
}

// Runs f(mask) for every mask, spreading masks over workers.  Results land
// in slots indexed by mask so the later reduction order is fixed.
template <class F>
std::vector<double> over_masks(unsigned count, unsigned workers, F&& make_engine_and_eval) {
  std::vector<double> out(count, 0.0);
  workers = std::max(1u, std::min(workers, count));
  if (workers == 1) {
    make_engine_and_eval(0u, 1u, out);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        make_engine_and_eval(w, workers, out);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

DetectionReport exact_detection(const Session& session, const EveStrategy* strategy,
                                const ExactOptions& options) {
  check_cp_count(session);
  const std::size_t c = session.cps().size();
  const unsigned masks = 1u << c;
  ExactEngine probe(session, strategy);  // validates and sizes before spawning workers

  DetectionReport r;
  r.exact = true;
  r.cps = session.cps();
  r.computational_patterns = over_masks(masks, options.workers, [&](unsigned w, unsigned stride,
                                                                   std::vector<double>& out) {
    ExactEngine local(session, strategy);
    for (unsigned m = w; m < masks; m += stride) out[m] = local.computational_detection(m);
  });
  r.projective_all_reflect = std::clamp(probe.projective_failure(), 0.0, 1.0);
  for (auto& p : r.computational_patterns) p = std::clamp(p, 0.0, 1.0);

  const double q = options.ctrl_probability;
  const double pc = options.computational_probability;
  double ctrl_num = 0.0, ctrl_den = 0.0, overall = 0.0;
  for (unsigned m = 0; m < masks; ++m) {
    const double pm = mask_probability(m, c, q);
    overall += pm * pc * r.computational_patterns[m];
    if (m != 0) {
      ctrl_num += pm * r.computational_patterns[m];
      ctrl_den += pm;
    }
  }
  overall += mask_probability(0, c, q) * (1.0 - pc) * r.projective_all_reflect;
  r.ctrl_mismatch.p = ctrl_den > 0.0 ? ctrl_num / ctrl_den : 0.0;
  r.reflect_computational.p = r.computational_patterns[0];
  r.reflect_projective.p = r.projective_all_reflect;
  r.overall.p = overall;
  return r;
}

DetectionReport exact_detection(ProtocolKind protocol, const NetworkSpec& network,
                                const EveStrategy* strategy, const ExactOptions& options) {
  return exact_detection(Session(network, protocol), strategy, options);
}

DetectionReport sampled_detection(const Transcript& transcript) {
  const SiftedData sifted = sift(transcript);
  const Tally& t = sifted.tally;
  DetectionReport r;
  r.exact = false;
  r.cps = transcript.session->cps();
  auto fill = [](ClassValue& v, const ClassTally& tally) {
    v.p = tally.rate();
    v.standard_error = tally.standard_error();
    v.trials = tally.trials;
  };
  fill(r.ctrl_mismatch, t.ctrl_mismatch);
  fill(r.reflect_computational, t.reflect_computational);
  fill(r.reflect_projective, t.reflect_projective);
  ClassTally all;
  all.trials = transcript.rounds.size() - sifted.decoy_rounds.size();
  all.events = t.ctrl_mismatch.events + t.reflect_computational.events + t.reflect_projective.events;
  fill(r.overall, all);
  return r;
}

DetectionReport sampled_detection(std::shared_ptr<const Session> session,
                                  const EveStrategy* strategy, std::size_t rounds,
                                  std::uint64_t seed, unsigned workers) {
  SessionConfig cfg;
  cfg.rounds = rounds;
  cfg.seed = seed;
  cfg.workers = workers;
  if (strategy) cfg.eve = *strategy;
  return sampled_detection(run_session(std::move(session), cfg));
}

double cumulative_detection(double p, int l) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("cumulative_detection: p must lie in [0, 1]");
  if (l < 0) throw std::invalid_argument("cumulative_detection: l must be >= 0");
  return 1.0 - std::pow(1.0 - p, l);
}

std::vector<double> cumulative_curve(double p, int max_l) {
  std::vector<double> out;
  for (int l = 0; l <= max_l; ++l) out.push_back(cumulative_detection(p, l));
  return out;
}

double exact_eve_accuracy(const Session& session, const EveStrategy* strategy, int layer,
                          const ExactOptions& options) {
  check_cp_count(session);
  ExactEngine probe(session, strategy);
  const LayerPlan plan = probe.plan(layer);
  unsigned need = 0;
  for (std::size_t c : plan.cps) need |= 1u << c;
  const std::size_t c = session.cps().size();
  const unsigned masks = 1u << c;
  const auto acc = over_masks(masks, options.workers, [&](unsigned w, unsigned stride,
                                                          std::vector<double>& out) {
    ExactEngine local(session, strategy);
    for (unsigned m = w; m < masks; m += stride)
      if ((m & need) == need) out[m] = local.accuracy(m, plan);
  });
  double num = 0.0, den = 0.0;
  for (unsigned m = 0; m < masks; ++m) {
    if ((m & need) != need) continue;
    const double pm = mask_probability(m, c, options.ctrl_probability);
    num += pm * acc[m];
    den += pm;
  }
  return num / den;
}

ConfidentialityReport confidentiality(const Session& session,
                                      const std::vector<std::string>& outsiders, int layer_id) {
  const NetworkSpec& net = session.network();
  const Layer& layer = net.layer(layer_id);
  const LayerRule rule = layer_rule(net, session.protocol(), layer);
  if (outsiders.empty()) throw std::invalid_argument("confidentiality: no outsiders given");

  std::vector<std::size_t> subs;
  std::size_t inside = 0;
  for (const auto& o : outsiders) {
    if (!net.find(o)) throw std::invalid_argument("confidentiality: unknown participant '" + o + "'");
    const bool member = std::find(layer.members.begin(), layer.members.end(), o) != layer.members.end();
    if (member) {
      const bool share_holder =
          std::find(rule.xor_parties.begin(), rule.xor_parties.end(), o) != rule.xor_parties.end();
      if (!share_holder || !rule.holders.empty()) {
        throw std::invalid_argument("confidentiality: '" + o + "' belongs to layer " +
                                    std::to_string(layer_id));
      }
      ++inside;
    }
    subs.push_back(session.subsystem_of(o));
  }
  if (inside > 0 && inside >= rule.xor_parties.size()) {
    throw std::invalid_argument("confidentiality: outsiders hold every share of layer " +
                                std::to_string(layer_id));
  }

  std::map<std::pair<std::vector<int>, int>, double> joint;
  const QuditState& st = session.state();
  const auto amps = st.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    if (p <= kLeafFloor) continue;
    const std::vector<int> d = st.dims().unflatten(i);
    std::vector<int> x;
    for (std::size_t s : subs) x.push_back(d[s]);
    const int y = layer_symbol(net, rule, [&](const std::string& id) { return d[session.subsystem_of(id)]; });
    joint[{std::move(x), y}] += p;
  }

  ConfidentialityReport r;
  r.layer = layer_id;
  r.outsiders = outsiders;
  std::map<std::vector<int>, double> px;
  std::map<int, double> py;
  for (const auto& [k, p] : joint) {
    px[k.first] += p;
    py[k.second] += p;
    r.joint.push_back({k.first, k.second, p});
  }
  double mi = 0.0;
  for (const auto& [k, p] : joint) {
    if (p <= 0.0) continue;
    mi += p * std::log2(p / (px[k.first] * py[k.second]));
  }
  double h = 0.0;
  for (const auto& [y, p] : py)
    if (p > 0.0) h -= p * std::log2(p);
  // Rounding can leave a negative residue of order 1e-16.
  r.mutual_information = std::max(0.0, mi);
  r.symbol_entropy = h;
  return r;
}

ConfidentialityReport confidentiality(ProtocolKind protocol, const NetworkSpec& network,
                                      const std::vector<std::string>& outsiders, int layer) {
  return confidentiality(Session(network, protocol), outsiders, layer);
}

double sifted_rate(const Transcript& transcript, int layer) {
  const KeyMaterial km = derive_keys(transcript, sift(transcript));
  return stream_entropy(km.layer(layer).symbols);
}

EveStrategy instantiate(const AttackFamily& family, const NetworkSpec& network, double t) {
  const double back = family.backward_scale * t;
  const BackwardShape shape = family.backward_shape;
  return two_way(
      network, family.targets, [t](int d) { return controlled_rotation(d, t); },
      [back, shape](int d) {
        return shape == BackwardShape::PartialSwap ? partial_swap(d, back) : controlled_rotation(d, back);
      },
      family.forward, family.backward);
}

std::vector<double> linear_grid(double max, std::size_t points) {
  if (points == 0) return {};
  if (points == 1) return {0.0};
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) g[i] = max * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

TradeoffTable eve_tradeoff_curve(std::shared_ptr<const Session> session, const AttackFamily& family,
                                 const std::vector<double>& grid, int layer,
                                 const TradeoffOptions& options) {
  if (grid.empty()) throw std::invalid_argument("eve_tradeoff_curve: empty grid");
  session->network().layer(layer);
  TradeoffTable table;
  table.layer = layer;
  table.metric = options.metric;
  ExactOptions ex;
  ex.workers = options.workers;
  for (double t : grid) {
    const EveStrategy s = instantiate(family, session->network(), t);
    TradeoffRow row;
    row.parameter = t;
    row.detection_exact = exact_detection(*session, &s, ex).get(options.metric).p;
    row.eve_accuracy = exact_eve_accuracy(*session, &s, layer, ex);
    if (options.sampled_rounds > 0) {
      const DetectionReport sr = sampled_detection(session, &s, options.sampled_rounds, options.seed,
                                                   options.workers);
      row.detection_sampled = sr.get(options.metric).p;
      row.standard_error = sr.get(options.metric).standard_error;
    }
    table.rows.push_back(row);
  }
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (table.rows[i].detection_exact + 1e-12 < table.rows[i - 1].detection_exact)
      table.detection_monotone = false;
    if (table.rows[i].eve_accuracy + 1e-12 < table.rows[i - 1].eve_accuracy)
      table.accuracy_monotone = false;
  }
  return table;
}

}  // namespace sqlayer
