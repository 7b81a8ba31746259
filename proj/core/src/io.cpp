#include "sqlayer/io.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

namespace sqlayer::io {

NetworkSpec network_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("network document must be an object");
  std::vector<Participant> ps;
  for (const auto& p : doc.at("participants")) {
    Participant q;
    q.id = p.at("id").get<std::string>();
    const std::string role = p.value("role", "CP");
    if (role == "QP" || role == "qp") q.role = Role::QP;
    else if (role == "CP" || role == "cp") q.role = Role::CP;
    else throw std::invalid_argument("participant '" + q.id + "': unknown role '" + role + "'");
    const std::string honesty = p.value("honesty", "honest");
    if (honesty == "honest") q.honesty = Honesty::Honest;
    else if (honesty == "dishonest") q.honesty = Honesty::Dishonest;
    else throw std::invalid_argument("participant '" + q.id + "': unknown honesty '" + honesty + "'");
    ps.push_back(std::move(q));
  }
  std::vector<Layer> ls;
  for (const auto& l : doc.at("layers")) {
    ls.push_back({l.at("id").get<int>(), l.at("members").get<std::vector<std::string>>()});
  }
  return NetworkSpec(std::move(ps), std::move(ls), doc.at("qp_is_member").get<bool>());
}

json network_to_json(const NetworkSpec& network) {
  json ps = json::array();
  for (const auto& p : network.participants()) {
    ps.push_back({{"id", p.id},
                  {"role", p.role == Role::QP ? "QP" : "CP"},
                  {"honesty", p.honesty == Honesty::Honest ? "honest" : "dishonest"}});
  }
  json ls = json::array();
  for (const auto& l : network.layers()) ls.push_back({{"id", l.id}, {"members", l.members}});
  return {{"participants", ps}, {"layers", ls}, {"qp_is_member", network.qp_is_member()}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("'" + path + "' is not valid JSON: " + e.what());
  }
}

NetworkSpec load_network(const std::string& name_or_path) {
  if (auto f = fixtures::by_name(name_or_path)) return *f;
  try {
    return network_from_json(read_json_file(name_or_path));
  } catch (const json::exception& e) {
    throw std::runtime_error("'" + name_or_path + "': malformed network document: " + e.what());
  }
}

UnitaryMatrix unitary_from_json(const json& doc) {
  const auto dims = doc.at("dims").get<std::vector<int>>();
  std::vector<Complex> m;
  for (const auto& e : doc.at("matrix")) {
    if (e.is_array()) m.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    else m.emplace_back(e.get<double>(), 0.0);
  }
  return UnitaryMatrix(Dims(dims), std::move(m));
}

json unitary_to_json(const UnitaryMatrix& u) {
  json m = json::array();
  for (const Complex& c : u.data()) m.push_back({c.real(), c.imag()});
  return {{"dims", u.acting_dims().values()}, {"matrix", m}};
}

json state_to_json(const QuditState& state, const std::vector<std::string>& labels, double eps) {
  json amps = json::array();
  const auto a = state.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::norm(a[i]) <= eps) continue;
    amps.push_back({{"index", state.dims().unflatten(i)}, {"re", a[i].real()}, {"im", a[i].imag()}});
  }
  return {{"dims", state.dims().values()}, {"subsystems", labels}, {"amplitudes", amps}};
}

json resource_to_json(const ResourceState& resource) {
  json doc = state_to_json(resource.state, resource.subsystems);
  doc["protocol"] = std::string(to_string(resource.protocol));
  doc["schmidt_vector"] = schmidt_vector(resource.state);
  json slots = json::array();
  for (const auto& s : resource.assignment.slots) slots.push_back({{"layer", s.layer}, {"participant", s.participant}});
  doc["qubits"] = slots;
  doc["permutation"] = resource.assignment.permutation;
  return doc;
}

json strategy_to_json(const EveStrategy& strategy) {
  json targets = json::array();
  for (const auto& t : strategy.targets) {
    json e = {{"participant", t.participant}, {"forward", t.forward}, {"backward", t.backward}};
    if (t.forward_unitary) e["forward_unitary"] = unitary_to_json(*t.forward_unitary);
    if (t.backward_unitary) e["backward_unitary"] = unitary_to_json(*t.backward_unitary);
    targets.push_back(std::move(e));
  }
  json doc = {{"kind", std::string(to_string(strategy.kind))}, {"targets", targets}};
  if (strategy.kind == AttackKind::LyingParticipant) {
    static const char* names[] = {"honest", "uniform", "offset"};
    doc["policy"] = names[static_cast<int>(strategy.lying.mode)];
    doc["offset"] = strategy.lying.offset;
  }
  return doc;
}

json detection_to_json(const DetectionReport& report) {
  auto value = [&](const ClassValue& v) {
    json j = {{"p", v.p}, {"provenance", report.exact ? "exact" : "sampled"}};
    if (!report.exact) {
      j["se"] = v.standard_error;
      j["trials"] = v.trials;
    }
    return j;
  };
  json doc = {{"ctrl_mismatch", value(report.ctrl_mismatch)},
              {"reflect_computational", value(report.reflect_computational)},
              {"reflect_projective", value(report.reflect_projective)},
              {"overall", value(report.overall)}};
  if (report.exact) {
    json patterns = json::array();
    for (std::size_t m = 0; m < report.computational_patterns.size(); ++m) {
      json ctrl = json::array();
      for (std::size_t c = 0; c < report.cps.size(); ++c)
        if (m & (std::size_t{1} << c)) ctrl.push_back(report.cps[c]);
      patterns.push_back({{"ctrl", ctrl}, {"choice", "computational"}, {"p", report.computational_patterns[m]}});
    }
    patterns.push_back({{"ctrl", json::array()}, {"choice", "projective"}, {"p", report.projective_all_reflect}});
    doc["patterns"] = patterns;
  }
  return doc;
}

json confidentiality_to_json(const ConfidentialityReport& report) {
  json rows = json::array();
  for (const auto& r : report.joint)
    rows.push_back({{"outsiders", r.outsider_outcomes}, {"symbol", r.symbol}, {"p", r.probability}});
  return {{"layer", report.layer},
          {"outsiders", report.outsiders},
          {"mutual_information_bits", report.mutual_information},
          {"symbol_entropy_bits", report.symbol_entropy},
          {"joint", rows}};
}

json key_digest_to_json(const KeyMaterial& keys) {
  json out = json::array();
  for (const auto& k : keys.layers) {
    std::size_t ones = 0;
    for (int s : k.symbols) ones += static_cast<std::size_t>(s);
    json e = {{"layer", k.rule.layer},
              {"kind", std::string(to_string(k.rule.kind))},
              {"rule", k.rule.rule == ReconstructionRule::Xor ? "xor" : "identity"},
              {"holders", k.rule.holders},
              {"xor_parties", k.rule.xor_parties},
              {"symbols", k.symbols.size()},
              {"ones", ones},
              {"consistent", k.consistent()}};
    e["entropy_bits"] = k.symbols.empty() ? json(nullptr) : json(stream_entropy(k.symbols));
    out.push_back(std::move(e));
  }
  return out;
}

json keys_to_json(const KeyMaterial& keys) {
  auto bits = [](const std::vector<int>& v) {
    std::string s;
    s.reserve(v.size());
    for (int b : v) s.push_back(static_cast<char>('0' + b));
    return s;
  };
  json out = json::array();
  for (const auto& k : keys.layers) {
    json streams = json::object();
    for (const auto& [id, v] : k.streams) streams[id] = bits(v);
    out.push_back({{"layer", k.rule.layer},
                   {"rule", k.rule.rule == ReconstructionRule::Xor ? "xor" : "identity"},
                   {"symbols", bits(k.symbols)},
                   {"streams", streams}});
  }
  return out;
}

json round_to_json(const Session& session, const RoundRecord& r, bool include_eve) {
  std::string actions;
  for (Action a : r.actions) actions.push_back(a == Action::Ctrl ? 'C' : 'R');
  json cp = json::array();
  for (const auto& o : r.cp_outcomes) cp.push_back(o ? json(*o) : json(nullptr));
  json doc = {{"round", r.index}, {"actions", actions}, {"cp", cp}};
  if (r.decoy) {
    doc["decoy"] = true;
    doc["sent"] = r.decoy_sent;
  } else {
    doc["choice"] = r.choice == AliceChoice::Computational ? "C" : "P";
  }
  if (r.alice_outcomes) doc["alice"] = *r.alice_outcomes;
  if (r.projective_pass) doc["pass"] = *r.projective_pass;
  if (include_eve && r.eve) {
    json taps = json::array();
    for (const auto& t : r.eve->taps) {
      json e = {{"participant", t.participant}};
      if (t.forward_outcome) e["forward_outcome"] = *t.forward_outcome;
      if (t.backward_outcome) e["backward_outcome"] = *t.backward_outcome;
      if (t.forward_reading) e["forward_reading"] = *t.forward_reading;
      if (t.backward_reading) e["backward_reading"] = *t.backward_reading;
      if (t.true_outcome) e["true_outcome"] = *t.true_outcome;
      taps.push_back(std::move(e));
    }
    doc["eve"] = taps;
  }
  (void)session;
  return doc;
}

void write_transcript_jsonl(std::ostream& out, const Transcript& transcript, bool include_eve) {
  for (const auto& r : transcript.rounds) out << round_to_json(*transcript.session, r, include_eve).dump() << '\n';
}

}  // namespace sqlayer::io
