#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sqlayer/io.hpp"
#include "sqlayer/protocol.hpp"
#include "sqlayer/synth.hpp"

namespace sqlayer::cli {

using io::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Raised for anything that must end in exit code 1 before a report exists.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("'" + key + "' expects a number, got '" + value + "'");
  }
}

std::uint64_t parse_seed(const std::string& where, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used, 0);
    if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": '" + value + "' is not a non-negative integer seed");
  }
}

unsigned parse_workers(const std::string& where, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(value, &used);
    if (used != value.size() || v == 0 || value.front() == '-') throw std::invalid_argument(value);
    return static_cast<unsigned>(v);
  } catch (const std::exception&) {
    throw ConfigError(where + ": '" + value + "' is not a positive worker count");
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Legs {
  bool forward = true;
  bool backward = false;
};

std::optional<Legs> parse_legs(const std::string& token) {
  if (token == "f") return Legs{true, false};
  if (token == "b") return Legs{false, true};
  if (token == "fb" || token == "bf") return Legs{true, true};
  return std::nullopt;
}

BackwardShape parse_shape(const std::string& v) {
  if (v == "swap") return BackwardShape::PartialSwap;
  if (v == "rot") return BackwardShape::Rotation;
  throw std::invalid_argument("back= expects swap or rot, got '" + v + "'");
}

}  // namespace

EveStrategy parse_attack(std::string_view text, const NetworkSpec& network) {
  const auto parts = split(text, ':');
  if (parts.size() < 2 || parts[1].empty()) {
    throw std::invalid_argument("attack '" + std::string(text) + "' needs kind:targets");
  }
  const std::string& kind = parts[0];
  std::vector<std::string> targets;
  for (auto& t : split(parts[1], ','))
    if (!t.empty()) targets.push_back(t);

  std::optional<Legs> legs;
  std::map<std::string, std::string> params;
  for (std::size_t i = 2; i < parts.size(); ++i) {
    if (auto l = parse_legs(parts[i])) {
      if (legs) throw std::invalid_argument("attack legs given twice");
      legs = l;
      continue;
    }
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("attack parameter '" + parts[i] + "' is not key=value or a leg spec");
    }
    params[parts[i].substr(0, eq)] = parts[i].substr(eq + 1);
  }
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : params)
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
        throw std::invalid_argument("attack kind '" + kind + "' takes no parameter '" + k + "'");
  };

  EveStrategy s;
  if (kind == "intercept") {
    allow({});
    const Legs l = legs.value_or(Legs{true, false});
    s = intercept_resend(targets, l.forward, l.backward);
  } else if (kind == "entangle") {
    allow({});
    if (legs && (legs->backward || !legs->forward)) {
      throw std::invalid_argument("entangle taps the forward leg only; use twoway for the backward leg");
    }
    s = entangle_measure(network, targets);
  } else if (kind == "twoway") {
    allow({"theta", "phi", "back", "file"});
    const Legs l = legs.value_or(Legs{true, true});
    if (params.count("file")) {
      if (params.size() > 1) throw std::invalid_argument("file= excludes theta, phi and back");
      const json doc = io::read_json_file(params["file"]);
      std::optional<UnitaryMatrix> uf, ub;
      if (doc.contains("forward")) uf = io::unitary_from_json(doc.at("forward"));
      if (doc.contains("backward")) ub = io::unitary_from_json(doc.at("backward"));
      if (l.forward && !uf) throw std::invalid_argument("unitary file has no \"forward\" entry");
      if (l.backward && !ub) throw std::invalid_argument("unitary file has no \"backward\" entry");
      s.kind = AttackKind::TwoWayEntangle;
      for (const auto& t : targets) {
        TargetAttack a{t, l.forward, l.backward, {}, {}};
        if (l.forward) a.forward_unitary = uf;
        if (l.backward) a.backward_unitary = ub;
        s.targets.push_back(std::move(a));
      }
    } else {
      const double theta = params.count("theta") ? parse_double("theta", params["theta"])
                                                 : std::numbers::pi / 2;
      const double phi = params.count("phi") ? parse_double("phi", params["phi"]) : std::numbers::pi / 4;
      const BackwardShape shape = params.count("back") ? parse_shape(params["back"])
                                                       : BackwardShape::PartialSwap;
      s = two_way(
          network, targets, [&](int d) { return controlled_rotation(d, theta); },
          [&](int d) {
            return shape == BackwardShape::PartialSwap ? partial_swap(d, phi)
                                                       : controlled_rotation(d, phi);
          },
          l.forward, l.backward);
    }
  } else if (kind == "lie") {
    allow({"policy", "offset"});
    if (legs) throw std::invalid_argument("lie takes no leg spec");
    LyingPolicy policy;
    if (params.count("policy")) {
      const std::string& p = params["policy"];
      if (p == "uniform") policy.mode = LyingMode::Uniform;
      else if (p == "offset") policy.mode = LyingMode::Offset;
      else if (p == "honest") policy.mode = LyingMode::Honest;
      else throw std::invalid_argument("policy= expects uniform, offset or honest");
    }
    if (params.count("offset")) {
      policy.offset = static_cast<int>(parse_double("offset", params["offset"]));
      if (!params.count("policy")) policy.mode = LyingMode::Offset;
    }
    s = lying_participant(targets, policy);
  } else {
    throw std::invalid_argument("unknown attack kind '" + kind + "' (intercept, entangle, twoway, lie)");
  }
  check_strategy(s, network);
  return s;
}

AttackFamily parse_family(std::string_view text) {
  const auto parts = split(text, ':');
  AttackFamily f;
  for (auto& t : split(parts[0], ','))
    if (!t.empty()) f.targets.push_back(t);
  if (f.targets.empty()) throw std::invalid_argument("family needs at least one target");
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (auto l = parse_legs(parts[i])) {
      f.forward = l->forward;
      f.backward = l->backward;
      continue;
    }
    const auto eq = parts[i].find('=');
    const std::string key = parts[i].substr(0, eq);
    const std::string value = eq == std::string::npos ? "" : parts[i].substr(eq + 1);
    if (key == "back") f.backward_shape = parse_shape(value);
    else if (key == "scale") f.backward_scale = parse_double("scale", value);
    else throw std::invalid_argument("family parameter '" + parts[i] + "' not understood");
  }
  return f;
}

namespace {

// ------------------------------------------------------------------ run

struct RunSettings {
  std::string protocol;
  std::string network;
  std::size_t rounds = 10000;
  std::optional<std::uint64_t> seed;
  std::string attack;
  double decoy_rate = 0.0;
  std::vector<std::string> analyses{"detection", "confidentiality", "rates"};
  std::string out;
  std::string keys_out;
  std::string transcript_out;
  unsigned workers = 1;
  double tolerance = 0.0;
  std::string family;
  std::size_t grid = 9;
  double max = std::numbers::pi / 2;
  std::string metric = "reflect-projective";
  std::optional<int> layer;
};

const std::set<std::string> kAnalyses{"detection", "confidentiality", "rates", "tradeoff-curve"};

std::vector<std::string> parse_analyses(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items)
    for (auto& a : split(item, ',')) {
      if (a.empty()) continue;
      if (!kAnalyses.count(a)) throw ConfigError("unknown analysis '" + a + "'");
      out.push_back(a);
    }
  return out;
}

void apply_config_file(RunSettings& s, const std::string& path) {
  json doc;
  try {
    doc = io::read_json_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!doc.is_object()) throw ConfigError(path + ": config must be a JSON object");
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto rel = [&](const std::string& p) {
    if (p.empty() || std::filesystem::path(p).is_absolute()) return p;
    return (base / p).string();
  };
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "protocol") s.protocol = v.get<std::string>();
      else if (key == "network") {
        const auto name = v.get<std::string>();
        s.network = fixtures::by_name(name) ? name : rel(name);
      } else if (key == "rounds") s.rounds = v.get<std::size_t>();
      else if (key == "seed") s.seed = v.is_string() ? parse_seed(path, v.get<std::string>()) : v.get<std::uint64_t>();
      else if (key == "attack") s.attack = v.get<std::string>();
      else if (key == "decoy_rate") s.decoy_rate = v.get<double>();
      else if (key == "analyses") {
        s.analyses = parse_analyses(v.is_array() ? v.get<std::vector<std::string>>()
                                                 : std::vector<std::string>{v.get<std::string>()});
      } else if (key == "out") s.out = rel(v.get<std::string>());
      else if (key == "keys_out") s.keys_out = rel(v.get<std::string>());
      else if (key == "transcript_out") s.transcript_out = rel(v.get<std::string>());
      else if (key == "workers") s.workers = v.get<unsigned>();
      else if (key == "tolerance") s.tolerance = v.get<double>();
      else if (key == "family") s.family = v.get<std::string>();
      else if (key == "grid") s.grid = v.get<std::size_t>();
      else if (key == "max") s.max = v.get<double>();
      else if (key == "metric") s.metric = v.get<std::string>();
      else if (key == "layer") s.layer = v.get<int>();
      else throw ConfigError(path + ": unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_environment(RunSettings& s) {
  if (const char* v = std::getenv("SQLAYER_SEED"); v && *v) s.seed = parse_seed("SQLAYER_SEED", v);
  if (const char* v = std::getenv("SQLAYER_WORKERS"); v && *v) s.workers = parse_workers("SQLAYER_WORKERS", v);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Outsider groups worth testing for each layer: every single non-member,
// all non-members together, and each lone XOR party of a share layer.
std::vector<std::pair<std::vector<std::string>, int>> outsider_cases(const Session& s) {
  std::vector<std::pair<std::vector<std::string>, int>> cases;
  const auto reg = s.network().register_order();
  for (const Layer& layer : s.network().layers()) {
    std::vector<std::string> outside;
    for (const auto& id : reg)
      if (std::find(layer.members.begin(), layer.members.end(), id) == layer.members.end())
        outside.push_back(id);
    for (const auto& id : outside) cases.push_back({{id}, layer.id});
    if (outside.size() > 1) cases.push_back({outside, layer.id});
    const LayerRule rule = layer_rule(s.network(), s.protocol(), layer);
    if (rule.kind == LayerKind::Dishonest && rule.xor_parties.size() > 1)
      for (const auto& id : rule.xor_parties) cases.push_back({{id}, layer.id});
  }
  return cases;
}

int default_layer(const NetworkSpec& network, const std::vector<std::string>& targets) {
  for (int id : network.layer_ids()) {
    const Layer& l = network.layer(id);
    for (const auto& t : targets)
      if (std::find(l.members.begin(), l.members.end(), t) != l.members.end()) return id;
  }
  throw ConfigError("no layer contains any family target");
}

json tradeoff_to_json(const TradeoffTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = {{"parameter", r.parameter}, {"detection_exact", r.detection_exact},
                {"eve_accuracy", r.eve_accuracy}};
    if (r.detection_sampled) row["detection_sampled"] = *r.detection_sampled;
    if (r.standard_error) row["se"] = *r.standard_error;
    rows.push_back(std::move(row));
  }
  return {{"layer", t.layer}, {"metric", std::string(to_string(t.metric))}, {"rows", rows},
          {"detection_monotone", t.detection_monotone}, {"accuracy_monotone", t.accuracy_monotone}};
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << body;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

struct RunOutcome {
  json report;
  std::string summary;
  bool detected = false;
};

RunOutcome execute_run(const RunSettings& s) {
  if (s.protocol.empty()) throw ConfigError("--protocol is required");
  if (s.network.empty()) throw ConfigError("--network is required");
  if (!s.seed) throw ConfigError("a seed is required (--seed, SQLAYER_SEED or the config file)");
  if (s.rounds == 0) throw ConfigError("--rounds must be at least 1");
  if (s.workers == 0) throw ConfigError("--workers must be at least 1");

  ProtocolKind protocol;
  NetworkSpec network;
  std::optional<EveStrategy> eve;
  std::shared_ptr<const Session> session;
  RoundClass metric;
  try {
    protocol = parse_protocol(s.protocol);
    network = io::load_network(s.network);
    const ValidationResult v = validate(network);
    if (!v.ok()) {
      std::string msg = "network '" + s.network + "' is invalid:";
      for (const auto& m : v.violations) msg += "\n  " + m;
      throw ConfigError(msg);
    }
    if (!s.attack.empty()) eve = parse_attack(s.attack, network);
    session = std::make_shared<const Session>(network, protocol);
    metric = parse_round_class(s.metric);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const auto has = [&](const char* a) {
    return std::find(s.analyses.begin(), s.analyses.end(), a) != s.analyses.end();
  };
  std::optional<AttackFamily> family;
  if (has("tradeoff-curve")) {
    if (s.family.empty()) throw ConfigError("the tradeoff-curve analysis needs --family");
    if (s.grid == 0) throw ConfigError("--grid must have at least one point");
    try {
      family = parse_family(s.family);
      check_strategy(instantiate(*family, network, 0.0), network);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }

  SessionConfig cfg;
  cfg.rounds = s.rounds;
  cfg.seed = *s.seed;
  cfg.eve = eve;
  cfg.decoy_rate = s.decoy_rate;
  cfg.workers = s.workers;
  Transcript transcript;
  try {
    transcript = run_session(session, cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const SiftedData sifted = sift(transcript);
  const KeyMaterial keys = derive_keys(transcript, sifted);
  const DetectionVerdict verdict = detect_eavesdropping(sifted, s.tolerance);

  RunOutcome o;
  o.detected = verdict.detected;
  json& r = o.report;
  std::ostringstream sum;
  sum << "protocol " << to_string(protocol) << "  network " << s.network << "  rounds " << s.rounds
      << "  seed " << *s.seed << "\n";
  if (eve) sum << "attack " << s.attack << "\n";

  json generation = json::object();
  for (const auto& [layer, rounds] : sifted.generation) generation[std::to_string(layer)] = rounds.size();
  r["meta"] = {{"protocol", std::string(to_string(protocol))},
               {"network", s.network},
               {"network_spec", io::network_to_json(network)},
               {"rounds", s.rounds},
               {"seed", *s.seed},
               {"decoy_rate", s.decoy_rate},
               {"attack", eve ? io::strategy_to_json(*eve) : json(nullptr)},
               {"attack_text", s.attack},
               {"analyses", s.analyses},
               {"tolerance", s.tolerance},
               {"sift", {{"test_rounds", sifted.test_rounds.size()},
                         {"generation_rounds", generation},
                         {"discarded", sifted.discarded.size()},
                         {"decoy_rounds", sifted.decoy_rounds.size()}}}};

  r["keys"] = io::key_digest_to_json(keys);
  for (const auto& k : keys.layers) {
    sum << "layer " << k.rule.layer << "  " << to_string(k.rule.kind) << "  symbols " << k.symbols.size()
        << "  entropy "
        << (k.symbols.empty() ? std::string("n/a") : fmt("%.4f", stream_entropy(k.symbols)))
        << "  consistent " << (k.consistent() ? "yes" : "NO") << "\n";
  }

  json detection = {{"verdict", {{"detected", verdict.detected}, {"reasons", verdict.reasons}}}};
  if (has("detection")) {
    const DetectionReport sampled = sampled_detection(transcript);
    detection["sampled"] = io::detection_to_json(sampled);
    detection["decoy"] = {{"trials", sifted.tally.decoy.trials},
                          {"events", sifted.tally.decoy.events},
                          {"rate", sifted.tally.decoy.rate()},
                          {"se", sifted.tally.decoy.standard_error()}};
    std::optional<DetectionReport> exact;
    if (eve) {
      ExactOptions xo;
      xo.workers = s.workers;
      try {
        exact = exact_detection(*session, &*eve, xo);
        detection["exact"] = io::detection_to_json(*exact);
      } catch (const std::length_error& e) {
        detection["exact"] = {{"unavailable", e.what()}};
      }
      json acc = json::array();
      for (const auto& k : keys.layers) {
        const EveGuess g = eve_guess(transcript, keys, k.rule.layer);
        json row = {{"layer", g.layer}, {"rounds", g.rounds}, {"correct", g.correct},
                    {"accuracy", g.accuracy}, {"se", g.standard_error}};
        if (exact) row["exact"] = exact_eve_accuracy(*session, &*eve, k.rule.layer, xo);
        acc.push_back(std::move(row));
      }
      detection["eve_accuracy"] = acc;
    }
    const double p = exact ? exact->overall.p : sampled.overall.p;
    json cumulative = json::array();
    for (int l : {1, 2, 5, 10, 20, 50}) cumulative.push_back({{"l", l}, {"p", cumulative_detection(p, l)}});
    detection["cumulative_overall"] = {{"per_round", p}, {"provenance", exact ? "exact" : "sampled"},
                                       {"curve", cumulative}};

    for (RoundClass c : {RoundClass::CtrlMismatch, RoundClass::ReflectComputational,
                         RoundClass::ReflectProjective, RoundClass::Overall}) {
      const ClassValue& v = sampled.get(c);
      sum << "detect " << std::left << std::setw(22) << to_string(c) << fmt("%.4f", v.p) << " +- "
          << fmt("%.4f", v.standard_error) << " (" << v.trials << ")";
      if (exact) sum << "  exact " << fmt("%.6f", exact->get(c).p);
      sum << "\n";
    }
    if (sifted.tally.decoy.trials) {
      sum << "detect " << std::left << std::setw(22) << "decoy" << fmt("%.4f", sifted.tally.decoy.rate())
          << " (" << sifted.tally.decoy.trials << ")\n";
    }
  }
  r["detection"] = std::move(detection);

  json conf = json::array();
  if (has("confidentiality")) {
    for (const auto& [outsiders, layer] : outsider_cases(*session)) {
      try {
        const ConfidentialityReport c = confidentiality(*session, outsiders, layer);
        conf.push_back(io::confidentiality_to_json(c));
        std::string who;
        for (const auto& o2 : outsiders) who += (who.empty() ? "" : ",") + o2;
        sum << "confidentiality {" << who << "} vs L" << layer << "  MI "
            << fmt("%.3g", c.mutual_information) << " bits\n";
      } catch (const std::invalid_argument&) {
        // pre-condition not met for this group; nothing to report
      } catch (const std::length_error& e) {
        conf.push_back({{"layer", layer}, {"outsiders", outsiders}, {"unavailable", e.what()}});
      }
    }
  }
  r["confidentiality"] = std::move(conf);

  if (has("rates")) {
    json rates = json::array();
    for (int id : network.layer_ids()) {
      const auto it = sifted.generation.find(id);
      const std::size_t g = it == sifted.generation.end() ? 0 : it->second.size();
      json row = {{"layer", id}, {"generation_rounds", g},
                  {"per_round", static_cast<double>(g) / static_cast<double>(s.rounds)}};
      row["entropy_bits"] = g ? json(sifted_rate(transcript, id)) : json(nullptr);
      rates.push_back(std::move(row));
    }
    r["rates"] = std::move(rates);
  }

  if (family) {
    TradeoffOptions to;
    to.metric = metric;
    to.workers = s.workers;
    const int layer = s.layer ? *s.layer : default_layer(network, family->targets);
    try {
      const TradeoffTable t = eve_tradeoff_curve(session, *family, linear_grid(s.max, s.grid), layer, to);
      r["tradeoff"] = tradeoff_to_json(t);
    } catch (const std::length_error& e) {
      r["tradeoff"] = {{"unavailable", e.what()}};
    }
  }

  r["metadata"] = {{"generated_at", utc_timestamp()}, {"tool", "sqlayer"}, {"version", kVersion}};

  if (verdict.detected) {
    sum << "verdict: eavesdropping detected";
    for (const auto& why : verdict.reasons) sum << "\n  " << why;
    sum << "\n";
  } else {
    sum << "verdict: pass\n";
  }
  o.summary = sum.str();

  // Side outputs are only written once the run itself has succeeded.
  if (!s.keys_out.empty()) write_file(s.keys_out, io::keys_to_json(keys).dump(2) + "\n");
  if (!s.transcript_out.empty()) {
    std::ostringstream t;
    io::write_transcript_jsonl(t, transcript);
    write_file(s.transcript_out, t.str());
  }
  return o;
}

// ------------------------------------------------------------------ synth

void print_state(std::ostream& out, const ResourceState& res) {
  const Dims& dims = res.state.dims();
  out << "subsystems";
  for (std::size_t i = 0; i < res.subsystems.size(); ++i)
    out << " " << res.subsystems[i] << "(d=" << dims[i] << ")";
  out << "\n";
  const auto amps = res.state.amplitudes();
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (std::norm(amps[i]) <= 1e-28) continue;
    ++nonzero;
    const auto digits = dims.unflatten(i);
    std::string tuple = "(";
    for (std::size_t k = 0; k < digits.size(); ++k) tuple += (k ? "," : "") + std::to_string(digits[k]);
    tuple += ")";
    out << "  " << std::left << std::setw(16) << tuple << fmt("%+.12f", amps[i].real()) << " "
        << fmt("%+.12f", amps[i].imag()) << "i\n";
  }
  out << nonzero << " nonzero amplitudes of " << amps.size() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layered semi-quantum key distribution and secret sharing simulator", "sqlayer"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // run
  RunSettings flags;
  std::string config_path;
  std::string seed_text;
  std::vector<std::string> analyses_flag;
  bool print_json = false;
  auto* run = app.add_subcommand("run", "run a session and write a report");
  auto* o_protocol = run->add_option("--protocol", flags.protocol, "lsqkd | lsqss | ilskss");
  auto* o_network = run->add_option("--network", flags.network, "fixture name or network JSON path");
  auto* o_rounds = run->add_option("--rounds", flags.rounds, "number of rounds");
  auto* o_seed = run->add_option("--seed", seed_text, "RNG seed (required here, in the config or env)");
  auto* o_attack = run->add_option("--attack", flags.attack, "attack shorthand, e.g. intercept:bob1");
  auto* o_decoy = run->add_option("--decoy-rate", flags.decoy_rate, "fraction of decoy rounds");
  auto* o_out = run->add_option("--out", flags.out, "report path");
  run->add_option("--config", config_path, "JSON experiment config");
  auto* o_analyses = run->add_option("--analyses", analyses_flag,
                                     "detection,confidentiality,rates,tradeoff-curve")
                         ->delimiter(',');
  auto* o_keys = run->add_option("--keys-out", flags.keys_out, "write derived key bitstrings");
  auto* o_tr = run->add_option("--transcript-out", flags.transcript_out, "write the public transcript (JSONL)");
  auto* o_workers = run->add_option("--workers", flags.workers, "worker threads");
  auto* o_tol = run->add_option("--tolerance", flags.tolerance, "per-class alarm threshold");
  auto* o_family = run->add_option("--family", flags.family, "tradeoff family: targets[:legs][:back=..][:scale=..]");
  auto* o_grid = run->add_option("--grid", flags.grid, "tradeoff grid points");
  auto* o_max = run->add_option("--max", flags.max, "largest tradeoff parameter");
  auto* o_metric = run->add_option("--metric", flags.metric, "round class plotted against accuracy");
  auto* o_layer = run->add_option("--layer", flags.layer, "layer scored for Eve's accuracy");
  run->add_flag("--json", print_json, "print the report instead of the summary");

  // synth
  std::string synth_protocol, synth_network;
  bool synth_json = false;
  auto* synth = app.add_subcommand("synth", "print the resource state and its Schmidt vector");
  synth->add_option("--protocol", synth_protocol, "lsqkd | lsqss | ilskss")->required();
  synth->add_option("--network", synth_network, "fixture name or network JSON path")->required();
  synth->add_flag("--json", synth_json, "JSON output");

  // curve
  std::string c_protocol, c_network, c_family, c_out, c_metric = "reflect-projective", c_seed;
  std::size_t c_grid = 9, c_rounds = 0;
  double c_max = std::numbers::pi / 2;
  std::optional<int> c_layer;
  unsigned c_workers = 1;
  auto* curve = app.add_subcommand("curve", "tabulate detection against Eve's accuracy as CSV");
  curve->add_option("--protocol", c_protocol, "lsqkd | lsqss | ilskss")->required();
  curve->add_option("--network", c_network, "fixture name or network JSON path")->required();
  curve->add_option("--family", c_family, "targets[:legs][:back=swap|rot][:scale=s]")->required();
  curve->add_option("--grid", c_grid, "number of grid points from 0 to --max");
  curve->add_option("--max", c_max, "largest parameter");
  curve->add_option("--metric", c_metric, "round class");
  curve->add_option("--layer", c_layer, "layer scored for Eve's accuracy");
  curve->add_option("--rounds", c_rounds, "Monte Carlo rounds per point (0 = exact only)");
  curve->add_option("--seed", c_seed, "RNG seed for the Monte Carlo column");
  auto* c_workers_opt = curve->add_option("--workers", c_workers, "worker threads");
  curve->add_option("--out", c_out, "CSV path (stdout when omitted)");

  // validate
  std::string v_network, v_protocol;
  auto* val = app.add_subcommand("validate", "check a network document");
  val->add_option("--network", v_network, "fixture name or network JSON path")->required();
  val->add_option("--protocol", v_protocol, "also check that the protocol can synthesize it");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (run->parsed()) {
      RunSettings s;
      if (!config_path.empty()) apply_config_file(s, config_path);
      apply_environment(s);
      if (o_protocol->count()) s.protocol = flags.protocol;
      if (o_network->count()) s.network = flags.network;
      if (o_rounds->count()) s.rounds = flags.rounds;
      if (o_seed->count()) s.seed = parse_seed("--seed", seed_text);
      if (o_attack->count()) s.attack = flags.attack;
      if (o_decoy->count()) s.decoy_rate = flags.decoy_rate;
      if (o_out->count()) s.out = flags.out;
      if (o_analyses->count()) s.analyses = parse_analyses(analyses_flag);
      if (o_keys->count()) s.keys_out = flags.keys_out;
      if (o_tr->count()) s.transcript_out = flags.transcript_out;
      if (o_workers->count()) s.workers = flags.workers;
      if (o_tol->count()) s.tolerance = flags.tolerance;
      if (o_family->count()) s.family = flags.family;
      if (o_grid->count()) s.grid = flags.grid;
      if (o_max->count()) s.max = flags.max;
      if (o_metric->count()) s.metric = flags.metric;
      if (o_layer->count()) s.layer = flags.layer;

      RunOutcome o = execute_run(s);
      const std::string body = o.report.dump(2) + "\n";
      if (!s.out.empty()) write_file(s.out, body);
      if (print_json) out << body;
      else out << o.summary;
      return o.detected ? kExitDetected : kExitPass;
    }

    if (synth->parsed()) {
      const ProtocolKind protocol = parse_protocol(synth_protocol);
      const NetworkSpec network = io::load_network(synth_network);
      const ValidationResult v = validate(network);
      if (!v.ok()) throw ConfigError("network '" + synth_network + "' is invalid: " + v.violations.front());
      const ResourceState res = synthesize(network, protocol);
      const auto sv = schmidt_vector(res.state);
      if (synth_json) {
        out << io::resource_to_json(res).dump(2) << "\n";
      } else {
        out << "resource state for " << to_string(protocol) << " on " << synth_network << "\n";
        print_state(out, res);
        out << "schmidt vector (";
        for (std::size_t i = 0; i < sv.size(); ++i) out << (i ? ", " : "") << sv[i];
        out << ")\n";
      }
      return kExitPass;
    }

    if (curve->parsed()) {
      const ProtocolKind protocol = parse_protocol(c_protocol);
      const NetworkSpec network = io::load_network(c_network);
      const ValidationResult v = validate(network);
      if (!v.ok()) throw ConfigError("network '" + c_network + "' is invalid: " + v.violations.front());
      if (c_grid == 0) throw ConfigError("--grid must have at least one point");
      const AttackFamily family = parse_family(c_family);
      check_strategy(instantiate(family, network, 0.0), network);

      TradeoffOptions to;
      to.metric = parse_round_class(c_metric);
      to.sampled_rounds = c_rounds;
      RunSettings env;
      apply_environment(env);
      if (!c_seed.empty()) to.seed = parse_seed("--seed", c_seed);
      else if (env.seed) to.seed = *env.seed;
      else if (c_rounds > 0) throw ConfigError("--rounds > 0 needs a seed (--seed or SQLAYER_SEED)");
      to.workers = c_workers_opt->count() ? c_workers : env.workers;

      auto session = std::make_shared<const Session>(network, protocol);
      const int layer = c_layer ? *c_layer : default_layer(network, family.targets);
      const TradeoffTable t = eve_tradeoff_curve(session, family, linear_grid(c_max, c_grid), layer, to);

      std::ostringstream csv;
      csv << "parameter,detection_exact,detection_sampled,se,eve_accuracy\n";
      csv << std::setprecision(15);
      for (const auto& r : t.rows) {
        csv << r.parameter << "," << r.detection_exact << ",";
        if (r.detection_sampled) csv << *r.detection_sampled;
        csv << ",";
        if (r.standard_error) csv << *r.standard_error;
        csv << "," << r.eve_accuracy << "\n";
      }
      if (c_out.empty()) out << csv.str();
      else write_file(c_out, csv.str());
      return kExitPass;
    }

    if (val->parsed()) {
      const NetworkSpec network = io::load_network(v_network);
      const ValidationResult v = validate(network);
      for (const auto& m : v.violations) out << "violation: " << m << "\n";
      for (const auto& w : v.warnings) out << "warning: " << w << "\n";
      bool ok = v.ok();
      if (ok && !v_protocol.empty()) {
        try {
          const ResourceState res = synthesize(network, parse_protocol(v_protocol));
          out << "register " << res.state.dims().total() << " amplitudes over "
              << res.subsystems.size() << " subsystems\n";
        } catch (const std::exception& e) {
          out << "violation: " << e.what() << "\n";
          ok = false;
        }
      }
      out << (ok ? "ok" : "invalid") << "\n";
      return ok ? kExitPass : kExitConfigError;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace sqlayer::cli
