#include "sqlayer/network.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace sqlayer {

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::LSQKD: return "lsqkd";
    case ProtocolKind::LSQSS: return "lsqss";
    case ProtocolKind::ILSKSS: return "ilskss";
  }
  return "?";
}

ProtocolKind parse_protocol(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "lsqkd") return ProtocolKind::LSQKD;
  if (lower == "lsqss") return ProtocolKind::LSQSS;
  if (lower == "ilskss") return ProtocolKind::ILSKSS;
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Honest: return "honest";
    case LayerKind::Dishonest: return "dishonest";
    case LayerKind::Mixed: return "mixed";
  }
  return "?";
}

NetworkSpec::NetworkSpec(std::vector<Participant> participants, std::vector<Layer> layers,
                         bool qp_is_member)
    : participants_(std::move(participants)),
      layers_(std::move(layers)),
      qp_is_member_(qp_is_member) {}

const Participant* NetworkSpec::find(std::string_view id) const {
  for (const auto& p : participants_)
    if (p.id == id) return &p;
  return nullptr;
}

const Layer* NetworkSpec::find_layer(int id) const {
  for (const auto& l : layers_)
    if (l.id == id) return &l;
  return nullptr;
}

const Layer& NetworkSpec::layer(int id) const {
  if (const auto* l = find_layer(id)) return *l;
  throw std::out_of_range("unknown layer " + std::to_string(id));
}

int NetworkSpec::layer_count(std::string_view id) const {
  int c = 0;
  for (const auto& l : layers_)
    if (std::find(l.members.begin(), l.members.end(), id) != l.members.end()) ++c;
  return c;
}

std::vector<int> NetworkSpec::layers_of(std::string_view id) const {
  std::vector<int> out;
  for (const auto& l : layers_)
    if (std::find(l.members.begin(), l.members.end(), id) != l.members.end()) out.push_back(l.id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> NetworkSpec::layer_ids() const {
  std::vector<int> out;
  for (const auto& l : layers_) out.push_back(l.id);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> NetworkSpec::qp() const {
  for (const auto& p : participants_)
    if (p.role == Role::QP) return p.id;
  return std::nullopt;
}

std::vector<std::string> NetworkSpec::register_order() const {
  std::vector<std::string> out;
  for (const auto& p : participants_)
    if (layer_count(p.id) > 0) out.push_back(p.id);
  return out;
}

std::optional<std::size_t> NetworkSpec::subsystem_of(std::string_view id) const {
  std::size_t idx = 0;
  for (const auto& p : participants_) {
    if (layer_count(p.id) == 0) continue;
    if (p.id == id) return idx;
    ++idx;
  }
  return std::nullopt;
}

int NetworkSpec::bit_shift(std::string_view id, int layer_id) const {
  const auto mine = layers_of(id);
  const auto it = std::find(mine.begin(), mine.end(), layer_id);
  if (it == mine.end()) {
    throw std::out_of_range(std::string(id) + " is not a member of layer " +
                            std::to_string(layer_id));
  }
  const int position = static_cast<int>(it - mine.begin()) + 1;
  return static_cast<int>(mine.size()) - position;
}

ValidationResult validate(const NetworkSpec& spec) {
  ValidationResult r;
  auto& v = r.violations;

  if (spec.participants().empty()) v.push_back("network has no participants");
  if (spec.layers().empty()) v.push_back("network has no layers");

  std::set<std::string> ids;
  int qp_count = 0;
  for (const auto& p : spec.participants()) {
    if (p.id.empty()) v.push_back("participant with empty id");
    if (!ids.insert(p.id).second) v.push_back("duplicate participant id '" + p.id + "'");
    if (p.role == Role::QP) ++qp_count;
  }
  if (qp_count != 1) {
    v.push_back("expected exactly one QP, found " + std::to_string(qp_count));
  }

  std::set<int> layer_ids;
  for (const auto& l : spec.layers()) {
    const std::string name = "layer " + std::to_string(l.id);
    if (l.id < 1) v.push_back(name + ": layer ids start at 1");
    if (!layer_ids.insert(l.id).second) v.push_back("duplicate " + name);
    if (l.members.size() < 2) v.push_back(name + ": needs at least two members");
    std::set<std::string> seen;
    for (const auto& m : l.members) {
      if (!seen.insert(m).second) v.push_back(name + ": duplicate member '" + m + "'");
      if (!ids.count(m)) v.push_back(name + ": unknown member '" + m + "'");
    }
  }

  for (const auto& p : spec.participants()) {
    const int l = spec.layer_count(p.id);
    if (p.role == Role::CP && l == 0) {
      v.push_back("classical participant '" + p.id + "' belongs to no layer");
    }
    if (p.role == Role::QP) {
      if (spec.qp_is_member() && l == 0) {
        v.push_back("qp_is_member is set but QP '" + p.id + "' belongs to no layer");
      }
      if (!spec.qp_is_member() && l > 0) {
        v.push_back("QP '" + p.id + "' appears in a layer but qp_is_member is false");
      }
    }
    if (l > 30) v.push_back("participant '" + p.id + "' belongs to too many layers");
  }

  const auto& ls = spec.layers();
  for (std::size_t i = 0; i < ls.size(); ++i)
    for (std::size_t j = i + 1; j < ls.size(); ++j) {
      std::set<std::string> a(ls[i].members.begin(), ls[i].members.end());
      std::set<std::string> b(ls[j].members.begin(), ls[j].members.end());
      if (a == b) {
        r.warnings.push_back("layers " + std::to_string(ls[i].id) + " and " +
                             std::to_string(ls[j].id) +
                             " have identical members; they receive independent keys");
      }
    }
  return r;
}

int participant_dimension(const NetworkSpec& spec, std::string_view id) {
  if (!spec.find(id)) throw std::out_of_range("unknown participant '" + std::string(id) + "'");
  return 1 << spec.layer_count(id);
}

int routed_bit(const NetworkSpec& spec, std::string_view id, int layer_id, int outcome) {
  return (outcome >> spec.bit_shift(id, layer_id)) & 1;
}

bool is_dishonest_in(const NetworkSpec& spec, std::string_view id, ProtocolKind protocol) {
  switch (protocol) {
    case ProtocolKind::LSQKD: return false;
    case ProtocolKind::LSQSS: return true;
    case ProtocolKind::ILSKSS: {
      const auto* p = spec.find(id);
      return p && p->role == Role::CP && p->honesty == Honesty::Dishonest;
    }
  }
  return false;
}

LayerKind layer_kind(const NetworkSpec& spec, const Layer& layer, ProtocolKind protocol) {
  std::size_t dishonest = 0;
  for (const auto& m : layer.members)
    if (is_dishonest_in(spec, m, protocol)) ++dishonest;
  if (dishonest == 0) return LayerKind::Honest;
  if (dishonest == layer.members.size()) return LayerKind::Dishonest;
  return LayerKind::Mixed;
}

namespace fixtures {

namespace {
Participant cp(std::string id, Honesty h = Honesty::Honest) { return {std::move(id), Role::CP, h}; }
Participant alice() { return {"alice", Role::QP, Honesty::Honest}; }
}  // namespace

NetworkSpec fig2() {
  return NetworkSpec({alice(), cp("bob1"), cp("bob2")},
                     {{1, {"alice", "bob1"}}, {2, {"alice", "bob1", "bob2"}}}, true);
}

NetworkSpec fig5() {
  return NetworkSpec(
      {alice(), cp("bob1", Honesty::Dishonest), cp("bob2", Honesty::Dishonest),
       cp("bob3", Honesty::Dishonest), cp("bob4", Honesty::Dishonest),
       cp("bob5", Honesty::Dishonest)},
      {{1, {"bob1", "bob2"}},
       {2, {"bob3", "bob4", "bob5"}},
       {3, {"bob1", "bob2", "bob3", "bob4", "bob5"}}},
      false);
}

NetworkSpec fig6() {
  return NetworkSpec({alice(), cp("bob1", Honesty::Dishonest), cp("bob2", Honesty::Dishonest),
                      cp("bob3"), cp("bob4")},
                     {{1, {"bob1", "bob2"}}, {2, {"bob1", "bob2", "bob3", "bob4"}}}, false);
}

std::optional<NetworkSpec> by_name(std::string_view name) {
  if (name == "fig2") return fig2();
  if (name == "fig5") return fig5();
  if (name == "fig6") return fig6();
  return std::nullopt;
}

}  // namespace fixtures

}  // namespace sqlayer
