#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sqlayer {

enum class ProtocolKind { LSQKD, LSQSS, ILSKSS };

std::string_view to_string(ProtocolKind kind);
// Case-insensitive; throws std::invalid_argument on unknown names.
ProtocolKind parse_protocol(std::string_view name);

enum class Role { QP, CP };
enum class Honesty { Honest, Dishonest };

struct Participant {
  std::string id;
  Role role = Role::CP;
  Honesty honesty = Honesty::Honest;
};

struct Layer {
  int id = 0;
  std::vector<std::string> members;
};

// How a layer's symbol is formed.  Honest: every member holds the key bit.
// Dishonest: the secret is the XOR of member shares.  Mixed: honest members
// hold the key bit and the dishonest members recover it jointly by XOR.
enum class LayerKind { Honest, Dishonest, Mixed };

std::string_view to_string(LayerKind kind);

// The layered network {n, k, l_j}.  Register subsystems are the participants
// that belong to at least one layer, in declaration order; an external QP
// holds no subsystem.
class NetworkSpec {
 public:
  NetworkSpec() = default;
  NetworkSpec(std::vector<Participant> participants, std::vector<Layer> layers,
              bool qp_is_member);

  const std::vector<Participant>& participants() const { return participants_; }
  const std::vector<Layer>& layers() const { return layers_; }
  bool qp_is_member() const { return qp_is_member_; }

  std::size_t n() const { return participants_.size(); }
  std::size_t k() const { return layers_.size(); }

  const Participant* find(std::string_view id) const;
  const Layer* find_layer(int id) const;
  const Layer& layer(int id) const;  // throws std::out_of_range

  // l_j: number of layers containing the participant.
  int layer_count(std::string_view id) const;
  // The participant's layers by ascending id.  Position p (1-based) in this
  // list receives bit 2^(l_j - p) of the participant's outcome.
  std::vector<int> layers_of(std::string_view id) const;
  // Layer ids in ascending order.
  std::vector<int> layer_ids() const;

  std::optional<std::string> qp() const;
  std::vector<std::string> register_order() const;
  std::optional<std::size_t> subsystem_of(std::string_view id) const;

  // Shift s such that (outcome >> s) & 1 is the participant's bit for layer.
  int bit_shift(std::string_view id, int layer_id) const;

 private:
  std::vector<Participant> participants_;
  std::vector<Layer> layers_;
  bool qp_is_member_ = false;
};

struct ValidationResult {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

ValidationResult validate(const NetworkSpec& spec);

// 2^{l_j}.  An external QP has dimension 1 (no subsystem).  Throws
// std::out_of_range for unknown ids.
int participant_dimension(const NetworkSpec& spec, std::string_view id);

int routed_bit(const NetworkSpec& spec, std::string_view id, int layer_id, int outcome);

// LSQKD treats every layer as honest and LSQSS every layer as dishonest;
// ILSKSS classifies by the members' honesty flags.
LayerKind layer_kind(const NetworkSpec& spec, const Layer& layer, ProtocolKind protocol);

bool is_dishonest_in(const NetworkSpec& spec, std::string_view id, ProtocolKind protocol);

namespace fixtures {
// Alice + Bob1 in L1, all three in L2; Alice is a member.
NetworkSpec fig2();
// Five CPs; L1 = {Bob1, Bob2}, L2 = {Bob3, Bob4, Bob5}, L3 = all; Alice external.
NetworkSpec fig5();
// Four CPs; L1 = {Bob1, Bob2} (dishonest), L2 = all four; Alice external.
NetworkSpec fig6();
std::optional<NetworkSpec> by_name(std::string_view name);
}  // namespace fixtures

}  // namespace sqlayer
