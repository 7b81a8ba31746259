#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqlayer/adversary.hpp"
#include "sqlayer/network.hpp"
#include "sqlayer/qudit.hpp"
#include "sqlayer/rng.hpp"
#include "sqlayer/synth.hpp"

namespace sqlayer {

enum class Action { Ctrl, Reflect };
enum class AliceChoice { Computational, Projective };

std::string_view to_string(Action a);
std::string_view to_string(AliceChoice c);

// Everything a round needs that does not change between rounds.
class Session {
 public:
  Session(NetworkSpec network, ProtocolKind protocol);
  Session(NetworkSpec network, ResourceState resource);

  const NetworkSpec& network() const { return network_; }
  ProtocolKind protocol() const { return resource_.protocol; }
  const ResourceState& resource() const { return resource_; }
  const QuditState& state() const { return resource_.state; }

  // CP ids in register order.
  const std::vector<std::string>& cps() const { return cps_; }
  std::size_t cp_subsystem(std::size_t cp) const { return cp_subsystem_[cp]; }
  std::optional<std::size_t> cp_index(std::string_view id) const;
  std::optional<std::size_t> qp_subsystem() const { return qp_subsystem_; }
  std::size_t register_size() const { return resource_.state.subsystem_count(); }
  int dim(std::size_t subsystem) const { return resource_.state.dims()[subsystem]; }
  std::size_t subsystem_of(std::string_view id) const;  // throws for an external QP

  bool in_support(std::size_t flat_index) const { return support_[flat_index]; }
  bool in_support(std::span<const int> register_digits) const;

 private:
  void index();

  NetworkSpec network_;
  ResourceState resource_;
  std::vector<std::string> cps_;
  std::vector<std::size_t> cp_subsystem_;
  std::optional<std::size_t> qp_subsystem_;
  std::vector<bool> support_;
};

struct RoundRecord {
  std::size_t index = 0;
  bool decoy = false;
  std::vector<Action> actions;                  // per CP, Session::cps() order
  AliceChoice choice = AliceChoice::Computational;
  std::vector<std::optional<int>> cp_outcomes;  // reported; present iff CTRL
  std::optional<std::vector<int>> alice_outcomes;  // per register subsystem
  std::optional<bool> projective_pass;
  std::vector<int> decoy_sent;                  // per register subsystem, decoy rounds
  std::optional<EvePrivateRecord> eve;          // never read by sift or detect
};

struct Transcript {
  std::shared_ptr<const Session> session;
  std::vector<RoundRecord> rounds;
};

struct SessionConfig {
  std::size_t rounds = 1;
  std::uint64_t seed = 0;
  std::optional<EveStrategy> eve;
  double decoy_rate = 0.0;
  unsigned workers = 1;
  double ctrl_probability = 0.5;
  double computational_probability = 0.5;
};

RoundRecord run_round(const Session& session, std::span<const Action> actions, AliceChoice choice,
                      const EveStrategy* eve, RngStream& rng, std::size_t index = 0);

// Alice replaces the resource state by the product |sent_0>|sent_1>...
// over all register subsystems and always measures computationally.
RoundRecord run_decoy_round(const Session& session, std::span<const int> sent,
                            std::span<const Action> actions, const EveStrategy* eve,
                            RngStream& rng, std::size_t index = 0);
// The target receives basis_index; the other subsystems and every CP's
// action are drawn from rng.
RoundRecord run_decoy_round(const Session& session, std::string_view target_cp, int basis_index,
                            const EveStrategy* eve, RngStream& rng, std::size_t index = 0);

// Round r draws from RngStream(seed, r), so the transcript does not depend
// on the worker count.  Throws for rounds == 0 and for decoys on LSQKD.
Transcript run_session(std::shared_ptr<const Session> session, const SessionConfig& config);
Transcript run_session(const NetworkSpec& network, ProtocolKind protocol,
                       const SessionConfig& config);

struct ClassTally {
  std::size_t trials = 0;
  std::size_t events = 0;
  double rate() const { return trials ? static_cast<double>(events) / static_cast<double>(trials) : 0.0; }
  double standard_error() const;
};

struct Tally {
  ClassTally ctrl_mismatch;          // computational rounds with >= 1 CTRL
  ClassTally reflect_computational;  // all-Reflect, outcome outside the support
  ClassTally reflect_projective;     // all-Reflect, projection failed
  ClassTally decoy;                  // one trial per CP per decoy round
};

struct SiftedData {
  std::vector<std::size_t> test_rounds;
  std::map<int, std::vector<std::size_t>> generation;  // layer id -> rounds
  std::vector<std::size_t> discarded;
  std::vector<std::size_t> decoy_rounds;
  Tally tally;
};

SiftedData sift(const Transcript& transcript);

struct DetectionVerdict {
  bool detected = false;
  std::vector<std::string> reasons;
};

DetectionVerdict detect_eavesdropping(const SiftedData& sifted, double tolerance = 0.0);

enum class ReconstructionRule { Identity, Xor };

struct LayerRule {
  int layer = 0;
  LayerKind kind = LayerKind::Honest;
  ReconstructionRule rule = ReconstructionRule::Identity;
  std::vector<std::string> holders;      // members whose bit is the key itself
  std::vector<std::string> xor_parties;  // members whose bits XOR to the symbol
};

LayerRule layer_rule(const NetworkSpec& network, ProtocolKind protocol, const Layer& layer);

// Reference symbol of a layer given each member's outcome.
int layer_symbol(const NetworkSpec& network, const LayerRule& rule,
                 const std::function<int(const std::string&)>& outcome_of);

struct LayerKey {
  LayerRule rule;
  std::vector<std::size_t> rounds;
  std::map<std::string, std::vector<int>> streams;  // routed bit per member
  std::vector<int> symbols;  // reference symbol per generation round
  std::vector<int> dealer;   // the same symbol as Alice computes it from her readings

  // Honest holders agree, XOR parties reconstruct the holders' bit (mixed)
  // and the reference symbol matches Alice's view.
  bool consistent() const;
};

struct KeyMaterial {
  std::vector<LayerKey> layers;
  const LayerKey& layer(int id) const;  // throws std::out_of_range
};

// Throws std::invalid_argument when a generation round lacks an outcome.
KeyMaterial derive_keys(const Transcript& transcript, const SiftedData& sifted);

// Empirical Shannon entropy in bits; throws std::invalid_argument for an
// empty stream.
double stream_entropy(std::span<const int> symbols);

}  // namespace sqlayer
