#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlayer/network.hpp"
#include "sqlayer/qudit.hpp"
#include "sqlayer/rng.hpp"

namespace sqlayer {

struct Transcript;
struct KeyMaterial;

enum class AttackKind { InterceptResend, EntangleMeasure, TwoWayEntangle, LyingParticipant };

std::string_view to_string(AttackKind kind);

enum class LyingMode { Honest, Uniform, Offset };

struct LyingPolicy {
  LyingMode mode = LyingMode::Uniform;
  int offset = 1;
};

struct TargetAttack {
  std::string participant;
  bool forward = true;
  bool backward = false;
  // Entangling kinds only.  Each acts on (target, ancilla), ancilla last.
  std::optional<UnitaryMatrix> forward_unitary;
  std::optional<UnitaryMatrix> backward_unitary;
};

struct EveStrategy {
  AttackKind kind = AttackKind::InterceptResend;
  std::vector<TargetAttack> targets;
  LyingPolicy lying;

  const TargetAttack* find(std::string_view participant) const;
  bool any_forward() const;
  bool any_backward() const;
};

using UnitaryFactory = std::function<UnitaryMatrix(int dim)>;

EveStrategy intercept_resend(std::vector<std::string> targets, bool forward = true,
                             bool backward = false);
// Forward-only copy_unitary tap on each target.
EveStrategy entangle_measure(const NetworkSpec& network, std::vector<std::string> targets);
EveStrategy two_way(const NetworkSpec& network, std::vector<std::string> targets,
                    const UnitaryFactory& forward, const UnitaryFactory& backward,
                    bool use_forward = true, bool use_backward = true);
EveStrategy lying_participant(std::vector<std::string> liars, LyingPolicy policy);

// Throws std::invalid_argument when a target is not a CP of the network or a
// unitary does not act on (target dim x ancilla dim).
void check_strategy(const EveStrategy& strategy, const NetworkSpec& network);

// |i>|a> -> |i>|a + i mod d>.
UnitaryMatrix copy_unitary(int d);
// The system basis index i >= 1 rotates the ancilla by theta in the plane
// spanned by |0> and |i>; i = 0 leaves it alone.  theta = pi/2 sends
// |i>|0> to |i>|i>.
UnitaryMatrix controlled_rotation(int d, double theta);
// cos(phi) 1 + i sin(phi) SWAP on two d-level systems.
UnitaryMatrix partial_swap(int d, double phi);

// What Eve learned about one target in one round.
struct TapEntry {
  std::string participant;
  std::optional<int> forward_outcome;   // intercept-resend measurements
  std::optional<int> backward_outcome;
  std::optional<std::size_t> forward_ancilla;   // ancilla subsystem index in the joint state
  std::optional<std::size_t> backward_ancilla;
  std::optional<int> forward_reading;   // ancilla measured after the round
  std::optional<int> backward_reading;
  std::optional<int> true_outcome;      // lying participants: what they actually saw
};

struct EvePrivateRecord {
  std::vector<TapEntry> taps;
  TapEntry* find(std::string_view participant);
  const TapEntry* find(std::string_view participant) const;
};

// Applies the forward tap for one target on its subsystem.  Intercepts
// measure and log; entangling kinds append an ancilla and apply U_F.
QuditState tap_forward(const EveStrategy& strategy, const QuditState& joint,
                       std::size_t subsystem, TapEntry& entry, RngStream& rng);
QuditState tap_backward(const EveStrategy& strategy, const QuditState& joint,
                        std::size_t subsystem, TapEntry& entry, RngStream& rng);

int lying_policy_apply(const LyingPolicy& policy, int true_outcome, int dim, RngStream& rng);
// Distribution of the reported value, length dim.
std::vector<double> lying_distribution(const LyingPolicy& policy, int true_outcome, int dim);

// Eve's estimate of each targeted participant's outcome this round.
std::map<std::string, int> eve_estimates(const NetworkSpec& network, const EvePrivateRecord& record);

// Eve's guess of a layer symbol; nullopt means she has nothing and must
// guess at random.
std::optional<int> eve_layer_guess(const NetworkSpec& network, ProtocolKind protocol,
                                   const Layer& layer, const std::map<std::string, int>& estimates);

struct EveGuess {
  int layer = 0;
  std::vector<int> symbols;
  std::size_t rounds = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  double standard_error = 0.0;
};

// Guesses over the layer's generation rounds; random guesses come from a
// fixed per-round stream so results are reproducible.
EveGuess eve_guess(const Transcript& transcript, const KeyMaterial& keys, int layer);

}  // namespace sqlayer
