#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sqlayer/adversary.hpp"
#include "sqlayer/protocol.hpp"

namespace sqlayer {

enum class RoundClass { CtrlMismatch, ReflectComputational, ReflectProjective, Overall };

std::string_view to_string(RoundClass c);
RoundClass parse_round_class(std::string_view name);

struct ClassValue {
  double p = 0.0;
  double standard_error = 0.0;  // 0 for exact values
  std::size_t trials = 0;       // sampled values only
};

struct DetectionReport {
  bool exact = true;
  ClassValue ctrl_mismatch;
  ClassValue reflect_computational;
  ClassValue reflect_projective;
  ClassValue overall;  // per round, classes weighted by how often they occur

  // Exact reports only.  Bit c of a mask is cps[c] choosing CTRL.  Projective
  // rounds with some CTRL carry no detection event and are not tabulated.
  std::vector<std::string> cps;
  std::vector<double> computational_patterns;  // indexed by mask
  double projective_all_reflect = 0.0;

  const ClassValue& get(RoundClass c) const;
  // Detection probability of one (mask, choice) pattern; throws for
  // projective masks other than 0.
  double pattern(unsigned mask, AliceChoice choice) const;
};

struct ExactOptions {
  double ctrl_probability = 0.5;
  double computational_probability = 0.5;
  unsigned workers = 1;
};

// Throws std::length_error when the joint register (with Eve's ancillas)
// exceeds kMaxRegisterAmplitudes.
DetectionReport exact_detection(const Session& session, const EveStrategy* strategy,
                                const ExactOptions& options = {});
DetectionReport exact_detection(ProtocolKind protocol, const NetworkSpec& network,
                                const EveStrategy* strategy, const ExactOptions& options = {});

DetectionReport sampled_detection(std::shared_ptr<const Session> session,
                                  const EveStrategy* strategy, std::size_t rounds,
                                  std::uint64_t seed, unsigned workers = 1);
// Tallies an existing transcript.
DetectionReport sampled_detection(const Transcript& transcript);

// 1 - (1 - p)^l.
double cumulative_detection(double p, int l);
std::vector<double> cumulative_curve(double p, int max_l);

// Eve's expected per-round accuracy on the layer symbol over generation
// rounds; a random guess scores 1/2.
double exact_eve_accuracy(const Session& session, const EveStrategy* strategy, int layer,
                          const ExactOptions& options = {});

struct ConfidentialityRow {
  std::vector<int> outsider_outcomes;
  int symbol = 0;
  double probability = 0.0;
};

struct ConfidentialityReport {
  int layer = 0;
  std::vector<std::string> outsiders;
  std::vector<ConfidentialityRow> joint;
  double mutual_information = 0.0;  // bits
  double symbol_entropy = 0.0;      // bits
};

// Outsiders must hold a register subsystem and avoid the layer, except that
// a strict subset of a layer's XOR parties may be tested against that
// layer's secret.
ConfidentialityReport confidentiality(ProtocolKind protocol, const NetworkSpec& network,
                                      const std::vector<std::string>& outsiders, int layer);
ConfidentialityReport confidentiality(const Session& session,
                                      const std::vector<std::string>& outsiders, int layer);

// Entropy of the layer's reference symbol stream over generation rounds.
double sifted_rate(const Transcript& transcript, int layer);

enum class BackwardShape { PartialSwap, Rotation };

std::string_view to_string(BackwardShape shape);

// U_F = controlled_rotation(d, t); U_B = partial_swap(d, s t) or
// controlled_rotation(d, s t) with s = backward_scale.
struct AttackFamily {
  std::vector<std::string> targets;
  bool forward = true;
  bool backward = true;
  BackwardShape backward_shape = BackwardShape::PartialSwap;
  double backward_scale = 1.0;
};

EveStrategy instantiate(const AttackFamily& family, const NetworkSpec& network, double t);

std::vector<double> linear_grid(double max, std::size_t points);

struct TradeoffRow {
  double parameter = 0.0;
  double detection_exact = 0.0;
  std::optional<double> detection_sampled;
  std::optional<double> standard_error;
  double eve_accuracy = 0.0;
};

struct TradeoffTable {
  int layer = 0;
  RoundClass metric = RoundClass::ReflectProjective;
  std::vector<TradeoffRow> rows;
  bool detection_monotone = true;
  bool accuracy_monotone = true;
};

struct TradeoffOptions {
  RoundClass metric = RoundClass::ReflectProjective;
  std::size_t sampled_rounds = 0;  // 0 skips the Monte Carlo column
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

// Throws std::invalid_argument for an empty grid.
TradeoffTable eve_tradeoff_curve(std::shared_ptr<const Session> session, const AttackFamily& family,
                                 const std::vector<double>& grid, int layer,
                                 const TradeoffOptions& options = {});

}  // namespace sqlayer
