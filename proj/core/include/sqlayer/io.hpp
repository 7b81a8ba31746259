#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "sqlayer/analysis.hpp"
#include "sqlayer/network.hpp"
#include "sqlayer/protocol.hpp"
#include "sqlayer/synth.hpp"

namespace sqlayer::io {

using nlohmann::json;

// Network documents: {"participants": [{"id", "role", "honesty"}],
// "layers": [{"id", "members"}], "qp_is_member": bool}.  role is "QP" or
// "CP"; honesty is "honest" or "dishonest" and defaults to honest.
NetworkSpec network_from_json(const json& doc);
json network_to_json(const NetworkSpec& network);

// A bundled fixture name (fig2, fig5, fig6) or a path to a network document.
// Throws std::runtime_error for unreadable files.
NetworkSpec load_network(const std::string& name_or_path);

json read_json_file(const std::string& path);

// {"dims": [d, d_a], "matrix": [[re, im], ...]} in row-major order.
UnitaryMatrix unitary_from_json(const json& doc);
json unitary_to_json(const UnitaryMatrix& u);

json state_to_json(const QuditState& state, const std::vector<std::string>& labels,
                   double eps = 1e-14);
json resource_to_json(const ResourceState& resource);

json strategy_to_json(const EveStrategy& strategy);
json detection_to_json(const DetectionReport& report);
json confidentiality_to_json(const ConfidentialityReport& report);
// Per-layer symbol counts, entropy and consistency.
json key_digest_to_json(const KeyMaterial& keys);
// Per-layer bitstrings per member plus the reference symbols.
json keys_to_json(const KeyMaterial& keys);

json round_to_json(const Session& session, const RoundRecord& round, bool include_eve = false);
void write_transcript_jsonl(std::ostream& out, const Transcript& transcript, bool include_eve = false);

}  // namespace sqlayer::io
