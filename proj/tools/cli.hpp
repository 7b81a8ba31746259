#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sqlayer/adversary.hpp"
#include "sqlayer/analysis.hpp"
#include "sqlayer/network.hpp"

namespace sqlayer::cli {

// Exit codes of the run subcommand.
inline constexpr int kExitPass = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitDetected = 2;

// kind:target[,target][:legs][:key=value]...
//   intercept:bob1            forward leg only unless legs say otherwise
//   intercept:bob1,bob2:fb
//   entangle:bob1             forward copy unitary
//   twoway:bob1:fb:theta=1.2:phi=0.4:back=rot
//   twoway:bob1:file=u.json   {"forward": unitary, "backward": unitary}
//   lie:bob2:policy=offset:offset=1
// Throws std::invalid_argument on malformed text.
EveStrategy parse_attack(std::string_view text, const NetworkSpec& network);

// targets[:legs][:back=swap|rot][:scale=s]
AttackFamily parse_family(std::string_view text);

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sqlayer::cli
