#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sqlayer/protocol.hpp"

namespace sqlayer {

// Two-party baseline: Alice prepares one of |0>, |1>, |+>, |->; Bob either
// measures in Z and resends (CTRL) or reflects; Alice re-measures in the
// preparation basis.
enum class Basis { Z, X };

struct Sqkd07Eve {
  // Eve measures each qubit on its way to Bob and resends the eigenstate
  // she saw.  With random_basis she picks Z or X uniformly; otherwise Z.
  bool random_basis = true;
};

struct Sqkd07Round {
  std::size_t index = 0;
  Basis basis = Basis::Z;
  int bit = 0;
  Action action = Action::Reflect;
  std::optional<int> bob_outcome;
  int alice_outcome = 0;
  std::optional<Basis> eve_basis;
  std::optional<int> eve_outcome;
};

struct Sqkd07Transcript {
  std::vector<Sqkd07Round> rounds;
};

Sqkd07Transcript run_sqkd07(std::size_t rounds, const std::optional<Sqkd07Eve>& eve,
                            std::uint64_t seed);

struct Sqkd07Sifted {
  ClassTally reflect_z;  // Reflect rounds, Z preparation: Alice's reading != prepared bit
  ClassTally reflect_x;  // Reflect rounds, X preparation
  ClassTally ctrl_z;     // CTRL rounds, Z preparation: Alice's reading != Bob's outcome
  std::vector<int> alice_key;
  std::vector<int> bob_key;
  std::size_t discarded = 0;  // CTRL rounds with X preparation
};

Sqkd07Sifted sift_sqkd07(const Sqkd07Transcript& transcript);

}  // namespace sqlayer
