#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sqlayer/network.hpp"
#include "sqlayer/qudit.hpp"

namespace sqlayer {

// Largest register synthesize() or the exact evaluators will build.
inline constexpr std::size_t kMaxRegisterAmplitudes = std::size_t{1} << 22;

// (|0...0> + |1...1>)/sqrt(2) on m qubits.
QuditState ghz_reference(int m);
// |+>^m on m qubits.
QuditState plus_product_reference(int m);
// Normalized (|+>^t + |->^t)|0>^h + (|+>^t - |->^t)|1>^h; dishonest qubits
// first, honest qubits after.
QuditState alpha_reference(int dishonest, int honest);

// Big-endian: (1, 0, 1) -> 5.  Throws on entries other than 0 or 1.
int binary_to_decimal(std::span<const int> bits);

struct QubitSlot {
  int layer = 0;
  std::string participant;
};

struct QubitAssignment {
  // One slot per qubit of the layer-ordered tensor product.
  std::vector<QubitSlot> slots;
  // permutation[g] is the tensor-product position of grouped qubit g.
  // Grouped order runs over register participants, and within a
  // participant over their layers by ascending id.
  std::vector<std::size_t> permutation;
};

struct ResourceState {
  QuditState state;
  QubitAssignment assignment;
  ProtocolKind protocol;
  std::vector<std::string> subsystems;  // participant id per register subsystem
};

// Reference state for one layer's qubits; order of qubits is written to
// ordered_members.
QuditState layer_reference(const NetworkSpec& network, const Layer& layer, ProtocolKind protocol,
                           std::vector<std::string>& ordered_members);

// Throws std::invalid_argument for an invalid network and std::length_error
// when the register would exceed kMaxRegisterAmplitudes.
ResourceState synthesize(const NetworkSpec& network, ProtocolKind protocol);

inline constexpr double kSchmidtThreshold = 1e-9;

// Schmidt rank of each single-subsystem cut.
std::vector<int> schmidt_vector(const QuditState& state, double threshold = kSchmidtThreshold);

}  // namespace sqlayer
