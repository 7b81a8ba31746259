#include "sqlayer/synth.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace sqlayer {

namespace {

Dims qubits(int m) { return Dims(std::vector<int>(static_cast<std::size_t>(m), 2)); }

void require_qubits(int m, const char* what) {
  if (m < 2) throw std::invalid_argument(std::string(what) + ": need at least 2 qubits");
  if (m > 22) throw std::length_error(std::string(what) + ": too many qubits");
}

int parity(std::size_t x) { return __builtin_popcountll(x) & 1; }

}  // namespace

QuditState ghz_reference(int m) {
  require_qubits(m, "ghz_reference");
  const std::size_t n = std::size_t{1} << m;
  std::vector<Complex> amps(n, 0.0);
  amps.front() = 1.0;
  amps.back() = 1.0;
  return QuditState::make(qubits(m), std::move(amps));
}

QuditState plus_product_reference(int m) {
  require_qubits(m, "plus_product_reference");
  return QuditState::make(qubits(m), std::vector<Complex>(std::size_t{1} << m, 1.0));
}

QuditState alpha_reference(int dishonest, int honest) {
  if (dishonest < 1 || honest < 1) {
    throw std::invalid_argument("alpha_reference: needs at least one dishonest and one honest qubit");
  }
  require_qubits(dishonest + honest, "alpha_reference");
  // |+>^t + |->^t keeps the even-parity strings of the dishonest block and
  // |+>^t - |->^t the odd ones, each with amplitude 2 / 2^{t/2}.
  const std::size_t dn = std::size_t{1} << dishonest;
  const std::size_t hn = std::size_t{1} << honest;
  std::vector<Complex> amps(dn * hn, 0.0);
  for (std::size_t d = 0; d < dn; ++d) {
    const std::size_t h = parity(d) ? hn - 1 : 0;
    amps[d * hn + h] = 1.0;
  }
  return QuditState::make(qubits(dishonest + honest), std::move(amps));
}

int binary_to_decimal(std::span<const int> bits) {
  int v = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("binary_to_decimal: entries must be 0 or 1");
    v = (v << 1) | b;
  }
  return v;
}

QuditState layer_reference(const NetworkSpec& network, const Layer& layer, ProtocolKind protocol,
                           std::vector<std::string>& ordered_members) {
  ordered_members.clear();
  const int m = static_cast<int>(layer.members.size());
  // Members in declaration order (dishonest block first for mixed layers).
  std::vector<std::string> honest, dishonest;
  for (const auto& p : network.participants()) {
    if (std::find(layer.members.begin(), layer.members.end(), p.id) == layer.members.end()) continue;
    (is_dishonest_in(network, p.id, protocol) ? dishonest : honest).push_back(p.id);
  }
  switch (layer_kind(network, layer, protocol)) {
    case LayerKind::Honest:
      ordered_members = honest;
      return ghz_reference(m);
    case LayerKind::Dishonest:
      ordered_members = dishonest;
      return plus_product_reference(m);
    case LayerKind::Mixed:
      ordered_members = dishonest;
      ordered_members.insert(ordered_members.end(), honest.begin(), honest.end());
      return alpha_reference(static_cast<int>(dishonest.size()), static_cast<int>(honest.size()));
  }
  throw std::logic_error("layer_reference: unreachable");
}

ResourceState synthesize(const NetworkSpec& network, ProtocolKind protocol) {
  if (const auto v = validate(network); !v.ok()) {
    throw std::invalid_argument("synthesize: invalid network: " + v.violations.front());
  }
  std::size_t total_qubits = 0;
  for (const auto& l : network.layers()) total_qubits += l.members.size();
  if (total_qubits > 22 || (std::size_t{1} << total_qubits) > kMaxRegisterAmplitudes) {
    throw std::length_error("synthesize: register exceeds 2^22 amplitudes");
  }

  QubitAssignment assignment;
  std::optional<QuditState> product;
  for (int id : network.layer_ids()) {
    const Layer& layer = network.layer(id);
    std::vector<std::string> order;
    QuditState ref = layer_reference(network, layer, protocol, order);
    for (auto& member : order) assignment.slots.push_back({id, std::move(member)});
    product = product ? tensor(*product, ref) : std::move(ref);
  }

  ResourceState out{*product, {}, protocol, network.register_order()};
  std::vector<int> dims;
  for (const auto& pid : out.subsystems) {
    for (int layer_id : network.layers_of(pid)) {
      for (std::size_t q = 0; q < assignment.slots.size(); ++q) {
        const auto& s = assignment.slots[q];
        if (s.layer == layer_id && s.participant == pid) {
          assignment.permutation.push_back(q);
          break;
        }
      }
    }
    dims.push_back(participant_dimension(network, pid));
  }

  const QuditState grouped = permute_subsystems(*product, assignment.permutation);
  out.state = regroup(grouped, Dims(std::move(dims)));
  out.assignment = std::move(assignment);
  return out;
}

std::vector<int> schmidt_vector(const QuditState& state, double threshold) {
  const Dims& dims = state.dims();
  const auto amps = state.amplitudes();
  std::vector<int> ranks;
  ranks.reserve(dims.size());
  for (std::size_t s = 0; s < dims.size(); ++s) {
    const auto rows = static_cast<Eigen::Index>(dims[s]);
    const auto cols = static_cast<Eigen::Index>(dims.total() / dims[s]);
    // Row = digit of subsystem s, column = remaining digits in order.
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
    const std::size_t stride = dims.stride(s);
    for (std::size_t i = 0; i < amps.size(); ++i) {
      if (amps[i] == 0.0) continue;
      const std::size_t high = i / (stride * dims[s]);
      const std::size_t low = i % stride;
      m(dims.digit(i, s), static_cast<Eigen::Index>(high * stride + low)) = amps[i];
    }
    // Only the row space matters; a thin QR of the adjoint keeps the SVD small.
    Eigen::MatrixXcd r = m.adjoint().householderQr().matrixQR().topRows(std::min(rows, cols))
                             .template triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r);
    int rank = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
      if (svd.singularValues()(k) > threshold) ++rank;
    ranks.push_back(rank);
  }
  return ranks;
}

}  // namespace sqlayer
