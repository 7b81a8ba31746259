#include "sqlayer/qudit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <limits>
#include <string>

namespace sqlayer {

// ---------------------------------------------------------------- Dims

Dims::Dims(std::initializer_list<int> dims) : Dims(std::vector<int>(dims)) {}

Dims::Dims(std::vector<int> dims) : dims_(std::move(dims)), strides_(dims_.size()) {
  for (int d : dims_) {
    if (d < 2) throw std::invalid_argument("Dims: every subsystem dimension must be >= 2");
  }
  std::size_t acc = 1;
  for (std::size_t i = dims_.size(); i-- > 0;) {
    strides_[i] = acc;
    acc *= static_cast<std::size_t>(dims_[i]);
  }
  total_ = acc;
}

std::size_t Dims::flatten(std::span<const int> digits) const {
  if (digits.size() != dims_.size()) throw std::invalid_argument("Dims::flatten: arity mismatch");
  std::size_t index = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= dims_[i]) {
      throw std::out_of_range("Dims::flatten: digit out of range");
    }
    index += static_cast<std::size_t>(digits[i]) * strides_[i];
  }
  return index;
}

std::vector<int> Dims::unflatten(std::size_t index) const {
  std::vector<int> digits(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) digits[i] = digit(index, i);
  return digits;
}

Dims Dims::concat(const Dims& other) const {
  std::vector<int> d = dims_;
  d.insert(d.end(), other.dims_.begin(), other.dims_.end());
  return Dims(std::move(d));
}

Dims Dims::select(std::span<const std::size_t> subsystems) const {
  std::vector<int> d;
  d.reserve(subsystems.size());
  for (auto s : subsystems) {
    if (s >= dims_.size()) throw std::out_of_range("Dims::select: subsystem out of range");
    d.push_back(dims_[s]);
  }
  return Dims(std::move(d));
}

// ---------------------------------------------------------------- UnitaryMatrix

UnitaryMatrix::UnitaryMatrix(Dims acting, std::vector<Complex> row_major)
    : acting_(std::move(acting)), data_(std::move(row_major)) {
  const std::size_t n = acting_.total();
  if (data_.size() != n * n) {
    throw std::invalid_argument("UnitaryMatrix: expected " + std::to_string(n * n) +
                                " entries, got " + std::to_string(data_.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += std::conj(data_[k * n + i]) * data_[k * n + j];
      const Complex expected = (i == j) ? 1.0 : 0.0;
      if (std::abs(acc - expected) > kUnitaryTolerance) {
        throw std::invalid_argument("UnitaryMatrix: matrix is not unitary");
      }
    }
  }
}

UnitaryMatrix UnitaryMatrix::identity(Dims acting) {
  const std::size_t n = acting.total();
  std::vector<Complex> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
  return UnitaryMatrix(std::move(acting), std::move(d));
}

UnitaryMatrix UnitaryMatrix::operator*(const UnitaryMatrix& rhs) const {
  if (!(acting_ == rhs.acting_)) throw std::invalid_argument("UnitaryMatrix: product dims differ");
  const std::size_t n = size();
  std::vector<Complex> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex a = data_[i * n + k];
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += a * rhs.data_[k * n + j];
    }
  return UnitaryMatrix(acting_, std::move(out));
}

// ---------------------------------------------------------------- QuditState

QuditState::QuditState(Dims dims, std::vector<Complex> amps, double scale)
    : dims_(std::move(dims)), amps_(std::move(amps)), scale_(scale) {}

QuditState QuditState::make(Dims dims, std::vector<Complex> amplitudes) {
  if (amplitudes.size() != dims.total()) {
    throw std::invalid_argument("QuditState::make: expected " + std::to_string(dims.total()) +
                                " amplitudes, got " + std::to_string(amplitudes.size()));
  }
  double sq = 0.0;
  for (const auto& a : amplitudes) sq += std::norm(a);
  if (!(sq > 0.0)) throw std::invalid_argument("QuditState::make: zero vector");
  const double scale = 1.0 / std::sqrt(sq);
  if (scale != 1.0) {
    for (auto& a : amplitudes) a *= scale;
  }
  return QuditState(std::move(dims), std::move(amplitudes), scale);
}

QuditState QuditState::basis(Dims dims, std::span<const int> digits) {
  std::vector<Complex> amps(dims.total(), 0.0);
  amps[dims.flatten(digits)] = 1.0;
  return QuditState(std::move(dims), std::move(amps));
}

QuditState QuditState::basis(Dims dims, std::initializer_list<int> digits) {
  return basis(std::move(dims), std::span<const int>(digits.begin(), digits.size()));
}

Complex QuditState::amplitude(std::span<const int> digits) const {
  return amps_[dims_.flatten(digits)];
}

Complex QuditState::amplitude(std::initializer_list<int> digits) const {
  return amplitude(std::span<const int>(digits.begin(), digits.size()));
}

double QuditState::norm() const {
  double sq = 0.0;
  for (const auto& a : amps_) sq += std::norm(a);
  return std::sqrt(sq);
}

// ---------------------------------------------------------------- operations

namespace {

void check_targets(const Dims& dims, std::span<const std::size_t> targets) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= dims.size()) throw std::out_of_range("target subsystem out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) throw std::invalid_argument("duplicate target subsystem");
    }
  }
}

// Flat offset contributed by each joint value of the target digits.
std::vector<std::size_t> target_offsets(const Dims& dims, std::span<const std::size_t> targets) {
  const Dims sub = dims.select(targets);
  std::vector<std::size_t> off(sub.total());
  for (std::size_t s = 0; s < sub.total(); ++s) {
    std::size_t o = 0;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      o += static_cast<std::size_t>(sub.digit(s, k)) * dims.stride(targets[k]);
    }
    off[s] = o;
  }
  return off;
}

// Joint target value (mixed radix over targets) of every flat index.  Each digit is constant on
// runs of length stride, which avoids the per-index divisions.
std::vector<std::size_t> all_target_values(const Dims& dims, const Dims& sub,
                                           std::span<const std::size_t> targets) {
  std::vector<std::size_t> v(dims.total(), 0);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const std::size_t run = dims.stride(targets[k]);
    const std::size_t d = static_cast<std::size_t>(dims[targets[k]]);
    const std::size_t step = sub.stride(k);
    std::size_t i = 0;
    while (i < v.size()) {
      for (std::size_t digit = 0; digit < d; ++digit) {
        const std::size_t add = digit * step;
        for (std::size_t j = 0; j < run; ++j) v[i++] += add;
      }
    }
  }
  return v;
}

}  // namespace

QuditState tensor(const QuditState& a, const QuditState& b) {
  std::vector<Complex> out;
  out.reserve(a.amps_.size() * b.amps_.size());
  for (const auto& x : a.amps_)
    for (const auto& y : b.amps_) out.push_back(x * y);
  return QuditState(a.dims_.concat(b.dims_), std::move(out));
}

QuditState apply_unitary(const QuditState& state, std::span<const std::size_t> targets,
                         const UnitaryMatrix& u) {
  check_targets(state.dims_, targets);
  if (!(state.dims_.select(targets) == u.acting_dims())) {
    throw std::invalid_argument("apply_unitary: unitary dims do not match target dims");
  }
  const auto off = target_offsets(state.dims_, targets);
  const std::size_t block = off.size();
  const std::size_t n = state.amps_.size();

  const Dims sub = state.dims_.select(targets);

  const auto keys = all_target_values(state.dims_, sub, targets);
  std::vector<Complex> out(n, 0.0);
  std::vector<Complex> in(block);
  for (std::size_t base = 0; base < n; ++base) {
    // Bases are the flat indices whose target digits are all zero.
    if (keys[base] != 0) continue;
    for (std::size_t c = 0; c < block; ++c) in[c] = state.amps_[base + off[c]];
    for (std::size_t r = 0; r < block; ++r) {
      Complex acc = 0.0;
      for (std::size_t c = 0; c < block; ++c) acc += u(r, c) * in[c];
      out[base + off[r]] = acc;
    }
  }
  return QuditState(state.dims_, std::move(out));
}

QuditState apply_unitary(const QuditState& state, std::initializer_list<std::size_t> targets,
                         const UnitaryMatrix& u) {
  return apply_unitary(state, std::span<const std::size_t>(targets.begin(), targets.size()), u);
}

QuditState attach_ancilla(const QuditState& state, int dim, int init_index) {
  if (dim < 2) throw std::invalid_argument("attach_ancilla: dim must be >= 2");
  if (init_index < 0 || init_index >= dim) {
    throw std::out_of_range("attach_ancilla: init_index out of range");
  }
  return tensor(state, QuditState::basis(Dims{dim}, {init_index}));
}

QuditState permute_subsystems(const QuditState& state, std::span<const std::size_t> order) {
  const Dims& dims = state.dims_;
  if (order.size() != dims.size()) throw std::invalid_argument("permute_subsystems: arity");
  check_targets(dims, order);
  const Dims out_dims = dims.select(order);
  std::vector<Complex> out(state.amps_.size());
  for (std::size_t i = 0; i < state.amps_.size(); ++i) {
    std::size_t j = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      j += static_cast<std::size_t>(dims.digit(i, order[k])) * out_dims.stride(k);
    }
    out[j] = state.amps_[i];
  }
  return QuditState(out_dims, std::move(out));
}

QuditState regroup(const QuditState& state, Dims dims) {
  if (dims.total() != state.dims_.total()) {
    throw std::invalid_argument("regroup: total dimension mismatch");
  }
  return QuditState(std::move(dims), state.amps_);
}

double Distribution::prob(std::initializer_list<int> digits) const {
  return prob(std::span<const int>(digits.begin(), digits.size()));
}

std::size_t Distribution::support_size(double eps) const {
  return static_cast<std::size_t>(
      std::count_if(probs.begin(), probs.end(), [eps](double p) { return p > eps; }));
}

Distribution outcome_distribution(const QuditState& state, std::span<const std::size_t> targets) {
  check_targets(state.dims(), targets);
  Distribution d{state.dims().select(targets), {}};
  d.probs.assign(d.dims.total(), 0.0);
  const auto amps = state.amplitudes();
  const auto keys = all_target_values(state.dims(), d.dims, targets);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    if (p == 0.0) continue;
    d.probs[keys[i]] += p;
  }
  return d;
}

Distribution outcome_distribution(const QuditState& state) {
  std::vector<std::size_t> all(state.subsystem_count());
  std::iota(all.begin(), all.end(), 0);
  return outcome_distribution(state, all);
}

Collapse collapse(const QuditState& state, std::span<const std::size_t> targets,
                  std::span<const int> outcomes) {
  check_targets(state.dims_, targets);
  if (outcomes.size() != targets.size()) throw std::invalid_argument("collapse: arity mismatch");
  const Dims sub = state.dims_.select(targets);
  const std::size_t want = sub.flatten(outcomes);
  const auto keys = all_target_values(state.dims_, sub, targets);
  std::vector<Complex> out(state.amps_.size(), 0.0);
  double p = 0.0;
  for (std::size_t i = 0; i < state.amps_.size(); ++i) {
    if (keys[i] != want) continue;
    out[i] = state.amps_[i];
    p += std::norm(out[i]);
  }
  if (!(p > 0.0)) return {0.0, std::nullopt};
  const double s = 1.0 / std::sqrt(p);
  for (auto& a : out) a *= s;
  return {p, QuditState(state.dims_, std::move(out))};
}

Measurement measure_computational(const QuditState& state, std::span<const std::size_t> targets,
                                  RngStream& rng) {
  check_targets(state.dims_, targets);
  const Dims sub = state.dims_.select(targets);
  // Measuring every subsystem in order: the outcome index is the flat index.
  bool identity = targets.size() == state.dims_.size();
  for (std::size_t k = 0; identity && k < targets.size(); ++k) identity = targets[k] == k;
  std::vector<std::size_t> keys;
  if (!identity) keys = all_target_values(state.dims_, sub, targets);
  auto key = [&](std::size_t i) { return identity ? i : keys[i]; };
  std::vector<double> probs(sub.total(), 0.0);
  for (std::size_t i = 0; i < state.amps_.size(); ++i) probs[key(i)] += std::norm(state.amps_[i]);

  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t pick = probs.size();
  std::size_t last_nonzero = 0;
  for (std::size_t s = 0; s < probs.size(); ++s) {
    if (probs[s] <= 0.0) continue;
    last_nonzero = s;
    acc += probs[s];
    if (u < acc) {
      pick = s;
      break;
    }
  }
  if (pick == probs.size()) pick = last_nonzero;  // rounding slack at the top end

  std::vector<Complex> out(state.amps_.size(), 0.0);
  double p = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (key(i) != pick) continue;
    out[i] = state.amps_[i];
    p += std::norm(out[i]);
  }
  const double scale = 1.0 / std::sqrt(p);
  for (auto& a : out) a *= scale;
  return {sub.unflatten(pick), QuditState(state.dims_, std::move(out)), p};
}

Measurement measure_computational(const QuditState& state,
                                  std::initializer_list<std::size_t> targets, RngStream& rng) {
  return measure_computational(state, std::span<const std::size_t>(targets.begin(), targets.size()),
                               rng);
}

Projection project_onto(const QuditState& state, const QuditState& target) {
  const Dims& sd = state.dims_;
  const Dims& td = target.dims_;
  if (td.size() > sd.size() ||
      !std::equal(td.values().begin(), td.values().end(), sd.values().begin())) {
    throw std::invalid_argument("project_onto: target register is not a prefix of the state");
  }
  const std::size_t m = td.total();
  const std::size_t anc = sd.total() / m;

  std::vector<Complex> overlap(anc, 0.0);
  for (std::size_t s = 0; s < m; ++s) {
    const Complex t = std::conj(target.amps_[s]);
    if (t == 0.0) continue;
    for (std::size_t a = 0; a < anc; ++a) overlap[a] += t * state.amps_[s * anc + a];
  }
  double p = 0.0;
  for (const auto& c : overlap) p += std::norm(c);

  std::vector<Complex> pass(sd.total(), 0.0);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t a = 0; a < anc; ++a) pass[s * anc + a] = target.amps_[s] * overlap[a];

  std::vector<Complex> fail(sd.total());
  double q = 0.0;
  for (std::size_t i = 0; i < fail.size(); ++i) {
    fail[i] = state.amps_[i] - pass[i];
    q += std::norm(fail[i]);
  }

  Projection out;
  out.success_prob = std::clamp(p, 0.0, 1.0);
  out.failure_prob = std::clamp(q, 0.0, 1.0);
  if (p > 1e-28) {
    const double s = 1.0 / std::sqrt(p);
    for (auto& a : pass) a *= s;
    out.pass = QuditState(sd, std::move(pass));
  }
  if (q > 1e-28) {
    const double s = 1.0 / std::sqrt(q);
    for (auto& a : fail) a *= s;
    out.fail = QuditState(sd, std::move(fail));
  }
  return out;
}

Complex inner_product(const QuditState& a, const QuditState& b) {
  if (!(a.dims() == b.dims())) throw std::invalid_argument("inner_product: dims differ");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.amplitudes().size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

QuditState phase_fixed(const QuditState& state) {
  for (const auto& a : state.amps_) {
    const double mag = std::abs(a);
    if (mag > kProbTolerance) {
      const Complex rot = std::conj(a) / mag;
      std::vector<Complex> out(state.amps_);
      for (auto& x : out) x *= rot;
      return QuditState(state.dims_, std::move(out), state.scale_);
    }
  }
  return state;
}

double max_amplitude_diff(const QuditState& a, const QuditState& b) {
  if (!(a.dims() == b.dims())) return std::numeric_limits<double>::infinity();
  const QuditState fa = phase_fixed(a);
  const QuditState fb = phase_fixed(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < fa.amplitudes().size(); ++i) {
    worst = std::max(worst, std::abs(fa[i] - fb[i]));
  }
  return worst;
}

bool approx_equal(const QuditState& a, const QuditState& b, double tol) {
  return max_amplitude_diff(a, b) <= tol;
}

}  // namespace sqlayer
