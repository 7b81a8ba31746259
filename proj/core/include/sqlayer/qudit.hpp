#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "sqlayer/rng.hpp"

namespace sqlayer {

using Complex = std::complex<double>;

inline constexpr double kProbTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;

struct Collapse;
struct Measurement;
struct Projection;

// Per-subsystem dimensions of a register.  Flattened indices are big-endian
// mixed radix: subsystem 0 is the most significant digit.
class Dims {
 public:
  Dims() = default;
  Dims(std::initializer_list<int> dims);
  explicit Dims(std::vector<int> dims);

  std::size_t size() const { return dims_.size(); }
  bool empty() const { return dims_.empty(); }
  int operator[](std::size_t i) const { return dims_[i]; }
  const std::vector<int>& values() const { return dims_; }

  // Product of all entries (1 for an empty register).
  std::size_t total() const { return total_; }
  // Product of the entries after position i.
  std::size_t stride(std::size_t i) const { return strides_[i]; }

  std::size_t flatten(std::span<const int> digits) const;
  std::vector<int> unflatten(std::size_t index) const;
  int digit(std::size_t index, std::size_t subsystem) const {
    return static_cast<int>((index / strides_[subsystem]) % dims_[subsystem]);
  }

  Dims concat(const Dims& other) const;
  Dims select(std::span<const std::size_t> subsystems) const;

  bool operator==(const Dims& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 1;
};

class UnitaryMatrix {
 public:
  // Row-major entries; throws std::invalid_argument unless U^dagger U = 1
  // to within kUnitaryTolerance.
  UnitaryMatrix(Dims acting, std::vector<Complex> row_major);

  static UnitaryMatrix identity(Dims acting);

  const Dims& acting_dims() const { return acting_; }
  std::size_t size() const { return acting_.total(); }
  Complex operator()(std::size_t row, std::size_t col) const {
    return data_[row * acting_.total() + col];
  }
  std::span<const Complex> data() const { return data_; }

  UnitaryMatrix operator*(const UnitaryMatrix& rhs) const;

 private:
  Dims acting_;
  std::vector<Complex> data_;
};

// Pure state on a mixed-radix register.  Immutable once built; all
// operations below return new states.
class QuditState {
 public:
  // Normalizes the input.  Throws on length mismatch or a zero vector.
  static QuditState make(Dims dims, std::vector<Complex> amplitudes);
  static QuditState basis(Dims dims, std::span<const int> digits);
  static QuditState basis(Dims dims, std::initializer_list<int> digits);

  const Dims& dims() const { return dims_; }
  std::size_t subsystem_count() const { return dims_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }
  Complex operator[](std::size_t index) const { return amps_[index]; }
  Complex amplitude(std::span<const int> digits) const;
  Complex amplitude(std::initializer_list<int> digits) const;

  // Factor make() multiplied the caller's amplitudes by.
  double applied_scale() const { return scale_; }
  double norm() const;

 private:
  QuditState(Dims dims, std::vector<Complex> amps, double scale = 1.0);

  Dims dims_;
  std::vector<Complex> amps_;
  double scale_ = 1.0;

  friend QuditState tensor(const QuditState&, const QuditState&);
  friend QuditState apply_unitary(const QuditState&, std::span<const std::size_t>,
                                  const UnitaryMatrix&);
  friend QuditState permute_subsystems(const QuditState&, std::span<const std::size_t>);
  friend QuditState regroup(const QuditState&, Dims);
  friend Collapse collapse(const QuditState&, std::span<const std::size_t>,
                                  std::span<const int>);
  friend QuditState phase_fixed(const QuditState&);
  friend Measurement measure_computational(const QuditState&, std::span<const std::size_t>,
                                           RngStream&);
  friend Projection project_onto(const QuditState&, const QuditState&);
};

QuditState tensor(const QuditState& a, const QuditState& b);

// Applies u to the listed subsystems (in order) and identity elsewhere.
QuditState apply_unitary(const QuditState& state, std::span<const std::size_t> targets,
                         const UnitaryMatrix& u);
QuditState apply_unitary(const QuditState& state, std::initializer_list<std::size_t> targets,
                         const UnitaryMatrix& u);

// Appends |init_index> of the given dimension as the last subsystem.
QuditState attach_ancilla(const QuditState& state, int dim, int init_index = 0);

// New subsystem i is old subsystem order[i].
QuditState permute_subsystems(const QuditState& state, std::span<const std::size_t> order);

// Reinterprets the flat amplitude vector under new dims with the same total
// dimension.  Merging adjacent subsystems this way is the big-endian
// digit-to-integer mapping.
QuditState regroup(const QuditState& state, Dims dims);

// Dense marginal over the listed subsystems, indexed by Dims::select(targets).
struct Distribution {
  Dims dims;
  std::vector<double> probs;

  double prob(std::span<const int> digits) const { return probs[dims.flatten(digits)]; }
  double prob(std::initializer_list<int> digits) const;
  std::size_t support_size(double eps = kProbTolerance) const;
};

Distribution outcome_distribution(const QuditState& state, std::span<const std::size_t> targets);
Distribution outcome_distribution(const QuditState& state);

// Post-selection on a fixed computational outcome.  post is absent when the
// outcome has zero probability.
struct Collapse {
  double prob = 0.0;
  std::optional<QuditState> post;
};
Collapse collapse(const QuditState& state, std::span<const std::size_t> targets,
                  std::span<const int> outcomes);

struct Measurement {
  std::vector<int> outcomes;
  QuditState post;
  double prob;
};
Measurement measure_computational(const QuditState& state, std::span<const std::size_t> targets,
                                  RngStream& rng);
Measurement measure_computational(const QuditState& state,
                                  std::initializer_list<std::size_t> targets, RngStream& rng);

// Rank-1 test |target><target| on the leading subsystems; any trailing
// subsystems of state (ancillas) see the identity.
struct Projection {
  double success_prob = 0.0;
  // Squared norm of the rejected component, computed directly rather than
  // as 1 - success_prob so that an undisturbed state gives exactly 0.
  double failure_prob = 0.0;
  std::optional<QuditState> pass;
  std::optional<QuditState> fail;
};
Projection project_onto(const QuditState& state, const QuditState& target);

Complex inner_product(const QuditState& a, const QuditState& b);

// Global phase chosen so the first nonzero amplitude is real and positive.
QuditState phase_fixed(const QuditState& state);
bool approx_equal(const QuditState& a, const QuditState& b, double tol = kProbTolerance);
double max_amplitude_diff(const QuditState& a, const QuditState& b);

}  // namespace sqlayer
