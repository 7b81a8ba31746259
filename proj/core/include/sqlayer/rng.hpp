#pragma once

#include <cstdint>
#include <limits>

namespace sqlayer {

// Counter-based random stream.  A stream is identified by (seed, stream id);
// the n-th draw is a pure function of (seed, stream id, n), so any round can
// be replayed in isolation and rounds can be farmed out to workers in any
// order without changing results.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform double in [0, 1).
  double uniform();
  // Uniform integer in [0, n).  n must be positive.
  int below(int n);
  bool bernoulli(double p);

  // Independent child stream; deterministic in (this stream's key, child).
  RngStream split(std::uint64_t child) const;

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace sqlayer
