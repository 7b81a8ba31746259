#include "sqlayer/rng.hpp"

#include <stdexcept>

namespace sqlayer {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed) ^ (stream * kStreamSalt + 0x632BE59BD9B4E019ULL))) {}

RngStream::result_type RngStream::operator()() {
  return mix64(key_ + kGolden * ++counter_);
}

double RngStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

int RngStream::below(int n) {
  if (n <= 0) throw std::invalid_argument("RngStream::below: n must be positive");
  const int r = static_cast<int>(uniform() * n);
  return r < n ? r : n - 1;
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

RngStream RngStream::split(std::uint64_t child) const {
  return RngStream(key_, child ^ 0xA5A5A5A5A5A5A5A5ULL);
}

}  // namespace sqlayer
