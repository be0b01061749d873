#pragma once

#include <cstdint>

namespace nodata {

/// Deterministic splitmix64 stream. Everything random in this project flows
/// through this generator so that runs replay bit-for-bit on any platform;
/// std::uniform_*_distribution is avoided on purpose (its output is
/// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1D33B4B5ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~0ULL - ~0ULL % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  int next_bit() { return static_cast<int>(next_u64() & 1ULL); }

  bool bernoulli(double p) { return next_unit() < p; }

  /// Independent child stream. Children derived with distinct salts from the
  /// same seed do not correlate regardless of how much either is consumed.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 0x632BE59BD9B4E019ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1D33B4B5ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  Rng split(std::uint64_t salt) const { return Rng(mix(state_, salt)); }

 private:
  std::uint64_t state_;
};

}  // namespace nodata
