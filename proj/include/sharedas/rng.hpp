#pragma once

// Portable random streams. std::mt19937_64 output is fully specified by the
// standard, but the std:: distributions are not, so the conversions to
// uniform and normal variates live here.

#include <cstdint>
#include <random>

namespace sharedas {

/// SplitMix64 finalizer; a fixed 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the independent stream used by repetition `index`.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return seed ^ mix64(index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal by the Marsaglia polar method.
  double normal();

  /// Child stream; deterministic in (this stream's seed, index).
  Rng split(std::uint64_t index) const { return Rng(substream_seed(seed_, index)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sharedas
