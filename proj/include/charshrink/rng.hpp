#pragma once

#include <cstdint>
#include <random>

namespace charshrink {

/// Seedable generator used everywhere randomness is needed. mt19937_64 has a
/// standardized output sequence, and all derived draws (uniform doubles,
/// bounded ints, normals) are computed with explicit formulas so a fixed seed
/// reproduces the same stream on every run of the same build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1): 53 random bits scaled by 2^-53.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller. The second value of each pair is
  /// discarded so the draw count per call is fixed.
  double normal();

  /// Uniform integer on [lo, hi] inclusive, unbiased (rejection sampling).
  int uniform_int(int lo, int hi);

  /// Derives an independent stream seed for substream `stream` of `seed`
  /// (splitmix64 over the combined value). Used for per-replication streams:
  /// replication r of a study seeded with s uses derive(derive(s, j), r)
  /// where j indexes the configuration.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 gen_;
};

}  // namespace charshrink
