#pragma once
// Counter-based pseudorandom generator used everywhere in this project.
//
// Design: the SplitMix64 output permutation applied to an affine counter
// sequence key + n*GAMMA.  Every draw is a pure function of (seed, stream,
// counter), so any run can be reproduced or parallelized by handing out
// independent (seed, stream) pairs; merging results in stream order gives
// byte-identical output regardless of scheduling.
//
// Constants are the published SplitMix64 ones (Steele, Lea, Flood 2014).

#include <cmath>
#include <cstdint>

namespace pwl {

class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Substream derivation: key = mix(seed) xor mix(stream * GAMMA + C).
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed + kGamma) ^
             mix(stream * kGamma + 0xD1B54A32D192ED03ull)) {}

  std::uint64_t next() { return mix(key_ + (++counter_) * kGamma); }

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }
  result_type operator()() { return next(); }

  // Exact uniform integer in [0, n) (Lemire multiply-shift with rejection).
  std::uint64_t bounded(std::uint64_t n) {
    unsigned __int128 m = (unsigned __int128)next() * n;
    auto lo = (std::uint64_t)m;
    if (lo < n) {
      const std::uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = (unsigned __int128)next() * n;
        lo = (std::uint64_t)m;
      }
    }
    return (std::uint64_t)(m >> 64);
  }

  // Uniform double in [0,1) with 53 random bits.
  double uniform01() { return (double)(next() >> 11) * 0x1.0p-53; }

  // Uniform double strictly inside (0,1); safe for logs and quantiles.
  double uniform_open() {
    return ((double)(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Geometric(1/2) on {1,2,...}: index of the first set bit in a bit stream.
  int geometric_half() {
    int g = 1;
    std::uint64_t w = next();
    while (w == 0) {  // probability 2^-64 per block
      g += 64;
      w = next();
    }
    return g + __builtin_ctzll(w);
  }

  // Standard normal via Box-Muller (second value cached).
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace pwl
