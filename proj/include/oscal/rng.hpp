#pragma once

#include <cmath>
#include <cstdint>

#include "oscal/error.hpp"

namespace oscal {

/// SplitMix64 (Steele/Lea/Vigna constants). Every random decision in the
/// toolkit flows through this generator so that runs are reproducible from a
/// single 64-bit seed, independent of the standard library in use. Run r of
/// base seed s draws from the stream seeded with s ^ (0x9E3779B97F4A7C15 * r);
/// the README documents the full algorithm.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static SplitMix64 for_run(std::uint64_t seed, std::uint64_t run_index) {
    return SplitMix64(seed ^ (0x9E3779B97F4A7C15ULL * run_index));
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [0, n), by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw InvalidArgument("SplitMix64::below: n must be positive");
    const std::uint64_t reject = (0ULL - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = next();
      if (x >= reject) return x % n;
    }
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double unit_open() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

private:
  std::uint64_t state_;
};

/// Standard normals via Box-Muller on the SplitMix64 stream. The spare value
/// is cached, so one uniform pair yields two normals in a fixed order.
class NormalSampler {
public:
  explicit NormalSampler(SplitMix64 rng) : rng_(rng) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.unit_open();
    const double u2 = rng_.unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace oscal
