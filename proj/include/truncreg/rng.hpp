// Seeded random number generation for reproducible experiments.
//
// Every stochastic component of the library draws from the generator defined
// here, so results are reproducible bit-for-bit given a seed, independent of
// the C++ standard library implementation. The algorithms are pinned:
//
//   * State generator: xoshiro256++ (Blackman & Vigna), seeded by running
//     SplitMix64 from the user seed and taking four outputs.
//   * uniform01: top 53 bits of the next output, scaled by 2^-53 -> [0, 1).
//   * normal: Box-Muller, z = sqrt(-2 ln u1) * cos(2 pi u2) with
//     u1 = 1 - uniform01() in (0, 1]; draw order u1 then u2, one output
//     per call (the sine branch is discarded).
//   * gamma(shape): Marsaglia-Tsang squeeze method; shapes below 1 use the
//     boost gamma(shape + 1) * uniform01()^(1/shape).
//   * chi_square(df) = 2 * gamma(df / 2); student_t(df) = normal() /
//     sqrt(chi_square(df) / df), normal drawn first.
//   * pareto(tail): inverse CDF with unit scale, (1 - uniform01())^(-1/tail).
//   * bounded(n): Lemire's unbiased multiply-and-reject reduction.
//
// Independent streams are derived with derive_seed(master, stream), which
// runs the SplitMix64 step function on master + (stream + 1) * GOLDEN.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace truncreg {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 step function (Steele, Lea & Flood); used for seeding.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += kGoldenGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

/// Derives a child seed for an independent stream (run index, sweep cell, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return SplitMix64(master + (stream + 1) * kGoldenGamma).next();
}

/// xoshiro256++ with the distribution transforms documented above.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal draw (Box-Muller, cosine branch).
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Gamma(shape, scale 1) via Marsaglia-Tsang.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      const double u = 1.0 - uniform01();
      return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Chi-square with (possibly non-integer) df > 0.
  double chi_square(double df) { return 2.0 * gamma(0.5 * df); }

  /// Student-t via normal / sqrt(chi^2_df / df).
  double student_t(double df) {
    const double z = normal();
    const double c = chi_square(df);
    return z / std::sqrt(c / df);
  }

  /// Pareto with unit scale and the given tail index (not recentered).
  double pareto(double tail) {
    const double u = 1.0 - uniform01();  // (0, 1]
    return std::pow(u, -1.0 / tail);
  }

  /// Unbiased integer in [0, n), n >= 1 (Lemire's method).
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("bounded: n must be >= 1");
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace truncreg
