#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace dfrc {

// splitmix64 finalizer; used to turn structured coordinates into seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for the stream at coordinates (stream, index) under a master seed.
/// Distinct coordinates give statistically independent streams, so trials
/// can run in any order (or on any thread) with identical results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ (0xA0761D6478BD642FULL + stream));
  h = mix64(h ^ (0xE7037ED1A0B428DBULL + index));
  return h;
}

/// Deterministic random stream. Uniforms come from mt19937_64; Gaussians use
/// an explicit Box-Muller transform so the draw sequence is fixed by this
/// code rather than the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t u64() { return eng_(); }

  /// Uniform double in (0, 1].
  double uniform() {
    return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint32_t uniform_int(std::uint32_t n) {
    const std::uint64_t span = 0xFFFFFFFFFFFFFFFFULL - n + 1;
    const std::uint64_t limit = span - span % n;  // rejection bound
    std::uint64_t x = eng_();
    while (x >= limit) x = eng_();
    return static_cast<std::uint32_t>(x % n);
  }

  /// Standard normal.
  double gaussian() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
  }

  /// Circularly symmetric complex Gaussian with E|z|^2 = variance
  /// (real and imaginary parts each N(0, variance/2)).
  std::complex<double> cgaussian(double variance) {
    const double r = std::sqrt(-variance * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace dfrc
