#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfrc/linalg.hpp"

namespace dfrc {

/// Finite symbol alphabet with bit labels. Points carry the per-symbol
/// scaling, so transmit vectors built from them meet the configured
/// per-entry power without further factors.
struct Constellation {
  std::string name;
  std::vector<cplx> points;
  std::vector<std::uint32_t> bit_labels;  // one label per point
  int bits_per_symbol = 0;

  int size() const { return static_cast<int>(points.size()); }

  /// Gray-labelled QPSK with |s|^2 = symbol_power for every point.
  /// Index layout: bit1 = negative real part, bit0 = negative imaginary
  /// part, so neighbouring points differ in exactly one bit and antipodal
  /// points differ in both.
  static Constellation qpsk(double symbol_power);

  /// Index of the exactly-matching point (entries produced by detectors and
  /// generators are alphabet-exact); falls back to the nearest point.
  int index_of(cplx s) const;

  /// Hamming distance between the bit labels of two point indices.
  int bit_distance(int i, int j) const {
    return std::popcount(bit_labels[static_cast<std::size_t>(i)] ^
                         bit_labels[static_cast<std::size_t>(j)]);
  }
};

inline Constellation Constellation::qpsk(double symbol_power) {
  if (symbol_power <= 0.0) {
    throw std::invalid_argument("qpsk: symbol power must be positive");
  }
  const double a = std::sqrt(symbol_power / 2.0);
  Constellation c;
  c.name = "qpsk";
  c.bits_per_symbol = 2;
  c.points = {cplx(a, a), cplx(a, -a), cplx(-a, a), cplx(-a, -a)};
  c.bit_labels = {0u, 1u, 2u, 3u};
  return c;
}

inline int Constellation::index_of(cplx s) const {
  int best = 0;
  double best_d = std::norm(s - points[0]);
  for (int i = 1; i < size(); ++i) {
    const double d = std::norm(s - points[static_cast<std::size_t>(i)]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace dfrc
