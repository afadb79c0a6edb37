#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dfrc/receivers.hpp"

namespace dfrc {

namespace {

// Symbol-index digits of candidate t, base B, digit 0 most significant so
// candidate order equals lexicographic order of the index vector.
void digits_of(std::uint64_t t, int n_digits, int base, int* out) {
  for (int k = n_digits - 1; k >= 0; --k) {
    out[k] = static_cast<int>(t % static_cast<std::uint64_t>(base));
    t /= static_cast<std::uint64_t>(base);
  }
}

// Partial images H(:, c0..c0+d-1) * x over all candidate half-vectors.
CMat tabulate_half(const CMat& H, const Constellation& constel, int c0, int d,
                   std::uint64_t count) {
  CMat U = CMat::Zero(H.rows(), static_cast<Index>(count));
  std::vector<int> dig(static_cast<std::size_t>(std::max(d, 1)));
  for (std::uint64_t t = 0; t < count; ++t) {
    digits_of(t, d, constel.size(), dig.data());
    for (int k = 0; k < d; ++k) {
      U.col(static_cast<Index>(t)) +=
          constel.points[static_cast<std::size_t>(dig[k])] * H.col(c0 + k);
    }
  }
  return U;
}

}  // namespace

bool within_enum_budget(int alphabet, int n, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (int k = 0; k < n; ++k) {
    if (total > cap / static_cast<std::uint64_t>(alphabet)) return false;
    total *= static_cast<std::uint64_t>(alphabet);
  }
  return total <= cap;
}

CVec indices_to_symbols(const Eigen::VectorXi& idx,
                        const Constellation& constel) {
  CVec x(idx.size());
  for (Index i = 0; i < idx.size(); ++i) {
    x(i) = constel.points[static_cast<std::size_t>(idx(i))];
  }
  return x;
}

Eigen::VectorXi exhaustive_detect(const CMat& H, const CVec& y,
                                  const Constellation& constel,
                                  std::uint64_t cap, double tie_tol) {
  const int n = static_cast<int>(H.cols());
  const int B = constel.size();
  if (H.rows() != y.size()) {
    throw std::invalid_argument("exhaustive_detect: H and y sizes differ");
  }
  if (!within_enum_budget(B, n, cap)) {
    throw std::invalid_argument(
        "exhaustive_detect: candidate count exceeds the enumeration budget");
  }
  Eigen::VectorXi result(n);
  if (n == 0) return result;

  // Split the symbol vector; tabulate both halves and combine through one
  // Gram-style product so the full candidate set is scanned without ever
  // materializing it.
  const int h1 = (n + 1) / 2;
  const int h2 = n - h1;
  std::uint64_t I = 1, J = 1;
  for (int k = 0; k < h1; ++k) I *= static_cast<std::uint64_t>(B);
  for (int k = 0; k < h2; ++k) J *= static_cast<std::uint64_t>(B);

  const CMat U = tabulate_half(H, constel, 0, h1, I);
  const CMat V = tabulate_half(H, constel, h1, h2, J);
  CMat W = (-U).colwise() + y;  // w_i = y - u_i

  RMat D = (-2.0 * (W.adjoint() * V).real());
  D.colwise() += W.colwise().squaredNorm().real().transpose();
  D.rowwise() += V.colwise().squaredNorm().real();

  const auto rows = static_cast<Index>(I);
  const auto cols = static_cast<Index>(J);
  double best = D(0, 0);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (D(i, j) < best) best = D(i, j);
    }
  }
  // First candidate in lexicographic order within the tie window wins.
  Index wi = 0, wj = 0;
  [&] {
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        if (D(i, j) <= best + tie_tol) {
          wi = i;
          wj = j;
          return;
        }
      }
    }
  }();

  digits_of(static_cast<std::uint64_t>(wi), h1, B, result.data());
  digits_of(static_cast<std::uint64_t>(wj), h2, B, result.data() + h1);
  return result;
}

}  // namespace dfrc
