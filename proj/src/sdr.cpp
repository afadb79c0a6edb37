#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "dfrc/receivers.hpp"

namespace dfrc {

namespace {

inline double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Lexicographic order on sign vectors with +1 before -1.
bool lex_less(const RVec& a, const RVec& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) > b(i);
  }
  return false;
}

}  // namespace

RVec sdr_relax_and_round(const RMat& H, const RVec& b, Rng& rng,
                         const SdrParams& params, SdrDiagnostics* diag) {
  const Index n = H.cols();
  if (H.rows() != b.size()) {
    throw std::invalid_argument("sdr_relax_and_round: H and b sizes differ");
  }
  if (n == 0) return RVec();

  // Homogenized quadratic form: for z = [s; t] with t = +/-1,
  // z^T Q z = ||b - t*H s||^2.
  RMat Q(n + 1, n + 1);
  Q.topLeftCorner(n, n).noalias() = H.transpose() * H;
  const RVec q = H.transpose() * b;
  Q.col(n).head(n) = -q;
  Q.row(n).head(n) = -q.transpose();
  Q(n, n) = b.squaredNorm();

  Index k = params.rank;
  if (k <= 0) {
    k = static_cast<Index>(std::ceil(std::sqrt(2.0 * double(n + 1))));
    k = std::clamp<Index>(k, 2, 16);
  }

  // Low-rank factor with unit columns; coordinate minimization over one
  // column at a time keeps the objective monotone and needs no step size.
  RMat V(k, n + 1);
  for (Index j = 0; j <= n; ++j) {
    for (Index i = 0; i < k; ++i) V(i, j) = rng.gaussian();
    V.col(j).normalize();
  }

  // VQ = V * Q is maintained through rank-one updates as columns move. That
  // costs the same per column as recomputing the gradient from scratch and
  // keeps the exact objective <V^T V, Q> available after every sweep, so
  // convergence is declared on objective stall instead of iterate movement
  // (the iterates crawl near the flat optimum long after the objective has
  // settled).
  RMat VQ = V * Q;
  bool converged = false;
  int sweeps = 0;
  int stalled = 0;
  double movement = 0.0;
  double f_prev = std::numeric_limits<double>::infinity();
  RVec g(k), vn(k), delta(k);
  while (sweeps < params.max_sweeps) {
    ++sweeps;
    movement = 0.0;
    for (Index i = 0; i <= n; ++i) {
      g = VQ.col(i) - Q(i, i) * V.col(i);
      const double ng = g.norm();
      if (ng <= 1e-300) continue;
      vn = -g / ng;
      delta = vn - V.col(i);
      const double mv = delta.norm();
      if (mv == 0.0) continue;
      movement = std::max(movement, mv);
      V.col(i) = vn;
      VQ.noalias() += delta * Q.row(i);
    }
    const double f = V.cwiseProduct(VQ).sum();
    if (std::abs(f_prev - f) <= params.tol * (1.0 + std::abs(f))) {
      if (++stalled >= 3) {
        converged = true;
        break;
      }
    } else {
      stalled = 0;
    }
    f_prev = f;
    if (sweeps % 512 == 0) VQ.noalias() = V * Q;  // shed rank-one drift
  }
  if (diag != nullptr) {
    diag->sweeps = sweeps;
    diag->movement = movement;
  }
  if (!converged) {
    throw std::runtime_error(
        "sdr_relax_and_round: no objective stall after " +
        std::to_string(sweeps) + " sweeps (last column movement " +
        std::to_string(movement) + ")");
  }

  // Rounding pool: correlation with the homogenization column, the sign of
  // the unconstrained least-squares solution, then Gaussian rounding draws.
  const Index n_cand = 2 + std::max(params.rounding_samples, 0);
  RMat S(n, n_cand);

  RVec z = V.leftCols(n).transpose() * V.col(n);
  for (Index i = 0; i < n; ++i) S(i, 0) = sign_of(z(i));

  RMat reg = Q.topLeftCorner(n, n);
  const double ridge = 1e-12 * (1.0 + reg.trace() / double(n));
  reg.diagonal().array() += ridge;
  const RVec x_ls = reg.ldlt().solve(q);
  for (Index i = 0; i < n; ++i) S(i, 1) = sign_of(x_ls(i));

  RVec gk(k);
  for (Index c = 2; c < n_cand; ++c) {
    for (Index i = 0; i < k; ++i) gk(i) = rng.gaussian();
    z.noalias() = V.leftCols(n).transpose() * gk;
    const double t = sign_of(V.col(n).dot(gk));
    for (Index i = 0; i < n; ++i) S(i, c) = sign_of(z(i)) * t;
  }

  // Objectives via the Gram form: f(s) = s^T HtH s - 2 q^T s + ||b||^2.
  const RMat T = Q.topLeftCorner(n, n).selfadjointView<Eigen::Lower>() * S;
  RVec f(n_cand);
  for (Index c = 0; c < n_cand; ++c) {
    f(c) = S.col(c).dot(T.col(c)) - 2.0 * q.dot(S.col(c)) + Q(n, n);
  }

  const double fmin = f.minCoeff();
  Index win = -1;
  for (Index c = 0; c < n_cand; ++c) {
    if (f(c) <= fmin + params.tie_tol) {
      if (win < 0 || lex_less(S.col(c), S.col(win))) win = c;
    }
  }
  return S.col(win);
}

Eigen::VectorXi detect_qpsk_sdr(const CMat& H, const CVec& y,
                                const Constellation& constel, Rng& rng,
                                const SdrParams& params) {
  if (constel.name != "qpsk" || constel.size() != 4) {
    throw std::invalid_argument(
        "detect_qpsk_sdr: the semidefinite detector supports QPSK only");
  }
  const Index m = y.size();
  const Index nc = H.cols();
  const double a = constel.points[0].real();

  // Interleaved real lifting: columns (2k, 2k+1) carry the real and
  // imaginary sign of symbol k, so sign-vector lexicographic order equals
  // symbol-index lexicographic order.
  RMat Hr(2 * m, 2 * nc);
  for (Index kcol = 0; kcol < nc; ++kcol) {
    Hr.col(2 * kcol).head(m) = a * H.col(kcol).real();
    Hr.col(2 * kcol).tail(m) = a * H.col(kcol).imag();
    Hr.col(2 * kcol + 1).head(m) = -a * H.col(kcol).imag();
    Hr.col(2 * kcol + 1).tail(m) = a * H.col(kcol).real();
  }
  RVec br(2 * m);
  br.head(m) = y.real();
  br.tail(m) = y.imag();

  const RVec s = sdr_relax_and_round(Hr, br, rng, params);
  Eigen::VectorXi idx(nc);
  for (Index kcol = 0; kcol < nc; ++kcol) {
    idx(kcol) = (s(2 * kcol) < 0.0 ? 2 : 0) + (s(2 * kcol + 1) < 0.0 ? 1 : 0);
  }
  return idx;
}

}  // namespace dfrc
