#include "dfrc/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dfrc::linalg {

CVec vec(const CMat& M) {
  return Eigen::Map<const CVec>(M.data(), M.size());
}

CMat unvec(const CVec& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw std::invalid_argument(
        "unvec: vector of size " + std::to_string(v.size()) +
        " cannot fill a " + std::to_string(rows) + "x" + std::to_string(cols) +
        " matrix");
  }
  return Eigen::Map<const CMat>(v.data(), rows, cols);
}

CMat kron(const CMat& A, const CMat& B) {
  CMat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index j = 0; j < A.cols(); ++j) {
    for (Index i = 0; i < A.rows(); ++i) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

CMat orth_complement_projector(const CMat& A, const char* name) {
  if (numerical_rank(A) < A.cols()) {
    throw std::runtime_error(std::string("orth_complement_projector: ") +
                             name + " is rank deficient");
  }
  const CMat gram = A.adjoint() * A;
  const CMat gram_inv = gram.llt().solve(CMat::Identity(A.cols(), A.cols()));
  CMat P = -A * gram_inv * A.adjoint();
  P.diagonal().array() += 1.0;
  return P;
}

HermitianEig hermitian_eig(const CMat& H) {
  if (H.rows() != H.cols()) {
    throw std::invalid_argument("hermitian_eig: matrix is not square");
  }
  const double scale = H.norm();
  if ((H - H.adjoint()).norm() > 1e-10 * std::max(scale, 1.0)) {
    throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> solver(H);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
  }
  // Eigen returns ascending order; flip to descending.
  HermitianEig out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

Index numerical_rank(const CMat& M, double tol) {
  if (M.size() == 0) return 0;
  if (tol < 0) tol = 1e-10;
  const Eigen::JacobiSVD<CMat> svd(M);
  const RVec& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = tol * sv(0);
  Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return r;
}

CVec ls_solve(const CMat& A, const CVec& b, const char* name) {
  if (A.rows() != b.size()) {
    throw std::invalid_argument(std::string("ls_solve: ") + name +
                                " and b have incompatible sizes");
  }
  Eigen::ColPivHouseholderQR<CMat> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < A.cols()) {
    throw std::runtime_error(std::string("ls_solve: ") + name +
                             " is rank deficient");
  }
  return qr.solve(b);
}

bool all_finite(const CMat& M) {
  return M.allFinite();
}

}  // namespace dfrc::linalg
