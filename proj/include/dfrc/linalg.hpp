#pragma once

#include <complex>
#include <Eigen/Dense>

namespace dfrc {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

namespace linalg {

/// Column-major stacking of a matrix into a vector.
CVec vec(const CMat& M);

/// Inverse of vec(). Throws std::invalid_argument if v.size() != rows*cols.
CMat unvec(const CVec& v, Index rows, Index cols);

/// Kronecker product. K((i*Br+k), (j*Bc+l)) = A(i,j) * B(k,l).
CMat kron(const CMat& A, const CMat& B);

/// I - A (A^H A)^-1 A^H, the orthogonal projector onto the complement of
/// range(A). Requires A with full column rank; throws std::runtime_error
/// naming the matrix otherwise. The Gram inverse is formed explicitly
/// because callers also need (A^H A)^-1 as a first-class object.
CMat orth_complement_projector(const CMat& A, const char* name = "A");

struct HermitianEig {
  RVec values;   // descending
  CMat vectors;  // columns, matching values
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
/// Throws std::invalid_argument if H is not Hermitian to 1e-10 * ||H||.
HermitianEig hermitian_eig(const CMat& H);

/// Number of singular values above tol * sigma_max. tol < 0 selects the
/// default 1e-10.
Index numerical_rank(const CMat& M, double tol = -1.0);

/// Least-squares solution of min ||A x - b|| via column-pivoted QR.
/// Throws std::runtime_error naming the matrix when A is rank deficient.
CVec ls_solve(const CMat& A, const CVec& b, const char* name = "A");

/// True when every entry of M is finite.
bool all_finite(const CMat& M);

}  // namespace linalg
}  // namespace dfrc
