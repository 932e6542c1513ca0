#pragma once

#include "mmdust/vec.hpp"

// Dense decompositions used by structure construction, initialization and the
// oracle solvers. Backed by Eigen; everything else in the library works on
// plain vectors and the sparse structure matrix.
namespace mmdust::linalg {

// Orthonormal basis of the null space of A (returned as cols(A) x q, column
// per basis vector). tol < 0 selects max(rows,cols)*eps*sigma_max.
DenseMatrix null_space(const DenseMatrix& A, double tol = -1.0);

std::size_t numerical_rank(const DenseMatrix& A, double tol = -1.0);

// Largest singular value.
double spectral_norm(const DenseMatrix& A);

// Largest eigenvalue of a symmetric matrix.
double sym_eig_max(const DenseMatrix& S);

// Full eigendecomposition of a symmetric matrix; eigenvalues ascending,
// eigvecs holds the eigenvectors as columns.
void sym_eig(const DenseMatrix& S, Vector& eigvals, DenseMatrix& eigvecs);

// Minimum-norm minimizer of ||A x - b|| via SVD pseudo-inverse with singular
// values below tol (tol < 0: default cutoff) treated as zero.
Vector least_norm_least_squares(const DenseMatrix& A, const Vector& b, double tol = -1.0);

// x = S^{-1} b for symmetric S via LDLT. Returns false when the
// factorization fails or the solution is not finite.
bool solve_sym(const DenseMatrix& S, const Vector& b, Vector& x);

}  // namespace mmdust::linalg
