#include "mmdust/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace mmdust::linalg {
namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<const EMat>;

EMap map(const DenseMatrix& A) {
    return EMap(A.data.data(), static_cast<Eigen::Index>(A.rows),
                static_cast<Eigen::Index>(A.cols));
}

double default_tol(const Eigen::JacobiSVD<EMat>& svd, std::size_t rows, std::size_t cols) {
    const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    return static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon() * smax;
}

}  // namespace

DenseMatrix null_space(const DenseMatrix& A, double tol) {
    Eigen::JacobiSVD<EMat> svd(map(A), Eigen::ComputeFullV);
    if (tol < 0) tol = default_tol(svd, A.rows, A.cols);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
    }
    const auto q = static_cast<Eigen::Index>(A.cols) - rank;
    DenseMatrix V(A.cols, static_cast<std::size_t>(q));
    for (Eigen::Index j = 0; j < q; ++j) {
        for (std::size_t i = 0; i < A.cols; ++i) {
            V(i, static_cast<std::size_t>(j)) =
                svd.matrixV()(static_cast<Eigen::Index>(i), rank + j);
        }
    }
    return V;
}

std::size_t numerical_rank(const DenseMatrix& A, double tol) {
    if (A.rows == 0 || A.cols == 0) return 0;
    Eigen::JacobiSVD<EMat> svd(map(A));
    if (tol < 0) tol = default_tol(svd, A.rows, A.cols);
    const auto& sv = svd.singularValues();
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
    }
    return rank;
}

double spectral_norm(const DenseMatrix& A) {
    if (A.rows == 0 || A.cols == 0) return 0.0;
    Eigen::JacobiSVD<EMat> svd(map(A));
    return svd.singularValues()(0);
}

double sym_eig_max(const DenseMatrix& S) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(map(S));
    return es.eigenvalues().maxCoeff();
}

void sym_eig(const DenseMatrix& S, Vector& eigvals, DenseMatrix& eigvecs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(map(S));
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    eigvals.assign(vals.data(), vals.data() + vals.size());
    eigvecs = DenseMatrix(S.rows, S.cols);
    for (std::size_t i = 0; i < S.rows; ++i) {
        for (std::size_t j = 0; j < S.cols; ++j) {
            eigvecs(i, j) = vecs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
}

Vector least_norm_least_squares(const DenseMatrix& A, const Vector& b, double tol) {
    Eigen::JacobiSVD<EMat> svd(map(A), Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (tol < 0) tol = default_tol(svd, A.rows, A.cols);
    Eigen::Map<const Eigen::VectorXd> eb(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd c = svd.matrixU().transpose() * eb;
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        c(i) = sv(i) > tol ? c(i) / sv(i) : 0.0;
    }
    Eigen::VectorXd x = svd.matrixV() * c;
    return Vector(x.data(), x.data() + x.size());
}

bool solve_sym(const DenseMatrix& S, const Vector& b, Vector& x) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(map(S));
    if (ldlt.info() != Eigen::Success) return false;
    Eigen::Map<const Eigen::VectorXd> eb(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd ex = ldlt.solve(eb);
    if (!ex.allFinite()) return false;
    x.assign(ex.data(), ex.data() + ex.size());
    return true;
}

}  // namespace mmdust::linalg
