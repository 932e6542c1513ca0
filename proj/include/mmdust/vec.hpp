#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmdust/simd/kernels.hpp"

namespace mmdust {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
    return simd::active().dot(a.data(), b.data(), a.size());
}

inline double sqnorm(const Vector& a) { return dot(a, a); }

inline void axpy(double alpha, const Vector& x, Vector& y) {
    simd::active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double vec_sum(const Vector& a) { return simd::active().sum(a.data(), a.size()); }

inline double max_abs(const Vector& a) { return simd::active().max_abs(a.data(), a.size()); }

inline void soft_threshold(const Vector& x, double t, Vector& out) {
    out.resize(x.size());
    simd::active().soft_threshold(x.data(), t, out.data(), x.size());
}

inline void clip_inplace(Vector& x, double lo, double hi) {
    simd::active().clip(x.data(), lo, hi, x.data(), x.size());
}

inline void check_size(const Vector& v, std::size_t n, const char* what) {
    if (v.size() != n) {
        throw std::invalid_argument(std::string(what) + ": expected length " +
                                    std::to_string(n) + ", got " + std::to_string(v.size()));
    }
}

// Dense row-major matrix. Rows are contiguous so the kernels can stream them.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// out = A * x
inline void matvec(const DenseMatrix& A, const Vector& x, Vector& out) {
    check_size(x, A.cols, "matvec x");
    out.assign(A.rows, 0.0);
    const auto& k = simd::active();
    for (std::size_t i = 0; i < A.rows; ++i) out[i] = k.dot(A.row(i), x.data(), A.cols);
}

// out = A^T * x
inline void matvec_t(const DenseMatrix& A, const Vector& x, Vector& out) {
    check_size(x, A.rows, "matvec_t x");
    out.assign(A.cols, 0.0);
    const auto& k = simd::active();
    for (std::size_t i = 0; i < A.rows; ++i) {
        if (x[i] != 0.0) k.axpy(x[i], A.row(i), out.data(), A.cols);
    }
}

// A^T * A, accumulated by rank-1 row updates.
inline DenseMatrix gram(const DenseMatrix& A) {
    DenseMatrix G(A.cols, A.cols);
    const auto& k = simd::active();
    for (std::size_t i = 0; i < A.rows; ++i) {
        const double* r = A.row(i);
        for (std::size_t a = 0; a < A.cols; ++a) {
            if (r[a] != 0.0) k.axpy(r[a], r, G.row(a), A.cols);
        }
    }
    return G;
}

}  // namespace mmdust
