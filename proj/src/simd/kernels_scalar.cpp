#include "mmdust/simd/kernels.hpp"

#include <cmath>
#include <limits>

namespace mmdust::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double max_abs_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

void soft_threshold_scalar(const double* x, double t, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double a = std::fabs(x[i]) - t;
        a = std::max(a, 0.0);
        out[i] = std::copysign(a, x[i]);
    }
}

void clip_scalar(const double* x, double lo, double hi, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::min(std::max(x[i], lo), hi);
}

BestMove best_move_scalar(const double* g, const double* row_sqnorm, const double* u,
                          std::size_t n, double eps, double bound, double feas_tol) {
    const double half_eps2 = 0.5 * eps * eps;
    const double edge = bound + feas_tol;
    BestMove best;
    best.delta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double t = half_eps2 * row_sqnorm[i];
        const double eg = eps * g[i];
        const double d_minus = t + eg;
        const double d_plus = t - eg;
        const bool feas_minus = std::fabs(u[i] - eps) <= edge;
        const bool feas_plus = std::fabs(u[i] + eps) <= edge;
        double d;
        double s;
        if (feas_minus && (d_minus <= d_plus || !feas_plus)) {
            d = d_minus;
            s = -eps;
        } else if (feas_plus) {
            d = d_plus;
            s = eps;
        } else {
            continue;
        }
        if (d < best.delta) {  // strict: earlier index wins exact ties
            best.delta = d;
            best.step = s;
            best.index = static_cast<std::int64_t>(i);
        }
    }
    return best;
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {
        "scalar",       dot_scalar,  axpy_scalar,        sum_scalar,
        max_abs_scalar, soft_threshold_scalar, clip_scalar, best_move_scalar,
    };
    return k;
}

}  // namespace mmdust::simd
