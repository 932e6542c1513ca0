// NEON (aarch64) kernel variants, mirroring kernels_scalar.cpp per element.
#if defined(__aarch64__)

#include "mmdust/simd/kernels.hpp"

#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace mmdust::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    }
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vaddq_f64(vy, vmulq_f64(va, vld1q_f64(x + i)));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_neon(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += x[i];
    return s;
}

double max_abs_neon(const double* x, std::size_t n) {
    float64x2_t vm = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vm = vmaxq_f64(vm, vabsq_f64(vld1q_f64(x + i)));
    double m = std::max(vgetq_lane_f64(vm, 0), vgetq_lane_f64(vm, 1));
    for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

void soft_threshold_neon(const double* x, double t, double* out, std::size_t n) {
    const float64x2_t vt = vdupq_n_f64(t);
    const float64x2_t zero = vdupq_n_f64(0.0);
    const uint64x2_t signmask = vdupq_n_u64(0x8000000000000000ULL);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vx = vld1q_f64(x + i);
        float64x2_t a = vmaxq_f64(vsubq_f64(vabsq_f64(vx), vt), zero);
        uint64x2_t sgn = vandq_u64(vreinterpretq_u64_f64(vx), signmask);
        vst1q_f64(out + i, vreinterpretq_f64_u64(vorrq_u64(vreinterpretq_u64_f64(a), sgn)));
    }
    for (; i < n; ++i) {
        double a = std::fabs(x[i]) - t;
        a = std::max(a, 0.0);
        out[i] = std::copysign(a, x[i]);
    }
}

void clip_neon(const double* x, double lo, double hi, double* out, std::size_t n) {
    const float64x2_t vlo = vdupq_n_f64(lo);
    const float64x2_t vhi = vdupq_n_f64(hi);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(out + i, vminq_f64(vmaxq_f64(vld1q_f64(x + i), vlo), vhi));
    }
    for (; i < n; ++i) out[i] = std::min(std::max(x[i], lo), hi);
}

BestMove best_move_neon(const double* g, const double* row_sqnorm, const double* u,
                        std::size_t n, double eps, double bound, double feas_tol) {
    const double inf = std::numeric_limits<double>::infinity();
    const float64x2_t vh2 = vdupq_n_f64(0.5 * eps * eps);
    const float64x2_t veps = vdupq_n_f64(eps);
    const float64x2_t vmeps = vdupq_n_f64(-eps);
    const float64x2_t vedge = vdupq_n_f64(bound + feas_tol);
    const float64x2_t vinf = vdupq_n_f64(inf);

    float64x2_t best_d = vinf;
    float64x2_t best_s = vdupq_n_f64(0.0);
    float64x2_t best_i = vdupq_n_f64(-1.0);
    float64x2_t idx = {0.0, 1.0};
    const float64x2_t two = vdupq_n_f64(2.0);

    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vg = vld1q_f64(g + i);
        float64x2_t vu = vld1q_f64(u + i);
        float64x2_t t = vmulq_f64(vh2, vld1q_f64(row_sqnorm + i));
        float64x2_t eg = vmulq_f64(veps, vg);
        float64x2_t d_minus = vaddq_f64(t, eg);
        float64x2_t d_plus = vsubq_f64(t, eg);
        uint64x2_t feas_m = vcleq_f64(vabsq_f64(vsubq_f64(vu, veps)), vedge);
        uint64x2_t feas_p = vcleq_f64(vabsq_f64(vaddq_f64(vu, veps)), vedge);
        uint64x2_t pick_m =
            vandq_u64(feas_m, vorrq_u64(vcleq_f64(d_minus, d_plus),
                                        veorq_u64(feas_p, vdupq_n_u64(~0ULL))));
        float64x2_t d = vbslq_f64(pick_m, d_minus, vbslq_f64(feas_p, d_plus, vinf));
        float64x2_t s = vbslq_f64(pick_m, vmeps, vbslq_f64(feas_p, veps, vdupq_n_f64(0.0)));
        uint64x2_t better = vcltq_f64(d, best_d);
        best_d = vbslq_f64(better, d, best_d);
        best_s = vbslq_f64(better, s, best_s);
        best_i = vbslq_f64(better, idx, best_i);
        idx = vaddq_f64(idx, two);
    }

    double ld[2] = {vgetq_lane_f64(best_d, 0), vgetq_lane_f64(best_d, 1)};
    double ls[2] = {vgetq_lane_f64(best_s, 0), vgetq_lane_f64(best_s, 1)};
    double li[2] = {vgetq_lane_f64(best_i, 0), vgetq_lane_f64(best_i, 1)};
    BestMove best;
    best.delta = inf;
    for (int lane = 0; lane < 2; ++lane) {
        if (li[lane] < 0) continue;
        auto index = static_cast<std::int64_t>(li[lane]);
        if (ld[lane] < best.delta || (ld[lane] == best.delta && index < best.index)) {
            best.delta = ld[lane];
            best.step = ls[lane];
            best.index = index;
        }
    }

    const double half_eps2 = 0.5 * eps * eps;
    const double edge = bound + feas_tol;
    for (; i < n; ++i) {
        const double t = half_eps2 * row_sqnorm[i];
        const double eg = eps * g[i];
        const double d_minus = t + eg;
        const double d_plus = t - eg;
        const bool feas_minus = std::fabs(u[i] - eps) <= edge;
        const bool feas_plus = std::fabs(u[i] + eps) <= edge;
        double d, s;
        if (feas_minus && (d_minus <= d_plus || !feas_plus)) {
            d = d_minus;
            s = -eps;
        } else if (feas_plus) {
            d = d_plus;
            s = eps;
        } else {
            continue;
        }
        if (d < best.delta) {
            best.delta = d;
            best.step = s;
            best.index = static_cast<std::int64_t>(i);
        }
    }
    return best;
}

}  // namespace

const Kernels* neon_kernels();
const Kernels* neon_kernels() {
    static const Kernels k = {
        "neon",       dot_neon,  axpy_neon,           sum_neon,
        max_abs_neon, soft_threshold_neon, clip_neon, best_move_neon,
    };
    return &k;
}

}  // namespace mmdust::simd

#endif  // aarch64
