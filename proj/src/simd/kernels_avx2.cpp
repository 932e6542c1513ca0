// AVX2 kernel variants. Built unconditionally on x86-64 via the function
// target attribute; dispatch.cpp only installs them when the CPU reports
// AVX2. Per-element operation order matches kernels_scalar.cpp exactly, so
// element-map kernels are bitwise-identical to the reference and only the
// reduction kernels (dot, sum) differ by accumulation order.
#if defined(__x86_64__) && defined(__GNUC__)

#include "mmdust/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace mmdust::simd {
namespace {

#define MMDUST_AVX2 __attribute__((target("avx2")))

MMDUST_AVX2 inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

MMDUST_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

MMDUST_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

MMDUST_AVX2 double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

MMDUST_AVX2 double max_abs_avx2(const double* x, std::size_t n) {
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vm = _mm256_max_pd(vm, _mm256_and_pd(absmask, _mm256_loadu_pd(x + i)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vm);
    double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

MMDUST_AVX2 void soft_threshold_avx2(const double* x, double t, double* out, std::size_t n) {
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d signmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x8000000000000000ULL));
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d a = _mm256_sub_pd(_mm256_and_pd(absmask, vx), vt);
        a = _mm256_max_pd(a, zero);
        _mm256_storeu_pd(out + i, _mm256_or_pd(a, _mm256_and_pd(signmask, vx)));
    }
    for (; i < n; ++i) {
        double a = std::fabs(x[i]) - t;
        a = std::max(a, 0.0);
        out[i] = std::copysign(a, x[i]);
    }
}

MMDUST_AVX2 void clip_avx2(const double* x, double lo, double hi, double* out, std::size_t n) {
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(out + i, _mm256_min_pd(_mm256_max_pd(v, vlo), vhi));
    }
    for (; i < n; ++i) out[i] = std::min(std::max(x[i], lo), hi);
}

MMDUST_AVX2 BestMove best_move_avx2(const double* g, const double* row_sqnorm, const double* u,
                                    std::size_t n, double eps, double bound, double feas_tol) {
    const double inf = std::numeric_limits<double>::infinity();
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d vh2 = _mm256_set1_pd(0.5 * eps * eps);
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d vmeps = _mm256_set1_pd(-eps);
    const __m256d vedge = _mm256_set1_pd(bound + feas_tol);
    const __m256d vinf = _mm256_set1_pd(inf);

    __m256d best_d = vinf;
    __m256d best_s = _mm256_setzero_pd();
    __m256d best_i = _mm256_set1_pd(-1.0);
    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d four = _mm256_set1_pd(4.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vg = _mm256_loadu_pd(g + i);
        __m256d vu = _mm256_loadu_pd(u + i);
        __m256d t = _mm256_mul_pd(vh2, _mm256_loadu_pd(row_sqnorm + i));
        __m256d eg = _mm256_mul_pd(veps, vg);
        __m256d d_minus = _mm256_add_pd(t, eg);
        __m256d d_plus = _mm256_sub_pd(t, eg);
        __m256d feas_m = _mm256_cmp_pd(_mm256_and_pd(absmask, _mm256_sub_pd(vu, veps)), vedge, _CMP_LE_OQ);
        __m256d feas_p = _mm256_cmp_pd(_mm256_and_pd(absmask, _mm256_add_pd(vu, veps)), vedge, _CMP_LE_OQ);
        // minus wins when feasible and (d_minus <= d_plus or plus infeasible)
        __m256d pick_m = _mm256_and_pd(
            feas_m, _mm256_or_pd(_mm256_cmp_pd(d_minus, d_plus, _CMP_LE_OQ),
                                 _mm256_xor_pd(feas_p, _mm256_castsi256_pd(_mm256_set1_epi64x(-1)))));
        __m256d d = _mm256_blendv_pd(_mm256_blendv_pd(vinf, d_plus, feas_p), d_minus, pick_m);
        __m256d s = _mm256_blendv_pd(_mm256_blendv_pd(_mm256_setzero_pd(), veps, feas_p), vmeps, pick_m);
        __m256d better = _mm256_cmp_pd(d, best_d, _CMP_LT_OQ);  // strict: first index keeps ties in-lane
        best_d = _mm256_blendv_pd(best_d, d, better);
        best_s = _mm256_blendv_pd(best_s, s, better);
        best_i = _mm256_blendv_pd(best_i, idx, better);
        idx = _mm256_add_pd(idx, four);
    }

    alignas(32) double ld[4], ls[4], li[4];
    _mm256_store_pd(ld, best_d);
    _mm256_store_pd(ls, best_s);
    _mm256_store_pd(li, best_i);
    BestMove best;
    best.delta = inf;
    for (int lane = 0; lane < 4; ++lane) {
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

#undef MMDUST_AVX2

}  // namespace

const Kernels* avx2_kernels();
const Kernels* avx2_kernels() {
    static const Kernels k = {
        "avx2",       dot_avx2,  axpy_avx2,           sum_avx2,
        max_abs_avx2, soft_threshold_avx2, clip_avx2, best_move_avx2,
    };
    return &k;
}

}  // namespace mmdust::simd

#endif  // x86-64
