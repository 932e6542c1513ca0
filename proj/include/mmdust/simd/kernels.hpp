#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace mmdust::simd {

// Result of a steepest-coordinate-move scan. index < 0 means no feasible
// candidate exists at all (every +/-eps move leaves the box).
struct BestMove {
    std::int64_t index = -1;
    double step = 0.0;   // +eps or -eps
    double delta = 0.0;  // objective change of taking `step` on `index`
};

// Flat kernel table. One instance per instruction-set variant; all variants
// compute per-element results with identical operation order so that only
// reduction kernels (dot, sum) may differ by rounding of the accumulation.
struct Kernels {
    const char* name;

    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    double (*max_abs)(const double* x, std::size_t n);
    // out[i] = sign(x[i]) * max(|x[i]| - t, 0)
    void (*soft_threshold)(const double* x, double t, double* out, std::size_t n);
    // out[i] = min(max(x[i], lo), hi); in-place allowed
    void (*clip)(const double* x, double lo, double hi, double* out, std::size_t n);

    // Steepest feasible coordinate move for the box-constrained quadratic:
    // among i < n and s in {-eps, +eps} with |u[i] + s| <= bound + feas_tol,
    // minimize delta_i(s) = -s*g[i] + 0.5*eps^2*row_sqnorm[i]. Ties resolve
    // to the lowest index, and within an index to s = -eps first.
    BestMove (*best_move)(const double* g, const double* row_sqnorm, const double* u,
                          std::size_t n, double eps, double bound, double feas_tol);
};

// Scalar reference implementation (always available).
const Kernels& scalar_kernels();

// Kernel table selected at startup: AVX2 on capable x86-64, NEON on aarch64,
// scalar otherwise. MMDUST_SIMD=scalar|avx2|neon|auto overrides.
const Kernels& active();

// Force a variant by name; returns false (and leaves the selection alone)
// when the variant is unknown or unsupported on this machine.
bool select(const std::string& name);

}  // namespace mmdust::simd
