#pragma once

#include <cstdint>

#include "mmdust/dataset.hpp"
#include "mmdust/structure.hpp"

namespace mmdust {

struct SimulatedData {
    Dataset dataset;
    Vector true_coefficients;  // linear-predictor coefficients on the generated features
    double true_intercept = 0.0;
};

// Binary response with a lasso-style signal: n=400, p=10, x ~ N(0, I),
// logit = -4 + x^T b, b = (-3, 3, -2, 2, -1, 1, 0.5, 0, 0, 0).
SimulatedData simulate_logistic_design(std::uint64_t seed);

// Survival response with fused pairs: n=400, p=10, x ~ N(0, I),
// b = (1, 1, 2, -2, -2, 3, 1.5, -0.5, 0, 0), event time
// T = -log(U)/(0.1 exp(x^T b)), censoring Exp(rate 0.9), y = min(T, C).
SimulatedData simulate_cox_fused_design(std::uint64_t seed);

// Survival response over the leaves of an aggregation tree: AR(1) features
// (corr 0.5), log event time eta + noise with noise variance var(eta)/snr,
// censoring exponential with mean 5000.
SimulatedData simulate_cox_tree_design(const AggregationTree& tree, double snr,
                                       std::uint64_t seed, std::size_t n = 300);

// The built-in 42-leaf, 25-internal-node hierarchy used by the tree design.
AggregationTree default_aggregation_tree();

}  // namespace mmdust
