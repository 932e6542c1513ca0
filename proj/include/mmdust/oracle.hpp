#pragma once

#include <cstddef>

#include "mmdust/loss.hpp"
#include "mmdust/structure.hpp"
#include "mmdust/vec.hpp"

// Reference solvers used only to verify the stagewise path machinery. They
// share no iteration logic with the solvers under test.
namespace mmdust::oracle {

struct OracleSolution {
    Vector beta;
    Vector u;
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
};

// Proximal gradient for the lasso case (D implied identity):
// beta <- soft_threshold(beta - grad/L, lambda/L) until the objective change
// drops below tol. kkt_residual is the subgradient-optimality violation.
// step_scale > 1 shortens the step (self-consistency checks).
OracleSolution ista_lasso(const LossModel& model, double lambda, double tol,
                          std::size_t max_iter = 1000000, const Vector* warm_start = nullptr,
                          double step_scale = 1.0);

// Projected gradient on 0.5*||ytilde - D^T u||^2 over the box ||u||_inf <=
// lambda, step 1/sigma_max(D D^T), run until the projected-gradient norm is
// below tol. Global optimum of the convex box problem up to tol.
Vector projected_gradient_box(const Vector& ytilde, const StructureMatrix& D, double lambda,
                              double tol, std::size_t max_iter = 1000000,
                              const Vector* warm_start = nullptr);

// Fully-converged majorize/solve/update iteration at fixed lambda: the same
// majorizer as the path solver but an exact box solve inside, so the
// stagewise eps-approximation is the only difference under test.
OracleSolution exact_fixed_lambda(const LossModel& model, const StructureMatrix& D, double lambda,
                                  double tol, std::size_t max_outer = 200000,
                                  const Vector* warm_start = nullptr);

// Exhaustive minimization of the box dual objective over the grid
// {-lambda, -lambda+grid_step, ..., lambda}^m. Requires m <= 3.
Vector grid_brute_force(const Vector& ytilde, const StructureMatrix& D, double lambda,
                        double grid_step);

// Exact fused-lasso solution on a chain (squared loss, X = I):
// argmin 0.5*||y - b||^2 + lambda * sum_i |b_{i+1} - b_i|, by exhaustive
// KKT verification over segmentations and jump signs. Small p only.
Vector fused_chain_exact(const Vector& y, double lambda);

}  // namespace mmdust::oracle
