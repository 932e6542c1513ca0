#pragma once

#include <cstdint>
#include <vector>

#include "mmdust/structure.hpp"
#include "mmdust/vec.hpp"

namespace mmdust {

// State of a box-constrained dual descent. The residual ytilde - D^T u is
// maintained incrementally (refreshed periodically to bound drift) and the
// objective is 0.5 * ||residual||^2.
struct DualState {
    Vector u;
    double bound = 0.0;
    Vector residual;
    double objective = 0.0;
    std::int64_t steps_taken = 0;
    bool exhausted_budget = false;  // stopped on the step budget, not on no-descent
};

double box_dual_objective(const Vector& ytilde, const StructureMatrix& D, const Vector& u);

// Epsilon-step steepest coordinate descent on 0.5*||ytilde - D^T u||^2 inside
// the box ||u||_inf <= bound. At most max_steps moves of +/-eps on a single
// coordinate; stops early when the best feasible move no longer strictly
// decreases the objective.
DualState dual_solver(const Vector& ytilde, const StructureMatrix& D, const Vector& u0,
                      std::int64_t max_steps, double eps, double bound);

// Box edge taken from the start point, c = ||u0||_inf.
DualState dual_solver(const Vector& ytilde, const StructureMatrix& D, const Vector& u0,
                      std::int64_t max_steps, double eps);

struct GapReport {
    double gap = 0.0;        // h(u) = grad^T u + lambda*||grad||_1
    double bound_rhs = 0.0;  // smoothness * lambda * m * eps
    bool certified = false;  // gap <= bound_rhs
};

// Duality-gap certificate for a feasible u. smoothness < 0 computes
// sigma_max(D D^T); eps is the step size the certificate is quoted at.
GapReport duality_gap(const Vector& ytilde, const StructureMatrix& D, const Vector& u,
                      double lambda, double eps, double smoothness = -1.0);

// Minimum-norm minimizer of ||ytilde - D^T u|| (SVD pseudo-inverse,
// singular values below tol dropped; tol < 0 uses the default cutoff).
Vector least_norm_dual(const Vector& ytilde, const StructureMatrix& D, double tol = -1.0);

struct BoxPathPoint {
    double lambda = 0.0;
    Vector u;
    Vector beta;  // primal point recovered from u
};

// Stagewise descent path for the quadratic dual of the squared loss,
// f*(-D^T u) = 0.5*(X^T y - D^T u)^T (X^T X)^+ (X^T y - D^T u). When X is
// column-rank-deficient a ridge ridge_delta*||beta||^2 is added to the primal
// so the dual loss is defined without the row-space constraint. Emits the
// settled (lambda_t, u_t) at every lambda level until lambda <= eps.
std::vector<BoxPathPoint> box_path_quadratic(const DenseMatrix& X, const Vector& y,
                                             const StructureMatrix& D, double eps,
                                             double ridge_delta = 1e-6);

}  // namespace mmdust
