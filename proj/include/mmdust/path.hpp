#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmdust/loss.hpp"
#include "mmdust/structure.hpp"
#include "mmdust/vec.hpp"

namespace mmdust {

struct EarlyStopRule {
    std::size_t run_length = 7;  // stop after this many consecutive df increases with rising AIC
};

struct PathConfig {
    double eps = 0.1;
    std::size_t max_majorizations = 1;  // N_m
    std::int64_t max_dual_steps = 15;   // N_d
    double ridge_delta = 1e-6;          // l2 fallback weight for the initial fit
    double boundary_tol_scale = 1e-9;   // |u_i| >= lambda - scale*max(1,lambda) joins the boundary set
    std::optional<EarlyStopRule> early_stop;
};

struct PathPoint {
    double lambda = 0.0;
    std::int64_t lambda_steps = 0;  // lambda as an integer multiple of eps
    Vector beta;
    Vector u;
    double objective = 0.0;  // f(beta) + lambda*||D beta||_1
    double loss = 0.0;       // f(beta) alone
    std::size_t df = 0;
    double aic = 0.0;
    std::size_t accepted_inner_rounds = 0;
};

struct SolutionPath {
    double eps = 0.0;
    std::vector<PathPoint> points;
    bool stopped_early = false;
    std::string stop_reason;
};

// Constrained fit over the null space of D: argmin f(beta) s.t. D beta = 0,
// solved as a damped Newton iteration in the reduced coordinates. Returns the
// zero vector when D has full column rank.
Vector initial_fit(const LossModel& model, const StructureMatrix& D, double ridge_delta);

// Nearest multiple of eps per coordinate; exact halves round toward zero.
Vector round_to_grid(const Vector& u, double eps);

// Shrinks every coordinate tying the max magnitude (within 1e-12) by eps
// toward zero; second member is the new bound, old max - eps.
std::pair<Vector, double> backward_step(const Vector& u, double eps);

// Proposition-1 plug-in: nullity of D with the boundary rows
// {i : |u_i| >= lambda - boundary_tol} removed.
std::size_t degrees_of_freedom(const StructureMatrix& D, const Vector& u, double lambda,
                               double boundary_tol);

enum class CriterionKind { aic };

// AIC = 2 f(beta) + 2 df, with f the negative (partial) log-likelihood.
double information_criterion(const LossModel& model, const Vector& beta, std::size_t df,
                             CriterionKind kind = CriterionKind::aic);

// History entries are (df, criterion) recorded only when df changes. True
// iff the last run_length + 1 entries are strictly increasing in both.
bool early_stop(const std::vector<std::pair<std::size_t, double>>& df_history,
                std::size_t run_length);

// The full majorize / dual-descend / primal-update path driver.
SolutionPath mm_dust_path(const LossModel& model, const StructureMatrix& D,
                          const PathConfig& config);

}  // namespace mmdust
