#include "mmdust/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmdust::oracle {
namespace {

double lasso_kkt_residual(const Vector& grad, const Vector& beta, double lambda) {
    double worst = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) {
        double v;
        if (beta[j] != 0.0) {
            v = std::fabs(grad[j] + lambda * (beta[j] > 0 ? 1.0 : -1.0));
        } else {
            v = std::max(0.0, std::fabs(grad[j]) - lambda);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace

OracleSolution ista_lasso(const LossModel& model, double lambda, double tol,
                          std::size_t max_iter, const Vector* warm_start, double step_scale) {
    if (lambda < 0.0) throw std::invalid_argument("ista_lasso: lambda must be nonnegative");
    const std::size_t p = model.p();
    const double L = model.lipschitz_constant() * step_scale;

    OracleSolution sol;
    sol.beta = warm_start ? *warm_start : Vector(p, 0.0);
    Vector grad, step(p);
    double obj = model.value_and_gradient(sol.beta, grad);
    for (std::size_t j = 0; j < p; ++j) obj += lambda * std::fabs(sol.beta[j]);

    for (std::size_t it = 1; it <= max_iter; ++it) {
        for (std::size_t j = 0; j < p; ++j) step[j] = sol.beta[j] - grad[j] / L;
        soft_threshold(step, lambda / L, sol.beta);
        double obj_new = model.value_and_gradient(sol.beta, grad);
        for (std::size_t j = 0; j < p; ++j) obj_new += lambda * std::fabs(sol.beta[j]);
        sol.iterations = it;
        if (std::fabs(obj - obj_new) <= tol) {
            obj = obj_new;
            break;
        }
        obj = obj_new;
        if (it == max_iter) {
            throw std::runtime_error("ista_lasso: no convergence in " + std::to_string(max_iter) +
                                     " iterations");
        }
    }
    sol.kkt_residual = lasso_kkt_residual(grad, sol.beta, lambda);
    sol.u.resize(p);
    simd::active().clip(grad.data(), -lambda, lambda, sol.u.data(), p);
    for (std::size_t j = 0; j < p; ++j) sol.u[j] = -sol.u[j];
    return sol;
}

Vector projected_gradient_box(const Vector& ytilde, const StructureMatrix& D, double lambda,
                              double tol, std::size_t max_iter, const Vector* warm_start) {
    if (lambda < 0.0) throw std::invalid_argument("projected_gradient_box: lambda < 0");
    const std::size_t m = D.row_count();
    Vector u = warm_start ? *warm_start : Vector(m, 0.0);
    clip_inplace(u, -lambda, lambda);
    if (lambda == 0.0 || m == 0) return u;

    const double smooth = dual_smoothness(D);
    if (smooth == 0.0) return u;  // D == 0: any feasible point is optimal
    const double step = 1.0 / smooth;

    Vector r, g(m), trial(m);
    for (std::size_t it = 1; it <= max_iter; ++it) {
        D.apply_transpose(u, r);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] = ytilde[j] - r[j];
        D.apply(r, g);
        for (std::size_t i = 0; i < m; ++i) g[i] = -g[i];

        for (std::size_t i = 0; i < m; ++i) trial[i] = u[i] - step * g[i];
        clip_inplace(trial, -lambda, lambda);
        double pg = 0.0;
        for (std::size_t i = 0; i < m; ++i) pg = std::max(pg, std::fabs(u[i] - trial[i]));
        u.swap(trial);
        if (pg / step <= tol) return u;
    }
    throw std::runtime_error("projected_gradient_box: no convergence in " +
                             std::to_string(max_iter) + " iterations");
}

OracleSolution exact_fixed_lambda(const LossModel& model, const StructureMatrix& D, double lambda,
                                  double tol, std::size_t max_outer, const Vector* warm_start) {
    if (lambda < 0.0) throw std::invalid_argument("exact_fixed_lambda: lambda < 0");
    const std::size_t p = model.p();
    const double L = model.lipschitz_constant();
    const double inner_tol = std::max(1e-14, 1e-2 * tol);

    OracleSolution sol;
    sol.beta = warm_start ? *warm_start : Vector(p, 0.0);
    Vector grad, ytilde(p), u(D.row_count(), 0.0), dtu, beta_next(p);
    double change = std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= max_outer; ++it) {
        model.gradient(sol.beta, grad);
        for (std::size_t j = 0; j < p; ++j) ytilde[j] = L * sol.beta[j] - grad[j];
        u = projected_gradient_box(ytilde, D, lambda, inner_tol, 1000000, &u);
        D.apply_transpose(u, dtu);
        for (std::size_t j = 0; j < p; ++j) beta_next[j] = (ytilde[j] - dtu[j]) / L;
        change = 0.0;
        for (std::size_t j = 0; j < p; ++j) change = std::max(change, std::fabs(beta_next[j] - sol.beta[j]));
        sol.beta.swap(beta_next);
        sol.iterations = it;
        if (change > tol) continue;

        // stationarity + complementary-slackness certificate, recomputed
        model.gradient(sol.beta, grad);
        Vector stat = grad;
        for (std::size_t j = 0; j < p; ++j) stat[j] += dtu[j];
        const double stat_norm = std::sqrt(sqnorm(stat));
        Vector dbeta;
        D.apply(sol.beta, dbeta);
        double cs = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            cs = std::max(cs, lambda * std::fabs(dbeta[i]) - u[i] * dbeta[i]);
        }
        sol.kkt_residual = std::max(stat_norm, cs);
        if (sol.kkt_residual <= 10.0 * tol) {
            sol.u = u;
            return sol;
        }
    }
    throw std::runtime_error("exact_fixed_lambda: no convergence, last step " +
                             std::to_string(change) + ", kkt " + std::to_string(sol.kkt_residual));
}

Vector grid_brute_force(const Vector& ytilde, const StructureMatrix& D, double lambda,
                        double grid_step) {
    const std::size_t m = D.row_count();
    if (m > 3) throw std::invalid_argument("grid_brute_force: m must be <= 3");
    if (!(grid_step > 0.0)) throw std::invalid_argument("grid_brute_force: grid_step <= 0");

    const auto points = static_cast<std::size_t>(std::floor(2.0 * lambda / grid_step + 1e-12)) + 1;
    Vector u(m, -lambda), best(m, -lambda), r;
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx(m, 0);
    while (true) {
        for (std::size_t i = 0; i < m; ++i) u[i] = -lambda + static_cast<double>(idx[i]) * grid_step;
        D.apply_transpose(u, r);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] = ytilde[j] - r[j];
        const double obj = 0.5 * sqnorm(r);
        if (obj < best_obj) {
            best_obj = obj;
            best = u;
        }
        std::size_t d = 0;
        while (d < m && ++idx[d] == points) idx[d++] = 0;
        if (d == m) break;
    }
    return best;
}

Vector fused_chain_exact(const Vector& y, double lambda) {
    const std::size_t n = y.size();
    if (n == 0) return {};
    if (n > 14) throw std::invalid_argument("fused_chain_exact: supports p <= 14");
    if (lambda == 0.0) return y;

    Vector prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + y[i];

    Vector beta(n), best(n);
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> bounds;
    std::vector<int> sgn;

    const std::size_t masks = std::size_t{1} << (n - 1);
    for (std::size_t mask = 0; mask < masks; ++mask) {
        bounds.clear();
        bounds.push_back(0);
        for (std::size_t b = 0; b + 1 < n; ++b) {
            if (mask & (std::size_t{1} << b)) bounds.push_back(b + 1);
        }
        bounds.push_back(n);
        const std::size_t segs = bounds.size() - 1;

        const std::size_t patterns = std::size_t{1} << (segs - 1);
        for (std::size_t pat = 0; pat < patterns; ++pat) {
            sgn.assign(segs + 1, 0);  // sgn[0] = sgn[segs] = 0
            for (std::size_t t = 1; t < segs; ++t) sgn[t] = (pat & (std::size_t{1} << (t - 1))) ? 1 : -1;

            // per-segment stationarity: c = mean + lambda*(delta_t - delta_{t-1})/len,
            // with delta_t the sign of the jump at the segment's right boundary
            bool ok = true;
            for (std::size_t t = 0; t < segs; ++t) {
                const std::size_t a = bounds[t], b = bounds[t + 1];
                const double len = static_cast<double>(b - a);
                const double mean = (prefix[b] - prefix[a]) / len;
                const double c = mean + lambda * static_cast<double>(sgn[t + 1] - sgn[t]) / len;
                for (std::size_t i = a; i < b; ++i) beta[i] = c;
            }
            // jump signs must agree with the realized ordering
            for (std::size_t t = 1; t < segs && ok; ++t) {
                const double diff = beta[bounds[t]] - beta[bounds[t] - 1];
                ok = (sgn[t] == 1 && diff > 0.0) || (sgn[t] == -1 && diff < 0.0);
            }
            if (!ok) continue;
            // interior dual coordinates u_i = sum_{j<=i}(y_j - beta_j) stay in the box
            double run = 0.0;
            for (std::size_t i = 0; i + 1 < n && ok; ++i) {
                run += y[i] - beta[i];
                ok = std::fabs(run) <= lambda + 1e-9;
            }
            if (!ok) continue;

            double obj = 0.0;
            for (std::size_t i = 0; i < n; ++i) obj += 0.5 * (y[i] - beta[i]) * (y[i] - beta[i]);
            for (std::size_t i = 0; i + 1 < n; ++i) obj += lambda * std::fabs(beta[i + 1] - beta[i]);
            if (obj < best_obj) {
                best_obj = obj;
                best = beta;
            }
        }
    }
    if (best_obj == std::numeric_limits<double>::infinity()) {
        throw std::logic_error("fused_chain_exact: no KKT-consistent candidate found");
    }
    return best;
}

}  // namespace mmdust::oracle
