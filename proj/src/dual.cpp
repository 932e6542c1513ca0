#include "mmdust/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mmdust/linalg.hpp"

namespace mmdust {
namespace {

constexpr double kFeasTol = 1e-12;
constexpr double kStrictTol = 1e-14;
constexpr std::int64_t kRefreshPeriod = 10000;

bool strictly_decreases(double delta, double objective) {
    return delta < -kStrictTol * std::max(1.0, std::fabs(objective));
}

}  // namespace

double box_dual_objective(const Vector& ytilde, const StructureMatrix& D, const Vector& u) {
    Vector r;
    D.apply_transpose(u, r);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = ytilde[j] - r[j];
    return 0.5 * sqnorm(r);
}

DualState dual_solver(const Vector& ytilde, const StructureMatrix& D, const Vector& u0,
                      std::int64_t max_steps, double eps, double bound) {
    const std::size_t m = D.row_count();
    const std::size_t p = D.col_count();
    check_size(ytilde, p, "dual_solver ytilde");
    check_size(u0, m, "dual_solver u0");
    if (!(eps > 0.0)) throw std::invalid_argument("dual_solver: eps must be positive");
    if (max_abs(u0) > bound + kFeasTol) {
        throw std::invalid_argument("dual_solver: infeasible start, ||u0||_inf exceeds the bound");
    }

    DualState st;
    st.u = u0;
    st.bound = bound;
    // grid offsets from u0; coordinates are re-materialized as
    // u0 + k*eps on every update so the iterate never accumulates drift
    std::vector<std::int64_t> offsets(m, 0);

    D.apply_transpose(st.u, st.residual);
    for (std::size_t j = 0; j < p; ++j) st.residual[j] = ytilde[j] - st.residual[j];
    st.objective = 0.5 * sqnorm(st.residual);

    Vector g(m, 0.0);
    const auto& kern = simd::active();
    for (std::int64_t step = 0; step < max_steps; ++step) {
        D.apply(st.residual, g);
        const simd::BestMove mv =
            kern.best_move(g.data(), D.row_sqnorms().data(), st.u.data(), m, eps, bound, kFeasTol);
        if (mv.index < 0 || !strictly_decreases(mv.delta, st.objective)) return st;

        const auto i = static_cast<std::size_t>(mv.index);
        offsets[i] += mv.step > 0 ? 1 : -1;
        st.u[i] = u0[i] + static_cast<double>(offsets[i]) * eps;
        D.add_row_multiple(i, -mv.step, st.residual);
        st.objective += mv.delta;
        ++st.steps_taken;

        if (st.steps_taken % kRefreshPeriod == 0) {
            D.apply_transpose(st.u, st.residual);
            for (std::size_t j = 0; j < p; ++j) st.residual[j] = ytilde[j] - st.residual[j];
            st.objective = 0.5 * sqnorm(st.residual);
        }
    }
    st.exhausted_budget = true;
    return st;
}

DualState dual_solver(const Vector& ytilde, const StructureMatrix& D, const Vector& u0,
                      std::int64_t max_steps, double eps) {
    return dual_solver(ytilde, D, u0, max_steps, eps, max_abs(u0));
}

GapReport duality_gap(const Vector& ytilde, const StructureMatrix& D, const Vector& u,
                      double lambda, double eps, double smoothness) {
    const std::size_t m = D.row_count();
    check_size(u, m, "duality_gap u");
    if (max_abs(u) > lambda + 1e-9 * std::max(1.0, lambda)) {
        throw std::invalid_argument("duality_gap: u is infeasible for the given lambda");
    }
    Vector r;
    D.apply_transpose(u, r);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = ytilde[j] - r[j];
    Vector g;
    D.apply(r, g);
    for (std::size_t i = 0; i < m; ++i) g[i] = -g[i];

    GapReport rep;
    double l1 = 0.0;
    for (std::size_t i = 0; i < m; ++i) l1 += std::fabs(g[i]);
    rep.gap = dot(g, u) + lambda * l1;
    if (smoothness < 0.0) smoothness = dual_smoothness(D);
    rep.bound_rhs = smoothness * lambda * static_cast<double>(m) * eps;
    rep.certified = rep.gap <= rep.bound_rhs;
    return rep;
}

Vector least_norm_dual(const Vector& ytilde, const StructureMatrix& D, double tol) {
    check_size(ytilde, D.col_count(), "least_norm_dual ytilde");
    DenseMatrix Dt(D.col_count(), D.row_count());
    for (const Triplet& t : D.triplets()) Dt(t.col, t.row) = t.value;
    return linalg::least_norm_least_squares(Dt, ytilde, tol);
}

std::vector<BoxPathPoint> box_path_quadratic(const DenseMatrix& X, const Vector& y,
                                             const StructureMatrix& D, double eps,
                                             double ridge_delta) {
    const std::size_t p = X.cols;
    const std::size_t m = D.row_count();
    if (D.col_count() != p) throw std::invalid_argument("box_path_quadratic: D/X column mismatch");
    if (!(eps > 0.0)) throw std::invalid_argument("box_path_quadratic: eps must be positive");

    // P = (X^T X)^+, or (X^T X + 2*delta*I)^{-1} after the ridge fallback
    Vector nu;
    DenseMatrix Q;
    linalg::sym_eig(gram(X), nu, Q);
    const double numax = nu.empty() ? 0.0 : *std::max_element(nu.begin(), nu.end());
    const double rank_tol =
        static_cast<double>(p) * std::numeric_limits<double>::epsilon() * std::max(numax, 1.0);
    bool full_rank = true;
    for (double v : nu) full_rank = full_rank && v > rank_tol;
    Vector inv_nu(p);
    for (std::size_t i = 0; i < p; ++i) {
        inv_nu[i] = full_rank ? 1.0 / nu[i] : 1.0 / (nu[i] + 2.0 * ridge_delta);
        if (!full_rank && nu[i] <= rank_tol && ridge_delta == 0.0) inv_nu[i] = 0.0;
    }
    // apply_P(x) = Q diag(inv_nu) Q^T x
    Vector scratch(p);
    auto apply_P = [&](const Vector& x, Vector& out) {
        for (std::size_t i = 0; i < p; ++i) {
            double acc = 0.0;
            for (std::size_t r = 0; r < p; ++r) acc += Q(r, i) * x[r];
            scratch[i] = inv_nu[i] * acc;
        }
        out.assign(p, 0.0);
        for (std::size_t r = 0; r < p; ++r) {
            double acc = 0.0;
            for (std::size_t i = 0; i < p; ++i) acc += Q(r, i) * scratch[i];
            out[r] = acc;
        }
    };

    Vector w;
    matvec_t(X, y, w);  // X^T y
    Vector Pw;
    apply_P(w, Pw);

    // S = D P D^T and q = D P w drive the per-step objective changes
    DenseMatrix PDt(p, m);
    {
        Vector col(p), pc;
        for (std::size_t i = 0; i < m; ++i) {
            col.assign(p, 0.0);
            D.add_row_multiple(i, 1.0, col);  // d_i as a dense column of D^T
            apply_P(col, pc);
            for (std::size_t r = 0; r < p; ++r) PDt(r, i) = pc[r];
        }
    }
    DenseMatrix S(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        Vector pdi(p);
        for (std::size_t r = 0; r < p; ++r) pdi[r] = PDt(r, i);
        Vector si;
        D.apply(pdi, si);
        for (std::size_t j = 0; j < m; ++j) S(i, j) = si[j];
    }
    Vector q;
    D.apply(Pw, q);
    Vector diagS(m);
    for (std::size_t i = 0; i < m; ++i) diagS[i] = S(i, i);

    // least-norm unconstrained minimizer, rounded to the eps grid
    Vector uF = linalg::least_norm_least_squares(S, q);
    std::vector<std::int64_t> k(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = uF[i] / eps;
        k[i] = static_cast<std::int64_t>(std::copysign(std::ceil(std::fabs(t) - 0.5), t));
    }

    auto backward_step = [&]() {
        std::int64_t kmax = 0;
        for (std::size_t i = 0; i < m; ++i) kmax = std::max(kmax, std::abs(k[i]));
        for (std::size_t i = 0; i < m; ++i) {
            if (std::abs(k[i]) == kmax && k[i] != 0) k[i] -= k[i] > 0 ? 1 : -1;
        }
    };

    std::vector<BoxPathPoint> path;
    backward_step();  // K_0 on the rounded u^F
    std::int64_t n_lambda = 0;
    for (std::size_t i = 0; i < m; ++i) n_lambda = std::max(n_lambda, std::abs(k[i]));
    if (n_lambda <= 1) return path;  // lambda_0 <= eps: nothing to trace

    Vector u(m), grad(m);
    auto materialize = [&]() {
        for (std::size_t i = 0; i < m; ++i) u[i] = static_cast<double>(k[i]) * eps;
    };
    auto refresh_grad = [&]() {
        for (std::size_t i = 0; i < m; ++i) {
            double acc = -q[i];
            for (std::size_t j = 0; j < m; ++j) acc += S(i, j) * u[j];
            grad[i] = acc;
        }
    };
    materialize();
    refresh_grad();
    Vector v = w;  // w - D^T u, for the objective scale
    {
        Vector dtu;
        D.apply_transpose(u, dtu);
        for (std::size_t r = 0; r < p; ++r) v[r] = w[r] - dtu[r];
    }
    Vector pv;
    apply_P(v, pv);
    double objective = 0.5 * dot(v, pv);

    Vector neg_grad(m);
    const auto& kern = simd::active();
    for (std::int64_t n = n_lambda; n >= 2;) {
        const double lambda = static_cast<double>(n) * eps;
        for (std::size_t i = 0; i < m; ++i) neg_grad[i] = -grad[i];
        const simd::BestMove mv =
            kern.best_move(neg_grad.data(), diagS.data(), u.data(), m, eps, lambda, kFeasTol);
        if (mv.index >= 0 && strictly_decreases(mv.delta, objective)) {
            const auto i = static_cast<std::size_t>(mv.index);
            k[i] += mv.step > 0 ? 1 : -1;
            u[i] = static_cast<double>(k[i]) * eps;
            // grad += step * S[:, i]
            simd::active().axpy(mv.step, S.row(i), grad.data(), m);
            objective += mv.delta;
            continue;
        }
        BoxPathPoint pt;
        pt.lambda = lambda;
        pt.u = u;
        Vector dtu;
        D.apply_transpose(u, dtu);
        Vector resid(p);
        for (std::size_t r = 0; r < p; ++r) resid[r] = w[r] - dtu[r];
        apply_P(resid, pt.beta);
        path.push_back(std::move(pt));

        backward_step();
        --n;
        materialize();
        refresh_grad();
        {
            Vector dtu2;
            D.apply_transpose(u, dtu2);
            for (std::size_t r = 0; r < p; ++r) v[r] = w[r] - dtu2[r];
        }
        apply_P(v, pv);
        objective = 0.5 * dot(v, pv);
    }
    return path;
}

}  // namespace mmdust
