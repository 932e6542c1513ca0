#include "mmdust/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mmdust/dual.hpp"
#include "mmdust/linalg.hpp"

namespace mmdust {
namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Hessian of the loss restricted to the reduced design Z (coordinates s,
// beta = V s). Analytic per loss kind; only the initial fit forms Hessians.
DenseMatrix reduced_hessian(const LossModel& model, const DenseMatrix& Z, const Vector& eta) {
    const std::size_t n = Z.rows;
    const std::size_t q = Z.cols;
    DenseMatrix H(q, q);
    const auto& kern = simd::active();
    auto add_outer = [&](double w, const double* z) {
        for (std::size_t a = 0; a < q; ++a) {
            if (z[a] != 0.0) kern.axpy(w * z[a], z, H.row(a), q);
        }
    };
    switch (model.kind()) {
        case LossKind::squared:
            for (std::size_t i = 0; i < n; ++i) add_outer(1.0, Z.row(i));
            break;
        case LossKind::logistic:
            for (std::size_t i = 0; i < n; ++i) {
                const double s = sigmoid(eta[i]);
                add_outer(s * (1.0 - s), Z.row(i));
            }
            break;
        case LossKind::cox: {
            const auto& data = model.dataset();
            const double shift = *std::max_element(eta.begin(), eta.end());
            double s0 = 0.0;
            Vector s1(q, 0.0);
            DenseMatrix s2(q, q);
            std::size_t row = 0;
            while (row < n) {
                std::size_t row_end = row;
                while (row_end < n && data.time[row_end] == data.time[row]) ++row_end;
                for (std::size_t i = row; i < row_end; ++i) {
                    const double w = std::exp(eta[i] - shift);
                    s0 += w;
                    kern.axpy(w, Z.row(i), s1.data(), q);
                    for (std::size_t a = 0; a < q; ++a) {
                        if (Z(i, a) != 0.0) kern.axpy(w * Z(i, a), Z.row(i), s2.row(a), q);
                    }
                }
                for (std::size_t i = row; i < row_end; ++i) {
                    if (data.status[i] != 1) continue;
                    for (std::size_t a = 0; a < q; ++a) {
                        const double ma = s1[a] / s0;
                        for (std::size_t b = 0; b < q; ++b) {
                            H(a, b) += s2(a, b) / s0 - ma * (s1[b] / s0);
                        }
                    }
                }
                row = row_end;
            }
            break;
        }
    }
    return H;
}

}  // namespace

Vector initial_fit(const LossModel& model, const StructureMatrix& D, double ridge_delta) {
    const std::size_t p = model.p();
    if (D.col_count() != p) throw std::invalid_argument("initial_fit: D/model dimension mismatch");

    const DenseMatrix V = null_space_basis(D);
    const std::size_t q = V.cols;
    Vector beta(p, 0.0);
    if (q == 0) return beta;

    // reduced design Z = X V; the reduced problem shares the responses
    const DenseMatrix& X = model.dataset().X;
    DenseMatrix Z(X.rows, q);
    for (std::size_t i = 0; i < X.rows; ++i) {
        for (std::size_t a = 0; a < q; ++a) {
            double acc = 0.0;
            for (std::size_t j = 0; j < p; ++j) acc += X(i, j) * V(j, a);
            Z(i, a) = acc;
        }
    }
    Dataset reduced = model.dataset();
    reduced.X = Z;
    reduced.column_means.assign(q, 0.0);
    reduced.column_scales.assign(q, 1.0);
    const LossModel rmodel(std::move(reduced));

    Vector s(q, 0.0), grad(q), eta, snew(q), gtmp;
    bool ridged = false;
    constexpr int kMaxIter = 500;
    constexpr double kGradTol = 1e-10;
    double value = rmodel.value_and_gradient(s, grad);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        Vector g = grad;
        if (ridged) axpy(2.0 * ridge_delta, s, g);
        double gnorm = std::sqrt(sqnorm(g));
        if (gnorm <= kGradTol) {
            for (std::size_t j = 0; j < p; ++j) {
                double acc = 0.0;
                for (std::size_t a = 0; a < q; ++a) acc += V(j, a) * s[a];
                beta[j] = acc;
            }
            return beta;
        }

        matvec(Z, s, eta);
        DenseMatrix H = reduced_hessian(rmodel, Z, eta);
        if (ridged) {
            for (std::size_t a = 0; a < q; ++a) H(a, a) += 2.0 * ridge_delta;
        }
        Vector dir;
        Vector neg_g(q);
        for (std::size_t a = 0; a < q; ++a) neg_g[a] = -g[a];
        bool ok = linalg::solve_sym(H, neg_g, dir) && dot(dir, g) < 0.0;
        if (!ok) {
            if (!ridged) {
                ridged = true;
                continue;
            }
            dir = neg_g;  // last resort: plain gradient descent step
        }

        const double slope = dot(grad, dir) + (ridged ? 2.0 * ridge_delta * dot(s, dir) : 0.0);
        const double ridge_now = ridged ? ridge_delta : 0.0;
        const double merit = value + ridge_now * sqnorm(s);
        double t = 1.0;
        bool stepped = false;
        while (t >= 1e-14) {
            snew = s;
            axpy(t, dir, snew);
            const double vnew = rmodel.value_and_gradient(snew, gtmp);
            if (vnew + ridge_now * sqnorm(snew) <= merit + 1e-4 * t * slope) {
                s = snew;
                value = vnew;
                grad = gtmp;
                stepped = true;
                break;
            }
            t *= 0.5;
        }
        if (!stepped) {
            if (!ridged) {
                ridged = true;
                continue;
            }
            throw std::runtime_error("initial_fit: line search stalled, |grad| = " +
                                     std::to_string(gnorm));
        }
    }
    Vector g = grad;
    if (ridged) axpy(2.0 * ridge_delta, s, g);
    throw std::runtime_error("initial_fit: no convergence in 500 iterations, |grad| = " +
                             std::to_string(std::sqrt(sqnorm(g))));
}

Vector round_to_grid(const Vector& u, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("round_to_grid: eps must be positive");
    Vector out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double t = u[i] / eps;
        const double k = std::copysign(std::ceil(std::fabs(t) - 0.5), t);
        out[i] = k * eps;
    }
    return out;
}

std::pair<Vector, double> backward_step(const Vector& u, double eps) {
    Vector out = u;
    const double mx = max_abs(u);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (std::fabs(out[i]) >= mx - 1e-12 && out[i] != 0.0) {
            out[i] -= out[i] > 0 ? eps : -eps;
        }
    }
    return {std::move(out), mx - eps};
}

std::size_t degrees_of_freedom(const StructureMatrix& D, const Vector& u, double lambda,
                               double boundary_tol) {
    check_size(u, D.row_count(), "degrees_of_freedom u");
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (std::fabs(u[i]) < lambda - boundary_tol) keep.push_back(i);
    }
    if (keep.empty()) return D.col_count();
    return D.col_count() - linalg::numerical_rank(D.dense_rows(keep));
}

double information_criterion(const LossModel& model, const Vector& beta, std::size_t df,
                             CriterionKind) {
    return 2.0 * model.value(beta) + 2.0 * static_cast<double>(df);
}

bool early_stop(const std::vector<std::pair<std::size_t, double>>& df_history,
                std::size_t run_length) {
    if (run_length < 1 || df_history.size() < run_length + 1) return false;
    const std::size_t first = df_history.size() - (run_length + 1);
    for (std::size_t i = first + 1; i < df_history.size(); ++i) {
        if (!(df_history[i].first > df_history[i - 1].first)) return false;
        if (!(df_history[i].second > df_history[i - 1].second)) return false;
    }
    return true;
}

SolutionPath mm_dust_path(const LossModel& model, const StructureMatrix& D,
                          const PathConfig& config) {
    const std::size_t p = model.p();
    const std::size_t m = D.row_count();
    if (!(config.eps > 0.0)) throw std::invalid_argument("mm_dust_path: eps must be positive");
    if (config.max_majorizations < 1 || config.max_dual_steps < 1) {
        throw std::invalid_argument("mm_dust_path: N_m and N_d must be >= 1");
    }
    const double eps = config.eps;
    const double L = model.lipschitz_constant();

    SolutionPath path;
    path.eps = eps;

    Vector beta = initial_fit(model, D, config.ridge_delta);
    Vector grad;
    double loss = model.value_and_gradient(beta, grad);
    Vector ytilde(p);
    for (std::size_t j = 0; j < p; ++j) ytilde[j] = L * beta[j] - grad[j];

    // least-norm dual start, then integer grid bookkeeping throughout: u_i is
    // always materialized as k_i*eps so thousands of +/-eps moves cannot drift
    const Vector u_start = least_norm_dual(ytilde, D);
    std::vector<std::int64_t> k(m);
    std::int64_t n0 = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double t = u_start[i] / eps;
        k[i] = static_cast<std::int64_t>(std::copysign(std::ceil(std::fabs(t) - 0.5), t));
        n0 = std::max(n0, std::abs(k[i]));
    }
    Vector u(m);
    auto materialize = [&]() {
        for (std::size_t i = 0; i < m; ++i) u[i] = static_cast<double>(k[i]) * eps;
    };
    materialize();

    double penalty = D.l1_norm_of_product(beta);
    std::vector<std::pair<std::size_t, double>> df_history;

    auto record = [&](std::int64_t n, std::size_t inner_rounds) {
        PathPoint pt;
        pt.lambda_steps = n;
        pt.lambda = static_cast<double>(n) * eps;
        pt.beta = beta;
        pt.u = u;
        pt.loss = loss;
        pt.objective = loss + pt.lambda * penalty;
        pt.df = degrees_of_freedom(D, u, pt.lambda,
                                   config.boundary_tol_scale * std::max(1.0, pt.lambda));
        pt.aic = 2.0 * loss + 2.0 * static_cast<double>(pt.df);
        pt.accepted_inner_rounds = inner_rounds;
        const bool df_changed = df_history.empty() || df_history.back().first != pt.df;
        if (df_changed) df_history.emplace_back(pt.df, pt.aic);
        path.points.push_back(std::move(pt));
        return df_changed;
    };

    record(n0, 0);

    for (std::int64_t n = n0 - 1; n >= 1; --n) {
        const double lambda = static_cast<double>(n) * eps;

        // backward step on the argmax set (exact on the integer grid)
        std::int64_t kmax = 0;
        for (std::size_t i = 0; i < m; ++i) kmax = std::max(kmax, std::abs(k[i]));
        for (std::size_t i = 0; i < m; ++i) {
            if (std::abs(k[i]) == kmax && k[i] != 0) k[i] -= k[i] > 0 ? 1 : -1;
        }
        materialize();

        for (std::size_t j = 0; j < p; ++j) ytilde[j] = L * beta[j] - grad[j];
        double gamma = loss + lambda * penalty;

        std::size_t accepted = 0;
        for (std::size_t round = 0; round < config.max_majorizations; ++round) {
            DualState st = dual_solver(ytilde, D, u, config.max_dual_steps, eps);
            // primal update: beta_cand = beta - (D^T u + grad)/L = residual/L
            Vector beta_cand(p);
            for (std::size_t j = 0; j < p; ++j) beta_cand[j] = st.residual[j] / L;
            Vector grad_cand;
            const double loss_cand = model.value_and_gradient(beta_cand, grad_cand);
            const double penalty_cand = D.l1_norm_of_product(beta_cand);
            const double gamma_cand = loss_cand + lambda * penalty_cand;
            // accept unless the objective strictly increases; a plateau keeps
            // the dual iterate, otherwise the dual progress made under the
            // step budget would be thrown away and could never accumulate
            if (gamma_cand > gamma) break;
            const bool stalled = st.steps_taken == 0 && beta_cand == beta;

            beta = std::move(beta_cand);
            grad = std::move(grad_cand);
            loss = loss_cand;
            penalty = penalty_cand;
            gamma = gamma_cand;
            for (std::size_t i = 0; i < m; ++i) k[i] = std::llround(st.u[i] / eps);
            materialize();
            for (std::size_t j = 0; j < p; ++j) ytilde[j] = L * beta[j] - grad[j];
            ++accepted;
            if (stalled) break;  // an identical round would follow
        }

        const bool df_changed = record(n, accepted);
        if (df_changed && config.early_stop &&
            early_stop(df_history, config.early_stop->run_length)) {
            path.stopped_early = true;
            path.stop_reason = "aic increasing over " +
                               std::to_string(config.early_stop->run_length) +
                               " consecutive df increases";
            break;
        }
    }
    return path;
}

}  // namespace mmdust
