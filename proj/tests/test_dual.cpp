#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmdust/dual.hpp"
#include "mmdust/oracle.hpp"
#include "testutil.hpp"

using namespace mmdust;

TEST_CASE("dual solver clips toward the box solution of soft thresholding") {
    const StructureMatrix I2 = identity_structure(2);
    const Vector ytilde = {3.0, -1.0};
    const DualState st = dual_solver(ytilde, I2, {0.0, 0.0}, 10, 0.5, 1.0);
    CHECK(st.u[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(st.u[1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(st.residual[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(st.residual[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(st.objective == doctest::Approx(2.0).epsilon(1e-12));  // 0.5*||(2,0)||^2
}

TEST_CASE("dual solver edge cases") {
    const StructureMatrix I2 = identity_structure(2);
    SUBCASE("zero step budget leaves u unchanged") {
        const DualState st = dual_solver({3.0, -1.0}, I2, {0.5, 0.0}, 0, 0.5, 1.0);
        CHECK(st.u == Vector{0.5, 0.0});
        CHECK(st.steps_taken == 0);
        CHECK(st.exhausted_budget);
    }
    SUBCASE("zero residual admits no descent") {
        const DualState st = dual_solver({0.5, -0.5}, I2, {0.5, -0.5}, 100, 0.1, 0.5);
        CHECK(st.u == Vector{0.5, -0.5});
        CHECK(st.steps_taken == 0);
        CHECK_FALSE(st.exhausted_budget);
    }
    SUBCASE("infeasible start is rejected") {
        CHECK_THROWS(dual_solver({0.0, 0.0}, I2, {2.0, 0.0}, 10, 0.5, 1.0));
    }
}

TEST_CASE("dual descent: feasibility, monotonicity, residual fidelity") {
    Rng rng(31);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 10);
        const std::size_t p = 1 + static_cast<std::size_t>(rng.uniform() * 6);
        const StructureMatrix D = testutil::random_structure(rng, m, p, 0.6);
        const Vector ytilde = testutil::random_vector(rng, p, 2.0);
        const double eps = 0.05;
        const double bound = 0.5;

        double prev = box_dual_objective(ytilde, D, Vector(m, 0.0));
        DualState st;
        for (std::int64_t budget : {1, 2, 5, 20, 100, 10000}) {
            st = dual_solver(ytilde, D, Vector(m, 0.0), budget, eps, bound);
            CHECK(max_abs(st.u) <= bound + 1e-12);
            CHECK(st.objective <= prev + 1e-12);  // larger budget never worse
            prev = st.objective;
        }
        Vector fresh;
        D.apply_transpose(st.u, fresh);
        for (std::size_t j = 0; j < fresh.size(); ++j) fresh[j] = ytilde[j] - fresh[j];
        CHECK(testutil::sup_diff(fresh, st.residual) <= 1e-8);
        CHECK(st.objective == doctest::Approx(0.5 * sqnorm(fresh)).epsilon(1e-9));
    }
}

TEST_CASE("terminated descent satisfies the duality-gap certificate") {
    Rng rng(32);
    for (double eps : {0.1, 0.01}) {
        for (int rep = 0; rep < 25; ++rep) {
            const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 18);
            const std::size_t p = 1 + static_cast<std::size_t>(rng.uniform() * 9);
            const StructureMatrix D = testutil::random_structure(rng, m, p, 0.5);
            const Vector ytilde = testutil::random_vector(rng, p, 1.5);
            // the driver always hands the solver a box edge on the eps grid
            const double lambda = eps * std::max(1.0, std::round((0.2 + rng.uniform()) / eps));
            const DualState st =
                dual_solver(ytilde, D, Vector(m, 0.0), INT64_MAX, eps, lambda);
            REQUIRE_FALSE(st.exhausted_budget);
            const GapReport rep_out = duality_gap(ytilde, D, st.u, lambda, eps);
            CHECK(rep_out.certified);
            CHECK(rep_out.gap <= rep_out.bound_rhs);
        }
    }
}

TEST_CASE("duality gap is zero at the exact box optimum and bounds suboptimality") {
    const StructureMatrix I3 = identity_structure(3);
    const Vector ytilde = {0.9, -2.0, 0.1};
    const double lambda = 0.5;
    Vector ustar(3);
    simd::active().clip(ytilde.data(), -lambda, lambda, ustar.data(), 3);
    const GapReport at_opt = duality_gap(ytilde, I3, ustar, lambda, 0.01);
    CHECK(std::fabs(at_opt.gap) <= 1e-10);

    // on a random feasible point the gap dominates the true optimality gap
    Rng rng(33);
    for (int rep = 0; rep < 20; ++rep) {
        const StructureMatrix D = testutil::random_structure(rng, 4, 3, 0.7);
        const Vector yt = testutil::random_vector(rng, 3);
        Vector u(4);
        for (double& v : u) v = (rng.uniform() - 0.5) * 2.0 * lambda;
        const Vector uopt = oracle::projected_gradient_box(yt, D, lambda, 1e-12);
        const double gap = duality_gap(yt, D, u, lambda, 0.01).gap;
        const double subopt = box_dual_objective(yt, D, u) - box_dual_objective(yt, D, uopt);
        CHECK(gap >= subopt - 1e-9);
        CHECK(subopt >= -1e-10);
    }

    CHECK_THROWS(duality_gap(ytilde, I3, {1.0, 0.0, 0.0}, 0.5, 0.01));
}

TEST_CASE("least-norm dual start") {
    const StructureMatrix I3 = identity_structure(3);
    const Vector ytilde = {1.0, -2.0, 0.5};
    CHECK(testutil::sup_diff(least_norm_dual(ytilde, I3), ytilde) <= 1e-12);

    const StructureMatrix twice = vstack(identity_structure(2), identity_structure(2));
    const Vector u = least_norm_dual({2.0, 4.0}, twice);
    REQUIRE(u.size() == 4);
    CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(u[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(u[3] == doctest::Approx(2.0).epsilon(1e-12));

    CHECK(max_abs(least_norm_dual({0.0, 0.0, 0.0}, I3)) == 0.0);
}

namespace {

DenseMatrix eye(std::size_t p) {
    DenseMatrix X(p, p);
    for (std::size_t i = 0; i < p; ++i) X(i, i) = 1.0;
    return X;
}

}  // namespace

TEST_CASE("quadratic box path recovers the soft-threshold path") {
    const Vector y = {3.0, -1.0};
    const StructureMatrix I2 = identity_structure(2);
    for (double eps : {0.5, 0.1}) {
        const auto path = box_path_quadratic(eye(2), y, I2, eps);
        REQUIRE_FALSE(path.empty());
        for (const auto& pt : path) {
            Vector st;
            soft_threshold(y, pt.lambda, st);
            CHECK(testutil::sup_diff(pt.beta, st) <= 2.0 * eps + 1e-12);
            CHECK(max_abs(pt.u) <= pt.lambda + 1e-12);
        }
        // lambda = 1 sits on both grids; beta there is near (2, 0)
        bool found = false;
        for (const auto& pt : path) {
            if (std::fabs(pt.lambda - 1.0) < 1e-9) {
                found = true;
                CHECK(std::fabs(pt.beta[0] - 2.0) <= 2.0 * eps);
                CHECK(std::fabs(pt.beta[1]) <= 2.0 * eps);
            }
        }
        CHECK(found);
    }
}

TEST_CASE("quadratic box path terminates immediately on a zero response") {
    const auto path = box_path_quadratic(eye(2), {0.0, 0.0}, identity_structure(2), 0.1);
    CHECK(path.empty());
}

TEST_CASE("quadratic box path falls back to a ridge when X is rank deficient") {
    // wide design: rank(X) = 2 < p = 3
    DenseMatrix X(2, 3);
    X(0, 0) = 1.0;
    X(0, 2) = 1.0;
    X(1, 1) = 1.0;
    const Vector y = {2.0, -1.0};
    const auto path = box_path_quadratic(X, y, identity_structure(3), 0.1);
    REQUIRE_FALSE(path.empty());
    for (const auto& pt : path) {
        CHECK(max_abs(pt.u) <= pt.lambda + 1e-12);
        for (double b : pt.beta) CHECK(std::isfinite(b));
    }
    // monotone lambda grid
    for (std::size_t t = 1; t < path.size(); ++t) {
        CHECK(path[t].lambda == doctest::Approx(path[t - 1].lambda - 0.1).epsilon(1e-9));
    }
}

TEST_CASE("fused chain box path collapses to the mean at large lambda") {
    const Vector y = {1.0, 2.0, 3.0};
    const StructureMatrix C = chain_difference(3);
    const double eps = 0.05;
    const auto path = box_path_quadratic(eye(3), y, C, eps);
    REQUIRE_FALSE(path.empty());
    for (const auto& pt : path) {
        const Vector exact = oracle::fused_chain_exact(y, pt.lambda);
        CHECK(testutil::sup_diff(pt.beta, exact) <= 4.0 * eps);
    }
    // the top of the path starts at the collapse boundary: fitted values sit
    // within a step of the grand mean
    const auto& top = path.front();
    for (double b : top.beta) CHECK(std::fabs(b - 2.0) <= 2.0 * eps);
}

TEST_CASE("soft-threshold limit: path error scales linearly in eps") {
    Rng rng(35);
    const std::size_t p = 4;
    const Vector y = testutil::random_vector(rng, p, 2.0);
    const StructureMatrix Ip = identity_structure(p);
    const DenseMatrix X = eye(p);

    double fitted_c = -1.0;
    for (double eps : {0.5, 0.1, 0.02}) {
        const auto path = box_path_quadratic(X, y, Ip, eps);
        REQUIRE_FALSE(path.empty());
        double err = 0.0;
        for (const auto& pt : path) {
            Vector st;
            soft_threshold(y, pt.lambda, st);
            err = std::max(err, testutil::sup_diff(pt.beta, st));
        }
        if (fitted_c < 0) {
            fitted_c = err / eps;  // fit C once on the coarsest grid
            CHECK(fitted_c > 0.0);
        } else {
            CHECK(err <= 2.0 * fitted_c * eps);
        }
    }
}
