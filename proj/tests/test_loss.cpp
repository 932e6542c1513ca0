#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmdust/linalg.hpp"
#include "mmdust/loss.hpp"
#include "testutil.hpp"

using namespace mmdust;

namespace {

DenseMatrix eye(std::size_t p) {
    DenseMatrix X(p, p);
    for (std::size_t i = 0; i < p; ++i) X(i, i) = 1.0;
    return X;
}

LossModel random_model(Rng& rng, LossKind kind, std::size_t n, std::size_t p) {
    return LossModel(testutil::random_dataset(rng, kind, n, p));
}

}  // namespace

TEST_CASE("squared loss value and gradient on the identity design") {
    const LossModel model(make_squared_dataset(eye(2), {1.0, 0.0}));
    CHECK(model.value({0.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-14));
    Vector g;
    model.gradient({0.0, 0.0}, g);
    CHECK(g[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("logistic loss value and gradient at zero") {
    const LossModel model(make_logistic_dataset(eye(1), {1.0}));
    CHECK(model.value({0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    Vector g;
    model.gradient({0.0}, g);
    CHECK(g[0] == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("cox loss on a two-row instance matches the closed form") {
    // event subject has the earlier time, so both rows are at risk
    DenseMatrix X(2, 2);
    X(0, 0) = 0.3;
    X(0, 1) = -1.1;  // censored, later time
    X(1, 0) = 0.7;
    X(1, 1) = 0.4;  // event, earlier time
    const LossModel model(
        make_cox_dataset(X, /*time=*/{5.0, 2.0}, /*status=*/{0, 1}));
    const Vector beta = {0.25, -0.5};
    const double e1 = 0.7 * beta[0] + 0.4 * beta[1];   // x of the event row
    const double e2 = 0.3 * beta[0] - 1.1 * beta[1];
    const double want = -e1 + std::log(std::exp(e1) + std::exp(e2));
    CHECK(model.value(beta) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("censored record tied with an event time joins the risk set") {
    DenseMatrix X(3, 1);
    X(0, 0) = 0.5;   // event at t = 5
    X(1, 0) = -0.2;  // censored at t = 5, still at risk
    X(2, 0) = 1.0;   // censored earlier, not at risk
    const LossModel model(make_cox_dataset(X, {5.0, 5.0, 1.0}, {1, 0, 0}));
    const Vector beta = {0.8};
    const double e_event = 0.5 * 0.8, e_tied = -0.2 * 0.8;
    const double want = -e_event + std::log(std::exp(e_event) + std::exp(e_tied));
    CHECK(model.value(beta) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("dimension mismatches are rejected") {
    const LossModel model(make_squared_dataset(eye(2), {1.0, 0.0}));
    Vector wrong = {1.0, 2.0, 3.0};
    CHECK_THROWS(model.value(wrong));
    Vector g;
    CHECK_THROWS(model.gradient(wrong, g));
    CHECK_THROWS(objective_value(model, {1.0, 0.0}, identity_structure(3), 1.0));
}

TEST_CASE("loss is finite on extreme linear predictors") {
    const LossModel logit(make_logistic_dataset(eye(2), {1.0, 0.0}));
    CHECK(std::isfinite(logit.value({800.0, -800.0})));
    Rng rng(3);
    const LossModel cox(random_model(rng, LossKind::cox, 10, 2));
    CHECK(std::isfinite(cox.value({500.0, -500.0})));
}

TEST_CASE("lipschitz constants") {
    // X^T X = n I via a +/-1 orthogonal design: logistic L = n/4
    DenseMatrix H(4, 2);
    const double h[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 2; ++j) H(i, j) = h[i][j];
    }
    const LossModel logit(make_logistic_dataset(H, {1.0, 0.0, 1.0, 0.0}));
    CHECK(logit.lipschitz_constant() == doctest::Approx(1.0).epsilon(1e-10));

    const LossModel sq(make_squared_dataset(eye(3), {1.0, 2.0, 3.0}));
    CHECK(sq.lipschitz_constant() == doctest::Approx(1.0).epsilon(1e-10));

    // single event with the largest observed time: its risk set is only
    // itself, every column range is zero and the floor kicks in
    DenseMatrix X(2, 2);
    X(0, 0) = 1.0;
    X(1, 1) = 2.0;
    const LossModel cox(make_cox_dataset(X, {10.0, 1.0}, {1, 0}));
    CHECK(cox.lipschitz_constant() == doctest::Approx(1e-8).epsilon(1e-12));
}

TEST_CASE("cox scaled-max bound is the opt-in alternative") {
    Rng rng(9);
    const Dataset data = testutil::random_dataset(rng, LossKind::cox, 20, 3);
    const LossModel sum_model(data);
    CoxLipschitzOptions opts;
    opts.mode = CoxLipschitzOptions::Mode::scaled_max;
    opts.scale = 3.0;  // c * max_j m_j^* matches sum for p = 3 iff all equal
    const LossModel cmax_model(data, opts);
    CHECK(cmax_model.lipschitz_constant() <= 3.0 * sum_model.lipschitz_constant() + 1e-12);
    CHECK(cmax_model.lipschitz_constant() > 0.0);
}

TEST_CASE("dataset validation") {
    CHECK_THROWS(make_logistic_dataset(eye(2), {2.0, 0.0}));
    CHECK_THROWS(make_cox_dataset(eye(2), {1.0, -2.0}, {1, 0}));
    // tied event times are rejected, ties with a censored record are not
    CHECK_THROWS(make_cox_dataset(eye(2), {3.0, 3.0}, {1, 1}));
    CHECK_NOTHROW(make_cox_dataset(eye(2), {3.0, 3.0}, {1, 0}));
    // no events at all: no partial likelihood
    CHECK_THROWS(LossModel(make_cox_dataset(eye(2), {1.0, 2.0}, {0, 0})));
    Vector too_short = {1.0};
    CHECK_THROWS(make_squared_dataset(eye(2), too_short));
}

TEST_CASE("surrogate response") {
    const LossModel sq(make_squared_dataset(eye(2), {1.0, 0.0}));
    const MajorizerState s = surrogate_response(sq, {0.0, 0.0}, 1.0);
    CHECK(s.ytilde[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.ytilde[1] == doctest::Approx(0.0).epsilon(1e-14));

    const LossModel logit(make_logistic_dataset(eye(1), {1.0}));
    const MajorizerState t = surrogate_response(logit, {0.0}, 0.25);
    CHECK(t.ytilde[0] == doctest::Approx(0.5).epsilon(1e-14));

    CHECK_THROWS(surrogate_response(sq, {0.0, 0.0}, 0.0));
}

TEST_CASE("objective value") {
    const LossModel sq(make_squared_dataset(eye(2), {1.0, 0.0}));
    const StructureMatrix I2 = identity_structure(2);
    CHECK(objective_value(sq, {1.0, 0.0}, I2, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(objective_value(sq, {1.0, 0.0}, I2, 0.0) ==
          doctest::Approx(sq.value({1.0, 0.0})).epsilon(1e-14));

    const LossModel sq3(make_squared_dataset(eye(3), {1.0, 2.0, 3.0}));
    const StructureMatrix C = chain_difference(3);
    const double with_pen = objective_value(sq3, {2.0, 2.0, 2.0}, C, 7.5);
    CHECK(with_pen == doctest::Approx(sq3.value({2.0, 2.0, 2.0})).epsilon(1e-14));
}

TEST_CASE("analytic gradients match central differences") {
    Rng rng(21);
    for (LossKind kind : {LossKind::squared, LossKind::logistic, LossKind::cox}) {
        for (int rep = 0; rep < 100; ++rep) {
            const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 48);
            const std::size_t p = 1 + static_cast<std::size_t>(rng.uniform() * 7);
            const LossModel model = random_model(rng, kind, n, p);
            const Vector beta = testutil::random_vector(rng, p);
            Vector g;
            model.gradient(beta, g);
            const Vector fd = testutil::fd_gradient(
                [&](const Vector& b) { return model.value(b); }, beta);
            const double scale = std::max(1.0, std::sqrt(sqnorm(g)));
            CHECK(testutil::sup_diff(g, fd) / scale <= 1e-5);
        }
    }
}

TEST_CASE("quadratic surrogate dominates the loss and touches at the expansion point") {
    Rng rng(22);
    for (LossKind kind : {LossKind::squared, LossKind::logistic, LossKind::cox}) {
        for (int rep = 0; rep < 100; ++rep) {
            const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 30);
            const std::size_t p = 1 + static_cast<std::size_t>(rng.uniform() * 5);
            const LossModel model = random_model(rng, kind, n, p);
            const double L = model.lipschitz_constant();
            const Vector b0 = testutil::random_vector(rng, p, 0.7);
            const Vector b = testutil::random_vector(rng, p, 0.7);

            Vector g0;
            const double f0 = model.value_and_gradient(b0, g0);
            Vector diff(p);
            for (std::size_t j = 0; j < p; ++j) diff[j] = b[j] - b0[j];
            const double surrogate = f0 + dot(g0, diff) + 0.5 * L * sqnorm(diff);
            const double f = model.value(b);
            CHECK(surrogate >= f - 1e-9 * std::max(1.0, std::fabs(f)));

            const double at_expansion = f0 + 0.0 + 0.0;
            CHECK(at_expansion == doctest::Approx(f0).epsilon(1e-12));
        }
    }
}

TEST_CASE("L*I - hessian stays positive semi-definite") {
    Rng rng(23);
    for (LossKind kind : {LossKind::logistic, LossKind::cox}) {
        for (int rep = 0; rep < 25; ++rep) {
            const std::size_t n = 5 + static_cast<std::size_t>(rng.uniform() * 30);
            const std::size_t p = 1 + static_cast<std::size_t>(rng.uniform() * 4);
            const LossModel model = random_model(rng, kind, n, p);
            const double L = model.lipschitz_constant();
            const Vector beta = testutil::random_vector(rng, p, 0.5);
            DenseMatrix H = testutil::fd_hessian(model, beta);
            for (std::size_t i = 0; i < p; ++i) {
                for (std::size_t j = 0; j < p; ++j) H(i, j) = (i == j ? L : 0.0) - H(i, j);
            }
            Vector eigvals;
            DenseMatrix vecs;
            linalg::sym_eig(H, eigvals, vecs);
            CHECK(eigvals.front() >= -1e-6);
        }
    }
}

TEST_CASE("losses are convex along random chords") {
    Rng rng(24);
    for (LossKind kind : {LossKind::squared, LossKind::logistic, LossKind::cox}) {
        for (int rep = 0; rep < 30; ++rep) {
            const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform() * 20);
            const std::size_t p = 1 + static_cast<std::size_t>(rng.uniform() * 4);
            const LossModel model = random_model(rng, kind, n, p);
            const Vector b1 = testutil::random_vector(rng, p);
            const Vector b2 = testutil::random_vector(rng, p);
            const double theta = rng.uniform();
            Vector mix(p);
            for (std::size_t j = 0; j < p; ++j) mix[j] = theta * b1[j] + (1 - theta) * b2[j];
            CHECK(model.value(mix) <=
                  theta * model.value(b1) + (1 - theta) * model.value(b2) + 1e-10);
        }
    }
}
