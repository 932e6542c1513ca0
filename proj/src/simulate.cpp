#include "mmdust/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "mmdust/rng.hpp"

namespace mmdust {

SimulatedData simulate_logistic_design(std::uint64_t seed) {
    const std::size_t n = 400, p = 10;
    const Vector b = {-3, 3, -2, 2, -1, 1, 0.5, 0, 0, 0};
    const double intercept = -4.0;

    Rng rng(seed);
    DenseMatrix X(n, p);
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = intercept;
        for (std::size_t j = 0; j < p; ++j) {
            X(i, j) = rng.normal();
            eta += X(i, j) * b[j];
        }
        const double q = 1.0 / (1.0 + std::exp(-eta));
        y[i] = rng.bernoulli(q) ? 1.0 : 0.0;
    }

    SimulatedData out;
    out.dataset = make_logistic_dataset(std::move(X), std::move(y));
    out.true_coefficients = b;
    out.true_intercept = intercept;
    return out;
}

SimulatedData simulate_cox_fused_design(std::uint64_t seed) {
    const std::size_t n = 400, p = 10;
    const Vector b = {1, 1, 2, -2, -2, 3, 1.5, -0.5, 0, 0};

    Rng rng(seed);
    DenseMatrix X(n, p);
    Vector time(n);
    std::vector<int> status(n);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            X(i, j) = rng.normal();
            eta += X(i, j) * b[j];
        }
        const double t_event = -std::log(1.0 - rng.uniform()) / (0.1 * std::exp(eta));
        const double t_censor = rng.exponential(0.9);
        time[i] = std::min(t_event, t_censor);
        status[i] = t_event <= t_censor ? 1 : 0;
    }

    SimulatedData out;
    out.dataset = make_cox_dataset(std::move(X), std::move(time), std::move(status));
    out.true_coefficients = b;
    return out;
}

SimulatedData simulate_cox_tree_design(const AggregationTree& tree, double snr,
                                       std::uint64_t seed, std::size_t n) {
    if (!(snr > 0.0)) throw std::invalid_argument("simulate_cox_tree_design: snr must be positive");
    const std::size_t p = tree.leaf_count;

    Vector b(p, 0.0);
    for (std::size_t j = 0; j < std::min<std::size_t>(12, p); ++j) b[j] = 1.0;
    for (std::size_t j = 12; j < std::min<std::size_t>(18, p); ++j) b[j] = -2.0;
    for (std::size_t j = 18; j < std::min<std::size_t>(21, p); ++j) b[j] = 1.5;
    if (p > 21) b[21] = -1.5;
    if (p > 22) b[22] = -3.0;
    if (p > 24) b[24] = 3.0;

    // var(eta) under the AR(1) feature covariance r_ij = 0.5^|i-j|
    double var_eta = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            var_eta += b[i] * b[j] * std::pow(0.5, std::fabs(double(i) - double(j)));
        }
    }
    const double sigma = std::sqrt(var_eta / snr);

    Rng rng(seed);
    DenseMatrix X(n, p);
    Vector time(n);
    std::vector<int> status(n);
    for (std::size_t i = 0; i < n; ++i) {
        double prev = 0.0;
        double eta = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            const double z = rng.normal();
            const double x = j == 0 ? z : 0.5 * prev + std::sqrt(0.75) * z;
            X(i, j) = x;
            prev = x;
            eta += x * b[j];
        }
        const double t_event = std::exp(eta + sigma * rng.normal());
        const double t_censor = rng.exponential(1.0 / 5000.0);
        time[i] = std::min(t_event, t_censor);
        status[i] = t_event <= t_censor ? 1 : 0;
    }

    SimulatedData out;
    out.dataset = make_cox_dataset(std::move(X), std::move(time), std::move(status));
    out.true_coefficients = b;
    return out;
}

AggregationTree default_aggregation_tree() {
    using Node = AggregationTree::Node;
    constexpr auto npos = AggregationTree::npos;
    std::vector<Node> nodes;
    std::size_t next_feature = 0;

    auto add = [&](std::size_t parent, bool leaf) {
        nodes.push_back({parent, leaf ? next_feature++ : npos});
        return nodes.size() - 1;
    };

    const std::size_t root = add(npos, false);
    // three branches with two levels of internal nodes above the leaves
    for (int branch = 0; branch < 3; ++branch) {
        const std::size_t l1 = add(root, false);
        for (int a = 0; a < 2; ++a) {
            const std::size_t l2 = add(l1, false);
            for (int c = 0; c < 2; ++c) {
                const std::size_t l3 = add(l2, false);
                for (int leaf = 0; leaf < 3; ++leaf) add(l3, true);
            }
        }
    }
    // one shallow branch: leaves sit directly under the level-2 nodes
    const std::size_t l1 = add(root, false);
    for (int a = 0; a < 2; ++a) {
        const std::size_t l2 = add(l1, false);
        for (int leaf = 0; leaf < 3; ++leaf) add(l2, true);
    }
    return make_tree(std::move(nodes));
}

}  // namespace mmdust
