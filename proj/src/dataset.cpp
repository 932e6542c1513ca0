#include "mmdust/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mmdust {

const char* loss_kind_name(LossKind kind) {
    switch (kind) {
        case LossKind::squared: return "squared";
        case LossKind::logistic: return "logistic";
        case LossKind::cox: return "cox";
    }
    return "?";
}

LossKind loss_kind_from_name(const std::string& name) {
    if (name == "squared") return LossKind::squared;
    if (name == "logistic") return LossKind::logistic;
    if (name == "cox") return LossKind::cox;
    throw std::invalid_argument("unknown loss kind: " + name);
}

namespace {

void check_shape(const DenseMatrix& X, std::size_t responses) {
    if (X.rows < 1 || X.cols < 1) throw std::invalid_argument("dataset: need n >= 1 and p >= 1");
    if (X.rows != responses) {
        throw std::invalid_argument("dataset: X has " + std::to_string(X.rows) +
                                    " rows but " + std::to_string(responses) + " responses");
    }
}

void init_identity_transform(Dataset& d) {
    d.column_means.assign(d.p(), 0.0);
    d.column_scales.assign(d.p(), 1.0);
}

}  // namespace

Dataset make_squared_dataset(DenseMatrix X, Vector y) {
    check_shape(X, y.size());
    Dataset d;
    d.kind = LossKind::squared;
    d.X = std::move(X);
    d.y = std::move(y);
    init_identity_transform(d);
    return d;
}

Dataset make_logistic_dataset(DenseMatrix X, Vector y) {
    check_shape(X, y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) {
            throw std::invalid_argument("logistic response must be 0/1; row " +
                                        std::to_string(i + 1) + " has " + std::to_string(y[i]));
        }
    }
    Dataset d;
    d.kind = LossKind::logistic;
    d.X = std::move(X);
    d.y = std::move(y);
    init_identity_transform(d);
    return d;
}

Dataset make_cox_dataset(DenseMatrix X, Vector time, std::vector<int> status) {
    check_shape(X, time.size());
    if (status.size() != time.size()) throw std::invalid_argument("cox: time/status length mismatch");
    for (std::size_t i = 0; i < time.size(); ++i) {
        if (!(time[i] > 0.0)) {
            throw std::invalid_argument("cox: nonpositive time at row " + std::to_string(i + 1));
        }
        if (status[i] != 0 && status[i] != 1) {
            throw std::invalid_argument("cox: status must be 0/1 at row " + std::to_string(i + 1));
        }
    }

    std::vector<std::size_t> order(time.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return time[a] > time[b]; });

    Dataset d;
    d.kind = LossKind::cox;
    d.X = DenseMatrix(X.rows, X.cols);
    d.time.resize(time.size());
    d.status.resize(status.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        const std::size_t src = order[r];
        std::copy(X.row(src), X.row(src) + X.cols, d.X.row(r));
        d.time[r] = time[src];
        d.status[r] = status[src];
    }

    // the partial likelihood below assumes no ties among event times
    for (std::size_t r = 0; r + 1 < d.time.size(); ++r) {
        if (d.time[r] == d.time[r + 1] && d.status[r] == 1 && d.status[r + 1] == 1) {
            throw std::invalid_argument(
                "cox: tied event times (original rows " + std::to_string(order[r] + 1) + " and " +
                std::to_string(order[r + 1] + 1) + " share time " + std::to_string(d.time[r]) + ")");
        }
    }
    init_identity_transform(d);
    return d;
}

void standardize_columns(Dataset& data, const std::vector<bool>& skip) {
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    for (std::size_t j = 0; j < p; ++j) {
        if (j < skip.size() && skip[j]) continue;
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += data.X(i, j);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = data.X(i, j) - mean;
            var += c * c;
        }
        const double scale = std::sqrt(var / static_cast<double>(n));
        if (!(scale > 0.0)) {
            throw std::invalid_argument("standardize: column " + std::to_string(j + 1) +
                                        " is constant");
        }
        for (std::size_t i = 0; i < n; ++i) data.X(i, j) = (data.X(i, j) - mean) / scale;
        data.column_means[j] = mean;
        data.column_scales[j] = scale;
    }
}

}  // namespace mmdust
