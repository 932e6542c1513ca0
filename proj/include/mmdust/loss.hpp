#pragma once

#include <cstddef>
#include <optional>

#include "mmdust/dataset.hpp"
#include "mmdust/structure.hpp"
#include "mmdust/vec.hpp"

namespace mmdust {

// How the Lipschitz bound for the cox loss is assembled from the per-column
// range bounds m_j^*: the provable choice sums them; the looser alternative
// scales the largest one by a user constant.
struct CoxLipschitzOptions {
    enum class Mode { sum, scaled_max };
    Mode mode = Mode::sum;
    double scale = 1.0;  // the constant c for scaled_max
};

// Quadratic-majorizer state at an expansion point: the surrogate loss is
// f(b0) + grad^T (b - b0) + (L/2)||b - b0||^2, whose least-squares form has
// working response ytilde = L*b0 - grad.
struct MajorizerState {
    double L = 0.0;
    Vector beta0;
    Vector ytilde;
};

// A dataset plus its loss: value, gradient, and majorizer constant.
// Immutable after construction and safe to share across threads.
class LossModel {
public:
    explicit LossModel(Dataset data, CoxLipschitzOptions cox_opts = {});

    const Dataset& dataset() const { return data_; }
    LossKind kind() const { return data_.kind; }
    std::size_t n() const { return data_.n(); }
    std::size_t p() const { return data_.p(); }

    double value(const Vector& beta) const;
    void gradient(const Vector& beta, Vector& grad) const;
    // Shares the X*beta pass between the two.
    double value_and_gradient(const Vector& beta, Vector& grad) const;

    // Scalar L with L*I - hessian(f) positive semi-definite everywhere.
    double lipschitz_constant() const { return lipschitz_; }

private:
    double eval(const Vector& beta, Vector* grad) const;

    Dataset data_;
    double lipschitz_ = 0.0;
    // cox bookkeeping: rows sharing an observed time form a group; a group
    // holds at most one event (ties among events are rejected upstream)
    std::vector<std::size_t> group_end_;
    std::size_t event_count_ = 0;
};

MajorizerState surrogate_response(const LossModel& model, const Vector& beta0, double L);

// f(beta) + lambda * ||D beta||_1
double objective_value(const LossModel& model, const Vector& beta, const StructureMatrix& D,
                       double lambda);

}  // namespace mmdust
