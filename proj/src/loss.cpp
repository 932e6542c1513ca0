#include "mmdust/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mmdust/linalg.hpp"

namespace mmdust {
namespace {

constexpr double kCoxLipschitzFloor = 1e-8;

double log1pexp(double x) {
    if (x > 33.0) return x;                  // log1p(exp(-33)) underflows anyway
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

LossModel::LossModel(Dataset data, CoxLipschitzOptions cox_opts) : data_(std::move(data)) {
    const std::size_t n = data_.n();
    const std::size_t p = data_.p();

    if (data_.kind == LossKind::cox) {
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && data_.time[j] == data_.time[i]) ++j;
            group_end_.push_back(j);
            i = j;
        }
        for (int s : data_.status) event_count_ += static_cast<std::size_t>(s);
        if (event_count_ == 0) {
            throw std::invalid_argument("cox: no events, the partial likelihood is empty");
        }
    }

    switch (data_.kind) {
        case LossKind::squared:
            lipschitz_ = linalg::sym_eig_max(gram(data_.X));
            break;
        case LossKind::logistic:
            lipschitz_ = linalg::sym_eig_max(gram(data_.X)) / 4.0;
            break;
        case LossKind::cox: {
            // m_j^* = sum over events of (range of x_j on the risk set)^2 / 4,
            // with risk sets growing as prefixes of the descending-time order
            Vector mstar(p, 0.0);
            Vector cmax(p, 0.0), cmin(p, 0.0);
            bool started = false;
            std::size_t row = 0;
            for (std::size_t g = 0; g < group_end_.size(); ++g) {
                std::size_t begin = row;
                for (; row < group_end_[g]; ++row) {
                    const double* x = data_.X.row(row);
                    if (!started) {
                        std::copy(x, x + p, cmax.begin());
                        std::copy(x, x + p, cmin.begin());
                        started = true;
                    } else {
                        for (std::size_t j = 0; j < p; ++j) {
                            cmax[j] = std::max(cmax[j], x[j]);
                            cmin[j] = std::min(cmin[j], x[j]);
                        }
                    }
                }
                for (std::size_t i = begin; i < group_end_[g]; ++i) {
                    if (data_.status[i] == 1) {
                        for (std::size_t j = 0; j < p; ++j) {
                            const double range = cmax[j] - cmin[j];
                            mstar[j] += 0.25 * range * range;
                        }
                    }
                }
            }
            double L;
            if (cox_opts.mode == CoxLipschitzOptions::Mode::sum) {
                L = vec_sum(mstar);
            } else {
                L = cox_opts.scale * *std::max_element(mstar.begin(), mstar.end());
            }
            lipschitz_ = std::max(kCoxLipschitzFloor, L);
            break;
        }
    }
}

double LossModel::value(const Vector& beta) const { return eval(beta, nullptr); }

void LossModel::gradient(const Vector& beta, Vector& grad) const { eval(beta, &grad); }

double LossModel::value_and_gradient(const Vector& beta, Vector& grad) const {
    return eval(beta, &grad);
}

double LossModel::eval(const Vector& beta, Vector* grad) const {
    const std::size_t n = data_.n();
    const std::size_t p = data_.p();
    check_size(beta, p, "loss beta");
    if (grad) grad->assign(p, 0.0);
    const auto& k = simd::active();

    switch (data_.kind) {
        case LossKind::squared: {
            Vector r;
            matvec(data_.X, beta, r);
            for (std::size_t i = 0; i < n; ++i) r[i] = data_.y[i] - r[i];
            if (grad) {
                for (std::size_t i = 0; i < n; ++i) {
                    if (r[i] != 0.0) k.axpy(-r[i], data_.X.row(i), grad->data(), p);
                }
            }
            return 0.5 * sqnorm(r);
        }
        case LossKind::logistic: {
            Vector eta;
            matvec(data_.X, beta, eta);
            double f = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                f += -data_.y[i] * eta[i] + log1pexp(eta[i]);
                if (grad) {
                    const double w = sigmoid(eta[i]) - data_.y[i];
                    if (w != 0.0) k.axpy(w, data_.X.row(i), grad->data(), p);
                }
            }
            return f;
        }
        case LossKind::cox: {
            Vector eta;
            matvec(data_.X, beta, eta);
            // risk sets grow as prefixes of the descending-time order, so the
            // exponential sums are streamed with a running max-shift
            double f = 0.0;
            double shift = -std::numeric_limits<double>::infinity();
            double s0 = 0.0;     // sum of exp(eta - shift) over the current risk set
            Vector s1(p, 0.0);   // per-coordinate weighted sums over the risk set
            std::size_t row = 0;
            for (std::size_t g = 0; g < group_end_.size(); ++g) {
                const std::size_t begin = row;
                for (; row < group_end_[g]; ++row) {
                    if (eta[row] > shift) {
                        const double rescale =
                            s0 > 0.0 ? std::exp(shift - eta[row]) : 0.0;
                        s0 *= rescale;
                        if (grad && rescale != 1.0) {
                            for (std::size_t j = 0; j < p; ++j) s1[j] *= rescale;
                        }
                        shift = eta[row];
                    }
                    const double w = std::exp(eta[row] - shift);
                    s0 += w;
                    if (grad) k.axpy(w, data_.X.row(row), s1.data(), p);
                }
                for (std::size_t i = begin; i < group_end_[g]; ++i) {
                    if (data_.status[i] != 1) continue;
                    f += -eta[i] + std::log(s0) + shift;
                    if (grad) {
                        k.axpy(1.0 / s0, s1.data(), grad->data(), p);
                        k.axpy(-1.0, data_.X.row(i), grad->data(), p);
                    }
                }
            }
            return f;
        }
    }
    throw std::logic_error("unreachable loss kind");
}

MajorizerState surrogate_response(const LossModel& model, const Vector& beta0, double L) {
    if (!(L > 0.0)) throw std::invalid_argument("surrogate_response: L must be positive");
    MajorizerState s;
    s.L = L;
    s.beta0 = beta0;
    model.gradient(beta0, s.ytilde);
    for (std::size_t j = 0; j < s.ytilde.size(); ++j) s.ytilde[j] = L * beta0[j] - s.ytilde[j];
    return s;
}

double objective_value(const LossModel& model, const Vector& beta, const StructureMatrix& D,
                       double lambda) {
    if (D.col_count() != model.p()) {
        throw std::invalid_argument("objective_value: D has " + std::to_string(D.col_count()) +
                                    " columns, model has p = " + std::to_string(model.p()));
    }
    return model.value(beta) + lambda * D.l1_norm_of_product(beta);
}

}  // namespace mmdust
