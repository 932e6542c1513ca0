#pragma once

#include <cstddef>
#include <vector>

#include "mmdust/vec.hpp"

namespace mmdust {

enum class LossKind { squared, logistic, cox };

const char* loss_kind_name(LossKind kind);
LossKind loss_kind_from_name(const std::string& name);

// Design matrix plus response. For cox the rows are kept sorted by
// descending observed time so every risk set is a prefix.
struct Dataset {
    LossKind kind = LossKind::squared;
    DenseMatrix X;
    Vector y;                 // squared: real; logistic: 0/1
    Vector time;              // cox: observed times, positive
    std::vector<int> status;  // cox: 1 = event, 0 = censored

    // Standardization applied to X (identity transform when loaded raw).
    Vector column_means;
    Vector column_scales;

    std::size_t n() const { return X.rows; }
    std::size_t p() const { return X.cols; }
};

Dataset make_squared_dataset(DenseMatrix X, Vector y);
Dataset make_logistic_dataset(DenseMatrix X, Vector y);
// Sorts by descending time; rejects nonpositive times and tied event times.
Dataset make_cox_dataset(DenseMatrix X, Vector time, std::vector<int> status);

// Centers and scales the columns of X in place (population sd), recording the
// transform in column_means/scales. Columns flagged in `skip` (e.g. an
// intercept) are left untouched. Throws on constant columns.
void standardize_columns(Dataset& data, const std::vector<bool>& skip = {});

}  // namespace mmdust
