#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "mmdust/dataset.hpp"
#include "mmdust/path.hpp"

namespace mmdust::io {

struct DatasetSchema {
    LossKind kind = LossKind::squared;
    std::string response = "y";       // squared / logistic
    std::string time_column = "time";  // cox
    std::string status_column = "status";
    bool intercept = false;   // append an unpenalized all-ones column
    bool standardize = true;  // center/scale features for optimization
};

// CSV with a header row and numeric cells. Cox rows come back sorted by
// descending time with ties among event times rejected.
Dataset load_dataset(const std::string& path, const DatasetSchema& schema);

void write_dataset_csv(const Dataset& data, const std::string& path);
void write_truth_csv(const Vector& coefficients, double intercept, const std::string& path);

struct PathWriteOptions {
    // report beta on the solved (standardized) scale instead of mapping back
    // through the recorded column scales
    bool standardized_scale = false;
    bool write_json = false;
    std::optional<std::size_t> intercept_column;
};

// Writes <prefix>_path.csv (long: lambda,kind,index,value),
// <prefix>_summary.csv (lambda,objective,df,aic,accepted_inner_rounds) and
// <prefix>_scaling.csv; optionally <prefix>_path.json mirroring the records.
void write_path(const SolutionPath& path, const Dataset& data, const std::string& prefix,
                const PathWriteOptions& opts);

SolutionPath read_path_json(const std::string& file);

// Shortest text keeping doubles bit-exact on re-read.
std::string format_double(double v);

void write_error_json(std::ostream& os, const std::string& code, const std::string& message);

// MMDUST_LOG: 0 quiet (default), 1 progress, 2 debug.
int log_verbosity();
void log(int level, const std::string& message);

}  // namespace mmdust::io
