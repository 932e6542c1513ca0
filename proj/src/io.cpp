#include "mmdust/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mmdust::io {
namespace {

using json = nlohmann::ordered_json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t start = 0;
        while (start < cell.size() && cell[start] == ' ') ++start;
        cells.push_back(cell.substr(start));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("non-numeric cell '" + cell + "' in column '" + column +
                                 "', data row " + std::to_string(row));
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Dataset load_dataset(const std::string& path, const DatasetSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty dataset: " + path);
    const std::vector<std::string> header = split_csv_line(line);

    std::vector<std::size_t> feature_cols;
    std::optional<std::size_t> resp, timec, statc;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (schema.kind == LossKind::cox) {
            if (header[c] == schema.time_column) {
                timec = c;
                continue;
            }
            if (header[c] == schema.status_column) {
                statc = c;
                continue;
            }
        } else if (header[c] == schema.response) {
            resp = c;
            continue;
        }
        feature_cols.push_back(c);
    }
    if (schema.kind == LossKind::cox) {
        if (!timec) throw std::runtime_error("missing time column '" + schema.time_column + "'");
        if (!statc) throw std::runtime_error("missing status column '" + schema.status_column + "'");
    } else if (!resp) {
        throw std::runtime_error("missing response column '" + schema.response + "'");
    }
    if (feature_cols.empty()) throw std::runtime_error("dataset has no feature columns");

    std::vector<std::vector<double>> rows;
    std::size_t rownum = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++rownum;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("data row " + std::to_string(rownum) + " has " +
                                     std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(header.size()));
        }
        std::vector<double> parsed(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) parsed[c] = parse_cell(cells[c], rownum, header[c]);
        rows.push_back(std::move(parsed));
    }
    if (rows.empty()) throw std::runtime_error("dataset has no data rows: " + path);

    const std::size_t n = rows.size();
    const std::size_t p_raw = feature_cols.size();
    const std::size_t p = p_raw + (schema.intercept ? 1 : 0);
    DenseMatrix X(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p_raw; ++j) X(i, j) = rows[i][feature_cols[j]];
        if (schema.intercept) X(i, p_raw) = 1.0;
    }

    Dataset data;
    if (schema.kind == LossKind::cox) {
        Vector time(n);
        std::vector<int> status(n);
        for (std::size_t i = 0; i < n; ++i) {
            time[i] = rows[i][*timec];
            const double s = rows[i][*statc];
            if (s != 0.0 && s != 1.0) {
                throw std::runtime_error("status must be 0/1 at data row " + std::to_string(i + 1));
            }
            status[i] = static_cast<int>(s);
        }
        data = make_cox_dataset(std::move(X), std::move(time), std::move(status));
    } else {
        Vector y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = rows[i][*resp];
        data = schema.kind == LossKind::squared ? make_squared_dataset(std::move(X), std::move(y))
                                                : make_logistic_dataset(std::move(X), std::move(y));
    }

    if (schema.standardize) {
        std::vector<bool> skip(p, false);
        if (schema.intercept) skip[p_raw] = true;
        standardize_columns(data, skip);
    }
    return data;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset: " + path);
    for (std::size_t j = 0; j < data.p(); ++j) out << 'x' << (j + 1) << ',';
    if (data.kind == LossKind::cox) {
        out << "time,status\n";
    } else {
        out << "y\n";
    }
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j = 0; j < data.p(); ++j) out << format_double(data.X(i, j)) << ',';
        if (data.kind == LossKind::cox) {
            out << format_double(data.time[i]) << ',' << data.status[i] << '\n';
        } else {
            out << format_double(data.y[i]) << '\n';
        }
    }
}

void write_truth_csv(const Vector& coefficients, double intercept, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write truth file: " + path);
    out << "index,coefficient\n";
    out << "0," << format_double(intercept) << '\n';
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
        out << (j + 1) << ',' << format_double(coefficients[j]) << '\n';
    }
}

namespace {

// beta on the reporting scale; the dual u is always reported as solved
Vector reported_beta(const PathPoint& pt, const Dataset& data, const PathWriteOptions& opts) {
    if (opts.standardized_scale || pt.beta.size() != data.p()) return pt.beta;
    Vector out(pt.beta.size());
    double shift = 0.0;
    for (std::size_t j = 0; j < pt.beta.size(); ++j) {
        if (opts.intercept_column && *opts.intercept_column == j) {
            out[j] = pt.beta[j];
            continue;
        }
        out[j] = pt.beta[j] / data.column_scales[j];
        shift += pt.beta[j] * data.column_means[j] / data.column_scales[j];
    }
    if (opts.intercept_column) out[*opts.intercept_column] -= shift;
    return out;
}

}  // namespace

void write_path(const SolutionPath& path, const Dataset& data, const std::string& prefix,
                const PathWriteOptions& opts) {
    {
        std::ofstream out(prefix + "_path.csv");
        if (!out) throw std::runtime_error("cannot write " + prefix + "_path.csv");
        out << "lambda,kind,index,value\n";
        for (const PathPoint& pt : path.points) {
            const std::string lam = format_double(pt.lambda);
            const Vector beta = reported_beta(pt, data, opts);
            for (std::size_t j = 0; j < beta.size(); ++j) {
                out << lam << ",beta," << (j + 1) << ',' << format_double(beta[j]) << '\n';
            }
            for (std::size_t i = 0; i < pt.u.size(); ++i) {
                out << lam << ",u," << (i + 1) << ',' << format_double(pt.u[i]) << '\n';
            }
        }
    }
    {
        std::ofstream out(prefix + "_summary.csv");
        if (!out) throw std::runtime_error("cannot write " + prefix + "_summary.csv");
        out << "lambda,objective,df,aic,accepted_inner_rounds\n";
        for (const PathPoint& pt : path.points) {
            out << format_double(pt.lambda) << ',' << format_double(pt.objective) << ',' << pt.df
                << ',' << format_double(pt.aic) << ',' << pt.accepted_inner_rounds << '\n';
        }
    }
    {
        std::ofstream out(prefix + "_scaling.csv");
        if (!out) throw std::runtime_error("cannot write " + prefix + "_scaling.csv");
        out << "column,mean,scale\n";
        for (std::size_t j = 0; j < data.p(); ++j) {
            out << (j + 1) << ',' << format_double(data.column_means[j]) << ','
                << format_double(data.column_scales[j]) << '\n';
        }
    }
    if (opts.write_json) {
        json root;
        root["eps"] = path.eps;
        root["stopped_early"] = path.stopped_early;
        root["stop_reason"] = path.stop_reason;
        json points = json::array();
        for (const PathPoint& pt : path.points) {
            json jp;
            jp["lambda"] = pt.lambda;
            jp["lambda_steps"] = pt.lambda_steps;
            jp["beta"] = reported_beta(pt, data, opts);
            jp["u"] = pt.u;
            jp["objective"] = pt.objective;
            jp["loss"] = pt.loss;
            jp["df"] = pt.df;
            jp["aic"] = pt.aic;
            jp["accepted_inner_rounds"] = pt.accepted_inner_rounds;
            points.push_back(std::move(jp));
        }
        root["points"] = std::move(points);
        std::ofstream out(prefix + "_path.json");
        if (!out) throw std::runtime_error("cannot write " + prefix + "_path.json");
        out << root.dump(2) << '\n';
    }
}

SolutionPath read_path_json(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file);
    json root = json::parse(in);
    SolutionPath path;
    path.eps = root.at("eps").get<double>();
    path.stopped_early = root.at("stopped_early").get<bool>();
    path.stop_reason = root.at("stop_reason").get<std::string>();
    for (const auto& jp : root.at("points")) {
        PathPoint pt;
        pt.lambda = jp.at("lambda").get<double>();
        pt.lambda_steps = jp.at("lambda_steps").get<std::int64_t>();
        pt.beta = jp.at("beta").get<Vector>();
        pt.u = jp.at("u").get<Vector>();
        pt.objective = jp.at("objective").get<double>();
        pt.loss = jp.at("loss").get<double>();
        pt.df = jp.at("df").get<std::size_t>();
        pt.aic = jp.at("aic").get<double>();
        pt.accepted_inner_rounds = jp.at("accepted_inner_rounds").get<std::size_t>();
        path.points.push_back(std::move(pt));
    }
    return path;
}

void write_error_json(std::ostream& os, const std::string& code, const std::string& message) {
    json err;
    err["error"] = code;
    err["message"] = message;
    os << err.dump() << '\n';
}

int log_verbosity() {
    static const int level = [] {
        const char* env = std::getenv("MMDUST_LOG");
        if (!env) return 0;
        return std::atoi(env);
    }();
    return level;
}

void log(int level, const std::string& message) {
    if (log_verbosity() >= level) std::cerr << "[mmdust] " << message << '\n';
}

}  // namespace mmdust::io
