// Command-line driver: fit solution paths, generate synthetic datasets, and
// compare fitted paths against the fixed-lambda reference solvers.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "mmdust/dual.hpp"
#include "mmdust/io.hpp"
#include "mmdust/loss.hpp"
#include "mmdust/oracle.hpp"
#include "mmdust/path.hpp"
#include "mmdust/simulate.hpp"
#include "mmdust/structure.hpp"

namespace {

using namespace mmdust;

struct FitOptions {
    std::string loss = "squared";
    std::string data_path;
    std::string response = "y";
    std::string time_column = "time";
    std::string status_column = "status";
    bool intercept = false;
    bool no_standardize = false;
    std::string structure = "identity";
    double eps = 0.1;
    std::size_t nm = 1;
    std::int64_t nd = 15;
    double ridge_delta = 1e-6;
    std::size_t early_stop = 0;  // 0 disables
    std::string out = "mmdust";
    std::string format = "csv";
    bool standardized_output = false;
    std::string cox_bound = "sum";
    double cox_bound_c = 1.0;
};

void add_fit_options(CLI::App* cmd, FitOptions& o, bool with_eps = true) {
    cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--loss", o.loss, "Loss kind: squared|logistic|cox")
        ->check(CLI::IsMember({"squared", "logistic", "cox"}));
    cmd->add_option("--data", o.data_path, "Dataset CSV (header row, numeric cells)")->required();
    cmd->add_option("--response", o.response, "Response column (squared/logistic)");
    cmd->add_option("--time", o.time_column, "Time column (cox)");
    cmd->add_option("--status", o.status_column, "Status column (cox)");
    cmd->add_flag("--intercept", o.intercept, "Append an unpenalized intercept column");
    cmd->add_flag("--no-standardize", o.no_standardize, "Skip feature standardization");
    cmd->add_option("--structure", o.structure,
                    "identity | chain | pairs:1-2,3-4 | pairsI:1-2 | file:PATH | tree:PATH|default");
    if (with_eps) cmd->add_option("--eps", o.eps, "Stagewise step size")->check(CLI::PositiveNumber);
    cmd->add_option("--nm", o.nm, "Max majorization rounds per lambda");
    cmd->add_option("--nd", o.nd, "Max dual iterations per majorization");
    cmd->add_option("--ridge-delta", o.ridge_delta, "L2 fallback weight for the initial fit");
    cmd->add_option("--early-stop", o.early_stop,
                    "Stop after K consecutive df increases with rising AIC (0 = off)");
    cmd->add_option("--out", o.out, "Output file prefix");
    cmd->add_option("--format", o.format, "Path output: csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    cmd->add_flag("--standardized-output", o.standardized_output,
                  "Report coefficients on the solved (standardized) scale");
    cmd->add_option("--cox-bound", o.cox_bound, "Cox majorizer bound: sum | cmax")
        ->check(CLI::IsMember({"sum", "cmax"}));
    cmd->add_option("--cox-bound-c", o.cox_bound_c, "Constant for the cmax bound");
}

// Flat key=value config mirroring the flags; explicit flags override. The
// file is expanded into tokens placed right after the subcommand name.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + config_path);
    std::vector<std::string> expanded;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line is not key=value: '" + line + "'");
        }
        expanded.push_back("--" + line.substr(0, eq) + "=" + line.substr(eq + 1));
    }
    // config tokens go first so later command-line flags take precedence
    std::vector<std::string> out;
    if (!args.empty()) out.push_back(args.front());  // the subcommand
    out.insert(out.end(), expanded.begin(), expanded.end());
    if (args.size() > 1) out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(const std::string& text) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) throw std::runtime_error("bad pair '" + item + "'");
        const long a = std::stol(item.substr(0, dash));
        const long b = std::stol(item.substr(dash + 1));
        if (a < 1 || b < 1) throw std::runtime_error("pair indices are 1-based: '" + item + "'");
        pairs.emplace_back(static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1));
    }
    return pairs;
}

struct Problem {
    LossModel model;
    StructureMatrix D;
    Dataset report_data;  // column means/scales used when reporting
    io::PathWriteOptions write_opts;
};

Problem assemble(const FitOptions& o) {
    const LossKind kind = loss_kind_from_name(o.loss);
    const bool tree_structure = o.structure.rfind("tree:", 0) == 0;

    io::DatasetSchema schema;
    schema.kind = kind;
    schema.response = o.response;
    schema.time_column = o.time_column;
    schema.status_column = o.status_column;
    schema.standardize = !o.no_standardize;
    schema.intercept = o.intercept && !tree_structure;
    Dataset data = io::load_dataset(o.data_path, schema);
    const std::size_t p_raw = data.p() - (schema.intercept ? 1 : 0);

    StructureMatrix D;
    Dataset solved = data;
    io::PathWriteOptions wopts;
    wopts.standardized_scale = o.standardized_output;
    if (schema.intercept) wopts.intercept_column = p_raw;

    if (o.structure == "identity") {
        D = identity_structure(p_raw);
    } else if (o.structure == "chain") {
        D = chain_difference(p_raw);
    } else if (o.structure.rfind("pairsI:", 0) == 0) {
        D = vstack(pair_differences(parse_pairs(o.structure.substr(7)), p_raw),
                   identity_structure(p_raw));
    } else if (o.structure.rfind("pairs:", 0) == 0) {
        D = pair_differences(parse_pairs(o.structure.substr(6)), p_raw);
    } else if (o.structure.rfind("file:", 0) == 0) {
        D = read_triplet_file(o.structure.substr(5));
        if (D.col_count() != p_raw) {
            throw std::runtime_error("structure file has " + std::to_string(D.col_count()) +
                                     " columns, dataset has " + std::to_string(p_raw) +
                                     " features");
        }
    } else if (tree_structure) {
        const std::string spec = o.structure.substr(5);
        const AggregationTree tree =
            spec == "default" ? default_aggregation_tree() : read_tree_file(spec);
        if (tree.leaf_count != p_raw) {
            throw std::runtime_error("tree has " + std::to_string(tree.leaf_count) +
                                     " leaves, dataset has " + std::to_string(p_raw) +
                                     " features");
        }
        TreeMatrices tm = tree_to_matrices(tree);
        // solve in the node coordinates: design becomes X * A
        const std::size_t T = tm.A.col_count();
        DenseMatrix XA(data.n(), T + (o.intercept ? 1 : 0));
        Vector row(p_raw), arow;
        for (std::size_t i = 0; i < data.n(); ++i) {
            std::copy(data.X.row(i), data.X.row(i) + p_raw, row.begin());
            tm.A.apply_transpose(row, arow);  // A^T maps feature rows to node columns
            std::copy(arow.begin(), arow.end(), XA.row(i));
            if (o.intercept) XA(i, T) = 1.0;
        }
        solved.X = std::move(XA);
        solved.column_means.assign(solved.p(), 0.0);
        solved.column_scales.assign(solved.p(), 1.0);
        D = o.intercept ? pad_columns(tm.D, 1) : tm.D;
        // node coefficients have no per-column scale; report them as solved
        // alongside the original-column scaling file
        wopts.standardized_scale = true;
        wopts.intercept_column.reset();
        CoxLipschitzOptions cox_opts;
        if (o.cox_bound == "cmax") {
            cox_opts.mode = CoxLipschitzOptions::Mode::scaled_max;
            cox_opts.scale = o.cox_bound_c;
        }
        return {LossModel(std::move(solved), cox_opts), std::move(D), std::move(data), wopts};
    } else {
        throw std::runtime_error("unknown structure spec: " + o.structure);
    }

    if (schema.intercept) D = pad_columns(D, 1);
    CoxLipschitzOptions cox_opts;
    if (o.cox_bound == "cmax") {
        cox_opts.mode = CoxLipschitzOptions::Mode::scaled_max;
        cox_opts.scale = o.cox_bound_c;
    }
    return {LossModel(std::move(solved), cox_opts), std::move(D), std::move(data), wopts};
}

PathConfig make_config(const FitOptions& o) {
    PathConfig cfg;
    cfg.eps = o.eps;
    cfg.max_majorizations = o.nm;
    cfg.max_dual_steps = o.nd;
    cfg.ridge_delta = o.ridge_delta;
    if (o.early_stop > 0) cfg.early_stop = EarlyStopRule{o.early_stop};
    return cfg;
}

int run_fit(const FitOptions& o) {
    Problem prob = assemble(o);
    const PathConfig cfg = make_config(o);
    io::log(1, "fitting path with eps=" + io::format_double(cfg.eps));
    const SolutionPath path = mm_dust_path(prob.model, prob.D, cfg);
    io::log(1, "path has " + std::to_string(path.points.size()) + " points" +
                   (path.stopped_early ? " (early stop: " + path.stop_reason + ")" : ""));
    prob.write_opts.write_json = o.format != "csv";
    io::write_path(path, prob.report_data, o.out, prob.write_opts);
    return 0;
}

struct SimulateOptions {
    std::string design = "logistic-lasso";
    std::uint64_t seed = 1;
    double snr = 1.0;
    std::size_t n = 300;
    std::string tree = "default";
    std::string out = "sim";
};

int run_simulate(const SimulateOptions& o) {
    SimulatedData sim;
    if (o.design == "logistic-lasso") {
        sim = simulate_logistic_design(o.seed);
    } else if (o.design == "cox-fused") {
        sim = simulate_cox_fused_design(o.seed);
    } else if (o.design == "cox-tree") {
        const AggregationTree tree =
            o.tree == "default" ? default_aggregation_tree() : read_tree_file(o.tree);
        sim = simulate_cox_tree_design(tree, o.snr, o.seed, o.n);
        write_tree_file(tree, o.out + "_tree.txt");
    } else {
        throw std::runtime_error("unknown design: " + o.design);
    }
    io::write_dataset_csv(sim.dataset, o.out + "_data.csv");
    io::write_truth_csv(sim.true_coefficients, sim.true_intercept, o.out + "_truth.csv");
    io::log(1, "wrote " + o.out + "_data.csv (n=" + std::to_string(sim.dataset.n()) +
                   ", p=" + std::to_string(sim.dataset.p()) + ")");
    return 0;
}

int run_oracle_check(const FitOptions& o, const std::string& lambda_list, double tol) {
    Problem prob = assemble(o);
    const SolutionPath path = mm_dust_path(prob.model, prob.D, make_config(o));
    if (path.points.empty()) throw std::runtime_error("oracle-check: empty path");

    std::vector<double> lambdas;
    std::stringstream ss(lambda_list);
    std::string item;
    while (std::getline(ss, item, ',')) lambdas.push_back(std::stod(item));
    if (lambdas.empty()) throw std::runtime_error("oracle-check: no lambda values given");

    std::ofstream out(o.out + "_oracle.csv");
    if (!out) throw std::runtime_error("cannot write " + o.out + "_oracle.csv");
    out << "lambda,sup_diff,objective_path,objective_oracle,kkt_residual,oracle_iterations\n";
    for (double lam : lambdas) {
        const PathPoint* nearest = &path.points.front();
        for (const PathPoint& pt : path.points) {
            if (std::fabs(pt.lambda - lam) < std::fabs(nearest->lambda - lam)) nearest = &pt;
        }
        const auto sol = oracle::exact_fixed_lambda(prob.model, prob.D, nearest->lambda, tol);
        double sup = 0.0;
        for (std::size_t j = 0; j < sol.beta.size(); ++j) {
            sup = std::max(sup, std::fabs(sol.beta[j] - nearest->beta[j]));
        }
        const double obj_oracle = objective_value(prob.model, sol.beta, prob.D, nearest->lambda);
        out << io::format_double(nearest->lambda) << ',' << io::format_double(sup) << ','
            << io::format_double(nearest->objective) << ',' << io::format_double(obj_oracle) << ','
            << io::format_double(sol.kkt_residual) << ',' << sol.iterations << '\n';
    }
    return 0;
}

int run_sweep(const FitOptions& o, const std::string& eps_list, double tol) {
    Problem prob = assemble(o);
    std::vector<double> epses;
    std::stringstream ss(eps_list);
    std::string item;
    while (std::getline(ss, item, ',')) epses.push_back(std::stod(item));
    if (epses.empty()) throw std::runtime_error("sweep: no eps values given");

    // independent runs; the oracle is warm-started along each grid separately
    auto one = [&](double eps) -> std::pair<std::size_t, double> {
        FitOptions local = o;
        local.eps = eps;
        const SolutionPath path = mm_dust_path(prob.model, prob.D, make_config(local));
        double sup = 0.0;
        Vector warm;
        const Vector* warm_ptr = nullptr;
        for (const PathPoint& pt : path.points) {
            const auto sol =
                oracle::exact_fixed_lambda(prob.model, prob.D, pt.lambda, tol, 200000, warm_ptr);
            for (std::size_t j = 0; j < sol.beta.size(); ++j) {
                sup = std::max(sup, std::fabs(sol.beta[j] - pt.beta[j]));
            }
            warm = sol.beta;
            warm_ptr = &warm;
        }
        return {path.points.size(), sup};
    };

    std::vector<std::future<std::pair<std::size_t, double>>> jobs;
    jobs.reserve(epses.size());
    for (double eps : epses) {
        jobs.push_back(std::async(std::launch::async, one, eps));
    }
    std::ofstream out(o.out + "_sweep.csv");
    if (!out) throw std::runtime_error("cannot write " + o.out + "_sweep.csv");
    out << "eps,n_points,sup_error\n";
    for (std::size_t i = 0; i < epses.size(); ++i) {
        const auto [npts, sup] = jobs[i].get();
        out << io::format_double(epses[i]) << ',' << npts << ',' << io::format_double(sup) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized-lasso solution paths via majorized dual stagewise descent"};
    app.require_subcommand(1);

    FitOptions fit_opts;
    CLI::App* fit = app.add_subcommand("fit", "Trace a solution path and write it to CSV/JSON");
    add_fit_options(fit, fit_opts);

    SimulateOptions sim_opts;
    CLI::App* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
    sim->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sim->add_option("--design", sim_opts.design, "logistic-lasso | cox-fused | cox-tree")
        ->check(CLI::IsMember({"logistic-lasso", "cox-fused", "cox-tree"}));
    sim->add_option("--seed", sim_opts.seed, "RNG seed")->required();
    sim->add_option("--snr", sim_opts.snr, "Signal-to-noise ratio (cox-tree)");
    sim->add_option("--n", sim_opts.n, "Sample size (cox-tree)");
    sim->add_option("--tree", sim_opts.tree, "Tree file for cox-tree, or 'default'");
    sim->add_option("--out", sim_opts.out, "Output file prefix");

    FitOptions oc_opts;
    std::string lambda_list;
    double oracle_tol = 1e-8;
    CLI::App* oc = app.add_subcommand("oracle-check",
                                      "Compare path points against the fixed-lambda oracle");
    add_fit_options(oc, oc_opts);
    oc->add_option("--lambdas", lambda_list, "Comma-separated lambda values")->required();
    oc->add_option("--tol", oracle_tol, "Oracle convergence tolerance");

    FitOptions sweep_opts;
    std::string eps_list;
    double sweep_tol = 1e-8;
    CLI::App* sw = app.add_subcommand("sweep", "Sup-norm path error against the oracle per eps");
    add_fit_options(sw, sweep_opts, /*with_eps=*/false);
    sw->add_option("--eps-list", eps_list, "Comma-separated step sizes")->required();
    sw->add_option("--tol", sweep_tol, "Oracle convergence tolerance");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
        app.parse(args);
        if (fit->parsed()) return run_fit(fit_opts);
        if (sim->parsed()) return run_simulate(sim_opts);
        if (oc->parsed()) return run_oracle_check(oc_opts, lambda_list, oracle_tol);
        if (sw->parsed()) return run_sweep(sweep_opts, eps_list, sweep_tol);
        return 1;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        mmdust::io::write_error_json(std::cerr, "usage", e.what());
        return e.get_exit_code();
    } catch (const std::exception& e) {
        mmdust::io::write_error_json(std::cerr, "runtime", e.what());
        return 1;
    }
}
