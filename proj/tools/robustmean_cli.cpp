// Command-line front end: estimate means from data files, run Monte Carlo
// benchmarks, verify the defeat geometry, and sweep sample sizes.
//
// Exit codes: 0 success, 2 data error, 64 usage error.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "robustmean/robustmean.hpp"

namespace {

using namespace robustmean;

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= csv.size(); ++i) {
        if (i == csv.size() || csv[i] == ',') {
            double v = 0.0;
            if (!parse_double(std::string_view(csv).substr(start, i - start), v))
                throw invalid_parameter("'" + csv + "' is not a comma-separated number list");
            out.push_back(v);
            start = i + 1;
        }
    }
    return out;
}

KSelection parse_k_rule(const std::string& s) {
    if (s == "paper") return KSelection::paper();
    if (s == "practical") return KSelection::practical();
    if (s.rfind("fixed:", 0) == 0) {
        double v = 0.0;
        if (!parse_double(std::string_view(s).substr(6), v) || v < 1.0 ||
            v != std::floor(v))
            throw invalid_parameter("--k-rule fixed:<k> needs a positive integer");
        return KSelection::fixed(static_cast<int>(v));
    }
    throw invalid_parameter("--k-rule must be paper, practical, or fixed:<k>");
}

std::vector<Method> parse_methods(const std::string& csv, std::size_t dim) {
    std::vector<Method> methods;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= csv.size(); ++i) {
        if (i == csv.size() || csv[i] == ',') {
            const std::string name = csv.substr(start, i - start);
            start = i + 1;
            if (name.empty()) continue;
            const auto m = method_from_name(name);
            if (!m) throw invalid_parameter("unknown method '" + name + "'");
            methods.push_back(*m);
        }
    }
    if (methods.empty()) throw invalid_parameter("--methods selected nothing");
    for (Method m : methods)
        if (m == Method::kMedianOfMeans && dim != 1)
            throw invalid_parameter("method 'mom' requires 1-dimensional data");
    return methods;
}

struct DistFlags {
    std::string family = "gaussian";
    std::size_t d = 1;
    std::string mean;      // comma list; empty = zeros
    double sigma = 1.0;    // scale = sigma * I unless cov-diag given
    std::string cov_diag;  // comma list of Sigma diagonal entries
    double nu = 3.0;
    double alpha = 3.0;
    double sdlog = 0.5;
    double outlier_prob = 0.05;
    double outlier_scale = 10.0;
};

DistributionSpec spec_from_flags(const DistFlags& f, std::uint64_t seed) {
    const auto family = family_from_name(f.family);
    if (!family)
        throw invalid_parameter("--dist must be one of gaussian, student-t, pareto, "
                                "lognormal, gaussian-outliers");
    DistributionSpec spec = DistributionSpec::isotropic(*family, f.d, f.sigma);
    if (!f.mean.empty()) {
        Vec mean = parse_double_list(f.mean);
        if (mean.size() == 1 && f.d > 1) mean.assign(f.d, mean[0]);
        if (mean.size() != f.d) throw invalid_parameter("--mean length must match --d");
        spec.mean = std::move(mean);
    }
    if (!f.cov_diag.empty()) {
        const Vec diag = parse_double_list(f.cov_diag);
        if (diag.size() != f.d) throw invalid_parameter("--cov-diag length must match --d");
        spec.scale = identity_matrix(f.d);
        for (std::size_t i = 0; i < f.d; ++i) {
            if (diag[i] < 0.0) throw invalid_parameter("--cov-diag entries must be >= 0");
            spec.scale[i][i] = std::sqrt(diag[i]);
        }
    }
    spec.nu = f.nu;
    spec.alpha = f.alpha;
    spec.sdlog = f.sdlog;
    spec.outlier_prob = f.outlier_prob;
    spec.outlier_scale = f.outlier_scale;
    spec.seed = seed;
    validate_spec(spec);
    return spec;
}

void add_dist_flags(CLI::App* cmd, DistFlags& f) {
    cmd->add_option("--dist", f.family,
                    "distribution family: gaussian|student-t|pareto|lognormal|gaussian-outliers");
    cmd->add_option("--d", f.d, "dimension");
    cmd->add_option("--mean", f.mean, "true mean, comma list (scalar broadcasts)");
    cmd->add_option("--sigma", f.sigma, "isotropic scale factor (scale = sigma * I)");
    cmd->add_option("--cov-diag", f.cov_diag, "diagonal of the covariance, comma list");
    cmd->add_option("--nu", f.nu, "student-t degrees of freedom (> 2)");
    cmd->add_option("--alpha", f.alpha, "pareto tail index (> 2)");
    cmd->add_option("--sdlog", f.sdlog, "lognormal log-scale");
    cmd->add_option("--outlier-prob", f.outlier_prob, "gaussian-outliers mixture weight");
    cmd->add_option("--outlier-scale", f.outlier_scale, "gaussian-outliers inflation");
}

void warn_if_clamped(const ResolvedK& rk, const std::string& rule, std::size_t n) {
    if (rk.clamped)
        std::cout << "WARN: k-rule " << rule << " exceeds N=" << n << "; clamped to k=" << rk.k
                  << "\n";
}

// key=value config file; command-line flags win over file values. Section
// headers and #/; comments are skipped, keys mirror the long option names.
void apply_config_file(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = line;
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        if (s.empty() || s.front() == '#' || s.front() == ';' || s.front() == '[') continue;
        const std::size_t eq = s.find('=');
        if (eq == std::string_view::npos)
            throw parse_error("config: expected key=value", line_no);
        std::string key(s.substr(0, eq));
        std::string value(s.substr(eq + 1));
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!value.empty() && value.front() == ' ') value.erase(value.begin());
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw parse_error("config: unknown key '" + key + "'", line_no);
        if (opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

int run_estimate(const std::string& input, const std::string& format_name,
                 const std::string& method_name_str, double delta, const std::string& k_rule_str,
                 std::uint64_t seed, bool shuffle_rows) {
    SampleFormat format = SampleFormat::kAuto;
    if (format_name == "csv")
        format = SampleFormat::kCsv;
    else if (format_name == "jsonl")
        format = SampleFormat::kJsonl;
    else if (format_name != "auto")
        throw invalid_parameter("--format must be auto, csv, or jsonl");

    const auto method = method_from_name(method_name_str);
    if (!method)
        throw invalid_parameter("--method must be sample-mean, mom, geomedian-mom, or lm");
    const KSelection k_rule = parse_k_rule(k_rule_str);

    SampleSet data = read_samples_file(input, format);
    if (shuffle_rows) {
        std::vector<Vec> pts = data.points();
        SplitMix64 rng = substream(seed, 3);
        shuffle(pts, rng);
        data = SampleSet(std::move(pts));
    }
    if (*method == Method::kMedianOfMeans && data.dim() != 1)
        throw invalid_parameter("method 'mom' requires 1-dimensional data");

    EstimatorConfig config;
    config.delta = delta;
    config.k_rule = k_rule;
    config.seed = seed;

    int k = 1;
    if (*method != Method::kSampleMean) {
        const ResolvedK rk = resolve_k(delta, data.size(), k_rule, config.odd_k);
        if (rk.clamped)
            std::cerr << "WARN: k-rule " << k_rule_name(k_rule) << " exceeds N=" << data.size()
                      << "; clamped to k=" << rk.k << "\n";
        k = rk.k;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const Vec estimate = run_method(*method, data, config, k);
    const auto t1 = std::chrono::steady_clock::now();

    nlohmann::json out;
    out["schema_version"] = 1;
    out["estimate"] = estimate;
    out["method"] = method_name(*method);
    out["k"] = k;
    out["n"] = data.size();
    out["d"] = data.dim();
    out["seed"] = seed;
    out["elapsed_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    std::cout << out.dump() << "\n";
    return 0;
}

void write_report_file(const std::string& path, const std::string& format,
                       const nlohmann::json& j, const std::string& csv) {
    if (format == "csv")
        write_text_file(path, csv);
    else if (format == "jsonl")
        write_text_file(path, j.dump() + "\n");
    else
        throw invalid_parameter("--format must be csv or jsonl");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust multivariate mean estimation toolkit"};
    app.require_subcommand(1);

    // estimate
    auto* est = app.add_subcommand("estimate", "estimate the mean of a data file");
    std::string est_input, est_format = "auto", est_method = "lm", est_k_rule = "practical";
    double est_delta = 0.05;
    std::uint64_t est_seed = 0;
    bool est_shuffle = false;
    est->add_option("--input", est_input, "CSV or JSONL sample file")->required();
    est->add_option("--format", est_format, "input format: auto|csv|jsonl");
    est->add_option("--method", est_method, "sample-mean|mom|geomedian-mom|lm");
    est->add_option("--delta", est_delta, "confidence level in (0,1)");
    est->add_option("--k-rule", est_k_rule, "paper|practical|fixed:<k>");
    est->add_option("--seed", est_seed, "master RNG seed");
    est->add_flag("--shuffle", est_shuffle, "shuffle rows once before partitioning");

    // shared bench-family flags
    DistFlags bench_dist, geo_dist, sweep_dist;
    std::string bench_out, geo_out, sweep_out;
    std::string bench_format = "jsonl", geo_format = "jsonl", sweep_format = "jsonl";
    std::string bench_methods = "", sweep_methods = "";
    std::string bench_k_rule = "practical", geo_k_rule = "practical", sweep_k_rule = "practical";
    double bench_delta = 0.05, geo_delta = 0.05, sweep_delta = 0.05;
    std::uint64_t bench_seed = 0, geo_seed = 0, sweep_seed = 0;
    int bench_trials = 100, geo_trials = 100, sweep_trials = 100;
    int bench_threads = 1, geo_threads = 1, sweep_threads = 1;
    std::size_t bench_n = 1000, geo_n = 1000;
    std::string geo_multipliers = "0.25,0.5,1,2,4,1000";
    int geo_probes = 100;
    std::string sweep_grid = "1000,4000";
    std::string bench_config, geo_config, sweep_config;

    auto* bench = app.add_subcommand("bench", "error-quantile Monte Carlo experiment");
    add_dist_flags(bench, bench_dist);
    bench->add_option("--n", bench_n, "samples per trial");
    bench->add_option("--trials", bench_trials, "number of trials");
    bench->add_option("--methods", bench_methods, "comma list (default: all applicable)");
    bench->add_option("--delta", bench_delta, "confidence level in (0,1)");
    bench->add_option("--k-rule", bench_k_rule, "paper|practical|fixed:<k>");
    bench->add_option("--seed", bench_seed, "master RNG seed");
    bench->add_option("--threads", bench_threads, "worker threads");
    bench->add_option("--output", bench_out, "report file path")->required();
    bench->add_option("--format", bench_format, "report format: jsonl|csv");
    bench->add_option("--config", bench_config, "key=value config file");

    auto* geo = app.add_subcommand("verify-geometry", "defeat-geometry Monte Carlo verifier");
    add_dist_flags(geo, geo_dist);
    geo->add_option("--n", geo_n, "samples per trial");
    geo->add_option("--trials", geo_trials, "number of trials");
    geo->add_option("--multipliers", geo_multipliers, "radius multipliers, comma list");
    geo->add_option("--probes", geo_probes, "random probes per (trial, multiplier)");
    geo->add_option("--delta", geo_delta, "confidence level in (0,1)");
    geo->add_option("--k-rule", geo_k_rule, "paper|practical|fixed:<k>");
    geo->add_option("--seed", geo_seed, "master RNG seed");
    geo->add_option("--threads", geo_threads, "worker threads");
    geo->add_option("--output", geo_out, "report file path")->required();
    geo->add_option("--format", geo_format, "report format: jsonl|csv");
    geo->add_option("--config", geo_config, "key=value config file");

    auto* sweep = app.add_subcommand("rate-sweep", "error experiment across sample sizes");
    add_dist_flags(sweep, sweep_dist);
    sweep->add_option("--n-grid", sweep_grid, "ascending sample sizes, comma list");
    sweep->add_option("--trials", sweep_trials, "trials per grid point");
    sweep->add_option("--methods", sweep_methods, "comma list (default: all applicable)");
    sweep->add_option("--delta", sweep_delta, "confidence level in (0,1)");
    sweep->add_option("--k-rule", sweep_k_rule, "paper|practical|fixed:<k>");
    sweep->add_option("--seed", sweep_seed, "master RNG seed");
    sweep->add_option("--threads", sweep_threads, "worker threads");
    sweep->add_option("--output", sweep_out, "report file path")->required();
    sweep->add_option("--format", sweep_format, "report format: jsonl|csv");
    sweep->add_option("--config", sweep_config, "key=value config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (est->parsed())
            return run_estimate(est_input, est_format, est_method, est_delta, est_k_rule,
                                est_seed, est_shuffle);

        if (bench->parsed()) {
            if (!bench_config.empty()) apply_config_file(bench, bench_config);
            const DistributionSpec spec = spec_from_flags(bench_dist, bench_seed);
            const std::string method_list =
                bench_methods.empty()
                    ? (spec.dim == 1 ? "sample-mean,mom,geomedian-mom,lm"
                                     : "sample-mean,geomedian-mom,lm")
                    : bench_methods;
            const auto methods = parse_methods(method_list, spec.dim);
            EstimatorConfig config;
            config.delta = bench_delta;
            config.k_rule = parse_k_rule(bench_k_rule);
            config.seed = bench_seed;
            warn_if_clamped(resolve_k(bench_delta, bench_n, config.k_rule, config.odd_k),
                            k_rule_name(config.k_rule), bench_n);
            const auto report = run_error_experiment(spec, bench_n, methods, config,
                                                     bench_trials, bench_threads);
            write_report_file(bench_out, bench_format, to_json_report(report), to_csv(report));
            if (report.paper_rule_feasible && !report.lm_within_paper_bound)
                std::cout << "FAIL: lm (1-delta)-quantile exceeds twice the paper-profile "
                             "radius\n";
            std::cout << "bench: n=" << bench_n << " d=" << spec.dim
                      << " trials=" << bench_trials << " k=" << report.k << " "
                      << method_name(methods.back())
                      << "[q0.99]=" << format_double(report.quantiles.back()[2]) << " -> "
                      << bench_out << "\n";
            return 0;
        }

        if (geo->parsed()) {
            if (!geo_config.empty()) apply_config_file(geo, geo_config);
            const DistributionSpec spec = spec_from_flags(geo_dist, geo_seed);
            EstimatorConfig config;
            config.delta = geo_delta;
            config.k_rule = parse_k_rule(geo_k_rule);
            config.seed = geo_seed;
            const auto multipliers = parse_double_list(geo_multipliers);
            warn_if_clamped(resolve_k(geo_delta, geo_n, config.k_rule, config.odd_k),
                            k_rule_name(config.k_rule), geo_n);
            const auto report = verify_geometry(spec, geo_n, geo_delta, multipliers, geo_probes,
                                                geo_trials, config, geo_threads);
            write_report_file(geo_out, geo_format, to_json_report(report), to_csv(report));
            std::cout << "verify-geometry: trials=" << geo_trials << " k=" << report.k
                      << " r_hat=" << format_double(report.r_hat) << " frac[last]="
                      << format_double(report.all_defeated_fraction.back()) << " -> " << geo_out
                      << "\n";
            return 0;
        }

        if (sweep->parsed()) {
            if (!sweep_config.empty()) apply_config_file(sweep, sweep_config);
            const DistributionSpec spec = spec_from_flags(sweep_dist, sweep_seed);
            const std::string method_list =
                sweep_methods.empty()
                    ? (spec.dim == 1 ? "sample-mean,mom,geomedian-mom,lm"
                                     : "sample-mean,geomedian-mom,lm")
                    : sweep_methods;
            const auto methods = parse_methods(method_list, spec.dim);
            const auto grid_doubles = parse_double_list(sweep_grid);
            std::vector<std::size_t> grid;
            for (double g : grid_doubles) {
                if (g < 1.0 || g != std::floor(g))
                    throw invalid_parameter("--n-grid entries must be positive integers");
                grid.push_back(static_cast<std::size_t>(g));
            }
            EstimatorConfig config;
            config.k_rule = parse_k_rule(sweep_k_rule);
            config.seed = sweep_seed;
            for (std::size_t n : grid)
                warn_if_clamped(resolve_k(sweep_delta, n, config.k_rule, config.odd_k),
                                k_rule_name(config.k_rule), n);
            const auto reports = rate_sweep(spec, grid, sweep_delta, methods, config,
                                            sweep_trials, sweep_threads);
            if (sweep_format == "csv") {
                write_text_file(sweep_out, to_csv(reports));
            } else if (sweep_format == "jsonl") {
                std::string lines;
                for (const auto& r : reports) lines += to_json_report(r).dump() + "\n";
                write_text_file(sweep_out, lines);
            } else {
                throw invalid_parameter("--format must be csv or jsonl");
            }
            std::cout << "rate-sweep: " << grid.size() << " grid points, trials="
                      << sweep_trials << " -> " << sweep_out << "\n";
            return 0;
        }
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what();
        if (e.line > 0) std::cerr << " (line " << e.line << ")";
        std::cerr << "\n";
        return 2;
    } catch (const invalid_parameter& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 64;
}
