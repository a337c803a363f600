#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "robustmean/distributions.hpp"
#include "robustmean/estimators.hpp"

namespace robustmean {

enum class Method { kSampleMean, kMedianOfMeans, kGeoMedianOfMeans, kLm };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::kSampleMean: return "sample-mean";
        case Method::kMedianOfMeans: return "mom";
        case Method::kGeoMedianOfMeans: return "geomedian-mom";
        case Method::kLm: return "lm";
    }
    return "sample-mean";
}

inline std::optional<Method> method_from_name(std::string_view name) {
    if (name == "sample-mean") return Method::kSampleMean;
    if (name == "mom") return Method::kMedianOfMeans;
    if (name == "geomedian-mom") return Method::kGeoMedianOfMeans;
    if (name == "lm") return Method::kLm;
    return std::nullopt;
}

inline std::string k_rule_name(const KSelection& sel) {
    switch (sel.rule) {
        case KRule::kPaper: return "paper";
        case KRule::kPractical: return "practical";
        case KRule::kFixed: return "fixed:" + std::to_string(sel.fixed_k);
    }
    return "practical";
}

struct TrialResult {
    int trial = 0;
    int k = 1;
    std::vector<double> errors;      // ||estimate - mean||, aligned with methods
    std::vector<double> elapsed_ms;  // per method; never serialized
};

struct ErrorQuantileReport {
    DistributionSpec spec;
    std::size_t n = 0;
    int trials = 0;
    double delta = 0.0;
    std::uint64_t estimator_seed = 0;
    std::string k_rule;
    int k = 1;
    bool k_clamped = false;
    std::vector<Method> methods;
    std::vector<double> quantile_levels;         // 0.5, 0.9, 0.99, 1 - delta
    std::vector<std::vector<double>> quantiles;  // [method][level]
    std::vector<double> mean_error;              // [method]
    RadiusBound radius_paper;
    RadiusBound radius_practical;
    bool paper_rule_feasible = false;   // ceil(360 ln(2/delta)) fits within N unclamped
    bool lm_within_paper_bound = true;  // (1-delta)-quantile of lm error <= 2 r_paper
};

struct GeometryReport {
    DistributionSpec spec;
    std::size_t n = 0;
    int trials = 0;
    double delta = 0.0;
    int k = 1;
    bool k_clamped = false;
    double r_hat = 0.0;  // practical-profile radius from true moments
    int probes = 0;      // random sphere probes per (trial, multiplier)
    int axis_probes = 0; // fixed +-e_i probes added on top
    std::vector<double> multipliers;
    std::vector<double> all_defeated_fraction;    // trials where every probe lost
    std::vector<double> probe_defeated_fraction;  // probe-level average, diagnostic
};

// Lower empirical quantile: order statistic of 1-based rank ceil(q * T).
inline double lower_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw invalid_parameter("lower_quantile: empty input");
    const double rank = std::ceil(q * static_cast<double>(sorted.size()));
    std::size_t idx = rank <= 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
    if (idx >= sorted.size()) idx = sorted.size() - 1;
    return sorted[idx];
}

namespace detail {

// Stream identifiers per trial: data, estimator, probes. Data and probe
// streams hang off the distribution seed, the estimator stream off the
// estimator seed, so overlapping master seeds cannot alias.
inline std::uint64_t stream_id(int trial, int channel) {
    return static_cast<std::uint64_t>(trial) * 4 + static_cast<std::uint64_t>(channel);
}

// Run `trials` jobs on `threads` workers; worker w takes trials w, w+T, ...
// Results land in per-trial slots, so aggregation order never depends on
// the worker count.
template <typename Job>
void run_trials(int trials, int threads, Job&& job) {
    if (threads <= 1) {
        for (int t = 0; t < trials; ++t) job(t);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([w, trials, threads, &job] {
            for (int t = w; t < trials; t += threads) job(t);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Dispatch one estimator. The block methods use the pre-resolved k; the
// tournament mean resolves its own from the config (same inputs, same k).
inline Vec run_method(Method method, const SampleSet& data, const EstimatorConfig& config,
                      int k) {
    switch (method) {
        case Method::kSampleMean:
            return sample_mean(data);
        case Method::kMedianOfMeans:
            return Vec{median_of_means_1d(data, k)};
        case Method::kGeoMedianOfMeans:
            return geomedian_of_means(data, k);
        case Method::kLm:
            return lm_estimator(data, config);
    }
    return sample_mean(data);
}

// Draw N samples per trial, run every method on them, and aggregate the
// error quantiles. Reports are byte-identical across thread counts for a
// fixed seed pair (spec.seed drives the data, config.seed the estimator).
inline ErrorQuantileReport run_error_experiment(const DistributionSpec& spec, std::size_t n,
                                                const std::vector<Method>& methods,
                                                const EstimatorConfig& config, int trials,
                                                int threads = 1) {
    if (trials < 1) throw invalid_parameter("run_error_experiment: need trials >= 1");
    if (methods.empty()) throw invalid_parameter("run_error_experiment: no methods selected");
    if (threads < 1) throw invalid_parameter("run_error_experiment: need threads >= 1");
    validate_spec(spec);
    for (Method m : methods)
        if (m == Method::kMedianOfMeans && spec.dim != 1)
            throw invalid_parameter("run_error_experiment: mom requires d = 1");

    const MomentSummary mom = moments(spec);
    const ResolvedK rk = resolve_k(config.delta, n, config.k_rule, config.odd_k);
    const ResolvedK paper_rk = resolve_k(config.delta, n, KSelection::paper(), config.odd_k);

    std::vector<TrialResult> results(static_cast<std::size_t>(trials));
    detail::run_trials(trials, threads, [&](int t) {
        SplitMix64 data_rng = substream(spec.seed, detail::stream_id(t, 0));
        const SampleSet data = sample(spec, n, data_rng);
        EstimatorConfig trial_config = config;
        trial_config.seed = substream_seed(config.seed, detail::stream_id(t, 1));
        TrialResult& tr = results[static_cast<std::size_t>(t)];
        tr.trial = t;
        tr.k = rk.k;
        tr.errors.resize(methods.size());
        tr.elapsed_ms.resize(methods.size());
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const auto t0 = std::chrono::steady_clock::now();
            const Vec estimate = run_method(methods[m], data, trial_config, rk.k);
            const auto t1 = std::chrono::steady_clock::now();
            tr.errors[m] = dist(estimate, mom.mean);
            tr.elapsed_ms[m] = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
    });

    ErrorQuantileReport report;
    report.spec = spec;
    report.n = n;
    report.trials = trials;
    report.delta = config.delta;
    report.estimator_seed = config.seed;
    report.k_rule = k_rule_name(config.k_rule);
    report.k = rk.k;
    report.k_clamped = rk.clamped;
    report.methods = methods;
    report.quantile_levels = {0.5, 0.9, 0.99, 1.0 - config.delta};
    report.radius_paper =
        radius_bound(mom.trace, mom.lambda_max, n, config.delta, ConstantsProfile::kPaper);
    report.radius_practical =
        radius_bound(mom.trace, mom.lambda_max, n, config.delta, ConstantsProfile::kPractical);
    report.paper_rule_feasible = !paper_rk.clamped;

    report.quantiles.resize(methods.size());
    report.mean_error.resize(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) {
        std::vector<double> errs(static_cast<std::size_t>(trials));
        double sum = 0.0;
        for (int t = 0; t < trials; ++t) {
            errs[static_cast<std::size_t>(t)] = results[static_cast<std::size_t>(t)].errors[m];
            sum += errs[static_cast<std::size_t>(t)];
        }
        std::sort(errs.begin(), errs.end());
        report.mean_error[m] = sum / static_cast<double>(trials);
        report.quantiles[m].reserve(report.quantile_levels.size());
        for (double q : report.quantile_levels)
            report.quantiles[m].push_back(lower_quantile(errs, q));
        if (methods[m] == Method::kLm && report.paper_rule_feasible) {
            const double q_conf = lower_quantile(errs, 1.0 - config.delta);
            if (q_conf > 2.0 * report.radius_paper.r) report.lm_within_paper_bound = false;
        }
    }
    return report;
}

// Per trial: fresh partition, then at every radius multiplier c check
// whether the true mean defeats mean + c * r_hat * u for `probes` random
// directions plus the 2d axis directions.
inline GeometryReport verify_geometry(const DistributionSpec& spec, std::size_t n, double delta,
                                      const std::vector<double>& multipliers, int probes,
                                      int trials, const EstimatorConfig& config,
                                      int threads = 1) {
    if (trials < 1) throw invalid_parameter("verify_geometry: need trials >= 1");
    if (probes < 1) throw invalid_parameter("verify_geometry: need probes >= 1");
    if (multipliers.empty()) throw invalid_parameter("verify_geometry: no multipliers");
    for (double c : multipliers)
        if (!(c > 0.0)) throw invalid_parameter("verify_geometry: multipliers must be positive");
    if (threads < 1) throw invalid_parameter("verify_geometry: need threads >= 1");
    validate_spec(spec);

    const MomentSummary mom = moments(spec);
    const double r_hat =
        radius_bound(mom.trace, mom.lambda_max, n, delta, ConstantsProfile::kPractical).r;
    const ResolvedK rk = resolve_k(delta, n, config.k_rule, config.odd_k);
    const std::size_t d = spec.dim;
    const int axis_probes = static_cast<int>(2 * d);

    std::vector<std::vector<char>> all_ok(
        static_cast<std::size_t>(trials), std::vector<char>(multipliers.size(), 0));
    std::vector<std::vector<int>> defeated_count(
        static_cast<std::size_t>(trials), std::vector<int>(multipliers.size(), 0));

    detail::run_trials(trials, threads, [&](int t) {
        SplitMix64 data_rng = substream(spec.seed, detail::stream_id(t, 0));
        const SampleSet data = sample(spec, n, data_rng);
        const BlockPartition partition = make_partition(data, static_cast<std::size_t>(rk.k));
        SplitMix64 probe_rng = substream(spec.seed, detail::stream_id(t, 2));
        Vec b(d);
        for (std::size_t mi = 0; mi < multipliers.size(); ++mi) {
            const double radius = multipliers[mi] * r_hat;
            bool all = true;
            int defeated = 0;
            for (int p = 0; p < probes + axis_probes; ++p) {
                if (p < probes) {
                    const Vec u = random_unit_vector(probe_rng, d);
                    for (std::size_t i = 0; i < d; ++i) b[i] = mom.mean[i] + radius * u[i];
                } else {
                    const int a = p - probes;
                    b = mom.mean;
                    b[static_cast<std::size_t>(a) / 2] +=
                        (a % 2 == 0 ? radius : -radius);
                }
                if (defeats_blockform(mom.mean, b, partition).a_defeats_b())
                    ++defeated;
                else
                    all = false;
            }
            all_ok[static_cast<std::size_t>(t)][mi] = all ? 1 : 0;
            defeated_count[static_cast<std::size_t>(t)][mi] = defeated;
        }
    });

    GeometryReport report;
    report.spec = spec;
    report.n = n;
    report.trials = trials;
    report.delta = delta;
    report.k = rk.k;
    report.k_clamped = rk.clamped;
    report.r_hat = r_hat;
    report.probes = probes;
    report.axis_probes = axis_probes;
    report.multipliers = multipliers;
    report.all_defeated_fraction.assign(multipliers.size(), 0.0);
    report.probe_defeated_fraction.assign(multipliers.size(), 0.0);
    for (std::size_t mi = 0; mi < multipliers.size(); ++mi) {
        long long ok = 0, defeated = 0;
        for (int t = 0; t < trials; ++t) {
            ok += all_ok[static_cast<std::size_t>(t)][mi];
            defeated += defeated_count[static_cast<std::size_t>(t)][mi];
        }
        report.all_defeated_fraction[mi] = static_cast<double>(ok) / trials;
        report.probe_defeated_fraction[mi] =
            static_cast<double>(defeated) / (static_cast<double>(trials) * (probes + axis_probes));
    }
    return report;
}

// One error experiment per grid point; consumers check the ~N^{-1/2} slope.
inline std::vector<ErrorQuantileReport> rate_sweep(const DistributionSpec& spec,
                                                   const std::vector<std::size_t>& n_grid,
                                                   double delta,
                                                   const std::vector<Method>& methods,
                                                   const EstimatorConfig& config, int trials,
                                                   int threads = 1) {
    if (n_grid.empty()) throw invalid_parameter("rate_sweep: empty grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw invalid_parameter("rate_sweep: grid must be strictly ascending");
    std::vector<ErrorQuantileReport> reports;
    reports.reserve(n_grid.size());
    EstimatorConfig swept = config;
    swept.delta = delta;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        DistributionSpec point_spec = spec;
        point_spec.seed = substream_seed(spec.seed, 0xA000 + i);
        reports.push_back(
            run_error_experiment(point_spec, n_grid[i], methods, swept, trials, threads));
    }
    return reports;
}

// ---- serialization ----

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline nlohmann::json to_json_report(const RadiusBound& r) {
    return nlohmann::json{{"r", r.r},
                          {"trace_term", r.trace_term},
                          {"eig_term", r.eig_term},
                          {"profile", r.profile == ConstantsProfile::kPaper ? "paper" : "practical"}};
}

inline nlohmann::json to_json_report(const ErrorQuantileReport& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = "error_quantiles";
    j["distribution"] = r.spec;
    j["n"] = r.n;
    j["trials"] = r.trials;
    j["delta"] = r.delta;
    j["estimator_seed"] = r.estimator_seed;
    j["k_rule"] = r.k_rule;
    j["k"] = r.k;
    j["k_clamped"] = r.k_clamped;
    j["quantile_levels"] = r.quantile_levels;
    j["radius"] = {{"paper", to_json_report(r.radius_paper)},
                   {"practical", to_json_report(r.radius_practical)}};
    nlohmann::json methods = nlohmann::json::object();
    for (std::size_t m = 0; m < r.methods.size(); ++m)
        methods[method_name(r.methods[m])] = {{"mean_error", r.mean_error[m]},
                                              {"quantiles", r.quantiles[m]}};
    j["methods"] = methods;
    j["paper_rule_feasible"] = r.paper_rule_feasible;
    j["lm_within_paper_bound"] = r.lm_within_paper_bound;
    return j;
}

inline nlohmann::json to_json_report(const GeometryReport& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = "geometry";
    j["distribution"] = r.spec;
    j["n"] = r.n;
    j["trials"] = r.trials;
    j["delta"] = r.delta;
    j["k"] = r.k;
    j["k_clamped"] = r.k_clamped;
    j["r_hat"] = r.r_hat;
    j["probes"] = r.probes;
    j["axis_probes"] = r.axis_probes;
    j["multipliers"] = r.multipliers;
    j["all_defeated_fraction"] = r.all_defeated_fraction;
    j["probe_defeated_fraction"] = r.probe_defeated_fraction;
    return j;
}

// Flat CSV, one row per method x quantile.
inline std::string to_csv(const ErrorQuantileReport& r) {
    std::string out = "method,quantile,error\n";
    for (std::size_t m = 0; m < r.methods.size(); ++m)
        for (std::size_t q = 0; q < r.quantile_levels.size(); ++q) {
            out += method_name(r.methods[m]);
            out += ',';
            out += format_double(r.quantile_levels[q]);
            out += ',';
            out += format_double(r.quantiles[m][q]);
            out += '\n';
        }
    return out;
}

inline std::string to_csv(const GeometryReport& r) {
    std::string out = "multiplier,all_defeated_fraction,probe_defeated_fraction\n";
    for (std::size_t i = 0; i < r.multipliers.size(); ++i) {
        out += format_double(r.multipliers[i]);
        out += ',';
        out += format_double(r.all_defeated_fraction[i]);
        out += ',';
        out += format_double(r.probe_defeated_fraction[i]);
        out += '\n';
    }
    return out;
}

inline std::string to_csv(const std::vector<ErrorQuantileReport>& sweep) {
    std::string out = "n,method,quantile,error\n";
    for (const auto& r : sweep)
        for (std::size_t m = 0; m < r.methods.size(); ++m)
            for (std::size_t q = 0; q < r.quantile_levels.size(); ++q) {
                out += std::to_string(r.n);
                out += ',';
                out += method_name(r.methods[m]);
                out += ',';
                out += format_double(r.quantile_levels[q]);
                out += ',';
                out += format_double(r.quantiles[m][q]);
                out += '\n';
            }
    return out;
}

}  // namespace robustmean
