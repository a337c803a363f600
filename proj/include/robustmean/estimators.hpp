#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "robustmean/tournament.hpp"

namespace robustmean {

enum class KRule { kPaper, kPractical, kFixed };

struct KSelection {
    KRule rule = KRule::kPractical;
    int fixed_k = 1;  // read only when rule == kFixed

    static KSelection paper() { return {KRule::kPaper, 1}; }
    static KSelection practical() { return {KRule::kPractical, 1}; }
    static KSelection fixed(int k) { return {KRule::kFixed, k}; }
};

struct ResolvedK {
    int k = 1;
    bool clamped = false;  // rule value exceeded N and was pulled down
};

// Block-count selection. Rules: ceil(360 ln(2/delta)), ceil(8 ln(1/delta)),
// or a fixed value. The result is rounded up to odd when odd_k is set (odd
// block counts avoid exact-half splits in majority votes), then clamped
// into [1, n] — to the largest odd value <= n when odd rounding is on.
inline ResolvedK resolve_k(double delta, std::size_t n, const KSelection& sel, bool odd_k) {
    if (n < 1) throw invalid_parameter("resolve_k: need n >= 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw invalid_parameter("resolve_k: delta must lie in (0,1)");
    long long k = 0;
    switch (sel.rule) {
        case KRule::kPaper:
            k = static_cast<long long>(std::ceil(360.0 * std::log(2.0 / delta)));
            break;
        case KRule::kPractical:
            k = static_cast<long long>(std::ceil(8.0 * std::log(1.0 / delta)));
            break;
        case KRule::kFixed:
            if (sel.fixed_k < 1) throw invalid_parameter("resolve_k: fixed k must be >= 1");
            k = sel.fixed_k;
            break;
    }
    if (k < 1) k = 1;
    if (odd_k && k % 2 == 0) ++k;
    ResolvedK out;
    if (k > static_cast<long long>(n)) {
        k = static_cast<long long>(n);
        if (odd_k && k % 2 == 0) --k;
        if (k < 1) k = 1;
        out.clamped = true;
    }
    out.k = static_cast<int>(k);
    return out;
}

inline int choose_k(double delta, std::size_t n, const KSelection& sel, bool odd_k) {
    return resolve_k(delta, n, sel, odd_k).k;
}

enum class ConstantsProfile { kPaper, kPractical };

// max(C1 sqrt(trace/N), C2 sqrt(lambda_max log(2/delta)/N)). The paper
// profile carries the headline constants (400, 240); the practical profile
// (2, 2) is a harness convention that keeps desk-scale experiments
// non-vacuous and is labeled as such in every report.
struct RadiusBound {
    double r = 0.0;
    double trace_term = 0.0;
    double eig_term = 0.0;
    ConstantsProfile profile = ConstantsProfile::kPaper;
};

inline RadiusBound radius_bound(double trace, double lambda_max, std::size_t n, double delta,
                                ConstantsProfile profile) {
    if (n < 1) throw invalid_parameter("radius_bound: need n >= 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw invalid_parameter("radius_bound: delta must lie in (0,1)");
    if (lambda_max < 0.0 || trace < lambda_max)
        throw invalid_parameter("radius_bound: need trace >= lambda_max >= 0");
    const double c1 = profile == ConstantsProfile::kPaper ? 400.0 : 2.0;
    const double c2 = profile == ConstantsProfile::kPaper ? 240.0 : 2.0;
    RadiusBound out;
    out.profile = profile;
    out.trace_term = c1 * std::sqrt(trace / static_cast<double>(n));
    out.eig_term = c2 * std::sqrt(lambda_max * std::log(2.0 / delta) / static_cast<double>(n));
    out.r = std::max(out.trace_term, out.eig_term);
    return out;
}

inline Vec sample_mean(const SampleSet& samples) {
    Vec acc(samples.dim(), 0.0);
    for (const Vec& x : samples.points())
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += x[c];
    const double inv = 1.0 / static_cast<double>(samples.size());
    for (double& c : acc) c *= inv;
    return acc;
}

// Lower median of the k block means; 1-dimensional data only.
inline double median_of_means_1d(const SampleSet& samples, int k) {
    if (samples.dim() != 1)
        throw invalid_parameter("median_of_means_1d: requires 1-dimensional samples");
    if (k < 1) throw invalid_parameter("median_of_means_1d: k must be >= 1");
    const BlockPartition partition = make_partition(samples, static_cast<std::size_t>(k));
    std::vector<double> means(partition.k());
    for (std::size_t j = 0; j < partition.k(); ++j) means[j] = partition.block_means()[j][0];
    return lower_median(std::move(means));
}

// Weiszfeld iteration with the Vardi-Zhang rule when an iterate coincides
// with data points. Objective values are non-increasing; the best iterate
// seen is returned. The optional trace receives the objective after every
// iterate, starting with the initial point.
inline Vec geometric_median(const std::vector<Vec>& points, double tol = 1e-9,
                            int max_iter = 1000, std::vector<double>* objective_trace = nullptr) {
    if (points.empty()) throw invalid_parameter("geometric_median: empty input");
    const std::size_t d = points[0].size();
    for (const Vec& p : points)
        if (p.size() != d) throw invalid_parameter("geometric_median: ragged input");

    Vec y(d, 0.0);
    for (const Vec& p : points)
        for (std::size_t c = 0; c < d; ++c) y[c] += p[c];
    for (double& c : y) c /= static_cast<double>(points.size());

    double spread = 0.0;
    for (const Vec& p : points) spread = std::max(spread, dist(y, p));

    auto objective = [&points](const Vec& q) {
        double s = 0.0;
        for (const Vec& p : points) s += dist(q, p);
        return s;
    };

    double best_obj = objective(y);
    Vec best = y;
    if (objective_trace) objective_trace->push_back(best_obj);
    if (spread == 0.0) return best;  // all points coincide

    const double on_point = 1e-12 * spread;
    for (int it = 0; it < max_iter; ++it) {
        double wsum = 0.0;
        Vec pull(d, 0.0);      // sum of p_i / d_i over points away from y
        Vec subgrad(d, 0.0);   // sum of (p_i - y)/d_i, drives the anchored step
        int anchored = 0;
        for (const Vec& p : points) {
            const double di = dist(y, p);
            if (di <= on_point) {
                ++anchored;
                continue;
            }
            const double w = 1.0 / di;
            wsum += w;
            for (std::size_t c = 0; c < d; ++c) {
                pull[c] += w * p[c];
                subgrad[c] += (p[c] - y[c]) * w;
            }
        }
        if (wsum == 0.0) break;  // every point sits at y
        Vec next(d);
        if (anchored == 0) {
            for (std::size_t c = 0; c < d; ++c) next[c] = pull[c] / wsum;
        } else {
            const double rn = norm(subgrad);
            if (rn <= static_cast<double>(anchored)) break;  // y is optimal
            const double mix = 1.0 - static_cast<double>(anchored) / rn;
            for (std::size_t c = 0; c < d; ++c)
                next[c] = mix * (pull[c] / wsum) + (1.0 - mix) * y[c];
        }
        const double moved = dist(next, y);
        y = std::move(next);
        const double obj = objective(y);
        if (objective_trace) objective_trace->push_back(obj);
        if (obj < best_obj) {
            best_obj = obj;
            best = y;
        }
        // stop well below the documented objective tolerance; the step
        // length underestimates the distance to the optimum when the
        // contraction is slow
        if (moved <= 0.01 * tol * spread) break;
    }
    return best;
}

// Geometric median of the block means (the classical multivariate
// median-of-means baseline).
inline Vec geomedian_of_means(const SampleSet& samples, int k) {
    if (k < 1) throw invalid_parameter("geomedian_of_means: k must be >= 1");
    return geometric_median(make_partition(samples, static_cast<std::size_t>(k)).block_means());
}

struct EstimatorConfig {
    double delta = 0.05;
    KSelection k_rule = KSelection::practical();
    bool odd_k = true;
    DescentConfig descent = {};
    std::uint64_t seed = 0;  // supersedes descent.seed inside lm_estimator
};

// Tournament mean: resolve k, partition, start the descent at the
// geometric median of the block means. Deterministic given the seed.
inline Vec lm_estimator(const SampleSet& samples, const EstimatorConfig& config) {
    const ResolvedK rk = resolve_k(config.delta, samples.size(), config.k_rule, config.odd_k);
    const BlockPartition partition = make_partition(samples, static_cast<std::size_t>(rk.k));
    DescentConfig dc = config.descent;
    dc.seed = config.seed;
    if (rk.k == 1 || samples.dim() == 1)
        return lm_estimate(samples, partition, dc, partition.block_means()[0]);
    const Vec init = geometric_median(partition.block_means());
    return lm_estimate(samples, partition, dc, init);
}

}  // namespace robustmean
