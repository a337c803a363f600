#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "robustmean/rng.hpp"
#include "robustmean/samples.hpp"

namespace robustmean {

// Outcome of one pairwise comparison over a partition: per-block wins for
// each candidate plus exact-tie blocks. A candidate defeats the other when
// it holds a strict majority of strict block wins.
struct DefeatVerdict {
    int blocks_for_a = 0;
    int blocks_for_b = 0;
    int ties = 0;
    int k = 0;

    bool a_defeats_b() const { return 2 * blocks_for_a > k; }
    bool b_defeats_a() const { return 2 * blocks_for_b > k; }
};

enum class DirectionRule { kAxisCycling, kRandomSphere };

struct DescentConfig {
    int max_iterations = 200;
    double step_tolerance = 1e-9;  // relative to diam({Z_j})
    DirectionRule direction_rule = DirectionRule::kRandomSphere;
    bool axis_presweep = true;     // one e_1..e_d sweep before the main loop
    bool select_best = true;       // return the envelope-best visited point
    int envelope_probes = 64;      // random directions scoring the envelope
    std::uint64_t seed = 0;
};

struct DescentStats {
    int iterations = 0;       // main-loop line searches performed
    double last_step = 0.0;   // length of the final step taken
    bool converged = false;   // stopped on step tolerance rather than budget
};

namespace detail {

// Relative tie tolerance on all strict comparisons, so verdicts do not flap
// on float noise.
constexpr double kTieRel = 1e-12;

}  // namespace detail

// Raw-data comparison: block j favors `a` when the block average of
// (||X_i - b||^2 - ||X_i - a||^2) is positive. Ties are declared within
// 1e-12 of the largest block-averaged squared distance in play.
inline DefeatVerdict defeats_raw(const Vec& a, const Vec& b, const SampleSet& samples,
                                 const BlockPartition& partition) {
    if (a.size() != samples.dim() || b.size() != samples.dim())
        throw invalid_parameter("defeats_raw: candidate dimension mismatch");
    const std::size_t k = partition.k();
    std::vector<double> margin(k);
    double scale = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const auto& block = partition.blocks()[j];
        double sum_a = 0.0, sum_b = 0.0;
        for (std::size_t i : block) {
            if (i >= samples.size()) throw corrupt_partition("defeats_raw: index out of range");
            sum_a += dist_sq(samples[i], a);
            sum_b += dist_sq(samples[i], b);
        }
        const double inv = 1.0 / static_cast<double>(block.size());
        margin[j] = (sum_b - sum_a) * inv;
        scale = std::max(scale, (sum_a + sum_b) * inv);
    }
    DefeatVerdict v;
    v.k = static_cast<int>(k);
    const double tol = detail::kTieRel * scale;
    for (double m : margin) {
        if (std::abs(m) <= tol)
            ++v.ties;
        else if (m > 0.0)
            ++v.blocks_for_a;
        else
            ++v.blocks_for_b;
    }
    return v;
}

// Block-mean comparison: block j favors `a` when ||Z_j - b|| > ||Z_j - a||.
// Algebraically identical to defeats_raw; only the block means are read.
inline DefeatVerdict defeats_blockform(const Vec& a, const Vec& b,
                                       const BlockPartition& partition) {
    if (a.size() != partition.dim() || b.size() != partition.dim())
        throw invalid_parameter("defeats_blockform: candidate dimension mismatch");
    const auto& means = partition.block_means();
    const double tol = detail::kTieRel * diameter(means);
    DefeatVerdict v;
    v.k = static_cast<int>(partition.k());
    for (const Vec& z : means) {
        const double da = dist(z, a);
        const double db = dist(z, b);
        if (std::abs(da - db) <= tol)
            ++v.ties;
        else if (db > da)
            ++v.blocks_for_a;
        else
            ++v.blocks_for_b;
    }
    return v;
}

// Closed-form tournament winner on the line p(t) = p0 + t*u: block j favors
// the candidate whose parameter lies closer to the projection
// s_j = <Z_j - p0, u>, so the winner sits at the lower median of the
// projections. It defeats or ties every other point of the line.
inline Vec line_winner(const Vec& p0, const Vec& u, const BlockPartition& partition) {
    if (p0.size() != partition.dim() || u.size() != partition.dim())
        throw invalid_parameter("line_winner: dimension mismatch");
    if (std::abs(norm(u) - 1.0) > 1e-9)
        throw invalid_parameter("line_winner: direction must be a unit vector");
    const auto& means = partition.block_means();
    std::vector<double> proj(means.size());
    for (std::size_t j = 0; j < means.size(); ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < u.size(); ++c) s += (means[j][c] - p0[c]) * u[c];
        proj[j] = s;
    }
    const double t = lower_median(std::move(proj));
    Vec out = p0;
    add_scaled(out, t, u);
    return out;
}

namespace detail {

// Sampled diameter of the undefeated set of p. Along the ray p + t*u the
// undefeated set is exactly the segment t in [0, 2*(median projection)+],
// so the set is star-shaped around p and its probed ray endpoints are true
// members. The pairwise diameter of those endpoints (plus p itself) lower
// bounds diam(S_p^c) and converges to it as the probe set fills the sphere.
// Used to rank visited iterates; smaller is more central.
inline double sampled_sac_diameter(const std::vector<Vec>& means, const Vec& p,
                                   const std::vector<Vec>& directions) {
    const std::size_t d = p.size();
    std::vector<Vec> endpoints{p};
    std::vector<double> proj(means.size());
    std::vector<double> neg(means.size());
    for (const Vec& u : directions) {
        for (std::size_t j = 0; j < means.size(); ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += (means[j][c] - p[c]) * u[c];
            proj[j] = s;
            neg[j] = -s;
        }
        const double reach_pos = lower_median(proj);
        const double reach_neg = lower_median(neg);
        if (reach_pos > 0.0) {
            Vec e = p;
            add_scaled(e, 2.0 * reach_pos, u);
            endpoints.push_back(std::move(e));
        }
        if (reach_neg > 0.0) {
            Vec e = p;
            add_scaled(e, -2.0 * reach_neg, u);
            endpoints.push_back(std::move(e));
        }
    }
    return diameter(endpoints);
}

}  // namespace detail

// Iterated line search over directions from the configured rule. The walk
// counts as converged after d consecutive steps shorter than
// step_tolerance * diam({Z_j}); a single short step along one direction
// says nothing about the others. The walk keeps bouncing inside the central
// undefeated region instead of settling, so by default the visited point
// with the smallest sampled undefeated-set diameter is returned rather than
// the last one.
inline Vec descend(const BlockPartition& partition, const Vec& start,
                   const DescentConfig& config, DescentStats* stats = nullptr) {
    if (start.size() != partition.dim())
        throw invalid_parameter("descend: start dimension mismatch");
    if (config.max_iterations < 1)
        throw invalid_parameter("descend: max_iterations must be >= 1");
    if (config.step_tolerance < 0.0)
        throw invalid_parameter("descend: step_tolerance must be >= 0");
    if (config.select_best && config.envelope_probes < 0)
        throw invalid_parameter("descend: envelope_probes must be >= 0");
    const std::size_t d = partition.dim();
    const auto& means = partition.block_means();
    const double tol = config.step_tolerance * diameter(means);
    SplitMix64 rng(substream_seed(config.seed, 0));

    std::vector<Vec> envelope_dirs;
    if (config.select_best) {
        envelope_dirs.reserve(d + static_cast<std::size_t>(config.envelope_probes));
        for (std::size_t i = 0; i < d; ++i) {
            Vec axis(d, 0.0);
            axis[i] = 1.0;
            envelope_dirs.push_back(std::move(axis));
        }
        SplitMix64 env_rng(substream_seed(config.seed, 1));
        for (int i = 0; i < config.envelope_probes; ++i)
            envelope_dirs.push_back(random_unit_vector(env_rng, d));
    }

    Vec p = start;
    Vec best = start;
    double best_h =
        config.select_best ? detail::sampled_sac_diameter(means, p, envelope_dirs) : 0.0;
    Vec axis(d, 0.0);
    int consecutive_small = 0;
    int iterations = 0;
    double last_step = 0.0;
    bool converged = false;

    auto step_along = [&](const Vec& u) {
        Vec q = line_winner(p, u, partition);
        last_step = dist(p, q);
        p = std::move(q);
        if (config.select_best) {
            const double h = detail::sampled_sac_diameter(means, p, envelope_dirs);
            if (h < best_h) {
                best_h = h;
                best = p;
            }
        }
        if (last_step <= tol)
            ++consecutive_small;
        else
            consecutive_small = 0;
        if (consecutive_small >= static_cast<int>(d)) converged = true;
    };

    if (config.axis_presweep) {
        for (std::size_t i = 0; i < d && !converged; ++i) {
            axis.assign(d, 0.0);
            axis[i] = 1.0;
            step_along(axis);
        }
    }
    for (int it = 0; it < config.max_iterations && !converged; ++it) {
        ++iterations;
        if (config.direction_rule == DirectionRule::kAxisCycling) {
            axis.assign(d, 0.0);
            axis[static_cast<std::size_t>(it) % d] = 1.0;
            step_along(axis);
        } else {
            step_along(random_unit_vector(rng, d));
        }
    }
    if (stats) {
        stats->iterations = iterations;
        stats->last_step = last_step;
        stats->converged = converged;
    }
    return config.select_best ? best : p;
}

// Region-restricted diameter of the undefeated set of `a` on a regular
// grid of the given spacing. A grid point x belongs when at most k/2 blocks
// put x strictly farther than a (a's own location always qualifies). The
// optional witness receives one diametral pair.
inline double sac_diameter_oracle(const Vec& a, const BlockPartition& partition,
                                  const Box& region, double mesh,
                                  std::uint64_t max_grid_points = 10'000'000,
                                  std::pair<Vec, Vec>* witness = nullptr) {
    const std::size_t d = partition.dim();
    if (a.size() != d || region.lo.size() != d || region.hi.size() != d)
        throw invalid_parameter("sac_diameter_oracle: dimension mismatch");
    if (!(mesh > 0.0)) throw invalid_parameter("sac_diameter_oracle: mesh must be positive");
    for (const Vec& z : partition.block_means())
        if (!region.contains(z))
            throw invalid_parameter("sac_diameter_oracle: region must contain every block mean");

    std::vector<std::size_t> counts(d);
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < d; ++i) {
        const double extent = region.hi[i] - region.lo[i];
        if (extent < 0.0) throw invalid_parameter("sac_diameter_oracle: empty region");
        counts[i] = static_cast<std::size_t>(std::floor(extent / mesh)) + 1;
        if (total > max_grid_points / counts[i])
            throw budget_exceeded("sac_diameter_oracle: grid exceeds " +
                                  std::to_string(max_grid_points) + " points");
        total *= counts[i];
    }

    const auto& means = partition.block_means();
    const std::size_t k = partition.k();
    std::vector<double> radius_sq(k);
    for (std::size_t j = 0; j < k; ++j) radius_sq[j] = dist_sq(means[j], a);

    auto is_member = [&](const Vec& x) {
        std::size_t outside = 0;
        for (std::size_t j = 0; j < k; ++j)
            if (dist_sq(means[j], x) > radius_sq[j]) ++outside;
        return 2 * outside <= k;
    };

    // Walk the grid with axis 0 innermost; only the first and last member
    // of each axis-0 line can be an endpoint of the diametral pair, which
    // keeps the pairwise scan small.
    std::vector<Vec> extremes;
    std::vector<std::size_t> idx(d, 0);
    Vec x(d);
    bool done = false;
    while (!done) {
        for (std::size_t i = 1; i < d; ++i)
            x[i] = region.lo[i] + mesh * static_cast<double>(idx[i]);
        bool any = false;
        Vec first, last;
        for (std::size_t i0 = 0; i0 < counts[0]; ++i0) {
            x[0] = region.lo[0] + mesh * static_cast<double>(i0);
            if (is_member(x)) {
                if (!any) {
                    first = x;
                    any = true;
                }
                last = x;
            }
        }
        if (any) {
            extremes.push_back(first);
            if (last != first) extremes.push_back(last);
        }
        done = true;
        for (std::size_t i = 1; i < d; ++i) {
            if (++idx[i] < counts[i]) {
                done = false;
                break;
            }
            idx[i] = 0;
        }
        if (d == 1) done = true;
    }

    double best = 0.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i + 1 < extremes.size(); ++i)
        for (std::size_t j = i + 1; j < extremes.size(); ++j) {
            const double dd = dist_sq(extremes[i], extremes[j]);
            if (dd > best) {
                best = dd;
                bi = i;
                bj = j;
            }
        }
    if (witness) {
        if (extremes.size() >= 2)
            *witness = {extremes[bi], extremes[bj]};
        else if (extremes.size() == 1)
            *witness = {extremes[0], extremes[0]};
        else
            *witness = {a, a};
    }
    return std::sqrt(best);
}

// Shipped approximation of the diameter-minimizing center of the block
// means: analytic in the degenerate cases (k = 1, and d = 1 where the
// minimizer is the lower median of the Z_j), line-search descent otherwise.
inline Vec lm_estimate(const SampleSet& samples, const BlockPartition& partition,
                       const DescentConfig& config, const Vec& init,
                       DescentStats* stats = nullptr) {
    if (samples.dim() != partition.dim())
        throw invalid_parameter("lm_estimate: samples and partition disagree on dimension");
    if (init.size() != partition.dim())
        throw invalid_parameter("lm_estimate: init dimension mismatch");
    const auto& means = partition.block_means();
    if (partition.k() == 1) return means[0];
    if (partition.dim() == 1) {
        std::vector<double> zs(means.size());
        for (std::size_t j = 0; j < means.size(); ++j) zs[j] = means[j][0];
        return Vec{lower_median(std::move(zs))};
    }
    return descend(partition, init, config, stats);
}

}  // namespace robustmean
