#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "robustmean/rng.hpp"
#include "robustmean/samples.hpp"

namespace robustmean {

enum class Family { kGaussian, kStudentT, kParetoMarginals, kLogNormal, kGaussianOutliers };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::kGaussian: return "gaussian";
        case Family::kStudentT: return "student-t";
        case Family::kParetoMarginals: return "pareto";
        case Family::kLogNormal: return "lognormal";
        case Family::kGaussianOutliers: return "gaussian-outliers";
    }
    return "gaussian";
}

inline std::optional<Family> family_from_name(const std::string& name) {
    if (name == "gaussian") return Family::kGaussian;
    if (name == "student-t") return Family::kStudentT;
    if (name == "pareto") return Family::kParetoMarginals;
    if (name == "lognormal") return Family::kLogNormal;
    if (name == "gaussian-outliers") return Family::kGaussianOutliers;
    return std::nullopt;
}

// Sampler specification with closed-form mean and covariance. Every family
// is an affine image  X = mean + scale * Y  of i.i.d. centered coordinates
// Y with unit-free variance factor, so Sigma = factor * scale * scale^T.
struct DistributionSpec {
    Family family = Family::kGaussian;
    std::size_t dim = 1;
    Vec mean;                      // defaults to zeros(dim)
    Matrix scale;                  // defaults to identity(dim)
    double nu = 3.0;               // student-t degrees of freedom  (> 2)
    double alpha = 3.0;            // pareto tail index             (> 2)
    double sdlog = 0.5;            // lognormal log-scale           (>= 0)
    double outlier_prob = 0.05;    // gaussian-outliers mixture weight
    double outlier_scale = 10.0;   // gaussian-outliers inflation
    std::uint64_t seed = 0;

    static DistributionSpec isotropic(Family family, std::size_t dim, double sigma = 1.0) {
        DistributionSpec spec;
        spec.family = family;
        spec.dim = dim;
        spec.mean = Vec(dim, 0.0);
        spec.scale = identity_matrix(dim);
        for (std::size_t i = 0; i < dim; ++i) spec.scale[i][i] = sigma;
        return spec;
    }
};

struct MomentSummary {
    Vec mean;
    Matrix covariance;
    double trace = 0.0;
    double lambda_max = 0.0;
};

// Parameter checks shared by sample() and moments().
inline void validate_spec(const DistributionSpec& spec) {
    if (spec.dim < 1) throw invalid_parameter("DistributionSpec: dim must be >= 1");
    if (spec.mean.size() != spec.dim)
        throw invalid_parameter("DistributionSpec: mean has wrong dimension");
    if (spec.scale.size() != spec.dim)
        throw invalid_parameter("DistributionSpec: scale must be d x d");
    for (const Vec& row : spec.scale)
        if (row.size() != spec.dim)
            throw invalid_parameter("DistributionSpec: scale must be d x d");
    if (spec.family == Family::kStudentT && !(spec.nu > 2.0))
        throw invalid_parameter("DistributionSpec: student-t needs nu > 2");
    if (spec.family == Family::kParetoMarginals && !(spec.alpha > 2.0))
        throw invalid_parameter("DistributionSpec: pareto needs alpha > 2");
    if (spec.family == Family::kLogNormal && !(spec.sdlog >= 0.0))
        throw invalid_parameter("DistributionSpec: lognormal needs sdlog >= 0");
    if (spec.family == Family::kGaussianOutliers &&
        !(spec.outlier_prob >= 0.0 && spec.outlier_prob <= 1.0 && spec.outlier_scale >= 0.0))
        throw invalid_parameter("DistributionSpec: bad outlier mixture parameters");
}

namespace detail {

// Marsaglia-Tsang; requires shape > 1, which holds for every nu > 2.
inline double gamma_draw(SplitMix64& rng, double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = rng.next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

inline double chi_square_draw(SplitMix64& rng, double dof) {
    return 2.0 * gamma_draw(rng, dof / 2.0);
}

// Variance of each centered coordinate before the linear map.
inline double variance_factor(const DistributionSpec& spec) {
    switch (spec.family) {
        case Family::kGaussian:
            return 1.0;
        case Family::kStudentT:
            return spec.nu / (spec.nu - 2.0);
        case Family::kParetoMarginals: {
            const double a = spec.alpha;
            return a / ((a - 1.0) * (a - 1.0) * (a - 2.0));
        }
        case Family::kLogNormal: {
            const double s2 = spec.sdlog * spec.sdlog;
            return (std::exp(s2) - 1.0) * std::exp(s2);
        }
        case Family::kGaussianOutliers:
            return 1.0 - spec.outlier_prob +
                   spec.outlier_prob * spec.outlier_scale * spec.outlier_scale;
    }
    return 1.0;
}

inline void draw_centered(const DistributionSpec& spec, SplitMix64& rng, Vec& y) {
    const std::size_t d = spec.dim;
    switch (spec.family) {
        case Family::kGaussian:
            for (std::size_t i = 0; i < d; ++i) y[i] = rng.next_normal();
            break;
        case Family::kStudentT: {
            for (std::size_t i = 0; i < d; ++i) y[i] = rng.next_normal();
            const double w = chi_square_draw(rng, spec.nu);
            const double f = std::sqrt(spec.nu / w);
            for (std::size_t i = 0; i < d; ++i) y[i] *= f;
            break;
        }
        case Family::kParetoMarginals: {
            // inverse CDF with x_m = 1, centered at the mean alpha/(alpha-1)
            const double m = spec.alpha / (spec.alpha - 1.0);
            for (std::size_t i = 0; i < d; ++i)
                y[i] = std::pow(1.0 - rng.next_double(), -1.0 / spec.alpha) - m;
            break;
        }
        case Family::kLogNormal: {
            const double m = std::exp(0.5 * spec.sdlog * spec.sdlog);
            for (std::size_t i = 0; i < d; ++i)
                y[i] = std::exp(spec.sdlog * rng.next_normal()) - m;
            break;
        }
        case Family::kGaussianOutliers: {
            const double f = rng.next_double() < spec.outlier_prob ? spec.outlier_scale : 1.0;
            for (std::size_t i = 0; i < d; ++i) y[i] = f * rng.next_normal();
            break;
        }
    }
}

}  // namespace detail

// n i.i.d. draws from an explicit stream (parallel callers pass disjoint
// substreams).
inline SampleSet sample(const DistributionSpec& spec, std::size_t n, SplitMix64& rng) {
    validate_spec(spec);
    if (n < 1) throw invalid_parameter("sample: need n >= 1");
    std::vector<Vec> points(n, Vec(spec.dim));
    Vec y(spec.dim);
    for (std::size_t t = 0; t < n; ++t) {
        detail::draw_centered(spec, rng, y);
        Vec& x = points[t];
        for (std::size_t i = 0; i < spec.dim; ++i) x[i] = spec.mean[i] + dot(spec.scale[i], y);
    }
    return SampleSet(std::move(points));
}

inline SampleSet sample(const DistributionSpec& spec, std::size_t n) {
    SplitMix64 rng(spec.seed);
    return sample(spec, n, rng);
}

// Largest eigenvalue of a symmetric PSD matrix by power iteration with a
// deterministic start; exact diagonal matrices short-circuit to the
// largest diagonal entry.
inline double power_method_lambda_max(const Matrix& m, double tol = 1e-10, int max_iter = 10000) {
    const std::size_t d = m.size();
    if (d == 0) throw invalid_parameter("power_method_lambda_max: empty matrix");
    bool diagonal = true;
    double max_diag = 0.0;
    double trace = 0.0;
    for (std::size_t i = 0; i < d && diagonal; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            if (i == j) continue;
            if (m[i][j] != 0.0) {
                diagonal = false;
                break;
            }
        }
    for (std::size_t i = 0; i < d; ++i) {
        max_diag = std::max(max_diag, m[i][i]);
        trace += m[i][i];
    }
    if (diagonal) return max_diag;

    Vec v(d);
    for (std::size_t i = 0; i < d; ++i)
        v[i] = 1.0 + static_cast<double>(i + 1) / static_cast<double>(d + 1);
    double nv = norm(v);
    for (double& c : v) c /= nv;

    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vec w = mat_vec(m, v);
        const double next = dot(v, w);  // Rayleigh quotient, ||v|| = 1
        const double nw = norm(w);
        if (nw == 0.0) return 0.0;
        for (std::size_t i = 0; i < d; ++i) v[i] = w[i] / nw;
        if (it > 0 && std::abs(next - lambda) <= tol * std::max(trace, 1e-300)) return next;
        lambda = next;
    }
    return lambda;
}

// Exact mean and covariance of the spec, plus trace and lambda_max.
inline MomentSummary moments(const DistributionSpec& spec) {
    validate_spec(spec);
    MomentSummary out;
    out.mean = spec.mean;
    const double c = detail::variance_factor(spec);
    out.covariance = mat_mul_self_t(spec.scale);
    for (Vec& row : out.covariance)
        for (double& v : row) v *= c;
    for (std::size_t i = 0; i < spec.dim; ++i) out.trace += out.covariance[i][i];
    out.lambda_max = power_method_lambda_max(out.covariance);
    return out;
}

inline void to_json(nlohmann::json& j, const DistributionSpec& spec) {
    j = nlohmann::json{{"family", family_name(spec.family)},
                       {"d", spec.dim},
                       {"mean", spec.mean},
                       {"scale", spec.scale},
                       {"seed", spec.seed}};
    switch (spec.family) {
        case Family::kStudentT: j["nu"] = spec.nu; break;
        case Family::kParetoMarginals: j["alpha"] = spec.alpha; break;
        case Family::kLogNormal: j["sdlog"] = spec.sdlog; break;
        case Family::kGaussianOutliers:
            j["outlier_prob"] = spec.outlier_prob;
            j["outlier_scale"] = spec.outlier_scale;
            break;
        case Family::kGaussian: break;
    }
}

inline void from_json(const nlohmann::json& j, DistributionSpec& spec) {
    const std::string fam = j.value("family", std::string("gaussian"));
    const auto parsed = family_from_name(fam);
    if (!parsed) throw invalid_parameter("DistributionSpec: unknown family '" + fam + "'");
    spec.family = *parsed;
    spec.dim = j.value("d", std::size_t{1});
    spec.mean = j.contains("mean") ? j.at("mean").get<Vec>() : Vec(spec.dim, 0.0);
    spec.scale = j.contains("scale") ? j.at("scale").get<Matrix>() : identity_matrix(spec.dim);
    spec.nu = j.value("nu", 3.0);
    spec.alpha = j.value("alpha", 3.0);
    spec.sdlog = j.value("sdlog", 0.5);
    spec.outlier_prob = j.value("outlier_prob", 0.05);
    spec.outlier_scale = j.value("outlier_scale", 10.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    validate_spec(spec);
}

}  // namespace robustmean
