#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "robustmean/distributions.hpp"
#include "test_util.hpp"

using namespace robustmean;

namespace {

// Empirical mean and covariance of n draws, streamed in chunks.
void empirical_moments(const DistributionSpec& spec, std::size_t n, Vec& mean, Matrix& cov) {
    SplitMix64 rng(spec.seed);
    const std::size_t d = spec.dim;
    mean.assign(d, 0.0);
    cov.assign(d, Vec(d, 0.0));
    std::size_t remaining = n;
    while (remaining > 0) {
        const std::size_t chunk = std::min<std::size_t>(remaining, 100000);
        const SampleSet draws = sample(spec, chunk, rng);
        for (const Vec& x : draws.points())
            for (std::size_t i = 0; i < d; ++i) {
                mean[i] += x[i];
                for (std::size_t j = 0; j < d; ++j) cov[i][j] += x[i] * x[j];
            }
        remaining -= chunk;
    }
    for (std::size_t i = 0; i < d; ++i) mean[i] /= static_cast<double>(n);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            cov[i][j] = cov[i][j] / static_cast<double>(n) - mean[i] * mean[j];
}

double frobenius(const Matrix& m) {
    double s = 0.0;
    for (const Vec& row : m)
        for (double v : row) s += v * v;
    return std::sqrt(s);
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    Matrix out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) out[i][j] -= b[i][j];
    return out;
}

}  // namespace

TEST_CASE("sampling is deterministic per seed", "[distributions]") {
    auto spec = DistributionSpec::isotropic(Family::kStudentT, 3);
    spec.nu = 2.5;
    spec.seed = 77;
    const SampleSet a = sample(spec, 50);
    const SampleSet b = sample(spec, 50);
    REQUIRE(a.points() == b.points());
    spec.seed = 78;
    REQUIRE(sample(spec, 50).points() != a.points());
}

TEST_CASE("zero scale collapses to a point mass", "[distributions]") {
    auto spec = DistributionSpec::isotropic(Family::kGaussian, 2, 0.0);
    spec.mean = {3.0, -1.0};
    const SampleSet s = sample(spec, 25);
    for (const Vec& p : s.points()) REQUIRE(p == spec.mean);
    const MomentSummary mom = moments(spec);
    REQUIRE(mom.trace == 0.0);
    REQUIRE(mom.lambda_max == 0.0);
}

TEST_CASE("parameter validation rejects thin tails", "[distributions]") {
    auto spec = DistributionSpec::isotropic(Family::kStudentT, 2);
    spec.nu = 2.0;
    REQUIRE_THROWS_AS(sample(spec, 1), invalid_parameter);
    auto pareto = DistributionSpec::isotropic(Family::kParetoMarginals, 2);
    pareto.alpha = 1.5;
    REQUIRE_THROWS_AS(moments(pareto), invalid_parameter);
}

TEST_CASE("gaussian empirical covariance approaches identity", "[distributions]") {
    auto spec = DistributionSpec::isotropic(Family::kGaussian, 2);
    spec.seed = 5;
    Vec mean;
    Matrix cov;
    empirical_moments(spec, 1000000, mean, cov);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            REQUIRE(std::abs(cov[i][j] - (i == j ? 1.0 : 0.0)) < 0.01);
}

TEST_CASE("centered pareto marginals match the closed form", "[distributions]") {
    // alpha = 3, x_m = 1: raw mean 1.5, centered variance 0.75
    auto spec = DistributionSpec::isotropic(Family::kParetoMarginals, 1);
    spec.alpha = 3.0;
    spec.seed = 2;
    SplitMix64 rng(spec.seed);
    const std::size_t n = 10000000;
    double sum_raw = 0.0, sum_sq = 0.0;
    std::size_t remaining = n;
    while (remaining > 0) {
        const std::size_t chunk = std::min<std::size_t>(remaining, 100000);
        const SampleSet draws = sample(spec, chunk, rng);
        for (const Vec& x : draws.points()) {
            sum_raw += x[0] + 1.5;  // un-center to check the raw mean
            sum_sq += x[0] * x[0];
        }
        remaining -= chunk;
    }
    const double raw_mean = sum_raw / static_cast<double>(n);
    const double variance = sum_sq / static_cast<double>(n);
    REQUIRE(raw_mean == Catch::Approx(1.5).epsilon(0.01));
    // the empirical variance of a tail-index-1.5 square converges at
    // n^(-1/3); 5% is the calibrated envelope at 1e7 draws
    REQUIRE(variance == Catch::Approx(0.75).epsilon(0.05));
    REQUIRE(moments(spec).trace == Catch::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("student-t covariance follows nu/(nu-2)", "[distributions]") {
    auto spec = DistributionSpec::isotropic(Family::kStudentT, 2);
    spec.nu = 3.0;
    spec.seed = 3;
    const MomentSummary mom = moments(spec);
    REQUIRE(mom.trace == Catch::Approx(6.0).epsilon(1e-12));
    REQUIRE(mom.lambda_max == Catch::Approx(3.0).epsilon(1e-12));
    Vec mean;
    Matrix cov;
    empirical_moments(spec, 10000000, mean, cov);
    REQUIRE(frobenius(subtract(cov, mom.covariance)) / frobenius(mom.covariance) < 0.02);
}

TEST_CASE("every family matches its closed-form covariance", "[distributions]") {
    std::vector<DistributionSpec> specs;
    {
        auto g = DistributionSpec::isotropic(Family::kGaussian, 3, 1.3);
        g.mean = {1.0, -2.0, 0.5};
        g.scale[0][1] = 0.4;  // correlated coordinates
        specs.push_back(g);
    }
    {
        auto t = DistributionSpec::isotropic(Family::kStudentT, 2, 0.8);
        t.nu = 4.0;
        specs.push_back(t);
    }
    {
        auto p = DistributionSpec::isotropic(Family::kParetoMarginals, 2, 1.1);
        p.alpha = 3.5;
        specs.push_back(p);
    }
    {
        auto l = DistributionSpec::isotropic(Family::kLogNormal, 2, 1.0);
        l.sdlog = 0.4;
        specs.push_back(l);
    }
    {
        auto o = DistributionSpec::isotropic(Family::kGaussianOutliers, 2, 1.0);
        o.outlier_prob = 0.05;
        o.outlier_scale = 5.0;
        specs.push_back(o);
    }
    int seed = 40;
    for (auto& spec : specs) {
        spec.seed = static_cast<std::uint64_t>(seed++);
        const bool heavy = spec.family == Family::kStudentT ||
                           spec.family == Family::kParetoMarginals;
        const std::size_t draws = heavy ? 10000000 : 1000000;
        const double tol = heavy ? 0.05 : 0.02;
        const MomentSummary mom = moments(spec);
        Vec mean;
        Matrix cov;
        empirical_moments(spec, draws, mean, cov);
        REQUIRE(frobenius(subtract(cov, mom.covariance)) / frobenius(mom.covariance) < tol);
        for (std::size_t i = 0; i < spec.dim; ++i)
            REQUIRE(mean[i] == Catch::Approx(spec.mean[i]).margin(0.02));
    }
}

TEST_CASE("diagonal covariance reports its trace and top eigenvalue", "[distributions]") {
    auto spec = DistributionSpec::isotropic(Family::kGaussian, 2);
    spec.scale = {{2.0, 0.0}, {0.0, 1.0}};  // Sigma = diag(4, 1)
    const MomentSummary mom = moments(spec);
    REQUIRE(mom.trace == 5.0);
    REQUIRE(mom.lambda_max == 4.0);
}

TEST_CASE("moment summaries are symmetric with consistent trace", "[distributions]") {
    auto spec = DistributionSpec::isotropic(Family::kGaussian, 3, 2.0);
    spec.scale[1][0] = 0.7;
    spec.scale[2][1] = -0.3;
    const MomentSummary mom = moments(spec);
    double diag = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        diag += mom.covariance[i][i];
        for (std::size_t j = 0; j < 3; ++j)
            REQUIRE(mom.covariance[i][j] == Catch::Approx(mom.covariance[j][i]).margin(1e-12));
    }
    REQUIRE(mom.trace == Catch::Approx(diag).margin(1e-12));
    REQUIRE(mom.trace >= mom.lambda_max);
}

TEST_CASE("power method matches diagonal and constructed spectra", "[distributions]") {
    REQUIRE(power_method_lambda_max({{4.0, 0.0}, {0.0, 1.0}}) == 4.0);
    REQUIRE(power_method_lambda_max({{0.0, 0.0}, {0.0, 0.0}}) == 0.0);

    // 2x2 closed form
    const Matrix m{{2.0, 1.0}, {1.0, 3.0}};
    const double expected = (5.0 + std::sqrt(5.0)) / 2.0;
    REQUIRE(power_method_lambda_max(m) == Catch::Approx(expected).epsilon(1e-9));

    // Q diag(5, 2, 1) Q^T for a random orthogonal Q
    SplitMix64 rng(44);
    const Matrix q = testutil::random_orthogonal(rng, 3);
    Matrix built(3, Vec(3, 0.0));
    const Vec eig{5.0, 2.0, 1.0};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t e = 0; e < 3; ++e) built[i][j] += q[e][i] * eig[e] * q[e][j];
    REQUIRE(power_method_lambda_max(built) == Catch::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("distribution specs round-trip through json", "[distributions]") {
    auto spec = DistributionSpec::isotropic(Family::kParetoMarginals, 2, 1.5);
    spec.alpha = 2.7;
    spec.mean = {1.0, 2.0};
    spec.seed = 9;
    const nlohmann::json j = spec;
    const DistributionSpec back = j.get<DistributionSpec>();
    REQUIRE(back.family == spec.family);
    REQUIRE(back.dim == spec.dim);
    REQUIRE(back.mean == spec.mean);
    REQUIRE(back.scale == spec.scale);
    REQUIRE(back.alpha == spec.alpha);
    REQUIRE(back.seed == spec.seed);

    const nlohmann::json bad{{"family", "cauchy"}};
    REQUIRE_THROWS_AS(bad.get<DistributionSpec>(), invalid_parameter);
}
