#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "robustmean/bench.hpp"

using namespace robustmean;

namespace {

const std::vector<Method> kAllMulti{Method::kSampleMean, Method::kGeoMedianOfMeans, Method::kLm};

}  // namespace

TEST_CASE("lower quantile follows the order-statistic convention", "[bench]") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
    REQUIRE(lower_quantile(v, 0.5) == 5.0);
    REQUIRE(lower_quantile(v, 0.9) == 9.0);
    REQUIRE(lower_quantile(v, 0.99) == 10.0);
    REQUIRE(lower_quantile(v, 0.05) == 1.0);
    REQUIRE(lower_quantile({42.0}, 0.5) == 42.0);
}

TEST_CASE("point mass yields an all-zero report", "[bench]") {
    auto spec = DistributionSpec::isotropic(Family::kGaussian, 2, 0.0);
    spec.mean = {1.0, -1.0};
    EstimatorConfig config;
    const auto report = run_error_experiment(spec, 40, kAllMulti, config, 5);
    for (const auto& qs : report.quantiles)
        for (double q : qs) REQUIRE(q == 0.0);
    for (double m : report.mean_error) REQUIRE(m == 0.0);
}

TEST_CASE("sample mean error sits at the predicted scale", "[bench]") {
    // d=2, identity covariance, N=400: median of ||N(0, I/400)|| is about 0.059
    const auto spec = DistributionSpec::isotropic(Family::kGaussian, 2);
    EstimatorConfig config;
    const auto report =
        run_error_experiment(spec, 400, {Method::kSampleMean}, config, 200);
    const double median = report.quantiles[0][0];
    REQUIRE(median > 0.04);
    REQUIRE(median < 0.09);
}

TEST_CASE("quantiles are monotone in the level", "[bench]") {
    auto spec = DistributionSpec::isotropic(Family::kStudentT, 3);
    spec.nu = 2.5;
    spec.seed = 17;
    EstimatorConfig config;
    config.delta = 0.05;
    const auto report = run_error_experiment(spec, 300, kAllMulti, config, 50);
    for (const auto& qs : report.quantiles) {
        REQUIRE(qs[0] <= qs[1]);  // 0.5 <= 0.9
        REQUIRE(qs[1] <= qs[2]);  // 0.9 <= 0.99
    }
}

TEST_CASE("reports are byte-identical across thread counts", "[bench]") {
    auto spec = DistributionSpec::isotropic(Family::kGaussian, 3);
    spec.seed = 4;
    EstimatorConfig config;
    config.seed = 9;
    const auto one = run_error_experiment(spec, 200, kAllMulti, config, 24, 1);
    const auto four = run_error_experiment(spec, 200, kAllMulti, config, 24, 4);
    REQUIRE(to_json_report(one).dump() == to_json_report(four).dump());
    REQUIRE(to_csv(one) == to_csv(four));

    const std::vector<double> mult{0.5, 1.0, 1000.0};
    const auto geo_one = verify_geometry(spec, 200, 0.1, mult, 20, 16, config, 1);
    const auto geo_three = verify_geometry(spec, 200, 0.1, mult, 20, 16, config, 3);
    REQUIRE(to_json_report(geo_one).dump() == to_json_report(geo_three).dump());
}

TEST_CASE("mom is rejected outside one dimension", "[bench]") {
    const auto spec = DistributionSpec::isotropic(Family::kGaussian, 2);
    EstimatorConfig config;
    REQUIRE_THROWS_AS(
        run_error_experiment(spec, 50, {Method::kMedianOfMeans}, config, 2),
        invalid_parameter);
}

TEST_CASE("far-field probes always lose", "[bench]") {
    const auto spec = DistributionSpec::isotropic(Family::kGaussian, 3);
    EstimatorConfig config;
    const auto report = verify_geometry(spec, 300, 0.1, {1000.0}, 30, 20, config);
    REQUIRE(report.all_defeated_fraction[0] == 1.0);
    REQUIRE(report.probe_defeated_fraction[0] == 1.0);
}

TEST_CASE("near-zero probes are not reliably defeated", "[bench]") {
    const auto spec = DistributionSpec::isotropic(Family::kGaussian, 3);
    EstimatorConfig config;
    const auto report = verify_geometry(spec, 300, 0.1, {1e-6}, 30, 20, config);
    REQUIRE(report.all_defeated_fraction[0] < 0.5);
}

TEST_CASE("verify_geometry validates its arguments", "[bench]") {
    const auto spec = DistributionSpec::isotropic(Family::kGaussian, 2);
    EstimatorConfig config;
    REQUIRE_THROWS_AS(verify_geometry(spec, 50, 0.1, {}, 10, 2, config), invalid_parameter);
    REQUIRE_THROWS_AS(verify_geometry(spec, 50, 0.1, {-1.0}, 10, 2, config), invalid_parameter);
    REQUIRE_THROWS_AS(verify_geometry(spec, 50, 0.1, {1.0}, 0, 2, config), invalid_parameter);
}

TEST_CASE("rate sweep runs one report per grid point", "[bench]") {
    const auto spec = DistributionSpec::isotropic(Family::kGaussian, 2);
    EstimatorConfig config;
    const auto reports = rate_sweep(spec, {100, 200}, 0.05, {Method::kLm}, config, 5);
    REQUIRE(reports.size() == 2);
    REQUIRE(reports[0].n == 100);
    REQUIRE(reports[1].n == 200);
    REQUIRE_THROWS_AS(rate_sweep(spec, {200, 100}, 0.05, {Method::kLm}, config, 5),
                      invalid_parameter);
    REQUIRE_THROWS_AS(rate_sweep(spec, {}, 0.05, {Method::kLm}, config, 5), invalid_parameter);

    auto point_mass = DistributionSpec::isotropic(Family::kGaussian, 2, 0.0);
    const auto zero = rate_sweep(point_mass, {50}, 0.05, {Method::kLm}, config, 3);
    REQUIRE(zero[0].quantiles[0][0] == 0.0);
}

TEST_CASE("lm stays within the paper bound when the paper rule fits", "[bench]") {
    // delta = 0.5: paper rule gives k = 501, feasible at N = 2000
    const auto spec = DistributionSpec::isotropic(Family::kGaussian, 2);
    EstimatorConfig config;
    config.delta = 0.5;
    config.k_rule = KSelection::paper();
    const auto report = run_error_experiment(spec, 2000, {Method::kLm}, config, 10);
    REQUIRE(report.paper_rule_feasible);
    REQUIRE(report.k == 501);
    REQUIRE(report.lm_within_paper_bound);
}

TEST_CASE("report serialization carries the schema contract", "[bench]") {
    const auto spec = DistributionSpec::isotropic(Family::kGaussian, 2);
    EstimatorConfig config;
    const auto report = run_error_experiment(spec, 60, kAllMulti, config, 4);
    const nlohmann::json j = to_json_report(report);
    REQUIRE(j["schema_version"] == 1);
    REQUIRE(j["kind"] == "error_quantiles");
    REQUIRE(j["methods"].contains("lm"));
    REQUIRE(j["methods"]["lm"]["quantiles"].size() == 4);
    REQUIRE(j["radius"]["practical"]["profile"] == "practical");

    const std::string csv = to_csv(report);
    std::size_t rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    REQUIRE(rows == 1 + kAllMulti.size() * 4);
    REQUIRE(csv.rfind("method,quantile,error\n", 0) == 0);

    const auto geo = verify_geometry(spec, 60, 0.1, {1.0, 2.0}, 5, 3, config);
    const nlohmann::json gj = to_json_report(geo);
    REQUIRE(gj["schema_version"] == 1);
    REQUIRE(gj["kind"] == "geometry");
    REQUIRE(gj["multipliers"].size() == 2);

    const auto sweep = rate_sweep(spec, {50, 100}, 0.05, {Method::kLm}, config, 2);
    const std::string sweep_csv = to_csv(sweep);
    REQUIRE(sweep_csv.rfind("n,method,quantile,error\n", 0) == 0);
    std::size_t sweep_rows = 0;
    for (char c : sweep_csv)
        if (c == '\n') ++sweep_rows;
    REQUIRE(sweep_rows == 1 + 2 * 4);
}
