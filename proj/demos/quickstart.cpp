// Compare the estimators on heavy-tailed data with a known mean.

#include <cstdio>

#include "robustmean/robustmean.hpp"

int main() {
    using namespace robustmean;

    auto spec = DistributionSpec::isotropic(Family::kStudentT, 4);
    spec.nu = 2.5;
    spec.seed = 1;

    EstimatorConfig config;
    config.delta = 0.01;

    const auto report = run_error_experiment(
        spec, 2000, {Method::kSampleMean, Method::kGeoMedianOfMeans, Method::kLm}, config, 100);

    std::printf("student-t(nu=2.5), d=4, N=2000, %d trials, k=%d\n", report.trials, report.k);
    std::printf("%-14s %10s %10s %10s\n", "method", "median", "q0.99", "mean");
    for (std::size_t m = 0; m < report.methods.size(); ++m)
        std::printf("%-14s %10.4f %10.4f %10.4f\n", method_name(report.methods[m]),
                    report.quantiles[m][0], report.quantiles[m][2], report.mean_error[m]);
    std::printf("practical radius r = %.4f\n", report.radius_practical.r);
    return 0;
}
