// Map how reliably the true mean defeats probes at growing radii.

#include <cstdio>

#include "robustmean/robustmean.hpp"

int main() {
    using namespace robustmean;

    const auto spec = DistributionSpec::isotropic(Family::kGaussian, 3);
    EstimatorConfig config;
    const std::vector<double> multipliers{0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0};

    const auto report = verify_geometry(spec, 1800, 0.1, multipliers, 100, 200, config, 4);

    std::printf("gaussian d=3, N=%zu, k=%d, practical radius r=%.4f, %d+%d probes\n",
                report.n, report.k, report.r_hat, report.probes, report.axis_probes);
    std::printf("%-10s %18s %18s\n", "multiplier", "all-defeated", "per-probe");
    for (std::size_t i = 0; i < multipliers.size(); ++i)
        std::printf("%-10g %18.3f %18.3f\n", report.multipliers[i],
                    report.all_defeated_fraction[i], report.probe_defeated_fraction[i]);
    return 0;
}
