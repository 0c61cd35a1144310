#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace perclab {

// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

struct EstimateWithCI {
    double estimate = 0.0;
    double stderr = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t samples = 0;
    std::vector<std::string> warnings;

    // Normal-approximation interval at 99%.
    static EstimateWithCI normal(double estimate, double stderr, std::uint64_t samples);
};

// Wilson score interval for a proportion observed over n trials.
Interval wilson_interval(double phat, double n, double z = kZ99);

// Mean and standard error of a sample sequence, summed in index order.
EstimateWithCI mean_estimate(std::span<const double> values);

}  // namespace perclab
