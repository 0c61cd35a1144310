#include "perclab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "perclab/series_exact.hpp"

namespace perclab {

EstimateWithCI EstimateWithCI::normal(double estimate, double stderr, std::uint64_t samples) {
    EstimateWithCI out;
    out.estimate = estimate;
    out.stderr = stderr;
    out.ci_low = estimate - kZ99 * stderr;
    out.ci_high = estimate + kZ99 * stderr;
    out.samples = samples;
    return out;
}

Interval wilson_interval(double phat, double n, double z) {
    if (n <= 0.0) return {0.0, 1.0};
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(std::max(0.0, phat * (1.0 - phat) / n + z2 / (4.0 * n * n))) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

EstimateWithCI mean_estimate(std::span<const double> values) {
    const auto n = values.size();
    if (n == 0) return {};
    series::CompensatedSum sum;
    for (double v : values) sum.add(v);
    const double mean = sum.value() / static_cast<double>(n);
    series::CompensatedSum sq;
    for (double v : values) sq.add((v - mean) * (v - mean));
    const double var = n > 1 ? sq.value() / static_cast<double>(n - 1) : 0.0;
    return EstimateWithCI::normal(mean, std::sqrt(var / static_cast<double>(n)), n);
}

}  // namespace perclab
