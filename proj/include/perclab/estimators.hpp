#pragma once

// Derived quantities from two-point tables: decay rates, line sums, the tilted
// susceptibility, the triangle diagram, and threshold searches.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "perclab/perc_mc.hpp"
#include "perclab/stats.hpp"

namespace perclab::est {

using graph::BallSpec;
using mc::TwoPointTable;

class InsufficientSignal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BracketFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DecayEstimate {
    // max over k >= 1 of tau(k)^(1/k); ties go to the larger k.
    double sup_estimate = 0.0;
    int sup_index = 0;
    double sup_stderr = 0.0;
    // exp(slope) of a weighted least-squares fit of log tau(k) on [window_lo, window_hi].
    double regression_estimate = 0.0;
    int window_lo = 0;
    int window_hi = 0;
    double stderr = 0.0;
    bool bootstrap = false;
    std::vector<std::string> warnings;
};

// Tree direction: tau(n, 0) for n = 1..R.
DecayEstimate alpha_hat(const TwoPointTable& table);
// Line direction: tau(0, m) for m = 1..M.
DecayEstimate beta_hat(const TwoPointTable& table);

// Sum over the line of tau(o, (x, m)) with |x| = n, m in [-M, M].
EstimateWithCI I_hat(const TwoPointTable& table, int n);
// Sum over the line of tau(o, (x, m))^2.
EstimateWithCI II_hat(const TwoPointTable& table, int n);

// Sum over x in the tree sphere of radius n of Delta(o, x)^(1/2).
double tilted_sphere_weight(int d, int n);

struct TiltedSusceptibility {
    EstimateWithCI chi;  // truncated at the table's tree radius
    // Bound on the omitted spheres: C * sum_{n > R} r^n W(n) with r = alpha + one
    // regression stderr and C = max_n I(n) / r^n; infinite when r >= 1/sqrt(b).
    double tail = 0.0;
    bool tail_finite = true;
    double r = 0.0;
    double upper() const { return chi.estimate + tail; }
};

TiltedSusceptibility chi_tilted_hat(const TwoPointTable& table);

// Untilted box susceptibility, sum of tau(o, x) over the whole box.
EstimateWithCI chi_hat(const TwoPointTable& table);

// Triangle diagram over a sum domain D inside the table's box, with every
// factor read from the table by orbit: sum over x, y in D of
// tau(o,x) tau(x,y) tau(y,o). Pair distances reach 2 * (domain radius), so the
// domain defaults to (floor(R/2), floor(M/2)). Errors are propagated linearly
// with absolute sensitivities, an upper bound under any correlation.
EstimateWithCI nabla_from_table(const TwoPointTable& table, std::optional<BallSpec> domain = std::nullopt);

// Sum over x in D of tau(o, x)^2 (D defaults to the whole table box).
EstimateWithCI square_sum(const TwoPointTable& table, std::optional<BallSpec> domain = std::nullopt);

struct Probe {
    double p = 0.0;
    double value = 0.0;
    double stderr = 0.0;
    double beta = 0.0;
    double beta_stderr = 0.0;
};

struct ThresholdEstimate {
    double p_hat = 0.0;
    double p_lo = 0.0;
    double p_hi = 1.0;
    double target = 0.0;
    int iterations = 0;
    // Standard error of the probed statistic at the bracket ends, divided by
    // its slope across the bracket.
    double noise_floor = 0.0;
    std::vector<Probe> probes;  // in evaluation order
};

struct PuBudget {
    BallSpec box{3, 10, 30};
    std::uint64_t samples = 20000;
    std::uint64_t base_seed = 1;
    unsigned threads = 1;
    double tolerance = 0.01;
    int max_iterations = 40;
};

// Bisection on p of alpha_sup(p) - 1/sqrt(b). Every probe uses the same
// configurations, so alpha_sup is nondecreasing in p and the search is
// well-posed. Throws BracketFailure when alpha never reaches the target.
ThresholdEstimate p_u_by_alpha_inversion(int d, const PuBudget& budget);

struct PcBudget {
    BallSpec small{3, 3, 4};
    BallSpec large{3, 6, 8};
    std::uint64_t samples = 4000;
    std::uint64_t base_seed = 1;
    unsigned threads = 1;
    double grid_start = 0.05;
    double grid_stop = 0.95;
    double grid_step = 0.05;
    double ratio_threshold = 2.0;
};

// Finite-size proxy for p_c: the smallest grid p at which the box
// susceptibility more than doubles when (R, M) doubles. Probe values are the
// susceptibility ratios.
ThresholdEstimate p_c_proxy(int d, const PcBudget& budget);

std::vector<double> parse_grid(double start, double stop, double step);

struct TriangleDiagnostic {
    double p = 0.0;
    std::vector<int> radii;
    std::vector<EstimateWithCI> nabla;
    std::vector<double> increments;
    double ratio = 0.0;  // fitted geometric ratio of increments per unit radius
    bool saturating = true;
    std::string verdict() const { return saturating ? "saturating" : "growing"; }
};

// Increment classification: saturating when the fitted geometric ratio of
// successive increments is below 1 (or all increments vanish).
void classify_increments(TriangleDiagnostic& diag);

// Box triangle diagram on boxes (R, line_factor * R) for each radius, all from
// the same configurations.
TriangleDiagnostic triangle_diagnostic(int d, double p, const std::vector<int>& radii, int line_factor,
                                       const mc::RunOptions& run);

}  // namespace perclab::est
