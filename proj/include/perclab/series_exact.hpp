#pragma once

// Exact (non-stochastic) series on the tree T_d:
//   J(r, z) = sum over tree vertices x of r^|x| z^L(o,x),
// the tree two-point function and susceptibility, and partial sums of the tree
// triangle diagram.
//
// Orientation: L(o, x) counts a parent step as +1. Some references use the
// opposite sign convention for the level, in which case their z corresponds to
// 1/z here. Every function in this header uses the parent-positive convention.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "perclab/graph_core.hpp"

namespace perclab::series {

enum class RegionReason { inside, r_too_large, z_below_br, z_above_inv_r };

std::string_view to_string(RegionReason reason);

struct RegionVerdict {
    bool converges = true;
    RegionReason reason = RegionReason::inside;
};

// J(r, z) < infinity iff r < 1/sqrt(b) and b r < z < 1/r (r > 0); r = 0 always converges.
RegionVerdict j_region(int d, double r, double z);

struct Divergent {
    RegionReason reason;
};

// A finite value, or a certified divergence with its reason.
using SeriesValue = std::variant<double, Divergent>;

inline bool is_finite(const SeriesValue& v) { return std::holds_alternative<double>(v); }
double value_or_throw(const SeriesValue& v);

SeriesValue j_closed_form(int d, double r, double z);

// Partial sums S_0..S_depth of J, compensated summation. S_k includes spheres 0..k.
std::vector<double> j_enumerate(int d, double r, double z, int depth);
// Exact partial sum at one depth, for validating the floating-point path.
graph::Rational j_enumerate_exact(int d, const graph::Rational& r, const graph::Rational& z, int depth);

double tree_two_point(double p, int n);
SeriesValue tree_chi(int d, double p);

// Sum over x, y in the radius-`depth` tree ball of p^(|x| + d(x,y) + |y|).
// Evaluated by grouping pairs by (|x|, |y|, length of the shared geodesic prefix).
double tree_triangle_partial(int d, double p, int depth);
// Partial sums for every depth 0..depth.
std::vector<double> tree_triangle_partials(int d, double p, int depth);
// Brute-force double enumeration over the ball; the oracle for the above.
double tree_triangle_enumerate(int d, double p, int depth);
graph::Rational tree_triangle_enumerate_exact(int d, const graph::Rational& p, int depth);

// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace perclab::series
