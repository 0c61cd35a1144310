#include "perclab/series_exact.hpp"

#include <cmath>
#include <stdexcept>

namespace perclab::series {

namespace {

graph::Rational rational_pow(const graph::Rational& x, int e) {
    graph::Rational out = 1;
    const int n = e < 0 ? -e : e;
    for (int i = 0; i < n; ++i) out *= x;
    return e < 0 ? graph::Rational(1) / out : out;
}

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("probability must lie in [0, 1]");
}

// Ordered pairs (x, y) in the tree with |x| = a, |y| = c whose geodesics from
// o share exactly k edges, as coef * b^(a + c - k). The pair contributes
// p^(2(a + c - k)) to the triangle sum.
double pair_coefficient(int d, int a, int c, int k) {
    const double b = d - 1;
    if (a == 0 && c == 0) return 1.0;
    if (k == a || k == c) return d / b;          // one endpoint lies on the other's geodesic
    if (k == 0) return d / b;                     // split at o: d(d-1) b^(a-1) b^(c-1)
    return d * (b - 1.0) / (b * b);               // split below o: b(b-1) choices of branches
}

}  // namespace

std::string_view to_string(RegionReason reason) {
    switch (reason) {
        case RegionReason::inside: return "inside";
        case RegionReason::r_too_large: return "r_too_large";
        case RegionReason::z_below_br: return "z_below_br";
        case RegionReason::z_above_inv_r: return "z_above_inv_r";
    }
    return "unknown";
}

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        comp_ += (sum_ - t) + x;
    } else {
        comp_ += (x - t) + sum_;
    }
    sum_ = t;
}

double value_or_throw(const SeriesValue& v) {
    if (const auto* x = std::get_if<double>(&v)) return *x;
    throw std::domain_error(std::string("series diverges: ") + std::string(to_string(std::get<Divergent>(v).reason)));
}

RegionVerdict j_region(int d, double r, double z) {
    graph::validate_degree(d);
    if (!(r >= 0.0)) throw std::domain_error("r must be nonnegative");
    if (!(z > 0.0)) throw std::domain_error("z must be positive");
    if (r == 0.0) return {true, RegionReason::inside};
    const double b = d - 1;
    // The spheres grow like (rz)^u and (br/z)^k; both ratios must be < 1.
    if (b * r * r >= 1.0) return {false, RegionReason::r_too_large};
    if (z <= b * r) return {false, RegionReason::z_below_br};
    if (r * z >= 1.0) return {false, RegionReason::z_above_inv_r};
    return {true, RegionReason::inside};
}

SeriesValue j_closed_form(int d, double r, double z) {
    const auto verdict = j_region(d, r, z);
    if (!verdict.converges) return Divergent{verdict.reason};
    if (r == 0.0) return 1.0;
    const double b = d - 1;
    const double up = r * z;       // ratio along the ancestor chain
    const double down = b * r / z;  // ratio summed over descendants
    const double pure_up = 1.0 / (1.0 - up);
    const double pure_down = 1.0 / (1.0 - down);
    const double mixed = (up / (1.0 - up)) * ((b - 1.0) * (r / z) / (1.0 - down));
    return pure_up + pure_down - 1.0 + mixed;
}

std::vector<double> j_enumerate(int d, double r, double z, int depth) {
    graph::validate_degree(d);
    if (depth < 0) throw std::domain_error("depth must be nonnegative");
    if (!(r >= 0.0) || !(z > 0.0)) throw std::domain_error("need r >= 0 and z > 0");
    std::vector<double> partial;
    partial.reserve(static_cast<std::size_t>(depth) + 1);
    CompensatedSum acc;
    for (int n = 0; n <= depth; ++n) {
        const double rn = std::pow(r, n);
        for (int l = -n; l <= n; l += 2) {
            acc.add(graph::level_count_real(d, n, l) * rn * std::pow(z, l));
        }
        partial.push_back(acc.value());
    }
    return partial;
}

graph::Rational j_enumerate_exact(int d, const graph::Rational& r, const graph::Rational& z, int depth) {
    graph::validate_degree(d);
    graph::Rational total = 0;
    for (int n = 0; n <= depth; ++n) {
        for (int l = -n; l <= n; l += 2) {
            total += graph::Rational(graph::level_count(d, n, l)) * rational_pow(r, n) * rational_pow(z, l);
        }
    }
    return total;
}

double tree_two_point(double p, int n) {
    check_probability(p);
    if (n < 0) throw std::domain_error("distance must be nonnegative");
    return std::pow(p, n);
}

SeriesValue tree_chi(int d, double p) {
    graph::validate_degree(d);
    check_probability(p);
    const double b = d - 1;
    if (b * p >= 1.0) return Divergent{RegionReason::r_too_large};
    return 1.0 + (b + 1.0) * p / (1.0 - b * p);
}

std::vector<double> tree_triangle_partials(int d, double p, int depth) {
    graph::validate_degree(d);
    check_probability(p);
    if (depth < 0) throw std::domain_error("depth must be nonnegative");
    const double b = d - 1;
    const double ratio = b * p * p;
    std::vector<double> partial;
    partial.reserve(static_cast<std::size_t>(depth) + 1);
    CompensatedSum acc;
    for (int top = 0; top <= depth; ++top) {
        // Pairs whose larger depth is exactly `top`.
        for (int a = 0; a <= top; ++a) {
            for (int c = 0; c <= top; ++c) {
                if (std::max(a, c) != top) continue;
                for (int k = 0; k <= std::min(a, c); ++k) {
                    acc.add(pair_coefficient(d, a, c, k) * std::pow(ratio, a + c - k));
                }
            }
        }
        partial.push_back(acc.value());
    }
    return partial;
}

double tree_triangle_partial(int d, double p, int depth) { return tree_triangle_partials(d, p, depth).back(); }

double tree_triangle_enumerate(int d, double p, int depth) {
    check_probability(p);
    const auto ball = graph::enumerate_tree_ball(d, depth);
    CompensatedSum acc;
    for (const auto& x : ball) {
        for (const auto& y : ball) {
            const auto len = x.depth() + graph::tree_distance(x, y) + y.depth();
            acc.add(std::pow(p, static_cast<double>(len)));
        }
    }
    return acc.value();
}

graph::Rational tree_triangle_enumerate_exact(int d, const graph::Rational& p, int depth) {
    const auto ball = graph::enumerate_tree_ball(d, depth);
    graph::Rational total = 0;
    for (const auto& x : ball) {
        for (const auto& y : ball) {
            const auto len = x.depth() + graph::tree_distance(x, y) + y.depth();
            total += rational_pow(p, static_cast<int>(len));
        }
    }
    return total;
}

}  // namespace perclab::series
