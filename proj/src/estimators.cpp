#include "perclab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "perclab/series_exact.hpp"

namespace perclab::est {

namespace {

constexpr int kBootstrapResamples = 200;
constexpr std::uint64_t kBootstrapMinCount = 30;

// Connection counts along one axis: hits[k] for k = 1..K, each over reps * samples trials.
struct AxisCounts {
    std::vector<std::uint64_t> hits;  // index 0 unused
    double reps = 1.0;
    std::uint64_t samples = 0;

    double tau(int k) const { return static_cast<double>(hits[k]) / (reps * static_cast<double>(samples)); }
    int size() const { return static_cast<int>(hits.size()) - 1; }
};

double tau_stderr(double tau, std::uint64_t samples) {
    return std::sqrt(std::max(0.0, tau * (1.0 - tau)) / static_cast<double>(samples));
}

double relative_halfwidth(double tau, std::uint64_t samples) {
    if (tau <= 0.0) return std::numeric_limits<double>::infinity();
    const auto ci = wilson_interval(tau, static_cast<double>(samples));
    return 0.5 * (ci.high - ci.low) / tau;
}

struct Fit {
    double rate = 0.0;
    double stderr = 0.0;
};

// Weighted least squares of log tau(k) on k over [lo, hi], with delta-method
// weights tau S / (1 - tau + 1/S).
Fit regress(const AxisCounts& c, int lo, int hi) {
    const double S = static_cast<double>(c.samples) * c.reps;
    double sw = 0, sx = 0, sy = 0;
    std::vector<double> xs, ys, ws;
    for (int k = lo; k <= hi; ++k) {
        const double t = c.tau(k);
        if (t <= 0.0) continue;
        const double w = t * S / (1.0 - t + 1.0 / S);
        xs.push_back(k);
        ys.push_back(std::log(t));
        ws.push_back(w);
        sw += w;
        sx += w * k;
        sy += w * std::log(t);
    }
    if (xs.empty()) return {0.0, 0.0};
    if (xs.size() == 1) {
        const double t = std::exp(ys[0]);
        const double rate = std::pow(t, 1.0 / xs[0]);
        return {rate, rate / xs[0] / std::sqrt(ws[0])};
    }
    const double xm = sx / sw, ym = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += ws[i] * (xs[i] - xm) * (xs[i] - xm);
        sxy += ws[i] * (xs[i] - xm) * (ys[i] - ym);
    }
    const double slope = sxy / sxx;
    const double rate = std::exp(slope);
    return {rate, rate * std::sqrt(1.0 / sxx)};
}

DecayEstimate decay(const AxisCounts& c, const std::vector<std::uint64_t>* axis_bits_a,
                    const std::vector<std::uint64_t>* axis_bits_b, std::uint64_t seed) {
    DecayEstimate out;
    const int K = c.size();
    bool any = false;
    for (int k = 1; k <= K; ++k) {
        const double t = c.tau(k);
        if (t <= 0.0) continue;
        any = true;
        const double root = std::pow(t, 1.0 / k);
        if (root >= out.sup_estimate) {
            out.sup_estimate = root;
            out.sup_index = k;
            out.sup_stderr = root / (k * t) * tau_stderr(t, c.samples);
        }
    }
    if (!any) {
        out.warnings.push_back("no connections observed beyond distance 0");
        return out;
    }

    int hi = 0;
    for (int k = 1; k <= K; ++k) {
        if (relative_halfwidth(c.tau(k), c.samples) < 0.25) hi = k;
    }
    if (hi == 0) {
        for (int k = 1; k <= K; ++k) {
            if (relative_halfwidth(c.tau(k), c.samples) < 0.5) hi = k;
        }
        if (hi == 0) throw InsufficientSignal("no distance has a relative CI half-width below 50%");
        out.warnings.push_back("regression window uses counts with relative CI up to 50%");
    }
    const int lo = hi >= 4 ? 3 : std::max(1, hi - 1);
    out.window_lo = lo;
    out.window_hi = hi;
    const auto fit = regress(c, lo, hi);
    out.regression_estimate = fit.rate;
    out.stderr = fit.stderr;

    bool small = false;
    for (int k = lo; k <= hi; ++k) small = small || c.hits[k] < kBootstrapMinCount;
    if (small && axis_bits_a != nullptr && !axis_bits_a->empty()) {
        // Resample configurations with replacement; bits carry each configuration's hits.
        const CounterRng rng(seed, 0xb007);
        const auto S = c.samples;
        std::vector<double> rates;
        AxisCounts boot = c;
        for (int r = 0; r < kBootstrapResamples; ++r) {
            std::fill(boot.hits.begin(), boot.hits.end(), 0);
            for (std::uint64_t i = 0; i < S; ++i) {
                const auto k = rng.bits(static_cast<std::uint64_t>(r) * S + i) % S;
                std::uint64_t bits = (*axis_bits_a)[k];
                for (int j = 1; j <= K; ++j) boot.hits[j] += (bits >> j) & 1u;
                if (axis_bits_b != nullptr) {
                    bits = (*axis_bits_b)[k];
                    for (int j = 1; j <= K; ++j) boot.hits[j] += (bits >> j) & 1u;
                }
            }
            rates.push_back(regress(boot, lo, hi).rate);
        }
        const auto m = mean_estimate(rates);
        out.stderr = m.stderr * std::sqrt(static_cast<double>(rates.size()));
        out.bootstrap = true;
    }
    return out;
}

std::vector<std::uint64_t> to_vector(std::span<const std::uint64_t> s) { return {s.begin(), s.end()}; }

BallSpec resolve_domain(const TwoPointTable& table, std::optional<BallSpec> domain, bool halve) {
    const auto& s = table.spec();
    BallSpec dom = domain.value_or(
        halve ? BallSpec{s.d, s.tree_radius / 2, s.line_half_width / 2} : s);
    if (dom.d != s.d || dom.tree_radius < 0 || dom.line_half_width < 0 || dom.tree_radius > s.tree_radius ||
        dom.line_half_width > s.line_half_width) {
        throw std::domain_error("sum domain must lie inside the table box");
    }
    if (halve && (2 * dom.tree_radius > s.tree_radius || 2 * dom.line_half_width > s.line_half_width)) {
        throw std::domain_error("pair distances in the sum domain exceed the table range");
    }
    return dom;
}

// Pairs (x, y) in T_d with |x| = a, |y| = c whose geodesics from o share
// exactly k edges, per fixed x; d(x, y) = a + c - 2k.
double pairs_sharing(int d, int a, int c, int k) {
    const double b = d - 1;
    if (k == c) return c <= a ? 1.0 : 0.0;
    if (k > std::min(a, c)) return 0.0;
    const double rest = std::pow(b, c - k - 1);
    if (k == 0) return (a > 0 ? d - 1 : d) * rest;
    if (k < a) return (d - 2) * rest;
    return (d - 1) * rest;  // k == a < c
}

}  // namespace

DecayEstimate alpha_hat(const TwoPointTable& table) {
    AxisCounts c;
    c.samples = table.samples();
    c.hits.assign(static_cast<std::size_t>(table.max_n()) + 1, 0);
    for (int n = 1; n <= table.max_n(); ++n) c.hits[n] = table.hits(n, 0);
    const auto bits = to_vector(table.tree_axis());
    return decay(c, &bits, nullptr, table.base_seed());
}

DecayEstimate beta_hat(const TwoPointTable& table) {
    AxisCounts c;
    c.samples = table.samples();
    c.reps = 2.0;
    c.hits.assign(static_cast<std::size_t>(table.max_m()) + 1, 0);
    for (int m = 1; m <= table.max_m(); ++m) c.hits[m] = table.hits(0, m);
    const auto pos = to_vector(table.line_pos());
    const auto neg = to_vector(table.line_neg());
    return decay(c, &pos, &neg, table.base_seed() ^ 0x1u);
}

EstimateWithCI I_hat(const TwoPointTable& table, int n) {
    series::CompensatedSum sum;
    double sigma = 0.0;
    for (int m = 0; m <= table.max_m(); ++m) {
        const double w = m == 0 ? 1.0 : 2.0;
        sum.add(w * table.tau(n, m));
        sigma += w * table.stderr(n, m);
    }
    auto out = EstimateWithCI::normal(sum.value(), sigma, table.samples());
    const double edge = (table.max_m() == 0 ? 1.0 : 2.0) * table.tau(n, table.max_m());
    if (table.max_m() > 0 && edge > 0.01 * out.estimate) out.warnings.push_back("line truncation: boundary terms exceed 1%");
    return out;
}

EstimateWithCI II_hat(const TwoPointTable& table, int n) {
    series::CompensatedSum sum;
    double sigma = 0.0;
    for (int m = 0; m <= table.max_m(); ++m) {
        const double w = m == 0 ? 1.0 : 2.0;
        const double t = table.tau(n, m);
        sum.add(w * t * t);
        sigma += w * 2.0 * t * table.stderr(n, m);
    }
    auto out = EstimateWithCI::normal(sum.value(), sigma, table.samples());
    const double t = table.tau(n, table.max_m());
    if (table.max_m() > 0 && 2.0 * t * t > 0.01 * out.estimate) out.warnings.push_back("line truncation: boundary terms exceed 1%");
    return out;
}

double tilted_sphere_weight(int d, int n) {
    const double rb = std::sqrt(static_cast<double>(d - 1));
    double w = 0.0;
    for (int l = -n; l <= n; l += 2) w += graph::level_count_real(d, n, l) * std::pow(rb, l);
    return w;
}

TiltedSusceptibility chi_tilted_hat(const TwoPointTable& table) {
    const int d = table.spec().d;
    const int R = table.max_n();
    TiltedSusceptibility out;
    series::CompensatedSum sum;
    double sigma = 0.0;
    std::vector<double> I(static_cast<std::size_t>(R) + 1);
    for (int n = 0; n <= R; ++n) {
        const auto e = I_hat(table, n);
        I[n] = e.estimate;
        const double w = tilted_sphere_weight(d, n);
        sum.add(w * e.estimate);
        sigma += w * e.stderr;
    }
    out.chi = EstimateWithCI::normal(sum.value(), sigma, table.samples());

    const auto a = alpha_hat(table);
    out.r = a.regression_estimate + a.stderr;
    const double b = d - 1;
    if (out.r >= 1.0 / std::sqrt(b)) {
        out.tail = std::numeric_limits<double>::infinity();
        out.tail_finite = false;
        out.chi.warnings.push_back("tail unbounded: alpha + eps >= 1/sqrt(b)");
        return out;
    }
    if (out.r <= 0.0) return out;  // nothing beyond distance 0
    double C = 0.0;
    for (int n = 0; n <= R; ++n) C = std::max(C, I[n] / std::pow(out.r, n));
    const double J = series::value_or_throw(series::j_closed_form(d, out.r, std::sqrt(b)));
    double partial = 0.0;
    for (int n = 0; n <= R; ++n) partial += std::pow(out.r, n) * tilted_sphere_weight(d, n);
    out.tail = C * std::max(0.0, J - partial);
    return out;
}

EstimateWithCI chi_hat(const TwoPointTable& table) {
    const int d = table.spec().d;
    series::CompensatedSum sum;
    double sigma = 0.0;
    for (int n = 0; n <= table.max_n(); ++n) {
        const auto e = I_hat(table, n);
        const double s = graph::sphere_count_real(d, n);
        sum.add(s * e.estimate);
        sigma += s * e.stderr;
    }
    return EstimateWithCI::normal(sum.value(), sigma, table.samples());
}

EstimateWithCI nabla_from_table(const TwoPointTable& table, std::optional<BallSpec> domain) {
    const auto dom = resolve_domain(table, domain, true);
    const int d = dom.d;
    const int Rd = dom.tree_radius;
    const int Md = dom.line_half_width;
    const int Mt = table.max_m();
    const std::size_t cols = static_cast<std::size_t>(Mt) + 1;
    std::vector<double> tau((static_cast<std::size_t>(table.max_n()) + 1) * cols);
    for (int n = 0; n <= table.max_n(); ++n) {
        for (int m = 0; m <= Mt; ++m) tau[n * cols + m] = table.tau(n, m);
    }
    std::vector<double> grad(tau.size(), 0.0);
    series::CompensatedSum total;
    for (int a = 0; a <= Rd; ++a) {
        const double sa = graph::sphere_count_real(d, a);
        for (int c = 0; c <= Rd; ++c) {
            for (int k = 0; k <= std::min(a, c); ++k) {
                const double count = sa * pairs_sharing(d, a, c, k);
                if (count == 0.0) continue;
                const int dist = a + c - 2 * k;
                double block = 0.0;
                for (int mx = -Md; mx <= Md; ++mx) {
                    const std::size_t ix = a * cols + std::abs(mx);
                    for (int my = -Md; my <= Md; ++my) {
                        const std::size_t iy = c * cols + std::abs(my);
                        const std::size_t ixy = dist * cols + std::abs(mx - my);
                        const double tx = tau[ix], ty = tau[iy], txy = tau[ixy];
                        block += tx * txy * ty;
                        grad[ix] += count * txy * ty;
                        grad[iy] += count * tx * txy;
                        grad[ixy] += count * tx * ty;
                    }
                }
                total.add(count * block);
            }
        }
    }
    double sigma = 0.0;
    for (int n = 0; n <= table.max_n(); ++n) {
        for (int m = 0; m <= Mt; ++m) sigma += std::abs(grad[n * cols + m]) * table.stderr(n, m);
    }
    return EstimateWithCI::normal(total.value(), sigma, table.samples());
}

EstimateWithCI square_sum(const TwoPointTable& table, std::optional<BallSpec> domain) {
    const auto dom = resolve_domain(table, domain, false);
    series::CompensatedSum sum;
    double sigma = 0.0;
    for (int n = 0; n <= dom.tree_radius; ++n) {
        const double s = graph::sphere_count_real(dom.d, n);
        for (int m = 0; m <= dom.line_half_width; ++m) {
            const double w = s * (m == 0 ? 1.0 : 2.0);
            const double t = table.tau(n, m);
            sum.add(w * t * t);
            sigma += w * 2.0 * t * table.stderr(n, m);
        }
    }
    return EstimateWithCI::normal(sum.value(), sigma, table.samples());
}

std::vector<double> parse_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start)) throw std::domain_error("grid needs step > 0 and stop >= start");
    std::vector<double> out;
    // Index-based so that accumulated rounding never drops the endpoint.
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(std::min(stop, start + static_cast<double>(i) * step));
    return out;
}

ThresholdEstimate p_u_by_alpha_inversion(int d, const PuBudget& budget) {
    graph::validate_degree(d);
    BallSpec box = budget.box;
    box.d = d;
    const mc::BoxGraph graph(box);
    const mc::RunOptions run{budget.samples, budget.base_seed, budget.threads};
    ThresholdEstimate out;
    out.target = 1.0 / std::sqrt(static_cast<double>(d - 1));

    auto probe = [&](double p) {
        const auto table = mc::estimate_two_point(p, graph, run);
        const auto a = alpha_hat(table);
        Probe pr{p, a.sup_estimate, a.sup_stderr, 0.0, 0.0};
        try {
            const auto b = beta_hat(table);
            pr.beta = b.sup_estimate;
            pr.beta_stderr = b.sup_stderr;
        } catch (const InsufficientSignal&) {
            pr.beta = std::numeric_limits<double>::quiet_NaN();
        }
        out.probes.push_back(pr);
        return pr;
    };

    Probe lo = probe(0.0);
    Probe hi = probe(std::min(1.0, out.target + 0.05));
    if (hi.value < out.target) hi = probe(1.0);
    if (hi.value < out.target) throw BracketFailure("alpha estimate never reaches 1/sqrt(b)");
    while (hi.p - lo.p > budget.tolerance && out.iterations < budget.max_iterations) {
        const Probe mid = probe(0.5 * (lo.p + hi.p));
        ++out.iterations;
        (mid.value < out.target ? lo : hi) = mid;
    }
    out.p_lo = lo.p;
    out.p_hi = hi.p;
    out.p_hat = 0.5 * (lo.p + hi.p);
    const double slope = (hi.value - lo.value) / std::max(hi.p - lo.p, 1e-300);
    out.noise_floor = slope > 0.0 ? std::max(lo.stderr, hi.stderr) / slope : std::numeric_limits<double>::infinity();
    return out;
}

ThresholdEstimate p_c_proxy(int d, const PcBudget& budget) {
    graph::validate_degree(d);
    BallSpec small = budget.small, large = budget.large;
    small.d = large.d = d;
    const auto grid = parse_grid(budget.grid_start, budget.grid_stop, budget.grid_step);
    const mc::RunOptions run{budget.samples, budget.base_seed, budget.threads};
    ThresholdEstimate out;
    out.target = budget.ratio_threshold;
    std::vector<TwoPointTable> ts, tl;
    // Chunks of at most 250 grid points per graded pass.
    for (std::size_t i = 0; i < grid.size(); i += 250) {
        const std::span<const double> part(grid.data() + i, std::min<std::size_t>(250, grid.size() - i));
        auto a = mc::estimate_two_point_grid(part, mc::BoxGraph(small), run);
        auto b = mc::estimate_two_point_grid(part, mc::BoxGraph(large), run);
        ts.insert(ts.end(), a.begin(), a.end());
        tl.insert(tl.end(), b.begin(), b.end());
    }
    out.p_hat = std::numeric_limits<double>::quiet_NaN();
    out.p_lo = 0.0;
    out.p_hi = 1.0;
    bool found = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto cs = chi_hat(ts[i]);
        const auto cl = chi_hat(tl[i]);
        const double ratio = cl.estimate / cs.estimate;
        const double se = ratio * std::hypot(cs.stderr / cs.estimate, cl.stderr / cl.estimate);
        out.probes.push_back({grid[i], ratio, se, 0.0, 0.0});
        ++out.iterations;
        if (!found && ratio > budget.ratio_threshold) {
            found = true;
            out.p_hat = grid[i];
            out.p_hi = grid[i];
            out.p_lo = i > 0 ? grid[i - 1] : 0.0;
        }
    }
    for (std::size_t i = 1; found && i < out.probes.size(); ++i) {
        if (out.probes[i].p != out.p_hi) continue;
        const auto& a = out.probes[i - 1];
        const auto& b = out.probes[i];
        const double slope = (b.value - a.value) / (b.p - a.p);
        out.noise_floor = slope > 0.0 ? std::max(a.stderr, b.stderr) / slope : std::numeric_limits<double>::infinity();
    }
    return out;
}

void classify_increments(TriangleDiagnostic& diag) {
    diag.increments.clear();
    for (std::size_t i = 1; i < diag.nabla.size(); ++i) {
        diag.increments.push_back(diag.nabla[i].estimate - diag.nabla[i - 1].estimate);
    }
    diag.ratio = 0.0;
    diag.saturating = true;
    const double scale = diag.nabla.empty() ? 1.0 : std::max(1.0, std::abs(diag.nabla.back().estimate));
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < diag.increments.size(); ++i) {
        if (diag.increments[i] <= 1e-12 * scale) continue;
        xs.push_back(0.5 * (diag.radii[i] + diag.radii[i + 1]));
        ys.push_back(std::log(diag.increments[i]));
    }
    if (xs.size() < 2) return;
    double xm = 0, ym = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xm += xs[i];
        ym += ys[i];
    }
    xm /= static_cast<double>(xs.size());
    ym /= static_cast<double>(xs.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ys[i] - ym);
    }
    diag.ratio = std::exp(sxy / sxx);
    diag.saturating = diag.ratio < 1.0;
}

TriangleDiagnostic triangle_diagnostic(int d, double p, const std::vector<int>& radii, int line_factor,
                                       const mc::RunOptions& run) {
    if (radii.size() < 2) throw std::domain_error("need at least two radii");
    if (!std::is_sorted(radii.begin(), radii.end()) ||
        std::adjacent_find(radii.begin(), radii.end()) != radii.end()) {
        throw std::domain_error("radii must be strictly increasing");
    }
    if (line_factor < 0) throw std::domain_error("line factor must be nonnegative");
    TriangleDiagnostic out;
    out.p = p;
    out.radii = radii;
    for (int R : radii) {
        const auto t = mc::triangle_mc(p, BallSpec{d, R, line_factor * R}, run);
        out.nabla.push_back(t.estimate);
    }
    classify_increments(out);
    return out;
}

}  // namespace perclab::est
