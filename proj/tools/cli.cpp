#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "perclab/estimators.hpp"
#include "perclab/io.hpp"
#include "perclab/oracle_exact.hpp"
#include "perclab/perc_mc.hpp"
#include "perclab/series_exact.hpp"

#ifndef PERCLAB_DEFAULT_CORPUS
#define PERCLAB_DEFAULT_CORPUS "tests/data"
#endif

namespace perclab::cli {

namespace {

using nlohmann::json;

struct Params {
    int d = 3;
    double p = 0.5;
    int R = 12;
    int M = 40;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
    std::string records;
    std::string config;
    std::string p_grid;
    std::string radii = "4,6,8,10,12";
    int line_factor = 1;
    double r = 0.0;
    double z = 1.0;
    int depth = -1;
    std::string kind = "j";
    std::string method = "mc";
    int domain_R = -1;
    int domain_M = -1;
    double tolerance = 0.01;
    std::string corpus = PERCLAB_DEFAULT_CORPUS;
    std::string ps = "0.3,0.5,0.7";
    double grid_start = 0.05;
    double grid_stop = 0.95;
    double grid_step = 0.05;
};

// Built per subcommand after parsing.
struct Context {
    Params& prm;
    std::ostream& out;
    std::ostream& err;
    bool seed_given = false;
    bool threads_given = false;
    std::vector<io::RunRecord> records;

    std::uint64_t seed() {
        if (!seed_given) {
            prm.seed = io::resolve_seed(std::nullopt);
            seed_given = true;
        }
        return prm.seed;
    }
    unsigned threads() const { return io::resolve_threads(threads_given ? std::optional<unsigned>(prm.threads) : std::nullopt); }
    graph::BallSpec box() const { return {prm.d, prm.R, prm.M}; }
    mc::RunOptions run() { return {prm.samples, seed(), threads()}; }

    json box_json() const {
        return {{"d", prm.d}, {"treeRadius", prm.R}, {"lineHalfWidth", prm.M}};
    }

    void record(const std::string& estimator, double p, const EstimateWithCI& e, double millis) {
        io::RunRecord r;
        r.timestamp = io::now_utc_iso8601();
        r.d = prm.d;
        r.p = p;
        r.R = prm.R;
        r.M = prm.M;
        r.samples = prm.samples;
        r.base_seed = prm.seed;
        r.estimator = estimator;
        r.estimate = e.estimate;
        r.stderr = e.stderr;
        r.ci_low = e.ci_low;
        r.ci_high = e.ci_high;
        r.wall_millis = millis;
        records.push_back(r);
    }

    // Single writer phase: data file, sidecar, then records.
    void emit(const std::string& command, const std::string& data, json parameters, json results) {
        if (prm.out.empty()) {
            out << data;
        } else {
            io::write_text_file(prm.out, data);
            io::write_text_file(prm.out + ".json", io::sidecar(command, std::move(parameters), std::move(results)).dump(2) + "\n");
        }
        std::string path = prm.records;
        if (path.empty() && !prm.out.empty()) path = prm.out + ".records.jsonl";
        if (!path.empty()) {
            for (const auto& r : records) io::append_record(path, r);
        }
    }
};

class Stopwatch {
public:
    double millis() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<double> parse_range(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() == 1) return {io::parse_double(parts[0])};
    if (parts.size() != 3) throw std::invalid_argument("grid must be start:stop:step");
    return est::parse_grid(io::parse_double(parts[0]), io::parse_double(parts[1]), io::parse_double(parts[2]));
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) {
        if (part.empty()) continue;
        if constexpr (std::is_same_v<T, int>) out.push_back(std::stoi(part));
        else out.push_back(io::parse_double(part));
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<io::Cell>>& rows) {
    std::ostringstream s;
    io::write_csv(s, header, rows);
    return s.str();
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<mc::TwoPointTable> tables_on_grid(const std::vector<double>& grid, const mc::BoxGraph& box,
                                              const mc::RunOptions& run) {
    // Graded exploration requires an increasing grid of at most 250 points.
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("p grid must be increasing");
    std::vector<mc::TwoPointTable> out;
    for (std::size_t i = 0; i < grid.size(); i += 250) {
        const std::span<const double> part(grid.data() + i, std::min<std::size_t>(250, grid.size() - i));
        auto t = mc::estimate_two_point_grid(part, box, run);
        out.insert(out.end(), t.begin(), t.end());
    }
    return out;
}

int cmd_two_point(Context& c) {
    Stopwatch sw;
    const auto table = mc::estimate_two_point(c.prm.p, c.box(), c.run());
    const double ms = sw.millis();
    std::ostringstream data;
    io::write_two_point_csv(data, io::two_point_rows(table));
    const int n = c.prm.R >= 1 ? 1 : 0;
    c.record("tau(" + std::to_string(n) + ",0)", c.prm.p, table.estimate(n, 0), ms);
    json params = c.box_json();
    params.update({{"p", c.prm.p}, {"samples", c.prm.samples}, {"baseSeed", c.prm.seed}});
    c.emit("two-point", data.str(), params, json::object());
    return kOk;
}

int cmd_decay_curve(Context& c, bool alpha) {
    if (c.prm.p_grid.empty()) throw std::invalid_argument("--p-grid is required");
    const auto grid = parse_range(c.prm.p_grid);
    if (grid.empty()) throw std::invalid_argument("empty grid");
    Stopwatch sw;
    const mc::BoxGraph box(c.box());
    const auto tables = tables_on_grid(grid, box, c.run());
    const double ms = sw.millis() / static_cast<double>(grid.size());
    const double target = 1.0 / std::sqrt(static_cast<double>(c.prm.d - 1));
    std::vector<io::CurveRow> rows;
    for (const auto& t : tables) {
        const auto e = alpha ? est::alpha_hat(t) : est::beta_hat(t);
        io::CurveRow row{t.p(), e.sup_estimate, e.regression_estimate, e.stderr, std::nullopt};
        if (alpha) row.target = target;
        rows.push_back(row);
        c.record(alpha ? "alpha_sup" : "beta_sup", t.p(),
                 EstimateWithCI::normal(e.sup_estimate, e.sup_stderr, t.samples()), ms);
    }
    std::ostringstream data;
    io::write_curve_csv(data, rows, alpha);
    json params = c.box_json();
    params.update({{"pGrid", grid}, {"samples", c.prm.samples}, {"baseSeed", c.prm.seed}});
    c.emit(alpha ? "alpha-curve" : "beta-curve", data.str(), params, json::object());
    return kOk;
}

int cmd_chi_tilted(Context& c) {
    Stopwatch sw;
    const auto table = mc::estimate_two_point(c.prm.p, c.box(), c.run());
    const auto chi = est::chi_tilted_hat(table);
    for (const auto& w : chi.chi.warnings) c.err << "warning: " << w << '\n';
    c.record("chi_tilted", c.prm.p, chi.chi, sw.millis());
    const auto data = csv({"p", "chi", "stderr", "ci_lo", "ci_hi", "tail", "tail_finite", "r"},
                          {{c.prm.p, chi.chi.estimate, chi.chi.stderr, chi.chi.ci_low, chi.chi.ci_high, chi.tail,
                            std::int64_t{chi.tail_finite ? 1 : 0}, chi.r}});
    json params = c.box_json();
    params.update({{"p", c.prm.p}, {"samples", c.prm.samples}, {"baseSeed", c.prm.seed}});
    c.emit("chi-tilted", data, params, {{"warnings", chi.chi.warnings}});
    return kOk;
}

int cmd_triangle(Context& c) {
    Stopwatch sw;
    std::optional<graph::BallSpec> domain;
    if (c.prm.domain_R >= 0 || c.prm.domain_M >= 0) {
        domain = graph::BallSpec{c.prm.d, std::max(0, c.prm.domain_R), std::max(0, c.prm.domain_M)};
    }
    EstimateWithCI e;
    if (c.prm.method == "mc") {
        e = mc::triangle_mc(c.prm.p, c.box(), c.run(), domain).estimate;
    } else if (c.prm.method == "table") {
        e = est::nabla_from_table(mc::estimate_two_point(c.prm.p, c.box(), c.run()), domain);
    } else {
        throw std::invalid_argument("--method must be mc or table");
    }
    c.record("triangle_" + c.prm.method, c.prm.p, e, sw.millis());
    const auto data = csv({"p", "R", "M", "method", "nabla", "stderr", "ci_lo", "ci_hi", "samples"},
                          {{c.prm.p, std::int64_t{c.prm.R}, std::int64_t{c.prm.M}, c.prm.method, e.estimate, e.stderr,
                            e.ci_low, e.ci_high, e.samples}});
    json params = c.box_json();
    params.update({{"p", c.prm.p}, {"samples", c.prm.samples}, {"baseSeed", c.prm.seed}, {"method", c.prm.method}});
    if (domain) params["domain"] = {{"treeRadius", domain->tree_radius}, {"lineHalfWidth", domain->line_half_width}};
    c.emit("triangle", data, params, json::object());
    return kOk;
}

int cmd_triangle_diagnostic(Context& c) {
    Stopwatch sw;
    const auto radii = parse_list<int>(c.prm.radii);
    const auto diag = est::triangle_diagnostic(c.prm.d, c.prm.p, radii, c.prm.line_factor, c.run());
    const double ms = sw.millis();
    std::vector<std::vector<io::Cell>> rows;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const auto& e = diag.nabla[i];
        const double inc = i == 0 ? 0.0 : diag.increments[i - 1];
        rows.push_back({std::int64_t{radii[i]}, std::int64_t{radii[i] * c.prm.line_factor}, e.estimate, e.stderr,
                        e.ci_low, e.ci_high, inc});
        c.record("triangle_R" + std::to_string(radii[i]), c.prm.p, e, ms / static_cast<double>(radii.size()));
    }
    c.err << "verdict: " << diag.verdict() << " (increment ratio per unit radius " << io::format_double(diag.ratio)
          << ")\n";
    json params = {{"d", c.prm.d}, {"p", c.prm.p}, {"radii", radii}, {"lineFactor", c.prm.line_factor},
                   {"samples", c.prm.samples}, {"baseSeed", c.prm.seed}};
    json results = {{"verdict", diag.verdict()}, {"ratio", number(diag.ratio)}, {"increments", diag.increments}};
    c.emit("triangle-diagnostic", csv({"R", "M", "nabla", "stderr", "ci_lo", "ci_hi", "increment"}, rows), params,
           results);
    return kOk;
}

int cmd_series(Context& c) {
    const int d = c.prm.d;
    graph::validate_degree(d);
    std::string quantity;
    series::SeriesValue value;
    if (c.prm.kind == "j") {
        quantity = "J";
        value = series::j_closed_form(d, c.prm.r, c.prm.z);
    } else if (c.prm.kind == "tree-chi") {
        quantity = "tree_chi";
        value = series::tree_chi(d, c.prm.p);
    } else if (c.prm.kind == "tree-triangle") {
        if (c.prm.depth < 0) throw std::invalid_argument("--depth is required for tree-triangle");
        quantity = "tree_triangle_partial";
        value = series::SeriesValue(series::tree_triangle_partial(d, c.prm.p, c.prm.depth));
    } else {
        throw std::invalid_argument("--kind must be j, tree-chi or tree-triangle");
    }
    const bool finite = series::is_finite(value);
    const std::string verdict =
        finite ? "inside" : std::string(series::to_string(std::get<series::Divergent>(value).reason));
    const double v = finite ? std::get<double>(value) : std::numeric_limits<double>::infinity();
    std::vector<std::vector<io::Cell>> rows{{quantity, v, verdict}};
    if (c.prm.kind == "j" && c.prm.depth >= 0) {
        rows.push_back({"J_partial", series::j_enumerate(d, c.prm.r, c.prm.z, c.prm.depth).back(), std::string("partial")});
    }
    c.record("series_" + quantity, c.prm.kind == "j" ? c.prm.r : c.prm.p, EstimateWithCI::normal(v, 0.0, 0), 0.0);
    json params = {{"d", d}, {"kind", c.prm.kind}, {"r", c.prm.r}, {"z", c.prm.z}, {"p", c.prm.p}, {"depth", c.prm.depth}};
    c.emit("series", csv({"quantity", "value", "verdict"}, rows), params, {{"verdict", verdict}, {"value", number(v)}});
    return finite ? kOk : kNumeric;
}

int cmd_pu(Context& c) {
    Stopwatch sw;
    est::PuBudget budget;
    budget.box = c.box();
    budget.samples = c.prm.samples;
    budget.base_seed = c.seed();
    budget.threads = c.threads();
    budget.tolerance = c.prm.tolerance;
    const auto t = est::p_u_by_alpha_inversion(c.prm.d, budget);
    const double ms = sw.millis();
    std::vector<std::vector<io::Cell>> rows;
    for (const auto& pr : t.probes) rows.push_back({pr.p, pr.value, pr.stderr, pr.beta, pr.beta_stderr});
    c.record("p_u", t.p_hat, EstimateWithCI::normal(t.p_hat, t.noise_floor, c.prm.samples), ms);
    c.err << "p_u estimate " << io::format_double(t.p_hat) << " bracket [" << io::format_double(t.p_lo) << ", "
          << io::format_double(t.p_hi) << "] noise floor " << io::format_double(t.noise_floor) << '\n';
    json params = c.box_json();
    params.update({{"samples", c.prm.samples}, {"baseSeed", c.prm.seed}, {"tolerance", c.prm.tolerance}});
    json results = {{"pHat", t.p_hat},       {"bracket", {t.p_lo, t.p_hi}}, {"target", t.target},
                    {"iterations", t.iterations}, {"noiseFloor", number(t.noise_floor)}};
    c.emit("pu", csv({"p", "alpha_sup", "stderr", "beta_sup", "beta_stderr"}, rows), params, results);
    return kOk;
}

int cmd_pc_proxy(Context& c) {
    Stopwatch sw;
    est::PcBudget budget;
    budget.samples = c.prm.samples;
    budget.base_seed = c.seed();
    budget.threads = c.threads();
    budget.grid_start = c.prm.grid_start;
    budget.grid_stop = c.prm.grid_stop;
    budget.grid_step = c.prm.grid_step;
    const auto t = est::p_c_proxy(c.prm.d, budget);
    std::vector<std::vector<io::Cell>> rows;
    for (const auto& pr : t.probes) rows.push_back({pr.p, pr.value, pr.stderr});
    c.record("p_c_proxy", t.p_hat, EstimateWithCI::normal(t.p_hat, t.noise_floor, c.prm.samples), sw.millis());
    c.err << "p_c proxy (finite-size, not a rigorous estimate) " << io::format_double(t.p_hat) << '\n';
    json params = {{"d", c.prm.d},
                   {"samples", c.prm.samples},
                   {"baseSeed", c.prm.seed},
                   {"grid", {c.prm.grid_start, c.prm.grid_stop, c.prm.grid_step}},
                   {"small", {budget.small.tree_radius, budget.small.line_half_width}},
                   {"large", {budget.large.tree_radius, budget.large.line_half_width}}};
    json results = {{"pHat", number(t.p_hat)}, {"bracket", {t.p_lo, t.p_hi}}, {"ratioThreshold", t.target}};
    c.emit("pc-proxy", csv({"p", "chi_ratio", "stderr"}, rows), params, results);
    return kOk;
}

int cmd_oracle_check(Context& c) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(c.prm.corpus)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::invalid_argument("no .txt graphs in " + c.prm.corpus);
    const auto ps = parse_list<double>(c.prm.ps);
    const auto run = c.run();
    std::vector<std::vector<io::Cell>> rows;
    bool all = true;
    Stopwatch sw;
    for (const auto& f : files) {
        const auto g = oracle::read_tiny_graph(f.string());
        const auto fg = oracle::to_finite_graph(g);
        const auto target = oracle::designated_target(g);
        const oracle::ConnectionPolynomials poly(g);
        for (double p : ps) {
            const double exact = poly.evaluate(g.origin, target, p);
            const auto hits = mc::two_point_hits(p, fg, g.origin, run);
            const double tau = static_cast<double>(hits[target]) / static_cast<double>(run.samples);
            const auto ci = wilson_interval(tau, static_cast<double>(run.samples));
            const double sigma = (ci.high - ci.low) / (2.0 * kZ99);
            const bool pass = std::abs(tau - exact) <= 3.0 * sigma;
            all = all && pass;
            rows.push_back({f.filename().string(), p, std::uint64_t{target}, exact, tau, sigma,
                            std::string(pass ? "pass" : "FAIL")});
        }
    }
    c.record("oracle_check", 0.0, EstimateWithCI::normal(all ? 1.0 : 0.0, 0.0, run.samples), sw.millis());
    c.err << (all ? "oracle check passed" : "oracle check FAILED") << '\n';
    json params = {{"corpus", fs::path(c.prm.corpus).filename().string()}, {"samples", c.prm.samples},
                   {"baseSeed", c.prm.seed}, {"ps", ps}};
    c.emit("oracle-check", csv({"graph", "p", "target", "exact", "tau_hat", "sigma", "result"}, rows), params,
           {{"pass", all}});
    return all ? kOk : kOracleMismatch;
}

bool has_flag(const std::vector<std::string>& args, const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Config entries become flags unless the command line already sets them.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    for (const auto& [key, value] : io::read_config(path)) {
        if (key == "config" || has_flag(args, key)) continue;
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    Params prm;
    CLI::App app{"Percolation estimation lab for T_d x Z", "perclab"};
    app.require_subcommand(1);

    auto add_box = [&](CLI::App* s) {
        s->add_option("--d", prm.d, "Tree degree")->check(CLI::Range(3, 255));
        s->add_option("--tree-radius", prm.R, "Tree radius R")->check(CLI::NonNegativeNumber);
        s->add_option("--line-halfwidth", prm.M, "Line half-width M")->check(CLI::NonNegativeNumber);
    };
    auto add_run = [&](CLI::App* s) {
        s->add_option("--samples", prm.samples, "Configurations")->check(CLI::PositiveNumber);
        s->add_option("--seed", prm.seed, "Base seed (drawn from system entropy when absent)");
        s->add_option("--threads", prm.threads, "Worker threads (PERCLAB_THREADS overrides)")->check(CLI::PositiveNumber);
    };
    auto add_io = [&](CLI::App* s) {
        s->add_option("--out", prm.out, "Data file; metadata goes to <out>.json");
        s->add_option("--records", prm.records, "Run-record file (JSON lines); default <out>.records.jsonl");
        s->add_option("--config", prm.config, "key=value file mirroring the flags; flags win");
    };
    auto add_p = [&](CLI::App* s) { s->add_option("--p", prm.p, "Edge probability")->check(CLI::Range(0.0, 1.0)); };

    auto* two_point = app.add_subcommand("two-point", "Two-point table tau(n, m)");
    add_box(two_point), add_run(two_point), add_io(two_point), add_p(two_point);

    auto* alpha = app.add_subcommand("alpha-curve", "Tree decay rate over a p grid");
    auto* beta = app.add_subcommand("beta-curve", "Line decay rate over a p grid");
    for (auto* s : {alpha, beta}) {
        add_box(s), add_run(s), add_io(s);
        s->add_option("--p-grid", prm.p_grid, "start:stop:step or a single p")->required();
    }

    auto* chi = app.add_subcommand("chi-tilted", "Tilted susceptibility with tail bound");
    add_box(chi), add_run(chi), add_io(chi), add_p(chi);

    auto* tri = app.add_subcommand("triangle", "Box triangle diagram");
    add_box(tri), add_run(tri), add_io(tri), add_p(tri);
    tri->add_option("--method", prm.method, "mc or table");
    tri->add_option("--domain-radius", prm.domain_R, "Sum-domain tree radius");
    tri->add_option("--domain-halfwidth", prm.domain_M, "Sum-domain line half-width");

    auto* diag = app.add_subcommand("triangle-diagnostic", "Growth of the box triangle diagram with radius");
    add_run(diag), add_io(diag), add_p(diag);
    diag->add_option("--d", prm.d, "Tree degree")->check(CLI::Range(3, 255));
    diag->add_option("--radii", prm.radii, "Comma-separated increasing radii");
    diag->add_option("--line-factor", prm.line_factor, "M = factor * R")->check(CLI::NonNegativeNumber);

    auto* ser = app.add_subcommand("series", "Exact tree series");
    add_io(ser);
    ser->add_option("--d", prm.d, "Tree degree")->check(CLI::Range(3, 255));
    ser->add_option("--kind", prm.kind, "j, tree-chi or tree-triangle");
    ser->add_option("--r", prm.r, "J radius variable")->check(CLI::NonNegativeNumber);
    ser->add_option("--z", prm.z, "J level variable")->check(CLI::PositiveNumber);
    ser->add_option("--p", prm.p, "Edge probability")->check(CLI::Range(0.0, 1.0));
    ser->add_option("--depth", prm.depth, "Truncation depth")->check(CLI::NonNegativeNumber);

    auto* pu = app.add_subcommand("pu", "p_u by inverting alpha(p) = 1/sqrt(d-1)");
    add_box(pu), add_run(pu), add_io(pu);
    pu->add_option("--tolerance", prm.tolerance, "Bracket width")->check(CLI::PositiveNumber);

    auto* pc = app.add_subcommand("pc-proxy", "Finite-size proxy for p_c");
    add_run(pc), add_io(pc);
    pc->add_option("--d", prm.d, "Tree degree")->check(CLI::Range(3, 255));
    pc->add_option("--grid-start", prm.grid_start)->check(CLI::Range(0.0, 1.0));
    pc->add_option("--grid-stop", prm.grid_stop)->check(CLI::Range(0.0, 1.0));
    pc->add_option("--grid-step", prm.grid_step)->check(CLI::PositiveNumber);

    auto* orc = app.add_subcommand("oracle-check", "Monte Carlo against exhaustive enumeration on a graph corpus");
    add_run(orc), add_io(orc);
    orc->add_option("--corpus", prm.corpus, "Directory of .txt graphs");
    orc->add_option("--ps", prm.ps, "Comma-separated p values");

    // Per-command defaults that differ from the desk-scale box.
    if (!raw_args.empty()) {
        const auto& cmd = raw_args.front();
        if (cmd == "triangle") prm.R = 6, prm.M = 6, prm.samples = 10000;
        if (cmd == "triangle-diagnostic") prm.samples = 10000;
        if (cmd == "pu") prm.R = 10, prm.M = 30, prm.samples = 20000;
        if (cmd == "pc-proxy") prm.samples = 4000;
    }

    try {
        auto args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    auto* sub = app.get_subcommands().front();
    Context c{prm, out, err, false, false, {}};
    c.seed_given = sub->get_option_no_throw("--seed") != nullptr && sub->count("--seed") > 0;
    c.threads_given = sub->get_option_no_throw("--threads") != nullptr && sub->count("--threads") > 0;
    try {
        const std::string name = sub->get_name();
        if (name == "two-point") return cmd_two_point(c);
        if (name == "alpha-curve") return cmd_decay_curve(c, true);
        if (name == "beta-curve") return cmd_decay_curve(c, false);
        if (name == "chi-tilted") return cmd_chi_tilted(c);
        if (name == "triangle") return cmd_triangle(c);
        if (name == "triangle-diagnostic") return cmd_triangle_diagnostic(c);
        if (name == "series") return cmd_series(c);
        if (name == "pu") return cmd_pu(c);
        if (name == "pc-proxy") return cmd_pc_proxy(c);
        if (name == "oracle-check") return cmd_oracle_check(c);
    } catch (const est::InsufficientSignal& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const est::BracketFailure& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace perclab::cli
