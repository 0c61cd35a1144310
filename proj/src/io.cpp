#include "perclab/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace perclab::io {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

template <class T>
T parse_integer(const std::string& s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("bad integer: " + s);
    return v;
}

void expect_header(const CsvTable& t, const std::vector<std::string>& header) {
    if (t.header != header) throw std::invalid_argument("unexpected CSV header");
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("cannot format double");
    return {buf, ptr};
}

double parse_double(const std::string& text) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw std::invalid_argument("bad number: " + text);
    return v;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const std::vector<std::vector<Cell>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw std::invalid_argument("row width differs from header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) out << format_double(v);
                    else out << v;
                },
                row[i]);
        }
        out << '\n';
    }
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    t.header = split(line, ',');
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto row = split(line, ',');
        if (row.size() != t.header.size()) throw std::invalid_argument("CSV row width differs from header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<TwoPointRow> two_point_rows(const mc::TwoPointTable& table) {
    std::vector<TwoPointRow> rows;
    for (int n = 0; n <= table.max_n(); ++n) {
        for (int m = 0; m <= table.max_m(); ++m) {
            const auto e = table.estimate(n, m);
            rows.push_back({n, m, e.estimate, e.stderr, e.ci_low, e.ci_high, table.hits(n, m), table.samples()});
        }
    }
    return rows;
}

void write_two_point_csv(std::ostream& out, const std::vector<TwoPointRow>& rows) {
    std::vector<std::vector<Cell>> cells;
    for (const auto& r : rows) {
        cells.push_back({std::int64_t{r.n}, std::int64_t{r.m}, r.tau, r.stderr, r.ci_lo, r.ci_hi, r.hits, r.samples});
    }
    write_csv(out, kTwoPointHeader, cells);
}

std::vector<TwoPointRow> read_two_point_csv(std::istream& in) {
    const auto t = read_csv(in);
    expect_header(t, kTwoPointHeader);
    std::vector<TwoPointRow> rows;
    for (const auto& r : t.rows) {
        rows.push_back({parse_integer<int>(r[0]), parse_integer<int>(r[1]), parse_double(r[2]), parse_double(r[3]),
                        parse_double(r[4]), parse_double(r[5]), parse_integer<std::uint64_t>(r[6]),
                        parse_integer<std::uint64_t>(r[7])});
    }
    return rows;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows, bool alpha) {
    std::vector<std::vector<Cell>> cells;
    for (const auto& r : rows) {
        std::vector<Cell> row{r.p, r.sup, r.reg, r.stderr};
        if (alpha) row.emplace_back(r.target.value_or(0.0));
        cells.push_back(std::move(row));
    }
    write_csv(out, alpha ? kAlphaCurveHeader : kBetaCurveHeader, cells);
}

std::vector<CurveRow> read_curve_csv(std::istream& in) {
    const auto t = read_csv(in);
    const bool alpha = t.header == kAlphaCurveHeader;
    if (!alpha) expect_header(t, kBetaCurveHeader);
    std::vector<CurveRow> rows;
    for (const auto& r : t.rows) {
        CurveRow row{parse_double(r[0]), parse_double(r[1]), parse_double(r[2]), parse_double(r[3]), std::nullopt};
        if (alpha) row.target = parse_double(r[4]);
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json to_json(const RunRecord& r) {
    return {{"schemaVersion", r.schema_version},
            {"timestamp", r.timestamp},
            {"d", r.d},
            {"p", r.p},
            {"R", r.R},
            {"M", r.M},
            {"samples", r.samples},
            {"baseSeed", r.base_seed},
            {"estimator", r.estimator},
            {"estimate", r.estimate},
            {"stderr", r.stderr},
            {"ciLow", r.ci_low},
            {"ciHigh", r.ci_high},
            {"wallMillis", r.wall_millis}};
}

RunRecord run_record_from_json(const nlohmann::json& j) {
    RunRecord r;
    r.schema_version = j.at("schemaVersion").get<int>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.d = j.at("d").get<int>();
    r.p = j.at("p").get<double>();
    r.R = j.at("R").get<int>();
    r.M = j.at("M").get<int>();
    r.samples = j.at("samples").get<std::uint64_t>();
    r.base_seed = j.at("baseSeed").get<std::uint64_t>();
    r.estimator = j.at("estimator").get<std::string>();
    r.estimate = j.at("estimate").get<double>();
    r.stderr = j.at("stderr").get<double>();
    r.ci_low = j.at("ciLow").get<double>();
    r.ci_high = j.at("ciHigh").get<double>();
    r.wall_millis = j.at("wallMillis").get<double>();
    return r;
}

std::string now_utc_iso8601() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void append_record(const std::string& path, const RunRecord& r) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << to_json(r).dump() << '\n';
}

std::vector<RunRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<RunRecord> out;
    for (std::string line; std::getline(in, line);) {
        if (!trim(line).empty()) out.push_back(run_record_from_json(nlohmann::json::parse(line)));
    }
    return out;
}

nlohmann::json sidecar(const std::string& command, nlohmann::json parameters, nlohmann::json results) {
    return {{"schemaVersion", kSchemaVersion},
            {"command", command},
            {"parameters", std::move(parameters)},
            {"results", std::move(results)}};
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> parse_config(std::istream& in) {
    std::map<std::string, std::string> out;
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        auto key = trim(line.substr(0, eq));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_config(in);
}

unsigned resolve_threads(std::optional<unsigned> flag) {
    if (const char* env = std::getenv("PERCLAB_THREADS"); env != nullptr && *env != '\0') {
        const auto v = parse_integer<unsigned>(trim(env));
        if (v == 0) throw std::invalid_argument("PERCLAB_THREADS must be positive");
        return v;
    }
    if (flag) {
        if (*flag == 0) throw std::invalid_argument("--threads must be positive");
        return *flag;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag) return *flag;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace perclab::io
