#pragma once

// Result persistence: CSV tables, JSON metadata sidecars, append-only run
// records, and the key=value run configuration.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "perclab/perc_mc.hpp"

namespace perclab::io {

inline constexpr int kSchemaVersion = 1;

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& out, const std::vector<std::string>& header, const std::vector<std::vector<Cell>>& rows);
CsvTable read_csv(std::istream& in);

inline const std::vector<std::string> kTwoPointHeader = {"n", "m", "tau", "stderr", "ci_lo", "ci_hi", "hits", "samples"};
inline const std::vector<std::string> kAlphaCurveHeader = {"p", "alpha_sup", "alpha_reg", "stderr", "target"};
inline const std::vector<std::string> kBetaCurveHeader = {"p", "beta_sup", "beta_reg", "stderr"};

struct TwoPointRow {
    int n = 0;
    int m = 0;
    double tau = 0;
    double stderr = 0;
    double ci_lo = 0;
    double ci_hi = 0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
    friend bool operator==(const TwoPointRow&, const TwoPointRow&) = default;
};

std::vector<TwoPointRow> two_point_rows(const mc::TwoPointTable& table);
void write_two_point_csv(std::ostream& out, const std::vector<TwoPointRow>& rows);
std::vector<TwoPointRow> read_two_point_csv(std::istream& in);

struct CurveRow {
    double p = 0;
    double sup = 0;
    double reg = 0;
    double stderr = 0;
    std::optional<double> target;  // alpha curves only
    friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows, bool alpha);
std::vector<CurveRow> read_curve_csv(std::istream& in);

struct RunRecord {
    int schema_version = kSchemaVersion;
    std::string timestamp;  // ISO 8601, UTC
    int d = 3;
    double p = 0;
    int R = 0;
    int M = 0;
    std::uint64_t samples = 0;
    std::uint64_t base_seed = 0;
    std::string estimator;
    double estimate = 0;
    double stderr = 0;
    double ci_low = 0;
    double ci_high = 0;
    double wall_millis = 0;
    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

nlohmann::json to_json(const RunRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);
std::string now_utc_iso8601();
// One JSON object per line.
void append_record(const std::string& path, const RunRecord& r);
std::vector<RunRecord> read_records(const std::string& path);

// Sidecar: {"schemaVersion", "command", "parameters", "results"}. No clock or
// thread data, so identical runs give identical files.
nlohmann::json sidecar(const std::string& command, nlohmann::json parameters, nlohmann::json results);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// key=value lines; '#' starts a comment; surrounding whitespace is trimmed.
std::map<std::string, std::string> parse_config(std::istream& in);
std::map<std::string, std::string> read_config(const std::string& path);

// --threads value, overridden by PERCLAB_THREADS when set, else the hardware
// concurrency.
unsigned resolve_threads(std::optional<unsigned> flag);
// The given seed, or one drawn from system entropy.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

}  // namespace perclab::io
