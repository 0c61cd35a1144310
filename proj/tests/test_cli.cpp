#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "perclab/io.hpp"

using namespace perclab;
using perclab::cli::run_cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "perclab_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

io::CsvTable parse(const std::string& text) {
    std::istringstream in(text);
    return io::read_csv(in);
}

}  // namespace

TEST_CASE("usage errors exit 1") {
    unsetenv("PERCLAB_THREADS");
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"no-such-command"}).code == cli::kUsage);
    CHECK(run({"two-point", "--p", "1.5"}).code == cli::kUsage);
    CHECK(run({"two-point", "--samples", "0"}).code == cli::kUsage);
    CHECK(run({"two-point", "--d", "2"}).code == cli::kUsage);
    CHECK(run({"two-point", "--bogus", "1"}).code == cli::kUsage);
    CHECK(run({"alpha-curve", "--p-grid", "0.5:0.4:0.1"}).code == cli::kUsage);
    CHECK(run({"alpha-curve"}).code == cli::kUsage);
    CHECK(run({"triangle", "--method", "guess", "--samples", "2"}).code == cli::kUsage);
    CHECK(run({"two-point", "--config", "/nonexistent/perclab.cfg"}).code == cli::kUsage);
    CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("series subcommand") {
    const auto zero = run({"series", "--r", "0"});
    CHECK(zero.code == cli::kOk);
    CHECK(parse(zero.out).rows.at(0).at(1) == "1");

    const auto div = run({"series", "--d", "3", "--r", "0.5", "--z", "0.9"});
    CHECK(div.code == cli::kNumeric);
    CHECK(parse(div.out).rows.at(0).at(2) == "z_below_br");

    const auto chi = run({"series", "--kind", "tree-chi", "--p", "0.25"});
    CHECK(chi.code == cli::kOk);
    CHECK(io::parse_double(parse(chi.out).rows.at(0).at(1)) == doctest::Approx(2.5));
    CHECK(run({"series", "--kind", "tree-triangle", "--p", "0.3"}).code == cli::kUsage);
}

TEST_CASE("two-point extremes") {
    const auto zero = run({"two-point", "--p", "0", "--tree-radius", "3", "--line-halfwidth", "3", "--samples", "50", "--seed", "1"});
    REQUIRE(zero.code == cli::kOk);
    const auto t0 = parse(zero.out);
    CHECK(t0.header == io::kTwoPointHeader);
    CHECK(t0.rows.size() == 16);
    for (const auto& r : t0.rows) CHECK(r[2] == (r[0] == "0" && r[1] == "0" ? "1" : "0"));

    const auto one = run({"two-point", "--p", "1", "--tree-radius", "3", "--line-halfwidth", "3", "--samples", "50", "--seed", "1"});
    for (const auto& r : parse(one.out).rows) CHECK(r[2] == "1");
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
    unsetenv("PERCLAB_THREADS");
    const auto dir = scratch_dir();
    const std::vector<std::string> base{"two-point", "--p", "0.45", "--tree-radius", "5", "--line-halfwidth", "6",
                                        "--samples", "4001", "--seed", "77"};
    std::vector<std::string> contents;
    for (const std::string threads : {"1", "8", "1"}) {
        const auto out = (dir / ("tp" + threads + ".csv")).string();
        auto args = base;
        args.insert(args.end(), {"--threads", threads, "--out", out});
        REQUIRE(run(args).code == cli::kOk);
        contents.push_back(io::read_text_file(out));
        contents.push_back(io::read_text_file(out + ".json"));
    }
    CHECK(contents[0] == contents[2]);
    CHECK(contents[1] == contents[3]);
    CHECK(contents[0] == contents[4]);

    setenv("PERCLAB_THREADS", "3", 1);
    const auto env = run(base);
    unsetenv("PERCLAB_THREADS");
    CHECK(env.out == contents[0]);
}

TEST_CASE("sidecar and records") {
    const auto dir = scratch_dir();
    const auto out = (dir / "meta.csv").string();
    std::filesystem::remove(out + ".records.jsonl");
    REQUIRE(run({"two-point", "--p", "0.3", "--tree-radius", "2", "--line-halfwidth", "2", "--samples", "100",
                 "--out", out})
                .code == cli::kOk);
    const auto meta = nlohmann::json::parse(io::read_text_file(out + ".json"));
    CHECK(meta.at("command") == "two-point");
    CHECK(meta.at("schemaVersion") == io::kSchemaVersion);
    // The seed is recorded even when drawn from entropy.
    CHECK(meta.at("parameters").contains("baseSeed"));
    const auto records = io::read_records(out + ".records.jsonl");
    REQUIRE(records.size() == 1);
    CHECK(records[0].base_seed == meta.at("parameters").at("baseSeed").get<std::uint64_t>());
    CHECK(records[0].samples == 100);

    // Rerunning with the recorded seed reproduces the data.
    const auto again = (dir / "meta2.csv").string();
    REQUIRE(run({"two-point", "--p", "0.3", "--tree-radius", "2", "--line-halfwidth", "2", "--samples", "100",
                 "--seed", std::to_string(records[0].base_seed), "--out", again})
                .code == cli::kOk);
    CHECK(io::read_text_file(again) == io::read_text_file(out));
    CHECK(io::read_records(out + ".records.jsonl").size() == 1);
}

TEST_CASE("config file values yield to flags") {
    const auto dir = scratch_dir();
    const auto cfg = (dir / "run.cfg").string();
    io::write_text_file(cfg, "# defaults\np = 1\nsamples = 20\ntree-radius = 2\nline-halfwidth = 1\nseed = 4\n");
    const auto from_file = run({"two-point", "--config", cfg});
    REQUIRE(from_file.code == cli::kOk);
    const auto t = parse(from_file.out);
    CHECK(t.rows.size() == 6);
    CHECK(t.rows.back()[2] == "1");
    CHECK(t.rows.back()[7] == "20");
    const auto override = run({"two-point", "--config", cfg, "--p", "0"});
    CHECK(parse(override.out).rows.back()[2] == "0");
}

TEST_CASE("alpha curve") {
    const std::vector<std::string> box{"--tree-radius", "4", "--line-halfwidth", "4", "--samples", "300", "--seed", "2"};
    auto args = std::vector<std::string>{"alpha-curve", "--p-grid", "0"};
    args.insert(args.end(), box.begin(), box.end());
    const auto zero = run(args);
    REQUIRE(zero.code == cli::kOk);
    CHECK(parse(zero.out).rows.at(0).at(1) == "0");
    args[2] = "1";
    CHECK(parse(run(args).out).rows.at(0).at(1) == "1");

    args[2] = "0.2:0.9:0.1";
    const auto curve = run(args);
    REQUIRE(curve.code == cli::kOk);
    const auto t = parse(curve.out);
    CHECK(t.header == io::kAlphaCurveHeader);
    REQUIRE(t.rows.size() == 8);
    double prev = 0;
    for (const auto& r : t.rows) {
        CHECK(r[4] == "0.7071067811865475");
        const double a = io::parse_double(r[1]);
        CHECK(a >= prev);
        prev = a;
    }
    auto beta = args;
    beta[0] = "beta-curve";
    const auto b = run(beta);
    REQUIRE(b.code == cli::kOk);
    CHECK(parse(b.out).header == io::kBetaCurveHeader);
}

TEST_CASE("insufficient signal exits 2") {
    CHECK(run({"alpha-curve", "--p-grid", "0.3", "--tree-radius", "4", "--line-halfwidth", "4", "--samples", "5",
               "--seed", "1"})
              .code == cli::kNumeric);
}

TEST_CASE("triangle commands") {
    const auto mc = run({"triangle", "--p", "0", "--tree-radius", "2", "--line-halfwidth", "2", "--samples", "10", "--seed", "1"});
    REQUIRE(mc.code == cli::kOk);
    CHECK(parse(mc.out).rows.at(0).at(4) == "1");
    const auto table = run({"triangle", "--method", "table", "--p", "1", "--tree-radius", "2", "--line-halfwidth", "2",
                            "--samples", "10", "--seed", "1"});
    REQUIRE(table.code == cli::kOk);
    CHECK(parse(table.out).rows.at(0).at(4) == "144");  // (4 x 3)^2 over the inner domain (1, 1)

    const auto diag = run({"triangle-diagnostic", "--p", "0", "--radii", "2,3,4", "--samples", "10", "--seed", "1"});
    REQUIRE(diag.code == cli::kOk);
    const auto t = parse(diag.out);
    CHECK(t.rows.size() == 3);
    for (const auto& r : t.rows) CHECK(r[2] == "1");
    CHECK(diag.err.find("saturating") != std::string::npos);
}

TEST_CASE("chi-tilted") {
    const auto r = run({"chi-tilted", "--p", "0", "--tree-radius", "3", "--line-halfwidth", "3", "--samples", "10", "--seed", "1"});
    REQUIRE(r.code == cli::kOk);
    const auto t = parse(r.out);
    CHECK(t.rows.at(0).at(1) == "1");
    CHECK(t.rows.at(0).at(6) == "1");
}

TEST_CASE("oracle check") {
    const auto ok = run({"oracle-check", "--corpus", fixtures::kCorpus, "--samples", "20000", "--seed", "3"});
    CHECK(ok.code == cli::kOk);
    CHECK(parse(ok.out).rows.size() >= 18);
    // One configuration per graph cannot match the exact values.
    const auto bad = run({"oracle-check", "--corpus", fixtures::kCorpus, "--samples", "1", "--seed", "3"});
    CHECK(bad.code == cli::kOracleMismatch);
    CHECK(run({"oracle-check", "--corpus", "/nonexistent", "--samples", "10"}).code == cli::kUsage);
}

TEST_CASE("pu and pc-proxy run end to end") {
    const auto pu = run({"pu", "--tree-radius", "5", "--line-halfwidth", "8", "--samples", "800", "--seed", "1",
                         "--tolerance", "0.05"});
    REQUIRE(pu.code == cli::kOk);
    CHECK(parse(pu.out).header == std::vector<std::string>{"p", "alpha_sup", "stderr", "beta_sup", "beta_stderr"});
    const auto pc = run({"pc-proxy", "--samples", "300", "--seed", "1", "--grid-start", "0.1", "--grid-stop", "0.9",
                         "--grid-step", "0.2"});
    REQUIRE(pc.code == cli::kOk);
    CHECK(parse(pc.out).rows.size() == 5);
}
