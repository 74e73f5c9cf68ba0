#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtp/errors.hpp"
#include "gtp/experiment.hpp"

using namespace gtp;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"({
  "schema_version": 1,
  "name": "t",
  "game": {"type": "single_hedge", "hedge": {"type": "power", "exponent": 2}, "price": 1.0, "c": 1.0},
  "strategy": {"id": "slln_single"},
  "reality": {"id": "constant", "c": 1.0},
  "horizon": 500,
  "seeds": [1, 2]
})";

std::string with(const std::string& from, const std::string& to) {
    std::string s = kBase;
    const auto p = s.find(from);
    REQUIRE(p != std::string::npos);
    s.replace(p, from.size(), to);
    return s;
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("gtp_unit_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config parses and validates") {
    const auto cfg = parse_config(kBase);
    CHECK(cfg.name == "t");
    CHECK(cfg.horizon == 500);
    CHECK(cfg.seeds.size() == 2);
    CHECK(cfg.price == 1.0);
}

TEST_CASE("config errors name the field") {
    CHECK(error_of(with("\"schema_version\": 1", "\"schema_version\": 2")).find("schema_version") != std::string::npos);
    CHECK(error_of(with("\"horizon\": 500", "\"horizn\": 500")).find("horizn") != std::string::npos);
    CHECK(error_of(with("\"slln_single\"", "\"nope\"")).find("strategy") != std::string::npos);
    CHECK(error_of(with("\"price\": 1.0", "\"price\": -1.0")).find("price") != std::string::npos);
    CHECK(error_of("{not json").size() > 0);
    // strategy that needs the calls game in a single-hedge game
    CHECK(error_of(with("\"slln_single\"", "\"slln_calls\"")).size() > 0);
    // epsilon above the ceiling without the override
    CHECK(error_of(with("{\"id\": \"slln_single\"}", "{\"id\": \"drift_single_plus\", \"epsilon\": 3.0}")).size() > 0);
}

TEST_CASE("run writes deterministic artifacts") {
    const auto cfg = parse_config(kBase);
    const auto a = fresh_dir("run_a"), b = fresh_dir("run_b");
    const auto ra = run_experiment(cfg, a);
    const auto rb = run_experiment(cfg, b);
    CHECK(ra.status == ExitStatus::Ok);
    REQUIRE(ra.seeds.size() == 2);
    CHECK(ra.seeds[0].final_capital > 1.0);
    for (const char* f : {"trajectory_seed1.csv", "detectors_seed1.csv", "summary.txt"}) {
        CHECK(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(rb.seeds[1].final_capital == ra.seeds[1].final_capital);
}

TEST_CASE("collateral violation statuses") {
    const std::string broken = with("{\"id\": \"slln_single\"}",
                                    "{\"id\": \"drift_single_plus\", \"epsilon\": 3.0, \"allow_unsafe_epsilon\": true}");
    const std::string ramp = "{\"id\": \"ramp\", \"c\": -0.5}";
    std::string text = broken;
    const std::string constant = "{\"id\": \"constant\", \"c\": 1.0}";
    text.replace(text.find(constant), constant.size(), ramp);
    const auto r = run_experiment(parse_config(text), fresh_dir("viol"));
    CHECK(r.status == ExitStatus::Collateral);
    REQUIRE(r.seeds[0].violation);
    CHECK(r.seeds[0].violation->round == 2);

    std::string expected = text;
    expected.insert(expected.rfind('}'), ", \"expect\": {\"status\": \"collateral_violation\"}");
    CHECK(run_experiment(parse_config(expected), fresh_dir("viol2")).status == ExitStatus::Ok);

    // expecting a violation that never happens is an invariant failure
    std::string wrong = kBase;
    wrong.insert(wrong.rfind('}'), ", \"expect\": {\"status\": \"collateral_violation\"}");
    CHECK(run_experiment(parse_config(wrong), fresh_dir("viol3")).status == ExitStatus::Invariant);
}

TEST_CASE("declared trend expectation") {
    std::string text = kBase;
    text.insert(text.rfind('}'), ", \"expect\": {\"max_capital_ratio\": 1.0001}");
    // capital grows on the constant path, so the ratio bound fails
    CHECK(run_experiment(parse_config(text), fresh_dir("trend")).status == ExitStatus::Invariant);
}

TEST_CASE("suite runs inline entries and rejects duplicates") {
    const auto dir = fresh_dir("suite");
    {
        std::ofstream(dir / "suite.json") << "{\"schema_version\": 1, \"experiments\": [" << kBase << "]}";
        const auto s = run_suite(dir / "suite.json", dir / "out", 2);
        CHECK(s.passed());
        CHECK(fs::exists(dir / "out" / "suite_report.txt"));
        CHECK(fs::exists(dir / "out" / "t" / "summary.txt"));
    }
    {
        std::ofstream(dir / "dup.json") << "{\"schema_version\": 1, \"experiments\": [" << kBase << "," << kBase << "]}";
        const auto s = run_suite(dir / "dup.json", dir / "out2");
        CHECK_FALSE(s.passed());
        REQUIRE(s.entries.size() == 2);
        CHECK(s.entries[1].status == ExitStatus::Config);
    }
    {
        std::ofstream(dir / "empty.json") << "{\"schema_version\": 1, \"experiments\": []}";
        const auto s = run_suite(dir / "empty.json", dir / "out3");
        CHECK(s.passed());
        CHECK(s.warnings.size() == 1);
    }
}
