#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gtp/diagnostics.hpp"
#include "gtp/game.hpp"
#include "gtp/measure.hpp"
#include "gtp/reality.hpp"
#include "gtp/skeptic.hpp"

namespace gtp {

inline constexpr int kConfigSchemaVersion = 1;

/// Documented exit statuses of the command-line runner.
enum class ExitStatus : int {
    Ok = 0,
    Unexpected = 1,
    Config = 2,
    Collateral = 3,
    Invariant = 4,  // invariant or declared expectation failed
    Io = 5,
};

std::string to_string(ExitStatus s);

/// Everything a run needs, parsed and validated from the JSON config.
/// Strategy and reality descriptions stay as JSON text so one config builds
/// fresh, independent instances per seed.
struct ExperimentConfig {
    enum class Kind { Run, DoobCheck, Ladder };

    Kind kind = Kind::Run;
    std::string name;
    std::filesystem::path base_dir;  // relative paths in the config resolve here

    std::string game_type;  // single_hedge | hedge_set | powered_hedge_set
    std::optional<PricingMeasure> measure;
    std::optional<HedgeKind> hedge;  // single_hedge only
    double price = 0.0;             // single_hedge only
    double c = 0.0;                 // single_hedge: hedge conditions hold for |x| >= c
    double r = 1.5;                 // powered_hedge_set only

    std::string strategy_json;
    std::string reality_json;

    std::size_t horizon = 1000;
    std::vector<std::uint64_t> seeds{1};

    std::size_t trajectory_stride = 1;
    bool write_detectors = true;
    std::size_t detector_stride = 100;
    std::size_t ladder_depth = 200;
    double cauchy_tolerance = 1e-3;

    DoobOptions doob;

    // Declared expectations (checked by run_experiment).
    std::string expect_status = "ok";  // ok | collateral_violation
    std::optional<double> expect_min_trend;
    std::optional<double> expect_max_capital_ratio;
    std::optional<bool> expect_doob_passed;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Game, contexts and factories for one parsed config.
class ExperimentSetup {
public:
    explicit ExperimentSetup(const ExperimentConfig& cfg);

    const GameSpec& game() const noexcept { return game_; }
    std::unique_ptr<SkepticStrategy> make_skeptic() const;
    std::unique_ptr<RealityStrategy> make_reality(std::uint64_t seed) const;
    /// Adversary spec when the reality is one of the threshold adversaries.
    std::optional<AdversarySpec> adversary_spec(std::uint64_t seed) const;
    std::vector<EventDetector> make_detectors() const;
    /// The ladder written to ladder.csv (none for single-hedge games).
    std::optional<PriceLadder> export_ladder() const;

private:
    ExperimentConfig cfg_;
    GameSpec game_;
    std::optional<SingleHedgeContext> single_;
    std::optional<CountableHedgeContext> countable_;
    std::optional<MZContext> mz_;
    LadderSource calls_, powered_, roots_;
};

struct SeedResult {
    std::uint64_t seed = 0;
    std::size_t rounds = 0;
    double final_capital = 0.0;
    double min_capital = 0.0;
    double max_capital = 0.0;
    std::size_t slack_warnings = 0;
    std::optional<ViolationRecord> violation;
    std::optional<std::size_t> saturated;  // round at which capital passed kCapitalCeiling
    std::optional<ForcingReport> forcing;
    std::vector<DetectorSummary> detectors;
};

struct ExperimentResult {
    std::string name;
    ExitStatus status = ExitStatus::Ok;
    std::string message;
    std::vector<SeedResult> seeds;
    std::optional<DoobReport> doob;
    std::optional<CoherenceReport> coherence;
};

/// Runs the config and writes trajectory_seed{S}.csv, detectors_seed{S}.csv,
/// ladder.csv and summary.txt into out_dir. Never throws for run-time
/// failures; they become the status.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct SuiteEntry {
    std::string name;
    ExitStatus status = ExitStatus::Ok;
    bool passed = false;
    std::string message;
};

struct SuiteResult {
    std::vector<SuiteEntry> entries;
    std::vector<std::string> warnings;
    bool passed() const noexcept;
};

/// Suite file: {"schema_version": 1, "experiments": [path or inline config, ...]}.
/// Each experiment writes into out_root/<name>; suite_report.txt lands in out_root.
SuiteResult run_suite(const std::filesystem::path& suite_path, const std::filesystem::path& out_root,
                      unsigned workers = 1, std::optional<std::uint64_t> seed_override = std::nullopt,
                      std::optional<std::size_t> horizon_override = std::nullopt);

} // namespace gtp
