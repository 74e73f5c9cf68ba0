// gtpsim: config-driven runner for the betting-game simulations.
//
//   gtpsim run CONFIG [--out DIR] [--seed S] [--horizon N]
//   gtpsim suite SUITE [--out DIR] [--workers W] [--seed S] [--horizon N]
//   gtpsim validate CONFIG
//
// Exit status: 0 ok, 1 unexpected error, 2 config error, 3 collateral
// violation, 4 invariant or expectation failure, 5 I/O error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gtp/errors.hpp"
#include "gtp/experiment.hpp"

namespace fs = std::filesystem;

namespace {

fs::path output_root(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("GTP_OUTPUT_ROOT"); env && *env) return env;
    return "gtp_out";
}

int code(gtp::ExitStatus s) { return static_cast<int>(s); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulations of the betting game with hedges: run experiments and suites"};
    app.require_subcommand(1);

    std::string config_path, suite_path, out_flag;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> horizon;
    unsigned workers = 1;

    auto* run = app.add_subcommand("run", "Run one experiment config");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_flag, "Output root (default $GTP_OUTPUT_ROOT or ./gtp_out)");
    run->add_option("--seed", seed, "Replace the config's seed list with this seed");
    run->add_option("--horizon", horizon, "Override the number of rounds")->check(CLI::PositiveNumber);

    auto* suite = app.add_subcommand("suite", "Run every experiment of a suite file");
    suite->add_option("suite", suite_path, "Suite file (JSON)")->required();
    suite->add_option("--out", out_flag, "Output root (default $GTP_OUTPUT_ROOT or ./gtp_out)");
    suite->add_option("--workers", workers, "Experiments run in parallel")->check(CLI::PositiveNumber);
    suite->add_option("--seed", seed, "Replace every seed list with this seed");
    suite->add_option("--horizon", horizon, "Override every horizon")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    validate->add_option("config", config_path, "Experiment config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : code(gtp::ExitStatus::Config);
    }

    try {
        if (*validate) {
            const auto cfg = gtp::load_config(config_path);
            std::cout << "config " << cfg.name << ": ok\n";
            return 0;
        }
        if (*run) {
            auto cfg = gtp::load_config(config_path);
            if (seed) cfg.seeds = {*seed};
            if (horizon) {
                cfg.horizon = *horizon;
                cfg.doob.horizon = *horizon;
            }
            const auto dir = output_root(out_flag) / cfg.name;
            const auto res = gtp::run_experiment(cfg, dir);
            std::cout << cfg.name << ": " << gtp::to_string(res.status);
            if (!res.message.empty()) std::cout << " (" << res.message << ")";
            std::cout << "\nartifacts: " << dir.string() << '\n';
            return code(res.status);
        }
        const auto root = output_root(out_flag);
        const auto res = gtp::run_suite(suite_path, root, workers, seed, horizon);
        for (const auto& w : res.warnings) std::cout << "WARNING " << w << '\n';
        for (const auto& e : res.entries) {
            std::cout << (e.passed ? "PASS " : "FAIL ") << e.name << " [" << gtp::to_string(e.status) << "]";
            if (!e.message.empty()) std::cout << ' ' << e.message;
            std::cout << '\n';
        }
        std::cout << "report: " << (root / "suite_report.txt").string() << '\n';
        if (res.passed()) return 0;
        // The first failing entry decides the status.
        for (const auto& e : res.entries)
            if (!e.passed) return code(e.status);
        return code(gtp::ExitStatus::Unexpected);
    } catch (const gtp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return code(gtp::ExitStatus::Config);
    } catch (const gtp::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return code(gtp::ExitStatus::Io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return code(gtp::ExitStatus::Unexpected);
    }
}
