#include "gtp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gtp/errors.hpp"
#include "gtp/rng.hpp"

namespace gtp {

using nlohmann::json;

std::string to_string(ExitStatus s) {
    switch (s) {
    case ExitStatus::Ok:
        return "ok";
    case ExitStatus::Unexpected:
        return "unexpected_error";
    case ExitStatus::Config:
        return "config_error";
    case ExitStatus::Collateral:
        return "collateral_violation";
    case ExitStatus::Invariant:
        return "invariant_failure";
    case ExitStatus::Io:
        return "io_error";
    }
    return "?";
}

namespace {

// Typed field access with the JSON path in every error message.
const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(path + "." + key + ": required field missing");
    return *it;
}

double number(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = field(obj, key, path);
    if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& path, double def) {
    return obj.contains(key) ? number(obj, key, path) : def;
}

std::uint64_t count(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = field(obj, key, path);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError(path + "." + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::uint64_t count_or(const json& obj, const std::string& key, const std::string& path, std::uint64_t def) {
    return obj.contains(key) ? count(obj, key, path) : def;
}

std::string text(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = field(obj, key, path);
    if (!v.is_string()) throw ConfigError(path + "." + key + ": expected a string");
    return v.get<std::string>();
}

std::string text_or(const json& obj, const std::string& key, const std::string& path, const std::string& def) {
    return obj.contains(key) ? text(obj, key, path) : def;
}

bool flag_or(const json& obj, const std::string& key, const std::string& path, bool def) {
    if (!obj.contains(key)) return def;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(path + "." + key + ": expected true or false");
    return v.get<bool>();
}

std::vector<double> numbers(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = field(obj, key, path);
    if (!v.is_array()) throw ConfigError(path + "." + key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(path + "." + key + ": expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void known_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    for (const auto& [k, _] : obj.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; }))
            throw ConfigError(path + "." + k + ": unknown field");
    }
}

template <class F>
auto rethrow_as_config(const std::string& path, F f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

HedgeKind parse_hedge(const json& j, const std::string& path) {
    const std::string type = text(j, "type", path);
    return rethrow_as_config(path, [&]() -> HedgeKind {
        if (type == "power") return PowerHedge{number(j, "exponent", path)};
        if (type == "call") return Call{number(j, "strike", path)};
        if (type == "powered_call") return PoweredCall{number(j, "r", path), number(j, "level", path)};
        if (type == "unit") return UnitPayoff{};
        if (type == "x_log2") return GeneralSymmetric::linear_log_squared();
        if (type == "x_log1p") return GeneralSymmetric::linear_log();
        if (type == "tabulated") return GeneralSymmetric::tabulated(numbers(j, "x", path), numbers(j, "y", path));
        throw ConfigError(path + ".type: unknown hedge type '" + type + "'");
    });
}

PricingMeasure parse_measure(const json& j, const std::string& path) {
    const std::string type = text(j, "type", path);
    return rethrow_as_config(path, [&] {
        if (type == "discrete") return PricingMeasure::discrete(numbers(j, "points", path), numbers(j, "weights", path));
        if (type == "uniform") return PricingMeasure::uniform(numbers(j, "points", path));
        if (type == "exponential") return PricingMeasure::exponential(number(j, "rate", path));
        if (type == "pareto") return PricingMeasure::pareto(number(j, "tail_index", path), number(j, "scale", path));
        throw ConfigError(path + ".type: unknown measure type '" + type + "'");
    });
}

json parse_json(const std::string& s, const std::string& what) {
    try {
        return json::parse(s);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

// Context options come from the strategy object (or the target of an overlay).
const json& context_options(const json& s) {
    if (s.is_object() && s.value("id", "") == "upcrossing" && s.contains("target")) return context_options(s["target"]);
    return s;
}

const std::set<std::string> kSingleStrategies = {"borel_cantelli_single", "weighted_borel_cantelli_single",
                                                 "drift_single_plus",     "drift_single_minus",
                                                 "drift_pair_single",     "slln_single"};
const std::set<std::string> kCallStrategies = {"tail_forcer", "truncated_variance_forcer", "hedged_drift_plus",
                                               "hedged_drift_mirror", "slln_calls"};
const std::set<std::string> kMZStrategies = {"mz_tail_forcer", "mz_truncated_variance_forcer",
                                             "mz_hedged_drift_plus", "mz_hedged_drift_mirror", "mz_slln"};

} // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    const json j = parse_json(json_text, "config");
    const std::string p = "config";
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    known_keys(j, p, {"schema_version", "kind", "name", "game", "strategy", "reality", "horizon", "seeds", "rng",
                      "output", "doob", "expect", "description"});
    if (count(j, "schema_version", p) != kConfigSchemaVersion)
        throw ConfigError("config.schema_version: expected " + std::to_string(kConfigSchemaVersion));
    if (j.contains("rng") && text(j, "rng", p) != kRngName)
        throw ConfigError("config.rng: this build provides " + std::string(kRngName));

    ExperimentConfig cfg;
    cfg.base_dir = base_dir;
    cfg.name = text(j, "name", p);
    if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos || cfg.name == "." || cfg.name == "..")
        throw ConfigError("config.name: must be a non-empty plain directory name");
    const std::string kind = text_or(j, "kind", p, "run");
    if (kind == "run")
        cfg.kind = ExperimentConfig::Kind::Run;
    else if (kind == "doob_check")
        cfg.kind = ExperimentConfig::Kind::DoobCheck;
    else if (kind == "ladder")
        cfg.kind = ExperimentConfig::Kind::Ladder;
    else
        throw ConfigError("config.kind: expected run, doob_check or ladder");

    const auto& g = field(j, "game", p);
    const std::string gp = p + ".game";
    known_keys(g, gp, {"type", "measure", "hedge", "price", "c", "r"});
    cfg.game_type = text(g, "type", gp);
    if (g.contains("measure")) cfg.measure = parse_measure(g["measure"], gp + ".measure");
    if (cfg.game_type == "single_hedge") {
        cfg.hedge = parse_hedge(field(g, "hedge", gp), gp + ".hedge");
        cfg.c = number_or(g, "c", gp, 0.0);
        if (g.contains("price")) {
            cfg.price = number(g, "price", gp);
        } else if (cfg.measure) {
            cfg.price = rethrow_as_config(gp + ".hedge", [&] { return price_hedge(*cfg.measure, *cfg.hedge); });
        } else {
            throw ConfigError(gp + ".price: required when no measure is given");
        }
        if (!(cfg.price > 0.0) || !std::isfinite(cfg.price)) throw ConfigError(gp + ".price: must be positive");
    } else if (cfg.game_type == "hedge_set" || cfg.game_type == "powered_hedge_set") {
        if (!cfg.measure) throw ConfigError(gp + ".measure: required for " + cfg.game_type);
        if (cfg.game_type == "powered_hedge_set") cfg.r = number(g, "r", gp);
    } else {
        throw ConfigError(gp + ".type: expected single_hedge, hedge_set or powered_hedge_set");
    }

    cfg.horizon = count_or(j, "horizon", p, cfg.horizon);
    if (cfg.horizon == 0) throw ConfigError("config.horizon: must be at least 1");
    if (j.contains("seeds")) {
        const auto& s = j["seeds"];
        if (!s.is_array() || s.empty()) throw ConfigError("config.seeds: expected a non-empty array");
        cfg.seeds.clear();
        for (const auto& e : s) {
            if (!e.is_number_unsigned()) throw ConfigError("config.seeds: expected non-negative integers");
            cfg.seeds.push_back(e.get<std::uint64_t>());
        }
    }

    if (j.contains("output")) {
        const auto& o = j["output"];
        const std::string op = p + ".output";
        known_keys(o, op, {"trajectory_stride", "detectors", "detector_stride", "ladder_depth", "cauchy_tolerance"});
        cfg.trajectory_stride = std::max<std::uint64_t>(1, count_or(o, "trajectory_stride", op, 1));
        cfg.write_detectors = flag_or(o, "detectors", op, true);
        cfg.detector_stride = std::max<std::uint64_t>(1, count_or(o, "detector_stride", op, 100));
        cfg.ladder_depth = count_or(o, "ladder_depth", op, cfg.ladder_depth);
        if (cfg.ladder_depth < 4) throw ConfigError(op + ".ladder_depth: must be at least 4");
        cfg.cauchy_tolerance = number_or(o, "cauchy_tolerance", op, 1e-3);
    }

    if (cfg.kind != ExperimentConfig::Kind::Ladder) {
        cfg.strategy_json = field(j, "strategy", p).dump();
        cfg.reality_json = field(j, "reality", p).dump();
    }

    if (j.contains("doob")) {
        const auto& d = j["doob"];
        const std::string dp = p + ".doob";
        known_keys(d, dp, {"c", "runs", "confidence", "workers"});
        cfg.doob.c = number_or(d, "c", dp, 10.0);
        cfg.doob.runs = count_or(d, "runs", dp, 1000);
        cfg.doob.confidence = number_or(d, "confidence", dp, 0.99);
        cfg.doob.workers = static_cast<unsigned>(count_or(d, "workers", dp, 1));
        if (!(cfg.doob.c > 1.0)) throw ConfigError(dp + ".c: must exceed 1");
        if (cfg.doob.runs == 0) throw ConfigError(dp + ".runs: must be at least 1");
    }
    cfg.doob.horizon = cfg.horizon;

    if (j.contains("expect")) {
        const auto& e = j["expect"];
        const std::string ep = p + ".expect";
        known_keys(e, ep, {"status", "min_trend", "max_capital_ratio", "doob_passed"});
        cfg.expect_status = text_or(e, "status", ep, "ok");
        if (cfg.expect_status != "ok" && cfg.expect_status != "collateral_violation")
            throw ConfigError(ep + ".status: expected ok or collateral_violation");
        if (e.contains("min_trend")) cfg.expect_min_trend = number(e, "min_trend", ep);
        if (e.contains("max_capital_ratio")) cfg.expect_max_capital_ratio = number(e, "max_capital_ratio", ep);
        if (e.contains("doob_passed")) cfg.expect_doob_passed = flag_or(e, "doob_passed", ep, true);
    }

    // Build everything once so bad combinations fail here, with the field named.
    ExperimentSetup setup(cfg);
    if (cfg.kind != ExperimentConfig::Kind::Ladder) {
        setup.make_skeptic();
        setup.make_reality(cfg.seeds.front());
        if (cfg.kind == ExperimentConfig::Kind::DoobCheck && !setup.adversary_spec(0))
            throw ConfigError("config.reality.id: doob_check needs a threshold adversary");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

ExperimentSetup::ExperimentSetup(const ExperimentConfig& cfg) : cfg_(cfg) {
    const json s = cfg.strategy_json.empty() ? json::object() : json::parse(cfg.strategy_json);
    const json& opts = context_options(s);
    const std::string sp = "config.strategy";
    const std::string id = opts.is_object() ? opts.value("id", "") : "";

    if (cfg.game_type == "single_hedge") {
        game_ = SingleHedgeGame{*cfg.hedge, cfg.price};
        if (kSingleStrategies.count(id)) {
            SingleHedgeContext::Options o;
            o.c = cfg.c;
            if (opts.contains("epsilon")) o.epsilon = number(opts, "epsilon", sp);
            o.require_valid = flag_or(opts, "require_valid", sp, true);
            o.allow_unsafe_epsilon = flag_or(opts, "allow_unsafe_epsilon", sp, false);
            single_ = rethrow_as_config(sp, [&] { return SingleHedgeContext::make(*cfg.hedge, cfg.price, o); });
        }
    } else if (cfg.game_type == "hedge_set") {
        calls_ = std::make_shared<const LadderCache>(*cfg.measure, LadderFamily::calls());
        game_ = HedgeSetGame{calls_};
        if (kCallStrategies.count(id)) {
            CountableHedgeContext::Options o;
            if (opts.contains("epsilon")) o.epsilon = number(opts, "epsilon", sp);
            o.allow_unsafe_epsilon = flag_or(opts, "allow_unsafe_epsilon", sp, false);
            countable_ = rethrow_as_config(sp, [&] { return CountableHedgeContext::make(calls_, o); });
        }
    } else {
        const double r = cfg.r;
        rethrow_as_config("config.game.r", [&] {
            powered_ = std::make_shared<const LadderCache>(*cfg.measure, LadderFamily::powered(r));
            roots_ = std::make_shared<const LadderCache>(*cfg.measure, LadderFamily::root_strike(r));
            return 0;
        });
        game_ = PoweredHedgeSetGame{r, powered_, roots_};
        if (kMZStrategies.count(id)) {
            MZContext::Options o;
            if (opts.contains("epsilon")) o.epsilon = number(opts, "epsilon", sp);
            o.allow_unsafe_epsilon = flag_or(opts, "allow_unsafe_epsilon", sp, false);
            const std::string den = text_or(opts, "denominator", sp, "root_n");
            if (den == "root_n")
                o.denominator = MZContext::Denominator::RootN;
            else if (den == "linear_n")
                o.denominator = MZContext::Denominator::LinearN;
            else
                throw ConfigError(sp + ".denominator: expected root_n or linear_n");
            const std::string coef = text_or(opts, "coefficients", sp, "safe");
            if (coef == "safe")
                o.coefficients = MZContext::StripCoefficients::Safe;
            else if (coef == "literal")
                o.coefficients = MZContext::StripCoefficients::Literal;
            else
                throw ConfigError(sp + ".coefficients: expected safe or literal");
            mz_ = rethrow_as_config(sp, [&] { return MZContext::make(r, powered_, roots_, o); });
        }
    }
}

namespace {

std::unique_ptr<SkepticStrategy> build_skeptic(const json& s, const std::string& path,
                                               const std::optional<SingleHedgeContext>& single,
                                               const std::optional<CountableHedgeContext>& countable,
                                               const std::optional<MZContext>& mz, const std::string& game_type) {
    const std::string id = text(s, "id", path);
    auto need = [&](bool have, const char* game) {
        if (!have) throw ConfigError(path + ".id: strategy '" + id + "' needs a " + game + " game");
    };
    return rethrow_as_config(path, [&]() -> std::unique_ptr<SkepticStrategy> {
        if (id == "null") return null_strategy();
        if (id == "upcrossing") {
            auto target = build_skeptic(field(s, "target", path), path + ".target", single, countable, mz, game_type);
            return upcrossing_strategy(number(s, "a", path), number(s, "b", path), std::move(target));
        }
        if (kSingleStrategies.count(id)) {
            need(single.has_value(), "single_hedge");
            if (id == "borel_cantelli_single") return borel_cantelli_single(*single);
            if (id == "weighted_borel_cantelli_single") return weighted_bc_single(*single, number_or(s, "q", path, 2.0));
            if (id == "drift_single_plus") return drift_single(*single, +1);
            if (id == "drift_single_minus") return drift_single(*single, -1);
            if (id == "drift_pair_single") return drift_pair_single(*single);
            return slln_single(*single);
        }
        if (kCallStrategies.count(id)) {
            need(countable.has_value(), "hedge_set");
            if (id == "tail_forcer") return tail_event_forcer(*countable);
            if (id == "truncated_variance_forcer") return truncated_variance_forcer(*countable);
            if (id == "hedged_drift_plus") return hedged_drift(*countable, false);
            if (id == "hedged_drift_mirror") return hedged_drift(*countable, true);
            return slln_calls(*countable);
        }
        if (kMZStrategies.count(id)) {
            need(mz.has_value(), "powered_hedge_set");
            if (id == "mz_tail_forcer") return mz_tail_event_forcer(*mz);
            if (id == "mz_truncated_variance_forcer") return mz_truncated_variance_forcer(*mz);
            if (id == "mz_hedged_drift_plus") return mz_hedged_drift(*mz, false);
            if (id == "mz_hedged_drift_mirror") return mz_hedged_drift(*mz, true);
            return mz_slln(*mz);
        }
        throw ConfigError(path + ".id: unknown strategy '" + id + "'");
    });
}

} // namespace

std::unique_ptr<SkepticStrategy> ExperimentSetup::make_skeptic() const {
    const json s = json::parse(cfg_.strategy_json);
    return build_skeptic(s, "config.strategy", single_, countable_, mz_, cfg_.game_type);
}

std::optional<AdversarySpec> ExperimentSetup::adversary_spec(std::uint64_t seed) const {
    const json r = json::parse(cfg_.reality_json);
    const std::string rp = "config.reality";
    const std::string id = text(r, "id", rp);
    if (id == "power_threshold_adversary") {
        const double nu = r.contains("nu") ? number(r, "nu", rp) : cfg_.price;
        return AdversarySpec{PowerThresholdAdversary{number(r, "r", rp), nu}, seed, 0};
    }
    if (id == "hedge_threshold_adversary") {
        HedgeKind h = r.contains("hedge") ? parse_hedge(r["hedge"], rp + ".hedge")
                      : cfg_.hedge        ? *cfg_.hedge
                                          : throw ConfigError(rp + ".hedge: required outside single-hedge games");
        const double nu = r.contains("nu") ? number(r, "nu", rp) : cfg_.price;
        return AdversarySpec{HedgeThresholdAdversary{std::move(h), nu}, seed, 0};
    }
    return std::nullopt;
}

std::unique_ptr<RealityStrategy> ExperimentSetup::make_reality(std::uint64_t seed) const {
    const json r = json::parse(cfg_.reality_json);
    const std::string rp = "config.reality";
    const std::string id = text(r, "id", rp);
    return rethrow_as_config(rp, [&]() -> std::unique_ptr<RealityStrategy> {
        if (id == "zeros") return zeros_path();
        if (id == "constant") return constant_path(number(r, "c", rp));
        if (id == "alternating") return alternating_path(number(r, "c", rp));
        if (id == "spike") return spike_path(number_or(r, "scale", rp, 1.0));
        if (id == "harmonic_drift") return harmonic_drift_path(number(r, "c", rp));
        if (id == "ramp") return ramp_path(number(r, "c", rp));
        if (id == "iid") {
            const auto m = r.contains("measure") ? parse_measure(r["measure"], rp + ".measure")
                           : cfg_.measure        ? *cfg_.measure
                                                 : throw ConfigError(rp + ".measure: required (the game has none)");
            return iid_sampler(m, seed, count_or(r, "stream", rp, 0));
        }
        if (id == "replay") {
            const auto path = cfg_.base_dir / text(r, "path", rp);
            std::ifstream in(path);
            if (!in) throw ConfigError(rp + ".path: cannot read " + path.string());
            return replay_path(read_path_csv(in), "replay(" + path.filename().string() + ")");
        }
        if (auto spec = adversary_spec(seed)) return adversary(*spec);
        throw ConfigError(rp + ".id: unknown reality '" + id + "'");
    });
}

std::vector<EventDetector> ExperimentSetup::make_detectors() const {
    std::vector<EventDetector> d;
    if (cfg_.game_type == "single_hedge") {
        const std::size_t n0 = single_ ? single_->n0 : static_cast<std::size_t>(std::floor(cfg_.c)) + 1;
        d.push_back(h_ratio_sum(*cfg_.hedge, n0));
        d.push_back(h_weighted_sum(*cfg_.hedge));
        d.push_back(large_moves());
        d.push_back(truncated_variance());
        d.push_back(drift_series());
    } else if (cfg_.game_type == "hedge_set") {
        d.push_back(large_moves());
        d.push_back(truncated_variance());
        d.push_back(hedged_variance(calls_));
        d.push_back(hedged_variance(calls_, true));
        d.push_back(centered_hedged_variance(calls_));
        d.push_back(hedged_drift_series(calls_));
        d.push_back(drift_series());
    } else {
        d.push_back(mz_large_moves(cfg_.r));
        d.push_back(mz_truncated_variance(cfg_.r));
        d.push_back(mz_hedged_variance(roots_, cfg_.r));
        d.push_back(mz_centered_hedged_variance(roots_, cfg_.r));
        d.push_back(mz_hedged_drift_series(roots_, cfg_.r));
        d.push_back(drift_series());
    }
    return d;
}

std::optional<PriceLadder> ExperimentSetup::export_ladder() const {
    if (calls_) return *calls_->at_least(cfg_.ladder_depth);
    if (powered_) return *powered_->at_least(cfg_.ladder_depth);
    return std::nullopt;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw IoError("cannot write " + p.string());
    return os;
}

void close_out(std::ofstream& os, const std::filesystem::path& p) {
    os.close();
    if (!os) throw IoError("failed writing " + p.string());
}

void write_summary(const ExperimentConfig& cfg, const ExperimentSetup* setup, const ExperimentResult& res,
                   const std::filesystem::path& dir) {
    const auto path = dir / "summary.txt";
    auto os = open_out(path);
    os << "experiment: " << res.name << '\n';
    if (setup) os << "game: " << describe(setup->game()) << '\n';
    if (!cfg.strategy_json.empty()) os << "strategy: " << cfg.strategy_json << '\n';
    if (!cfg.reality_json.empty()) os << "reality: " << cfg.reality_json << '\n';
    os << "horizon: " << cfg.horizon << '\n';
    os << "rng: " << kRngName << '\n';
    os << "status: " << to_string(res.status) << " (exit " << static_cast<int>(res.status) << ")\n";
    if (!res.message.empty()) os << "message: " << res.message << '\n';
    for (const auto& s : res.seeds) {
        os << "\n[seed " << s.seed << "]\n";
        os << "rounds: " << s.rounds << '\n';
        os << "final_capital: " << format_real(s.final_capital) << '\n';
        os << "min_capital: " << format_real(s.min_capital) << '\n';
        os << "max_capital: " << format_real(s.max_capital) << '\n';
        os << "slack_warnings: " << s.slack_warnings << '\n';
        if (s.violation)
            os << "collateral_violation: round " << s.violation->round << ", capital "
               << format_real(s.violation->capital) << '\n';
        if (s.saturated) os << "capital_saturated: round " << *s.saturated << " (run stopped)\n";
        if (s.forcing) {
            os << "log_capital_trend (log K_N - log K_N/10): " << format_real(s.forcing->trend) << '\n';
            os << "max_over_final: " << format_real(s.forcing->max_over_final) << '\n';
        }
        for (const auto& d : s.detectors) {
            os << "detector " << d.id << ": " << format_real(d.value) << " (N/10 " << format_real(d.at_tenth)
               << ", N/2 " << format_real(d.at_half) << ", last-half increment " << format_real(d.last_half_increment)
               << (d.cauchy_stable ? ", Cauchy-stable" : ", not Cauchy-stable") << (d.monotone ? "" : ", NOT MONOTONE")
               << ")\n";
        }
    }
    if (res.doob) os << "\ndoob_check: " << res.doob->summary() << '\n';
    if (res.coherence) os << "\ncoherence: " << res.coherence->summary() << '\n';
    os << "\nConclusions about limits are finite-horizon evidence only.\n";
    close_out(os, path);
}

ExperimentResult run_seeds(const ExperimentConfig& cfg, const ExperimentSetup& setup,
                           const std::filesystem::path& dir) {
    ExperimentResult res;
    res.name = cfg.name;
    for (std::uint64_t seed : cfg.seeds) {
        auto skeptic = setup.make_skeptic();
        auto reality = setup.make_reality(seed);
        std::optional<DetectorBank> bank;
        if (cfg.write_detectors)
            bank.emplace(setup.make_detectors(), cfg.horizon, cfg.detector_stride, cfg.cauchy_tolerance);
        GameOptions go;
        go.capture_violation = true;
        if (bank) go.on_round = [&](const RoundRecord& r) { bank->observe(r); };
        const auto h = run_game(setup.game(), *skeptic, *reality, cfg.horizon, std::move(go));

        const auto tpath = dir / ("trajectory_seed" + std::to_string(seed) + ".csv");
        auto ts = open_out(tpath);
        write_trajectory_csv(ts, h, cfg.trajectory_stride);
        close_out(ts, tpath);
        if (bank) {
            const auto dpath = dir / ("detectors_seed" + std::to_string(seed) + ".csv");
            auto ds = open_out(dpath);
            bank->write_csv(ds);
            close_out(ds, dpath);
        }

        SeedResult s;
        s.seed = seed;
        s.rounds = h.rounds;
        s.final_capital = h.final_capital;
        s.min_capital = h.min_capital;
        s.max_capital = h.max_capital;
        s.slack_warnings = h.slack_warnings;
        s.violation = h.violation;
        s.saturated = h.saturated;
        if (!h.violation && h.rounds >= 10 && h.min_capital > 0.0) s.forcing = forcing_report(h.capital);
        if (bank) s.detectors = bank->summaries();
        res.seeds.push_back(std::move(s));
    }

    const bool want_violation = cfg.expect_status == "collateral_violation";
    const auto violated = std::find_if(res.seeds.begin(), res.seeds.end(), [](const auto& s) { return s.violation; });
    if (violated != res.seeds.end() && !want_violation) {
        res.status = ExitStatus::Collateral;
        res.message = "collateral violation at round " + std::to_string(violated->violation->round) + " (seed " +
                      std::to_string(violated->seed) + "), capital " + format_real(violated->violation->capital);
        return res;
    }
    if (want_violation) {
        if (violated == res.seeds.end()) {
            res.status = ExitStatus::Invariant;
            res.message = "expected a collateral violation, none occurred";
        } else {
            res.message = "expected collateral violation detected at round " +
                          std::to_string(violated->violation->round) + " (seed " + std::to_string(violated->seed) + ")";
        }
        return res;
    }
    for (const auto& s : res.seeds) {
        for (const auto& d : s.detectors) {
            if (!d.monotone) {
                res.status = ExitStatus::Invariant;
                res.message = "detector " + d.id + " decreased (seed " + std::to_string(s.seed) + ")";
                return res;
            }
        }
        if (cfg.expect_min_trend && (!s.forcing || s.forcing->trend < *cfg.expect_min_trend)) {
            res.status = ExitStatus::Invariant;
            res.message = "seed " + std::to_string(s.seed) + ": log-capital trend " +
                          (s.forcing ? format_real(s.forcing->trend) : std::string("n/a")) + " below " +
                          format_real(*cfg.expect_min_trend);
            return res;
        }
        if (cfg.expect_max_capital_ratio && s.max_capital > *cfg.expect_max_capital_ratio * setup.make_skeptic()->initial_capital()) {
            res.status = ExitStatus::Invariant;
            res.message = "seed " + std::to_string(s.seed) + ": max capital " + format_real(s.max_capital) +
                          " above the declared ratio " + format_real(*cfg.expect_max_capital_ratio);
            return res;
        }
    }
    return res;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    ExperimentResult res;
    res.name = cfg.name;
    std::optional<ExperimentSetup> setup;
    try {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
        setup.emplace(cfg);

        if (cfg.kind == ExperimentConfig::Kind::Run) {
            res = run_seeds(cfg, *setup, out_dir);
        } else if (cfg.kind == ExperimentConfig::Kind::DoobCheck) {
            const auto spec = setup->adversary_spec(cfg.seeds.front());
            if (!spec) throw ConfigError("config.reality.id: doob_check needs a threshold adversary");
            res.doob = doob_check([&] { return setup->make_skeptic(); }, setup->game(), *spec, cfg.doob);
            const auto& d = *res.doob;
            const auto path = out_dir / "doob.csv";
            auto os = open_out(path);
            os << "runs,horizon,c,hits,estimate,ci_lo,ci_hi,passed,mean_threshold_count,expected_threshold_count,"
                  "median_final_capital,median_max_capital,violations\n";
            os << d.runs << ',' << d.horizon << ',' << format_real(d.c) << ',' << d.hits << ','
               << format_real(d.estimate) << ',' << format_real(d.ci.lo) << ',' << format_real(d.ci.hi) << ','
               << (d.passed ? 1 : 0) << ',' << format_real(d.mean_threshold_count) << ','
               << format_real(d.expected_threshold_count) << ',' << format_real(d.median_final_capital) << ','
               << format_real(d.median_max_capital) << ',' << d.violations << '\n';
            close_out(os, path);
            if (d.violations) {
                res.status = ExitStatus::Collateral;
                res.message = std::to_string(d.violations) + " Monte Carlo runs violated collateral duty";
            } else if (d.passed != cfg.expect_doob_passed.value_or(true)) {
                res.status = ExitStatus::Invariant;
                res.message = "Doob consistency " + std::string(d.passed ? "held" : "failed") + " against expectation";
            }
        }

        if (auto l = setup->export_ladder()) {
            const auto path = out_dir / "ladder.csv";
            auto os = open_out(path);
            write_ladder_csv(os, *l);
            close_out(os, path);
            if (cfg.kind == ExperimentConfig::Kind::Ladder) {
                res.coherence = check_coherence(*l, 1e-6);
                if (!res.coherence->passed()) {
                    res.status = ExitStatus::Invariant;
                    res.message = "ladder not coherent: " + res.coherence->summary();
                }
            }
        } else if (cfg.kind == ExperimentConfig::Kind::Ladder) {
            throw ConfigError("config.game.type: ladder experiments need a hedge_set or powered_hedge_set game");
        }
        res.name = cfg.name;
    } catch (const ConfigError& e) {
        res.status = ExitStatus::Config;
        res.message = e.what();
    } catch (const IoError& e) {
        res.status = ExitStatus::Io;
        res.message = e.what();
        return res;
    } catch (const std::exception& e) {
        res.status = ExitStatus::Unexpected;
        res.message = e.what();
    }
    try {
        write_summary(cfg, setup ? &*setup : nullptr, res, out_dir);
    } catch (const IoError& e) {
        res.status = ExitStatus::Io;
        res.message = e.what();
    }
    return res;
}

bool SuiteResult::passed() const noexcept {
    return std::all_of(entries.begin(), entries.end(), [](const SuiteEntry& e) { return e.passed; });
}

SuiteResult run_suite(const std::filesystem::path& suite_path, const std::filesystem::path& out_root, unsigned workers,
                      std::optional<std::uint64_t> seed_override, std::optional<std::size_t> horizon_override) {
    std::ifstream in(suite_path);
    if (!in) throw ConfigError("cannot read suite " + suite_path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const json j = parse_json(ss.str(), "suite");
    if (!j.is_object()) throw ConfigError("suite: expected a JSON object");
    known_keys(j, "suite", {"schema_version", "experiments", "description"});
    if (count(j, "schema_version", "suite") != kConfigSchemaVersion)
        throw ConfigError("suite.schema_version: expected " + std::to_string(kConfigSchemaVersion));
    const auto& list = field(j, "experiments", "suite");
    if (!list.is_array()) throw ConfigError("suite.experiments: expected an array");
    const auto base = suite_path.parent_path().empty() ? std::filesystem::path(".") : suite_path.parent_path();

    SuiteResult out;
    if (list.empty()) out.warnings.push_back("suite is empty; nothing was run");

    // Parse everything first: a bad entry fails the suite before any run starts.
    std::vector<std::optional<ExperimentConfig>> configs(list.size());
    std::vector<SuiteEntry> entries(list.size());
    std::set<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string ep = "suite.experiments[" + std::to_string(i) + "]";
        try {
            if (list[i].is_string()) {
                configs[i] = load_config(base / list[i].get<std::string>());
            } else if (list[i].is_object()) {
                configs[i] = parse_config(list[i].dump(), base);
            } else {
                throw ConfigError(ep + ": expected a path or an inline config");
            }
            if (seed_override) configs[i]->seeds = {*seed_override};
            if (horizon_override) {
                configs[i]->horizon = *horizon_override;
                configs[i]->doob.horizon = *horizon_override;
            }
            entries[i].name = configs[i]->name;
            if (!names.insert(configs[i]->name).second)
                throw ConfigError(ep + ".name: duplicate experiment name '" + configs[i]->name + "'");
        } catch (const ConfigError& e) {
            entries[i].name = entries[i].name.empty() ? ep : entries[i].name;
            entries[i].status = ExitStatus::Config;
            entries[i].message = e.what();
            configs[i].reset();
        }
    }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            if (!configs[i]) continue;
            const auto r = run_experiment(*configs[i], out_root / configs[i]->name);
            entries[i].status = r.status;
            entries[i].message = r.message;
        }
    };
    workers = std::max(1u, workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : entries) e.passed = e.status == ExitStatus::Ok;
    out.entries = std::move(entries);

    std::error_code ec;
    std::filesystem::create_directories(out_root, ec);
    const auto rpath = out_root / "suite_report.txt";
    std::ofstream os(rpath, std::ios::binary);
    if (!os) throw IoError("cannot write " + rpath.string());
    for (const auto& w : out.warnings) os << "WARNING " << w << '\n';
    for (const auto& e : out.entries) {
        os << (e.passed ? "PASS " : "FAIL ") << e.name << " [" << to_string(e.status) << "]";
        if (!e.message.empty()) os << " " << e.message;
        os << '\n';
    }
    os << (out.passed() ? "suite passed" : "suite FAILED") << '\n';
    return out;
}

} // namespace gtp
