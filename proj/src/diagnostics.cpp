#include "gtp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include "gtp/errors.hpp"
#include "gtp/skeptic.hpp"

namespace gtp {

EventDetector::EventDetector(std::string id, Term term, bool nonnegative)
    : id_(std::move(id)), term_(std::move(term)), nonnegative_(nonnegative) {}

void EventDetector::update(std::size_t n, double x) {
    if (n != n_ + 1)
        throw ProtocolError("detector " + id_ + " expected round " + std::to_string(n_ + 1) + ", got " +
                            std::to_string(n));
    const double t = term_(n, x);
    if (nonnegative_ && t < 0.0) monotone_ = false;
    sum_.add(t);
    n_ = n;
}

namespace {

// Per-run ladder cursor shared by one detector's term.
struct Cursor {
    LadderSource src;
    std::shared_ptr<const PriceLadder> snap;
    const PriceLadder& at(std::size_t n) {
        if (!snap || snap->depth() < n) snap = src->at_least(n);
        return *snap;
    }
};

std::shared_ptr<Cursor> cursor(LadderSource src) {
    if (!src) throw ConfigError("detector needs a ladder");
    return std::make_shared<Cursor>(Cursor{std::move(src), nullptr});
}

double pw(double n, double e) { return e == 1.0 ? n : e == 2.0 ? n * n : std::pow(n, e); }

} // namespace

EventDetector h_ratio_sum(const HedgeKind& h, std::size_t n0) {
    return EventDetector("h_ratio_sum", [h, n0](std::size_t n, double x) {
        if (n < n0) return 0.0;
        return eval_hedge(h, x) / eval_hedge(h, static_cast<double>(n));
    }, true);
}

EventDetector h_weighted_sum(const HedgeKind& h) {
    return EventDetector("h_weighted_sum", [h](std::size_t n, double x) {
        const double nd = static_cast<double>(n);
        return eval_hedge(h, x) / (nd * nd);
    }, true);
}

EventDetector large_moves() {
    return EventDetector("large_moves", [](std::size_t n, double x) {
        return std::fabs(x) >= static_cast<double>(n) ? 1.0 : 0.0;
    }, true);
}

EventDetector truncated_variance() {
    return EventDetector("truncated_variance", [](std::size_t n, double x) {
        const double nd = static_cast<double>(n);
        return std::fabs(x) <= nd ? x * x / (nd * nd) : 0.0;
    }, true);
}

EventDetector drift_series() {
    return EventDetector("drift_series", [](std::size_t n, double x) { return x / static_cast<double>(n); }, false);
}

EventDetector hedged_drift_series(LadderSource calls, bool mirror) {
    auto c = cursor(std::move(calls));
    return EventDetector(mirror ? "mirrored_hedged_drift_series" : "hedged_drift_series",
                         [c, mirror](std::size_t n, double x) {
                             const auto m = hedged_move(x, n, c->at(n), mirror);
                             return (m.value - m.price) / static_cast<double>(n);
                         },
                         false);
}

EventDetector hedged_variance(LadderSource calls, bool mirror) {
    auto c = cursor(std::move(calls));
    return EventDetector(mirror ? "mirrored_hedged_variance" : "hedged_variance",
                         [c, mirror](std::size_t n, double x) {
                             const double v = hedged_move(x, n, c->at(n), mirror).value;
                             const double nd = static_cast<double>(n);
                             return v * v / (nd * nd);
                         },
                         true);
}

EventDetector centered_hedged_variance(LadderSource calls) {
    auto c = cursor(std::move(calls));
    return EventDetector("centered_hedged_variance", [c](std::size_t n, double x) {
        const auto m = hedged_move(x, n, c->at(n), false);
        const double nd = static_cast<double>(n);
        const double d = m.value - m.price;
        return d * d / (nd * nd);
    }, true);
}

EventDetector mz_large_moves(double r) {
    return EventDetector("mz_large_moves", [r](std::size_t n, double x) {
        return std::pow(std::fabs(x), r) >= static_cast<double>(n) ? 1.0 : 0.0;
    }, true);
}

EventDetector mz_truncated_variance(double r) {
    const double q = 2.0 / r;
    return EventDetector("mz_truncated_variance", [r, q](std::size_t n, double x) {
        const double nd = static_cast<double>(n);
        return std::pow(std::fabs(x), r) <= nd ? x * x / pw(nd, q) : 0.0;
    }, true);
}

EventDetector mz_hedged_variance(LadderSource root_calls, double r) {
    auto c = cursor(std::move(root_calls));
    const double q = 2.0 / r;
    return EventDetector("mz_hedged_variance", [c, r, q](std::size_t n, double x) {
        const double v = mz_hedged_move(x, n, c->at(n), r, false).value;
        return v * v / pw(static_cast<double>(n), q);
    }, true);
}

EventDetector mz_hedged_drift_series(LadderSource root_calls, double r) {
    auto c = cursor(std::move(root_calls));
    return EventDetector("mz_hedged_drift_series", [c, r](std::size_t n, double x) {
        const auto m = mz_hedged_move(x, n, c->at(n), r, false);
        return (m.value - m.price) / std::pow(static_cast<double>(n), 1.0 / r);
    }, false);
}

EventDetector mz_centered_hedged_variance(LadderSource root_calls, double r) {
    auto c = cursor(std::move(root_calls));
    const double q = 2.0 / r;
    return EventDetector("mz_centered_hedged_variance", [c, r, q](std::size_t n, double x) {
        const auto m = mz_hedged_move(x, n, c->at(n), r, false);
        const double d = m.value - m.price;
        return d * d / pw(static_cast<double>(n), q);
    }, true);
}

DetectorBank::DetectorBank(std::vector<EventDetector> detectors, std::size_t horizon, std::size_t stride,
                           double cauchy_tolerance)
    : detectors_(std::move(detectors)),
      horizon_(horizon),
      stride_(std::max<std::size_t>(stride, 1)),
      tol_(cauchy_tolerance),
      tenth_(detectors_.size(), 0.0),
      half_(detectors_.size(), 0.0) {
    if (horizon == 0) throw ConfigError("detector bank needs a positive horizon");
}

void DetectorBank::update(std::size_t n, double x) {
    for (auto& d : detectors_) d.update(n, x);
    for (std::size_t i = 0; i < detectors_.size(); ++i) {
        if (n == horizon_ / 10) tenth_[i] = detectors_[i].value();
        if (n == horizon_ / 2) half_[i] = detectors_[i].value();
    }
    if (n % stride_ == 0 || n == horizon_)
        for (std::size_t i = 0; i < detectors_.size(); ++i) rows_.push_back({n, i, detectors_[i].value()});
}

std::vector<DetectorSummary> DetectorBank::summaries() const {
    std::vector<DetectorSummary> out;
    for (std::size_t i = 0; i < detectors_.size(); ++i) {
        DetectorSummary s;
        s.id = detectors_[i].id();
        s.value = detectors_[i].value();
        s.at_tenth = tenth_[i];
        s.at_half = half_[i];
        s.last_half_increment = s.value - s.at_half;
        s.cauchy_stable = std::fabs(s.last_half_increment) < tol_;
        s.monotone = detectors_[i].monotone();
        out.push_back(s);
    }
    return out;
}

void DetectorBank::write_csv(std::ostream& os) const {
    os << "n,event_id,partial_stat\n";
    for (const auto& r : rows_) os << r.n << ',' << detectors_[r.index].id() << ',' << format_real(r.value) << '\n';
}

InclusionReport inclusion_checks(const HedgeKind& h, double nu, std::size_t n0, std::size_t max_n, double step) {
    if (!(step > 0.0)) throw ConfigError("inclusion grid step must be positive");
    InclusionReport rep;
    auto fail = [&](const std::string& what, double z, std::size_t n) {
        if (rep.failures.size() < 100)
            rep.failures.push_back(what + " at (z=" + format_real(z) + ", n=" + std::to_string(n) + ")");
    };
    n0 = std::max<std::size_t>(n0, 1);
    for (std::size_t n = n0; n <= max_n; ++n) {
        const double nd = static_cast<double>(n);
        const double hn = eval_hedge(h, nd);
        const std::size_t steps = static_cast<std::size_t>(std::llround(3.0 * nd / step));
        bool square_decreasing = true;
        for (std::size_t i = 0; i <= steps; ++i) {
            const double z = static_cast<double>(i) * step;
            const double ratio = eval_hedge(h, z) / hn;
            ++rep.checked;
            if (ratio < (z >= nd ? 1.0 : 0.0) - 1e-12) fail("h(z)/h(n) < I(z >= n)", z, n);
            if (z > 0.0 && z < nd && i > 0) {
                const double zp = z + step;
                if (eval_hedge(h, zp) / (zp * zp) > eval_hedge(h, z) / (z * z) * (1.0 + 1e-12))
                    square_decreasing = false;
            }
        }
        if (square_decreasing) {
            for (std::size_t i = 1; static_cast<double>(i) * step <= nd; ++i) {
                const double z = static_cast<double>(i) * step;
                ++rep.checked;
                if (z * z / (nd * nd) > eval_hedge(h, z) / hn * (1.0 + 1e-12) + 1e-15)
                    fail("z^2/n^2 > h(z)/h(n)", z, n);
            }
        }
        for (std::size_t i = 0; i <= steps; ++i) {
            const double x = -3.0 * nd + 2.0 * static_cast<double>(i) * step;
            ++rep.checked;
            if ((x - nu) * (x - nu) > 2.0 * x * x + 2.0 * nu * nu) fail("(x-nu)^2 > 2x^2 + 2nu^2", x, n);
        }
    }
    return rep;
}

KroneckerReport kronecker_check(const std::function<double(std::size_t)>& a,
                                const std::function<double(std::size_t)>& b, std::size_t horizon,
                                double cauchy_tolerance, double average_tolerance) {
    if (horizon < 2) throw ConfigError("Kronecker check needs a horizon of at least 2");
    KroneckerReport rep;
    rep.horizon = horizon;
    NeumaierSum weighted, plain;
    double at_half = 0.0, prev_b = 0.0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const double bn = b(n);
        if (!(bn > 0.0) || bn < prev_b) throw ConfigError("Kronecker check needs positive increasing b_n");
        prev_b = bn;
        const double an = a(n);
        weighted.add(an / bn);
        plain.add(an);
        if (n == horizon / 2) at_half = weighted.value();
    }
    rep.weighted_sum = weighted.value();
    rep.average = plain.value() / prev_b;
    rep.cauchy_increment = rep.weighted_sum - at_half;
    rep.series_stable = std::fabs(rep.cauchy_increment) < cauchy_tolerance;
    rep.consistent = !rep.series_stable || std::fabs(rep.average) < average_tolerance;
    return rep;
}

KroneckerReport kronecker_check(std::span<const double> a, std::span<const double> b, double cauchy_tolerance,
                                double average_tolerance) {
    if (a.size() != b.size()) throw ConfigError("Kronecker check needs as many b_n as a_n");
    return kronecker_check([&](std::size_t n) { return a[n - 1]; }, [&](std::size_t n) { return b[n - 1]; },
                           a.size(), cauchy_tolerance, average_tolerance);
}

CesaroReport cesaro_price_check(LadderSource powered, LadderSource root_calls, double r, std::size_t horizon) {
    if (!powered || powered->family() != LadderFamily::powered(r) || !root_calls ||
        root_calls->family() != LadderFamily::root_strike(r))
        throw ConfigError("Cesaro check needs the powered and root-strike ladders for the same r");
    if (horizon < 10) throw ConfigError("Cesaro check needs a horizon of at least 10");
    const auto p = powered->at_least(horizon);
    const auto q = root_calls->at_least(horizon);
    CesaroReport rep;
    rep.horizon = horizon;
    NeumaierSum acc;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const double nd = static_cast<double>(n);
        const double lhs = q->nu(n);
        const double rhs = std::pow(nd, 1.0 / r - 1.0) * p->nu(n);
        if (lhs > rhs * (1.0 + 1e-9) + 1e-15) rep.failures.push_back(n);
        acc.add(lhs);
        const double avg = acc.value() / std::pow(nd, 1.0 / r);
        if (n == horizon / 10) rep.average_tenth = avg;
        if (n == horizon / 2) rep.average_half = avg;
        if (n == horizon) rep.average_final = avg;
    }
    rep.decreasing = rep.average_final <= rep.average_half && rep.average_half <= rep.average_tenth;
    return rep;
}

std::size_t upcrossing_count(std::span<const double> series, double a, double b) {
    if (!(a < b)) throw ConfigError("upcrossing band needs a < b");
    std::size_t count = 0;
    bool below = false;
    for (double k : series) {
        if (!below && k <= a) {
            below = true;
        } else if (below && k >= b) {
            below = false;
            ++count;
        }
    }
    return count;
}

ForcingReport forcing_report(std::span<const double> capital) {
    if (capital.size() < 11) throw ConfigError("forcing report needs at least 10 rounds");
    ForcingReport rep;
    rep.horizon = capital.size() - 1;
    const double kt = capital[rep.horizon / 10];
    const double kf = capital.back();
    rep.log_k_tenth = std::log(kt);
    rep.log_k_final = std::log(kf);
    rep.trend = rep.log_k_final - rep.log_k_tenth;
    rep.max_capital = *std::max_element(capital.begin(), capital.end());
    rep.max_over_final = rep.max_capital / kf;
    return rep;
}

std::string DoobReport::summary() const {
    std::string s = "P(max K >= " + format_real(c) + ") ~ " + format_real(estimate) + " (" + std::to_string(hits) +
                    "/" + std::to_string(runs) + "), Wilson CI [" + format_real(ci.lo) + ", " + format_real(ci.hi) +
                    "], bound 1/c = " + format_real(1.0 / c) + ": " + (passed ? "consistent" : "INCONSISTENT");
    s += "; threshold moves per run " + format_real(mean_threshold_count) + " (expected " +
         format_real(expected_threshold_count) + ")";
    s += "; median final K " + format_real(median_final_capital) + ", median max K " +
         format_real(median_max_capital);
    if (violations) s += "; collateral violations " + std::to_string(violations);
    s += " [finite-horizon evidence]";
    return s;
}

DoobReport doob_check(const std::function<std::unique_ptr<SkepticStrategy>()>& make_skeptic, const GameSpec& game,
                      const AdversarySpec& adversary_spec, const DoobOptions& opts) {
    if (!(opts.c > 1.0)) throw ConfigError("Doob check needs c > 1");
    if (opts.runs == 0 || opts.horizon == 0) throw ConfigError("Doob check needs runs and horizon >= 1");

    struct RunResult {
        double max_k = 0.0, final_k = 0.0;
        double threshold_moves = 0.0;
        bool violated = false;
    };
    std::vector<RunResult> results(opts.runs);

    auto run_one = [&](std::size_t j) {
        auto skeptic = make_skeptic();
        if (skeptic->initial_capital() != 1.0) throw ConfigError("Doob check needs strategies with K_0 = 1");
        AdversarySpec spec = adversary_spec;
        spec.stream = j;
        auto reality = adversary(spec);
        GameOptions go;
        go.keep_series = false;
        go.capture_violation = true;
        std::size_t moves = 0;
        go.on_round = [&](const RoundRecord& r) { moves += r.x != 0.0; };
        const auto h = run_game(game, *skeptic, *reality, opts.horizon, std::move(go));
        results[j] = {h.max_capital, h.final_capital, static_cast<double>(moves), h.violation.has_value()};
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(opts.runs)));
    if (workers == 1) {
        for (std::size_t j = 0; j < opts.runs; ++j) run_one(j);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t j = w; j < opts.runs; j += workers) run_one(j);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    DoobReport rep;
    rep.runs = opts.runs;
    rep.horizon = opts.horizon;
    rep.c = opts.c;
    std::vector<double> finals, maxes, counts;
    for (const auto& r : results) {
        rep.hits += r.max_k >= opts.c;
        rep.violations += r.violated;
        finals.push_back(r.final_k);
        maxes.push_back(r.max_k);
        counts.push_back(r.threshold_moves);
    }
    rep.estimate = static_cast<double>(rep.hits) / static_cast<double>(rep.runs);
    rep.ci = wilson_interval(rep.hits, rep.runs, opts.confidence);
    rep.passed = rep.ci.lo <= 1.0 / opts.c && rep.violations == 0;
    rep.mean_threshold_count = pairwise_sum(counts) / static_cast<double>(rep.runs);
    std::vector<double> probs;
    for (std::size_t n = 1; n <= opts.horizon; ++n) {
        const auto law = adversary_round_law(adversary_spec, n);
        if (law.active) probs.push_back(law.prob);
    }
    rep.expected_threshold_count = pairwise_sum(probs);
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    rep.median_final_capital = median(finals);
    rep.median_max_capital = median(maxes);
    return rep;
}

} // namespace gtp
