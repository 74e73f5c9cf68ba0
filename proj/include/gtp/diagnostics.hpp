#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gtp/game.hpp"
#include "gtp/hedge.hpp"
#include "gtp/ladder.hpp"
#include "gtp/numeric.hpp"
#include "gtp/reality.hpp"

namespace gtp {

/// Running partial sum (or count) of one event's defining series.
class EventDetector {
public:
    using Term = std::function<double(std::size_t n, double x)>;

    EventDetector(std::string id, Term term, bool nonnegative);

    const std::string& id() const noexcept { return id_; }
    bool nonnegative() const noexcept { return nonnegative_; }
    /// n must be one more than the previous call.
    void update(std::size_t n, double x);
    double value() const noexcept { return sum_.value(); }
    std::size_t rounds() const noexcept { return n_; }
    /// False once a negative term has been added to a series declared non-negative.
    bool monotone() const noexcept { return monotone_; }

private:
    std::string id_;
    Term term_;
    bool nonnegative_;
    bool monotone_ = true;
    NeumaierSum sum_;
    std::size_t n_ = 0;
};

// Single hedge, rounds n >= n0.
/// sum h(x_n)/h(n)
EventDetector h_ratio_sum(const HedgeKind& h, std::size_t n0 = 1);
/// sum h(x_n)/n^2
EventDetector h_weighted_sum(const HedgeKind& h);
/// #{n : |x_n| >= n}
EventDetector large_moves();
/// sum x_n^2 I(|x_n| <= n) / n^2
EventDetector truncated_variance();
/// sum x_n/n
EventDetector drift_series();
/// sum (x_{n,n} - nu_n)/n
EventDetector hedged_drift_series(LadderSource calls, bool mirror = false);
/// sum x_{n,n}^2/n^2
EventDetector hedged_variance(LadderSource calls, bool mirror = false);
/// sum (x_{n,n} - nu_n)^2/n^2
EventDetector centered_hedged_variance(LadderSource calls);

// Powered analogues (normalisation n^{1/r}).
/// #{n : |x_n|^r >= n}
EventDetector mz_large_moves(double r);
/// sum x_n^2 I(|x_n|^r <= n) / n^{2/r}
EventDetector mz_truncated_variance(double r);
/// sum x_{n,n,r}^2 / n^{2/r}
EventDetector mz_hedged_variance(LadderSource root_calls, double r);
/// sum (x_{n,n,r} - nu_{n^{1/r}}) / n^{1/r}
EventDetector mz_hedged_drift_series(LadderSource root_calls, double r);
/// sum (x_{n,n,r} - nu_{n^{1/r}})^2 / n^{2/r}
EventDetector mz_centered_hedged_variance(LadderSource root_calls, double r);

struct DetectorSummary {
    std::string id;
    double value = 0.0;
    double at_tenth = 0.0;      // partial statistic at N/10
    double at_half = 0.0;       // at N/2
    double last_half_increment = 0.0;
    bool cauchy_stable = false;  // |increment over [N/2, N]| < tolerance
    bool monotone = true;
};

/// Detectors for one run with CSV rows every `stride` rounds and at the horizon.
class DetectorBank {
public:
    DetectorBank(std::vector<EventDetector> detectors, std::size_t horizon, std::size_t stride,
                 double cauchy_tolerance = 1e-3);

    void update(std::size_t n, double x);
    void observe(const RoundRecord& r) { update(r.n, r.x); }

    const std::vector<EventDetector>& detectors() const noexcept { return detectors_; }
    std::vector<DetectorSummary> summaries() const;
    /// Columns n, event_id, partial_stat.
    void write_csv(std::ostream& os) const;

private:
    struct Row {
        std::size_t n;
        std::size_t index;
        double value;
    };
    std::vector<EventDetector> detectors_;
    std::size_t horizon_, stride_;
    double tol_;
    std::vector<double> tenth_, half_;
    std::vector<Row> rows_;
};

// ---------------------------------------------------------------------------
// Pointwise inclusions
// ---------------------------------------------------------------------------

struct InclusionReport {
    std::size_t checked = 0;
    std::vector<std::string> failures;  // each names (z, n)
    bool passed() const noexcept { return failures.empty(); }
};

/// h(z)/h(n) >= I(z >= n); z^2/n^2 <= h(z)/h(n) for 0 < z <= n when h/x^2 is
/// decreasing; (x - nu)^2 <= 2x^2 + 2nu^2. n from n0 to max_n, z on a grid of `step`.
InclusionReport inclusion_checks(const HedgeKind& h, double nu, std::size_t n0 = 1, std::size_t max_n = 50,
                                 double step = 1e-2);

// ---------------------------------------------------------------------------
// Kronecker and Cesaro
// ---------------------------------------------------------------------------

struct KroneckerReport {
    std::size_t horizon = 0;
    double weighted_sum = 0.0;  // sum a_n / b_n
    double average = 0.0;       // (1/b_N) sum a_n
    double cauchy_increment = 0.0;
    bool series_stable = false;  // increment of the weighted sum over [N/2, N] below tolerance
    bool applicable() const noexcept { return series_stable; }
    /// Kronecker's conclusion holds where it applies: |average| below avg_tolerance.
    bool consistent = true;
};

KroneckerReport kronecker_check(std::span<const double> a, std::span<const double> b, double cauchy_tolerance = 1e-3,
                                double average_tolerance = 0.05);
KroneckerReport kronecker_check(const std::function<double(std::size_t)>& a,
                                const std::function<double(std::size_t)>& b, std::size_t horizon,
                                double cauchy_tolerance = 1e-3, double average_tolerance = 0.05);

struct CesaroReport {
    std::size_t horizon = 0;
    std::vector<std::size_t> failures;  // n with nu_root(n) > n^{1/r-1} nu_powered(n)
    double average_tenth = 0.0, average_half = 0.0, average_final = 0.0;  // (1/n^{1/r}) sum_{i<=n} nu_root(i)
    bool decreasing = false;
    bool passed() const noexcept { return failures.empty(); }
};

CesaroReport cesaro_price_check(LadderSource powered, LadderSource root_calls, double r, std::size_t horizon);

// ---------------------------------------------------------------------------
// Upcrossings, forcing trend, Doob check
// ---------------------------------------------------------------------------

/// Completed moves from <= a to >= b.
std::size_t upcrossing_count(std::span<const double> series, double a, double b);

/// Growth of log K over [N/10, N] and the max-to-final ratio; finite-horizon evidence only.
struct ForcingReport {
    std::size_t horizon = 0;
    double log_k_tenth = 0.0;
    double log_k_final = 0.0;
    double trend = 0.0;  // log K_N - log K_{N/10}
    double max_capital = 0.0;
    double max_over_final = 0.0;
};

ForcingReport forcing_report(std::span<const double> capital);

struct DoobOptions {
    double c = 10.0;
    std::size_t runs = 10000;
    std::size_t horizon = 10000;
    double confidence = 0.99;
    unsigned workers = 1;
};

struct DoobReport {
    std::size_t runs = 0;
    std::size_t horizon = 0;
    double c = 0.0;
    std::size_t hits = 0;  // runs with max K >= c
    double estimate = 0.0;
    Interval ci;
    bool passed = false;  // ci.lo <= 1/c
    double mean_threshold_count = 0.0;    // rounds with x_n = +-threshold, averaged over runs
    double expected_threshold_count = 0.0;  // sum of the per-round probabilities
    double median_final_capital = 0.0;
    double median_max_capital = 0.0;
    std::size_t violations = 0;
    std::string summary() const;
};

/// Monte Carlo estimate of P(max_{n <= N} K_n >= c). Run j uses the adversary
/// with stream j; results do not depend on the worker count.
DoobReport doob_check(const std::function<std::unique_ptr<SkepticStrategy>()>& make_skeptic, const GameSpec& game,
                      const AdversarySpec& adversary_spec, const DoobOptions& opts);

} // namespace gtp
