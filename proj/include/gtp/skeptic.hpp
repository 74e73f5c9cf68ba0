#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "gtp/game.hpp"
#include "gtp/ladder.hpp"
#include "gtp/single_hedge.hpp"

namespace gtp {

// ---------------------------------------------------------------------------
// Single hedge
// ---------------------------------------------------------------------------

/// M_n = 0, V_n = 1/(C nu h(n)) for n >= n0, with C the series bound.
/// K_n >= (1/(C nu)) sum_{n0 <= i <= n} h(x_i)/h(i).
std::unique_ptr<SkepticStrategy> borel_cantelli_single(const SingleHedgeContext& ctx);

/// M_n = 0, V_n = 1/(zeta(q) nu n^q); q must exceed 1.
/// K_n >= (1/(zeta(q) nu)) sum_i h(x_i)/i^q.
std::unique_ptr<SkepticStrategy> weighted_bc_single(const SingleHedgeContext& ctx, double q = 2.0);

/// M_n = sign eps K_{n-1}/n, V_n = eps K_{n-1}/h(n) for n >= n0:
/// K_n = K_{n-1} (1 + sign eps x_n/n + eps (h(x_n) - nu)/h(n)).
std::unique_ptr<SkepticStrategy> drift_single(const SingleHedgeContext& ctx, int sign);

/// Equal mixture of the two drift strategies (sign +1 and -1).
std::unique_ptr<SkepticStrategy> drift_pair_single(const SingleHedgeContext& ctx);

/// Equal mixture of borel_cantelli_single, weighted_bc_single and both drift
/// strategies; forces the sample mean to 0 with one hedge.
std::unique_ptr<SkepticStrategy> slln_single(const SingleHedgeContext& ctx);

// ---------------------------------------------------------------------------
// Generic first Borel-Cantelli strategy
// ---------------------------------------------------------------------------

/// Per-round non-negative payoff g_n with a declared bound on sum_n price(g_n).
class PortfolioSchedule {
public:
    virtual ~PortfolioSchedule() = default;
    virtual std::string id() const = 0;
    virtual HedgePortfolio at(std::size_t n) = 0;
    virtual double total_price_bound() const = 0;
    virtual std::unique_ptr<PortfolioSchedule> clone() const = 0;
};

/// Buys g_n / B each round, B the declared bound; K_n >= (1/B) sum_{i<=n} g_i(x_i).
/// The first check_depth prices are summed up front; exceeding B is a ConfigError.
std::unique_ptr<SkepticStrategy> generic_borel_cantelli(std::unique_ptr<PortfolioSchedule> schedule,
                                                        std::size_t check_depth = 1000);

/// g_n = bull spread between rungs n-1 and n; prices telescope to nu_0.
std::unique_ptr<PortfolioSchedule> bull_spread_schedule(LadderSource ladder);

/// g_n = n^{-q} sum_{k<n} (k+1)^c T_k; the caller supplies the price bound.
std::unique_ptr<PortfolioSchedule> strip_schedule(LadderSource ladder, double coef_exponent, double denom_exponent,
                                                  double bound);

/// Zero payoff every round.
std::unique_ptr<PortfolioSchedule> empty_schedule();

// ---------------------------------------------------------------------------
// Calls at integer strikes
// ---------------------------------------------------------------------------

struct CountableHedgeContext {
    LadderSource ladder;  // plain call family
    double nu0 = 0.0;
    double epsilon = 0.0;
    double strip_budget = 0.0;      // rigorous total price of the (k+1)^2 / n^2 strip schedule
    double strip_normalizer = 0.0;  // max(6 nu_0, strip_budget)

    struct Options {
        std::optional<double> epsilon;  // default: 0.9 of the ceiling
        bool allow_unsafe_epsilon = false;
        std::size_t budget_depth = 65536;
    };

    static CountableHedgeContext make(LadderSource ladder, const Options& opts);
    static CountableHedgeContext make(LadderSource ladder) { return make(std::move(ladder), Options{}); }

    /// 1 / (2 (1 + nu_0))
    double epsilon_ceiling() const noexcept { return 0.5 / (1.0 + nu0); }
};

/// Bull spreads at level n-1 on round n, scaled by 1/nu_0.
/// K_n >= (1/nu_0) #{i <= n : |x_i| >= i}.
std::unique_ptr<SkepticStrategy> tail_event_forcer(const CountableHedgeContext& ctx);

/// Strip sum_{k<n} (k+1)^2 T_k with units 1/(B n^2), B the strip normalizer.
/// K_n >= (1/B) sum_{i<=n} x_i^2 I(|x_i| <= i) / i^2.
std::unique_ptr<SkepticStrategy> truncated_variance_forcer(const CountableHedgeContext& ctx);

struct HedgedMove {
    double value = 0.0;  // x + (|x| - n)_+, or -x + (|x| - n)_+ when mirrored; never below -n
    double price = 0.0;  // price of (|x| - n)_+
};

HedgedMove hedged_move(double x, std::size_t n, const PriceLadder& ladder, bool mirror);

/// Bets eps K_{n-1}/n on the hedged move minus its price:
/// K_n = K_{n-1} (1 + (eps/n)(x_{n,n} - nu_n)).
std::unique_ptr<SkepticStrategy> hedged_drift(const CountableHedgeContext& ctx, bool mirror);

/// Equal mixture of the tail forcer, the truncated-variance forcer and both hedged drifts.
std::unique_ptr<SkepticStrategy> slln_calls(const CountableHedgeContext& ctx);

// ---------------------------------------------------------------------------
// Powered calls (normalization n^{1/r}, 1 < r < 2)
// ---------------------------------------------------------------------------

struct MZContext {
    enum class Denominator {
        RootN,  // eps K_{n-1} / n^{1/r}
        LinearN // eps K_{n-1} / n
    };
    enum class StripCoefficients {
        Safe,    // (k+1)^{2/r}: dominance holds and the schedule price stays bounded
        Literal  // (k+1)^2 with the closed-form budget factor only; not collateral-safe in general
    };

    double r = 1.5;
    LadderSource powered;     // (|x|^r - k)_+
    LadderSource root_calls;  // (|x| - k^{1/r})_+
    double nu0_powered = 0.0;
    double nu0_root = 0.0;
    double epsilon = 0.0;
    Denominator denominator = Denominator::RootN;
    StripCoefficients coefficients = StripCoefficients::Safe;
    double strip_coef_exponent = 0.0;
    double strip_budget = 0.0;       // total price of the strip schedule (finite part only for Literal)
    bool strip_budget_rigorous = false;
    double strip_normalizer = 0.0;   // Safe: max(B_r nu0_powered, strip_budget); Literal: B_r nu0_powered

    struct Options {
        std::optional<double> epsilon;
        bool allow_unsafe_epsilon = false;
        Denominator denominator = Denominator::RootN;
        StripCoefficients coefficients = StripCoefficients::Safe;
        std::size_t budget_depth = 65536;
    };

    static MZContext make(double r, LadderSource powered, LadderSource root_calls, const Options& opts);
    static MZContext make(double r, LadderSource powered, LadderSource root_calls) {
        return make(r, std::move(powered), std::move(root_calls), Options{});
    }
    /// Both ladders from one measure.
    static MZContext from_measure(double r, const PricingMeasure& m, const Options& opts);

    double epsilon_ceiling() const noexcept { return 0.5 / (1.0 + nu0_root); }
    double denominator_at(std::size_t n) const;
};

/// x + (|x| - n^{1/r})_+ (or mirrored), priced at the root-strike rung n.
HedgedMove mz_hedged_move(double x, std::size_t n, const PriceLadder& root_calls, double r, bool mirror);

/// Powered bull spreads at level n-1; K_n >= (1/nu_{0r}) #{i : |x_i|^r >= i}.
std::unique_ptr<SkepticStrategy> mz_tail_event_forcer(const MZContext& ctx);
/// Powered strip with units 1/(B n^{2/r}); with Safe coefficients
/// K_n >= (1/B) sum_i x_i^2 I(|x_i|^r <= i) / i^{2/r}.
std::unique_ptr<SkepticStrategy> mz_truncated_variance_forcer(const MZContext& ctx);
std::unique_ptr<SkepticStrategy> mz_hedged_drift(const MZContext& ctx, bool mirror);
std::unique_ptr<SkepticStrategy> mz_slln(const MZContext& ctx);

// ---------------------------------------------------------------------------
// Other
// ---------------------------------------------------------------------------

std::unique_ptr<SkepticStrategy> null_strategy();

/// Holds one unit of the target's bet from the moment the target's capital
/// drops below a until it rises above b. Initial capital a (> 0); gain
/// >= (b - a) * completed upcrossings - (a - final target capital)_+.
class UpcrossingStrategy : public ClonableStrategy<UpcrossingStrategy> {
public:
    UpcrossingStrategy(double a, double b, std::unique_ptr<SkepticStrategy> target);
    UpcrossingStrategy(const UpcrossingStrategy& other);

    std::string id() const override { return "upcrossing(" + target_->id() + ")"; }
    double initial_capital() const override { return a_; }
    std::size_t completed() const noexcept { return completed_; }
    bool holding() const noexcept { return holding_; }
    const SkepticStrategy& target() const { return *target_; }

protected:
    RoundBet propose(std::size_t n, std::span<const double> past) override;
    void observe(std::size_t n, double x) override;

private:
    double a_, b_;
    std::unique_ptr<SkepticStrategy> target_;
    bool holding_ = false;
    std::size_t completed_ = 0;
};

std::unique_ptr<SkepticStrategy> upcrossing_strategy(double a, double b, std::unique_ptr<SkepticStrategy> target);

} // namespace gtp
