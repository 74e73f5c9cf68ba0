#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace gtp {

/// h(x) = |x|^exponent
struct PowerHedge {
    double exponent = 2.0;
    bool operator==(const PowerHedge&) const = default;
};

/// Symmetric call (strangle) (|x| - strike)_+
struct Call {
    double strike = 0.0;
    bool operator==(const Call&) const = default;
};

/// (|x|^r - level)_+
struct PoweredCall {
    double r = 1.5;
    double level = 0.0;
    bool operator==(const PoweredCall&) const = default;
};

/// (y - k)_+ - (y - k - 1)_+ on the level y = |x|^r, i.e. min(max(y - k, 0), 1).
/// Priced as nu_k - nu_{k+1} of the matching call ladder. Evaluated directly so
/// the payoff stays exact at levels where the two call legs would lose it to rounding.
struct BullSpread {
    double r = 1.0;
    std::size_t k = 0;
    bool operator==(const BullSpread&) const = default;
};

/// Constant payoff 1. Priced at 1, so holding it never changes capital; it
/// only appears as the cash leg of the k = 0 trapezoid.
struct UnitPayoff {
    bool operator==(const UnitPayoff&) const = default;
};

/// sum_{k < count} (k+1)^coef_exponent * T_k, with T_k the symmetric trapezoid
/// on the level |x|^r (r = 1 for plain calls). Kept as one entry so a round's
/// portfolio stays O(1) even though it stands for `count` trapezoids.
struct TrapezoidStrip {
    double r = 1.0;
    std::size_t count = 0;
    double coef_exponent = 2.0;
    bool operator==(const TrapezoidStrip&) const = default;
};

/// Known convergence behaviour of sum_n 1/h(n), when the closed form is known.
enum class SeriesHint { Unknown, Convergent, Divergent };

/// Even payoff given as a function of |x|.
class GeneralSymmetric {
public:
    using Fn = std::function<double(double)>;

    GeneralSymmetric(std::string name, Fn fn, SeriesHint hint = SeriesHint::Unknown,
                     double moment_exponent = 0.0, std::vector<double> breakpoints = {});

    /// Piecewise-linear through (abscissae, values): constant below the first
    /// knot, extended with the last segment's slope past the final knot.
    /// Values must be non-negative and the final slope must not be negative.
    static GeneralSymmetric tabulated(std::vector<double> abscissae, std::vector<double> values);

    /// |x| (log|x|)^2 for |x| >= 1, zero below.
    static GeneralSymmetric linear_log_squared();

    /// |x| log(1 + |x|): grows faster than |x| but sum 1/h(n) still diverges.
    static GeneralSymmetric linear_log();

    double operator()(double abs_x) const { return (*fn_)(abs_x); }
    const std::string& name() const noexcept { return name_; }
    SeriesHint series_hint() const noexcept { return hint_; }
    /// Smallest p such that E|x|^{p+delta} < inf for all delta > 0 suffices for pricing.
    double moment_exponent() const noexcept { return moment_exponent_; }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    bool tabulated_form() const noexcept { return tabulated_; }

    bool operator==(const GeneralSymmetric& other) const {
        return name_ == other.name_ && fn_ == other.fn_;
    }

private:
    std::string name_;
    std::shared_ptr<const Fn> fn_;
    SeriesHint hint_;
    double moment_exponent_;
    std::vector<double> breakpoints_;
    bool tabulated_ = false;
};

using HedgeKind =
    std::variant<PowerHedge, Call, PoweredCall, BullSpread, UnitPayoff, TrapezoidStrip, GeneralSymmetric>;

double eval_hedge(const HedgeKind& h, double x);
std::string describe(const HedgeKind& h);

/// Payoff of the spread (y-k)_+ - (y-k-1)_+ at level y >= 0.
double spread_level(double y, double k) noexcept;
/// Five-piece trapezoid T_k at level y >= 0 (k = 0 uses the cash-leg form).
double trapezoid_level(double y, std::size_t k) noexcept;
/// sum_{k<count} (k+1)^p T_k(y), touching only the (at most four) non-zero terms.
double trapezoid_strip_level(double y, std::size_t count, double p) noexcept;

struct PricedHedge {
    HedgeKind kind;
    double price = 0.0;
};

struct PortfolioEntry {
    PricedHedge hedge;
    double units = 0.0;
};

/// Finite signed combination of priced hedges. Entries with an identical
/// payoff are merged on insertion.
class HedgePortfolio {
public:
    HedgePortfolio() = default;

    void add(const PricedHedge& hedge, double units);
    void add(const HedgePortfolio& other, double weight = 1.0);

    const std::vector<PortfolioEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    double total_price() const noexcept;
    double payoff(double x) const;
    /// sum units * (h(x) - price): the capital change caused by the portfolio.
    double net_gain(double x) const;

    HedgePortfolio scaled(double factor) const;
    void scale(double factor) noexcept;

private:
    std::vector<PortfolioEntry> entries_;
};

} // namespace gtp
