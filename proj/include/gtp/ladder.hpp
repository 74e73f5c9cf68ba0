#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gtp/hedge.hpp"
#include "gtp/measure.hpp"
#include "gtp/numeric.hpp"

namespace gtp {

/// Which call-type payoff the k-th rung of a ladder is.
struct LadderFamily {
    enum class Kind {
        Call,           // (|x| - k)_+
        PoweredCall,    // (|x|^r - k)_+
        RootStrikeCall  // (|x| - k^{1/r})_+
    };

    Kind kind = Kind::Call;
    double r = 1.0;

    static LadderFamily calls() { return {Kind::Call, 1.0}; }
    static LadderFamily powered(double r);
    static LadderFamily root_strike(double r);

    HedgeKind hedge_at(std::size_t k) const;
    /// Exponent of the level variable |x|^r the trapezoids of this family live on.
    double level_exponent() const noexcept { return kind == Kind::PoweredCall ? r : 1.0; }
    std::string describe() const;

    bool operator==(const LadderFamily&) const = default;
};

/// Prices nu_0..nu_depth of one ladder family. Immutable.
class PriceLadder {
public:
    PriceLadder(LadderFamily family, std::vector<double> prices);

    const LadderFamily& family() const noexcept { return family_; }
    /// Largest index with a price.
    std::size_t depth() const noexcept { return prices_.size() - 1; }
    const std::vector<double>& prices() const noexcept { return prices_; }

    /// nu_k; throws ConfigError when k exceeds the depth.
    double nu(std::size_t k) const;
    /// Trapezoid price mu_k (k = 0 is 1 - nu_1 + nu_2); needs depth >= k + 2.
    double mu(std::size_t k) const;
    PricedHedge rung(std::size_t k) const;

private:
    LadderFamily family_;
    std::vector<double> prices_;
};

/// Prices the rungs 0..depth under a measure. depth >= 4.
PriceLadder build_ladder(const PricingMeasure& m, LadderFamily family, std::size_t depth);

/// Ladder source shared by all clones of a strategy. Measure-backed caches
/// extend themselves by doubling; fixed ladders refuse to go deeper.
/// Snapshots are immutable, so readers never block each other.
class LadderCache {
public:
    LadderCache(PricingMeasure m, LadderFamily family, std::size_t initial_depth = 64);
    explicit LadderCache(PriceLadder fixed);

    std::shared_ptr<const PriceLadder> at_least(std::size_t depth) const;
    std::shared_ptr<const PriceLadder> current() const;

    const LadderFamily& family() const noexcept { return family_; }
    bool extensible() const noexcept { return measure_.has_value(); }
    const std::optional<PricingMeasure>& measure() const noexcept { return measure_; }

private:
    LadderFamily family_;
    std::optional<PricingMeasure> measure_;
    mutable std::mutex mutex_;
    mutable std::shared_ptr<const PriceLadder> snapshot_;
};

using LadderSource = std::shared_ptr<const LadderCache>;

/// Incrementally maintained prices of trapezoid strips sum_{k<count} (k+1)^p T_k.
/// Per-run object (not thread-safe); prefix sums are accumulated in a fixed
/// order so every instance produces the same bits.
class StripPricer {
public:
    StripPricer(LadderSource ladder, double coef_exponent);

    double price(std::size_t count);
    PricedHedge strip(std::size_t count);
    double coef_exponent() const noexcept { return coef_exponent_; }

private:
    LadderSource ladder_;
    std::shared_ptr<const PriceLadder> snap_;
    double coef_exponent_;
    std::vector<double> prefix_;  // prefix_[c] = price of the strip with count c
    NeumaierSum acc_;
};

HedgePortfolio bull_spread(const PriceLadder& ladder, std::size_t k);
HedgePortfolio trapezoid(const PriceLadder& ladder, std::size_t k);
/// Trapezoid on the level |x|^r; the ladder must be the PoweredCall(r) family.
HedgePortfolio trapezoid_r(const PriceLadder& ladder, std::size_t k, double r);

/// Budget factor of the strip sum_n sum_{k<n} (k+1)^2 T_k / n^2 for plain calls.
inline constexpr double kCallStripBudgetFactor = 6.0;
/// Budget factor 3 * 2^{2/r-1} / (2/r - 1) of the powered-call strip.
double powered_strip_budget_factor(double r);

/// Total price of the strip schedule sum_{n>=1} n^{-q} sum_{k<n} (k+1)^c T_k,
/// i.e. sum_k (k+1)^c mu_k zeta(q, k+1).
struct StripBudget {
    double finite_part = 0.0;  // exact terms k < cutoff
    double tail = 0.0;         // bound on the remaining terms
    std::size_t cutoff = 0;
    bool rigorous = false;     // tail is a proven bound (needs c <= q)
    double total() const noexcept { return finite_part + tail; }
};
StripBudget strip_budget(const PriceLadder& ladder, double coef_exponent, double denom_exponent);

struct CoherenceReport {
    bool monotone = true;
    bool convex = true;
    bool tail_decay = true;
    bool telescoping = true;
    std::optional<std::size_t> failing_index;
    std::vector<std::string> failures;
    bool passed() const noexcept { return monotone && convex && tail_decay && telescoping; }
    std::string summary() const;
};

/// Monotone and convex prices, nu_depth <= tol, and the spread telescoping
/// identity at the sampled moves (default: a fixed grid reaching below the depth).
CoherenceReport check_coherence(const PriceLadder& ladder, double tol, std::span<const double> sample_x = {});

/// Columns k, nu_k, mu_k (mu_k empty where k + 2 exceeds the depth).
void write_ladder_csv(std::ostream& os, const PriceLadder& ladder);

} // namespace gtp
