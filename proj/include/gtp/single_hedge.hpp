#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gtp/hedge.hpp"

namespace gtp {

enum class CheckStatus { Pass, Fail, Inconclusive };
std::string to_string(CheckStatus s);

struct ConditionCheck {
    CheckStatus status = CheckStatus::Inconclusive;
    std::string method;
    std::string detail;
};

/// Monotonicity of h(x)/x^alpha for x >= c on the sampled grid.
struct RatioMonotonicity {
    double alpha = 1.0;
    bool increasing = false;
    bool decreasing = false;
    bool monotone() const noexcept { return increasing || decreasing; }
};

/// Conditions a single hedge needs before the single-hedge strategies can use it:
///  growth   h(x) >= |x| for |x| >= c
///  shape    h(x)/|x|^alpha monotone for |x| >= c, alpha >= 1
///  summable sum_{n > c} 1/h(n) < inf
struct SingleHedgeReport {
    double c = 0.0;
    ConditionCheck growth;
    ConditionCheck shape;            // over the full alpha grid {1, 1.25, ..., 3}
    std::vector<RatioMonotonicity> alpha_grid;
    RatioMonotonicity linear_ratio;  // alpha = 1; must be increasing for the strategies
    RatioMonotonicity square_ratio;  // alpha = 2
    ConditionCheck summable;

    /// Growth and summability pass, h/|x| increasing and h/x^2 monotone.
    bool usable() const noexcept;
    std::string summary() const;
};

SingleHedgeReport validate_single_hedge(const HedgeKind& h, double c);

/// Partial sums of 1/h(n) are taken to this index before the tail estimate.
inline constexpr std::size_t kSeriesCutoff = 1000000;

/// Everything the single-hedge strategies share.
struct SingleHedgeContext {
    HedgeKind h;
    double nu = 1.0;      // price of h
    double c = 0.0;
    std::size_t n0 = 1;   // first round the strategies bet on: floor(c) + 1
    double series = 0.0;  // upper bound on sum_{n >= n0} 1/h(n)
    double epsilon = 0.0;

    struct Options {
        double c = 0.0;
        std::optional<double> epsilon;  // default: 0.9 of the ceiling
        /// Skip the hedge conditions (impossibility demonstrations with h(x) = |x|).
        bool require_valid = true;
        /// Accept epsilon above the ceiling (deliberately broken configurations).
        bool allow_unsafe_epsilon = false;
    };

    static SingleHedgeContext make(HedgeKind h, double nu, const Options& opts);
    static SingleHedgeContext make(HedgeKind h, double nu) { return make(std::move(h), nu, Options{}); }

    double h_at(std::size_t n) const { return eval_hedge(h, static_cast<double>(n)); }
    /// 1 / (2 (1 + nu / h(n0))): largest fraction keeping every round factor >= 1/2.
    double epsilon_ceiling() const;
    PricedHedge priced() const { return {h, nu}; }
};

/// sum_{n = n0}^{cutoff} 1/h(n) plus an integral bound on the rest.
/// Throws ConfigError when the sum diverges or cannot be bounded.
double reciprocal_series_bound(const HedgeKind& h, std::size_t n0, std::size_t cutoff = kSeriesCutoff);

} // namespace gtp
