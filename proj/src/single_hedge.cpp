#include "gtp/single_hedge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "gtp/errors.hpp"
#include "gtp/numeric.hpp"

namespace gtp {

std::string to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass:
        return "pass";
    case CheckStatus::Fail:
        return "fail";
    case CheckStatus::Inconclusive:
        return "inconclusive";
    }
    return "?";
}

namespace {

std::vector<double> magnitude_grid(double c) {
    const double lo = std::max(c, 1e-6);
    const double hi = 1e8;
    constexpr int points = 4000;
    std::vector<double> g;
    g.reserve(points + 1);
    const double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) g.push_back(lo * std::exp(step * i));
    g.front() = lo;
    return g;
}

RatioMonotonicity ratio_monotonicity(const HedgeKind& h, const std::vector<double>& grid, double alpha) {
    RatioMonotonicity m{alpha, true, true};
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (double x : grid) {
        const double v = eval_hedge(h, x) / std::pow(x, alpha);
        if (!std::isnan(prev)) {
            const double slack = 1e-12 * std::max(std::fabs(v), std::fabs(prev));
            if (v < prev - slack) m.increasing = false;
            if (v > prev + slack) m.decreasing = false;
        }
        prev = v;
    }
    return m;
}

// Closed-form verdict on sum 1/h(n) where the payoff family allows one.
std::optional<ConditionCheck> closed_form_summability(const HedgeKind& h) {
    ConditionCheck out;
    if (const auto* p = std::get_if<PowerHedge>(&h)) {
        out.status = p->exponent > 1.0 ? CheckStatus::Pass : CheckStatus::Fail;
        out.method = "p-series";
        out.detail = "sum n^-" + format_real(p->exponent);
        return out;
    }
    if (const auto* pc = std::get_if<PoweredCall>(&h)) {
        out.status = pc->r > 1.0 ? CheckStatus::Pass : CheckStatus::Fail;
        out.method = "p-series comparison";
        out.detail = "h(n) ~ n^" + format_real(pc->r);
        return out;
    }
    if (std::holds_alternative<Call>(h)) {
        out.status = CheckStatus::Fail;
        out.method = "harmonic comparison";
        out.detail = "h(n) ~ n";
        return out;
    }
    if (std::holds_alternative<UnitPayoff>(h) || std::holds_alternative<TrapezoidStrip>(h) ||
        std::holds_alternative<BullSpread>(h)) {
        out.status = CheckStatus::Fail;
        out.method = "bounded payoff";
        out.detail = "1/h(n) does not tend to 0";
        return out;
    }
    const auto& g = std::get<GeneralSymmetric>(h);
    if (g.tabulated_form()) {
        out.status = CheckStatus::Fail;
        out.method = "integral test on linear extrapolation";
        out.detail = "a tabulated payoff grows at most linearly beyond its last knot";
        return out;
    }
    if (g.series_hint() == SeriesHint::Convergent || g.series_hint() == SeriesHint::Divergent) {
        out.status = g.series_hint() == SeriesHint::Convergent ? CheckStatus::Pass : CheckStatus::Fail;
        out.method = "integral test (closed form)";
        out.detail = g.name();
        return out;
    }
    return std::nullopt;
}

// Partial sums to the cutoff; the last decade's increment decides.
ConditionCheck heuristic_summability(const HedgeKind& h, std::size_t n0) {
    constexpr double pass_below = 0.05;
    constexpr double fail_above = 0.5;
    ConditionCheck out;
    out.method = "partial-sum heuristic (cutoff 1e6, last-decade increment)";
    NeumaierSum head, decade;
    for (std::size_t n = n0; n <= kSeriesCutoff; ++n) {
        const double hn = eval_hedge(h, static_cast<double>(n));
        if (!(hn > 0.0)) {
            out.status = CheckStatus::Fail;
            out.detail = "h(" + std::to_string(n) + ") = 0";
            return out;
        }
        (n > kSeriesCutoff / 10 ? decade : head).add(1.0 / hn);
    }
    const double inc = decade.value();
    out.detail = "partial sum " + format_real(head.value() + inc) + ", last-decade increment " + format_real(inc);
    if (inc < pass_below)
        out.status = CheckStatus::Pass;
    else if (inc > fail_above)
        out.status = CheckStatus::Fail;
    else
        out.status = CheckStatus::Inconclusive;
    return out;
}

} // namespace

bool SingleHedgeReport::usable() const noexcept {
    return growth.status == CheckStatus::Pass && summable.status == CheckStatus::Pass && linear_ratio.increasing &&
           square_ratio.monotone();
}

std::string SingleHedgeReport::summary() const {
    std::string s = "growth " + to_string(growth.status) + " (" + growth.method + ")";
    s += "; shape " + to_string(shape.status) + " (" + shape.detail + ")";
    s += std::string("; h/|x| ") + (linear_ratio.increasing ? "increasing" : linear_ratio.decreasing ? "decreasing" : "not monotone");
    s += std::string("; h/x^2 ") + (square_ratio.increasing ? "increasing" : square_ratio.decreasing ? "decreasing" : "not monotone");
    s += "; summable " + to_string(summable.status) + " (" + summable.method + ": " + summable.detail + ")";
    return s;
}

SingleHedgeReport validate_single_hedge(const HedgeKind& h, double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ConfigError("validate_single_hedge: c must be finite and >= 0");
    SingleHedgeReport rep;
    rep.c = c;
    const auto grid = magnitude_grid(c);

    rep.growth.method = "sampled grid on [max(c,1e-6), 1e8], 4000 log-spaced points";
    rep.growth.status = CheckStatus::Pass;
    for (double x : grid) {
        if (eval_hedge(h, x) < x * (1.0 - 1e-12)) {
            rep.growth.status = CheckStatus::Fail;
            rep.growth.detail = "h(" + format_real(x) + ") < " + format_real(x);
            break;
        }
    }

    std::vector<std::string> broken;
    for (int i = 0; i <= 8; ++i) {
        const double alpha = 1.0 + 0.25 * i;
        rep.alpha_grid.push_back(ratio_monotonicity(h, grid, alpha));
        if (!rep.alpha_grid.back().monotone()) broken.push_back(format_real(alpha));
    }
    rep.linear_ratio = rep.alpha_grid.front();
    rep.square_ratio = rep.alpha_grid[4];
    rep.shape.method = "sampled grid, alpha in {1, 1.25, ..., 3}";
    if (broken.empty()) {
        rep.shape.status = CheckStatus::Pass;
        rep.shape.detail = "monotone for every sampled alpha";
    } else {
        rep.shape.status = CheckStatus::Fail;
        rep.shape.detail = "not monotone for alpha =";
        for (const auto& a : broken) rep.shape.detail += " " + a;
    }

    const std::size_t n0 = static_cast<std::size_t>(std::floor(c)) + 1;
    if (auto cf = closed_form_summability(h))
        rep.summable = *cf;
    else
        rep.summable = heuristic_summability(h, n0);
    return rep;
}

double reciprocal_series_bound(const HedgeKind& h, std::size_t n0, std::size_t cutoff) {
    if (auto cf = closed_form_summability(h); cf && cf->status == CheckStatus::Fail)
        throw ConfigError("sum of 1/h(n) diverges for " + describe(h));
    if (cutoff < n0) cutoff = n0;
    // Smallest terms first.
    NeumaierSum s;
    for (std::size_t n = cutoff; n >= n0; --n) {
        const double hn = eval_hedge(h, static_cast<double>(n));
        if (!(hn > 0.0)) throw ConfigError("h(" + std::to_string(n) + ") = 0 inside the summation range");
        s.add(1.0 / hn);
        if (n == 0) break;
    }
    // 1/h decreasing beyond the cutoff: the tail sum is below the integral from the cutoff.
    const double a = static_cast<double>(cutoff);
    double tail = 0.0;
    const auto* g = std::get_if<GeneralSymmetric>(&h);
    if (const auto* p = std::get_if<PowerHedge>(&h)) {
        tail = std::pow(a, 1.0 - p->exponent) / (p->exponent - 1.0);
    } else if (g && g->name() == GeneralSymmetric::linear_log_squared().name() && a > 1.0) {
        tail = 1.0 / std::log(a);
    } else {
        // x = a e^u keeps slowly decaying integrands tractable; stop where x overflows
        // and insist the integrand is negligible there.
        const double u_max = std::log(1e300 / a);
        auto f = [&](double u) {
            const double x = a * std::exp(u);
            return x / eval_hedge(h, x);
        };
        boost::math::quadrature::tanh_sinh<double> rule;
        double err = 0.0;
        tail = rule.integrate(f, 0.0, u_max, 1e-10, &err);
        if (!std::isfinite(tail) || err > 1e-6 * std::max(1.0, tail) || !(f(u_max) < 1e-12))
            throw ConfigError("cannot bound the tail of sum 1/h(n) for " + describe(h));
    }
    return s.value() + tail;
}

double SingleHedgeContext::epsilon_ceiling() const {
    return 1.0 / (2.0 * (1.0 + nu / h_at(n0)));
}

SingleHedgeContext SingleHedgeContext::make(HedgeKind h, double nu, const Options& opts) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("hedge price must be positive and finite");
    SingleHedgeContext ctx;
    ctx.h = std::move(h);
    ctx.nu = nu;
    ctx.c = opts.c;
    if (opts.require_valid) {
        const auto rep = validate_single_hedge(ctx.h, opts.c);
        if (!rep.usable()) throw ConfigError("hedge " + describe(ctx.h) + " not usable: " + rep.summary());
    }
    ctx.n0 = static_cast<std::size_t>(std::floor(opts.c)) + 1;
    if (!(ctx.h_at(ctx.n0) > 0.0))
        throw ConfigError("h(" + std::to_string(ctx.n0) + ") must be positive; raise c");
    try {
        ctx.series = reciprocal_series_bound(ctx.h, ctx.n0);
    } catch (const ConfigError&) {
        if (opts.require_valid) throw;
        ctx.series = std::numeric_limits<double>::infinity();
    }
    const double ceiling = ctx.epsilon_ceiling();
    ctx.epsilon = opts.epsilon.value_or(0.9 * ceiling);
    if (!(ctx.epsilon > 0.0) || !std::isfinite(ctx.epsilon)) throw ConfigError("epsilon must be positive");
    if (ctx.epsilon > ceiling && !opts.allow_unsafe_epsilon)
        throw ConfigError("epsilon " + format_real(ctx.epsilon) + " exceeds the ceiling " + format_real(ceiling));
    return ctx;
}

} // namespace gtp
