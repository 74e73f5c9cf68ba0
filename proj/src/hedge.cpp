#include "gtp/hedge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gtp/errors.hpp"
#include "gtp/numeric.hpp"

namespace gtp {

GeneralSymmetric::GeneralSymmetric(std::string name, Fn fn, SeriesHint hint, double moment_exponent,
                                   std::vector<double> breakpoints)
    : name_(std::move(name)),
      fn_(std::make_shared<const Fn>(std::move(fn))),
      hint_(hint),
      moment_exponent_(moment_exponent),
      breakpoints_(std::move(breakpoints)) {
    if (!*fn_) throw ConfigError("general hedge '" + name_ + "' has no payoff function");
}

GeneralSymmetric GeneralSymmetric::tabulated(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.size() != ys.size())
        throw ConfigError("tabulated hedge needs at least two (abscissa, value) pairs of equal length");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw ConfigError("tabulated hedge: non-finite knot");
        if (xs[i] < 0.0) throw ConfigError("tabulated hedge: abscissae are magnitudes and must be >= 0");
        if (ys[i] < 0.0) throw ConfigError("tabulated hedge: payoff must be non-negative");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw ConfigError("tabulated hedge: abscissae must increase");
    }
    const std::size_t last = xs.size() - 1;
    if (ys[last] < ys[last - 1]) throw ConfigError("tabulated hedge: final slope must be non-negative");

    auto fn = [xs, ys](double ax) {
        if (ax <= xs.front()) return ys.front();
        auto it = std::upper_bound(xs.begin(), xs.end(), ax);
        std::size_t hi = static_cast<std::size_t>(it - xs.begin());
        if (hi >= xs.size()) hi = xs.size() - 1;
        const std::size_t lo = hi - 1;
        const double t = (ax - xs[lo]) / (xs[hi] - xs[lo]);
        return ys[lo] + t * (ys[hi] - ys[lo]);
    };
    std::ostringstream name;
    name << "tabulated(" << xs.size() << " knots)";
    GeneralSymmetric g(name.str(), fn, SeriesHint::Unknown, 1.0, xs);
    g.tabulated_ = true;
    return g;
}

GeneralSymmetric GeneralSymmetric::linear_log_squared() {
    auto fn = [](double ax) {
        if (ax <= 1.0) return 0.0;
        const double l = std::log(ax);
        return ax * l * l;
    };
    return GeneralSymmetric("x_log2", fn, SeriesHint::Convergent, 1.0, {1.0});
}

GeneralSymmetric GeneralSymmetric::linear_log() {
    auto fn = [](double ax) { return ax * std::log1p(ax); };
    return GeneralSymmetric("x_log1p", fn, SeriesHint::Divergent, 1.0, {});
}

double spread_level(double y, double k) noexcept {
    return std::clamp(y - k, 0.0, 1.0);
}

double trapezoid_level(double y, std::size_t k) noexcept {
    if (k == 0) return 1.0 - spread_level(y, 1.0);
    const double kd = static_cast<double>(k);
    return spread_level(y, kd - 1.0) - spread_level(y, kd + 1.0);
}

double trapezoid_strip_level(double y, std::size_t count, double p) noexcept {
    if (count == 0 || !(y >= 0.0)) return 0.0;
    // T_k(y) vanishes unless k - 1 < y < k + 2.
    const double fy = std::floor(y);
    const double lo_d = std::max(0.0, fy - 2.0);
    if (lo_d >= static_cast<double>(count)) return 0.0;
    const auto lo = static_cast<std::size_t>(lo_d);
    const std::size_t hi = std::min(count - 1, lo + 4);
    double s = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
        const double t = trapezoid_level(y, k);
        if (t != 0.0) s += std::pow(static_cast<double>(k + 1), p) * t;
    }
    return s;
}

double eval_hedge(const HedgeKind& h, double x) {
    const double ax = std::fabs(x);
    return std::visit(
        [ax](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PowerHedge>) {
                if (v.exponent == 2.0) return ax * ax;
                if (v.exponent == 1.0) return ax;
                return std::pow(ax, v.exponent);
            } else if constexpr (std::is_same_v<T, Call>) {
                return std::max(ax - v.strike, 0.0);
            } else if constexpr (std::is_same_v<T, PoweredCall>) {
                return std::max(std::pow(ax, v.r) - v.level, 0.0);
            } else if constexpr (std::is_same_v<T, BullSpread>) {
                const double y = v.r == 1.0 ? ax : std::pow(ax, v.r);
                return spread_level(y, static_cast<double>(v.k));
            } else if constexpr (std::is_same_v<T, UnitPayoff>) {
                return 1.0;
            } else if constexpr (std::is_same_v<T, TrapezoidStrip>) {
                const double y = v.r == 1.0 ? ax : std::pow(ax, v.r);
                return trapezoid_strip_level(y, v.count, v.coef_exponent);
            } else {
                return v(ax);
            }
        },
        h);
}

std::string describe(const HedgeKind& h) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PowerHedge>) {
                return "power(" + format_real(v.exponent) + ")";
            } else if constexpr (std::is_same_v<T, Call>) {
                return "call(" + format_real(v.strike) + ")";
            } else if constexpr (std::is_same_v<T, PoweredCall>) {
                return "powered_call(r=" + format_real(v.r) + ",level=" + format_real(v.level) + ")";
            } else if constexpr (std::is_same_v<T, BullSpread>) {
                return "bull_spread(r=" + format_real(v.r) + ",k=" + std::to_string(v.k) + ")";
            } else if constexpr (std::is_same_v<T, UnitPayoff>) {
                return "unit";
            } else if constexpr (std::is_same_v<T, TrapezoidStrip>) {
                return "trapezoid_strip(r=" + format_real(v.r) + ",count=" + std::to_string(v.count) +
                       ",coef=" + format_real(v.coef_exponent) + ")";
            } else {
                return v.name();
            }
        },
        h);
}

void HedgePortfolio::add(const PricedHedge& hedge, double units) {
    if (units == 0.0) return;
    for (auto& e : entries_) {
        if (e.hedge.price == hedge.price && e.hedge.kind == hedge.kind) {
            e.units += units;
            return;
        }
    }
    entries_.push_back({hedge, units});
}

void HedgePortfolio::add(const HedgePortfolio& other, double weight) {
    for (const auto& e : other.entries_) add(e.hedge, weight * e.units);
}

double HedgePortfolio::total_price() const noexcept {
    NeumaierSum s;
    for (const auto& e : entries_) s.add(e.units * e.hedge.price);
    return s.value();
}

double HedgePortfolio::payoff(double x) const {
    NeumaierSum s;
    for (const auto& e : entries_) s.add(e.units * eval_hedge(e.hedge.kind, x));
    return s.value();
}

double HedgePortfolio::net_gain(double x) const {
    NeumaierSum s;
    for (const auto& e : entries_) s.add(e.units * (eval_hedge(e.hedge.kind, x) - e.hedge.price));
    return s.value();
}

HedgePortfolio HedgePortfolio::scaled(double factor) const {
    HedgePortfolio out = *this;
    out.scale(factor);
    return out;
}

void HedgePortfolio::scale(double factor) noexcept {
    for (auto& e : entries_) e.units *= factor;
}

} // namespace gtp
