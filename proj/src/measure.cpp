#include "gtp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "gtp/errors.hpp"
#include "gtp/numeric.hpp"

namespace gtp {

namespace {

constexpr double kQuadTol = 1e-10;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

} // namespace

PricingMeasure PricingMeasure::discrete(std::vector<double> points, std::vector<double> weights) {
    if (points.empty() || points.size() != weights.size())
        throw ConfigError("discrete measure needs matching, non-empty points and weights");
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i])) throw ConfigError("discrete measure: non-finite support point");
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
            throw ConfigError("discrete measure: weights must be finite and non-negative");
        total += weights[i];
    }
    if (!(total > 0.0)) throw ConfigError("discrete measure: weights sum to zero");
    for (double& w : weights) w /= total;

    // Mass at +p must equal mass at -p; otherwise the bare move has a nonzero price.
    for (std::size_t i = 0; i < points.size(); ++i) {
        double here = 0.0, mirror = 0.0;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (points[j] == points[i]) here += weights[j];
            if (points[j] == -points[i]) mirror += weights[j];
        }
        if (std::fabs(here - mirror) > 1e-12)
            throw ConfigError("discrete measure is not symmetric at point " + format_real(points[i]));
    }
    return PricingMeasure(DiscreteLaw{std::move(points), std::move(weights)});
}

PricingMeasure PricingMeasure::uniform(std::vector<double> points) {
    std::vector<double> w(points.size(), 1.0);
    return discrete(std::move(points), std::move(w));
}

PricingMeasure PricingMeasure::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("exponential measure: rate must be positive");
    return PricingMeasure(TwoSidedExponential{rate});
}

PricingMeasure PricingMeasure::pareto(double tail_index, double scale) {
    if (!(tail_index > 0.0) || !std::isfinite(tail_index))
        throw ConfigError("pareto measure: tail index must be positive");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("pareto measure: scale must be positive");
    return PricingMeasure(TwoSidedPareto{tail_index, scale});
}

bool PricingMeasure::has_moment(double p) const noexcept {
    if (const auto* par = std::get_if<TwoSidedPareto>(&law_)) return p < par->tail_index;
    return true;
}

double PricingMeasure::sample(double u_magnitude, double u_sign) const noexcept {
    return std::visit(
        Overloaded{
            [&](const DiscreteLaw& d) {
                double acc = 0.0;
                for (std::size_t i = 0; i < d.points.size(); ++i) {
                    acc += d.weights[i];
                    if (u_magnitude < acc) return d.points[i];
                }
                return d.points.back();
            },
            [&](const TwoSidedExponential& e) {
                const double mag = -std::log1p(-u_magnitude) / e.rate;
                return u_sign < 0.5 ? -mag : mag;
            },
            [&](const TwoSidedPareto& p) {
                const double mag = p.scale * std::pow(1.0 - u_magnitude, -1.0 / p.tail_index);
                return u_sign < 0.5 ? -mag : mag;
            },
        },
        law_);
}

std::string PricingMeasure::describe() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const DiscreteLaw& d) {
                       os << "discrete{";
                       for (std::size_t i = 0; i < d.points.size(); ++i) {
                           if (i) os << ", ";
                           os << format_real(d.points[i]) << ":" << format_real(d.weights[i]);
                       }
                       os << "}";
                   },
                   [&](const TwoSidedExponential& e) { os << "exponential(rate=" << format_real(e.rate) << ")"; },
                   [&](const TwoSidedPareto& p) {
                       os << "pareto(tail=" << format_real(p.tail_index) << ",scale=" << format_real(p.scale) << ")";
                   },
               },
               law_);
    return os.str();
}

namespace {

// Moment exponent a hedge needs to have a finite expectation.
double required_moment(const HedgeKind& h) {
    return std::visit(Overloaded{
                          [](const PowerHedge& p) { return p.exponent; },
                          [](const Call&) { return 1.0; },
                          [](const PoweredCall& c) { return c.r; },
                          [](const BullSpread&) { return 0.0; },
                          [](const UnitPayoff&) { return 0.0; },
                          [](const TrapezoidStrip&) { return 0.0; },
                          [](const GeneralSymmetric& g) { return g.moment_exponent(); },
                      },
                      h);
}

void require_moments(const PricingMeasure& m, const HedgeKind& h) {
    const double p = required_moment(h);
    if (p > 0.0 && !m.has_moment(p))
        throw PricingError("measure " + m.describe() + " lacks the moment of order " + format_real(p) +
                           " needed to price " + describe(h));
}

double discrete_expectation(const DiscreteLaw& d, const HedgeKind& h) {
    NeumaierSum s;
    for (std::size_t i = 0; i < d.points.size(); ++i) s.add(d.weights[i] * eval_hedge(h, d.points[i]));
    return s.value();
}

// E(Y - k)_+ for Y ~ Pareto(alpha, scale), alpha > 1.
double pareto_call(double alpha, double scale, double k) {
    if (k >= scale) return std::pow(scale, alpha) * std::pow(k, 1.0 - alpha) / (alpha - 1.0);
    return (scale - k) + scale / (alpha - 1.0);
}

double strip_price_from_levels(const PricingMeasure& m, const TrapezoidStrip& s) {
    if (s.count == 0) return 0.0;
    std::vector<double> nu(s.count + 2);
    for (std::size_t k = 0; k < nu.size(); ++k) nu[k] = powered_call_price(m, s.r, static_cast<double>(k));
    NeumaierSum total;
    for (std::size_t k = 0; k < s.count; ++k) {
        const double mu = k == 0 ? 1.0 - nu[1] + nu[2] : nu[k - 1] - nu[k] - nu[k + 1] + nu[k + 2];
        total.add(std::pow(static_cast<double>(k + 1), s.coef_exponent) * mu);
    }
    return total.value();
}

// Points where the payoff (as a function of |x|) has a kink.
std::vector<double> kinks(const HedgeKind& h) {
    return std::visit(Overloaded{
                          [](const PowerHedge&) { return std::vector<double>{}; },
                          [](const Call& c) { return std::vector<double>{c.strike}; },
                          [](const PoweredCall& c) { return std::vector<double>{std::pow(c.level, 1.0 / c.r)}; },
                          [](const BullSpread& s) {
                              const double k = static_cast<double>(s.k);
                              return std::vector<double>{std::pow(k, 1.0 / s.r), std::pow(k + 1.0, 1.0 / s.r)};
                          },
                          [](const UnitPayoff&) { return std::vector<double>{}; },
                          [](const TrapezoidStrip& s) {
                              std::vector<double> out;
                              for (std::size_t k = 0; k <= s.count + 2; ++k)
                                  out.push_back(std::pow(static_cast<double>(k), 1.0 / s.r));
                              return out;
                          },
                          [](const GeneralSymmetric& g) { return g.breakpoints(); },
                      },
                      h);
}

double integrate_magnitude(const std::function<double(double)>& f, std::vector<double> cuts, double lower,
                           const std::string& what) {
    cuts.push_back(lower);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [lower](double c) { return c < lower || !std::isfinite(c); }),
               cuts.end());

    NeumaierSum total;
    double err_total = 0.0, l1_total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double err = 0.0, l1 = 0.0;
        const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 15,
                                                                                        kQuadTol, &err, &l1);
        total.add(v);
        err_total += err;
        l1_total += l1;
    }
    boost::math::quadrature::exp_sinh<double> tail_rule;
    double err = 0.0, l1 = 0.0;
    const double a = cuts.back();
    const double v = tail_rule.integrate([&](double t) { return f(t); }, a, std::numeric_limits<double>::infinity(),
                                         kQuadTol, &err, &l1);
    total.add(v);
    err_total += err;
    l1_total += l1;

    if (!std::isfinite(total.value()) || err_total > 1e-8 * std::max(1.0, l1_total))
        throw NumericError("quadrature did not converge for " + what + " (error estimate " + format_real(err_total) +
                           ", L1 " + format_real(l1_total) + ")");
    return total.value();
}

} // namespace

double price_by_quadrature(const PricingMeasure& m, const HedgeKind& h) {
    require_moments(m, h);
    return std::visit(
        Overloaded{
            [&](const DiscreteLaw& d) { return discrete_expectation(d, h); },
            [&](const TwoSidedExponential& e) {
                const double rate = e.rate;
                auto f = [&](double t) { return eval_hedge(h, t) * rate * std::exp(-rate * t); };
                return integrate_magnitude(f, kinks(h), 0.0, describe(h) + " under " + m.describe());
            },
            [&](const TwoSidedPareto& p) {
                const double a = p.tail_index, sc = p.scale;
                const double norm = a * std::pow(sc, a);
                auto f = [&](double t) { return eval_hedge(h, t) * norm * std::pow(t, -a - 1.0); };
                return integrate_magnitude(f, kinks(h), sc, describe(h) + " under " + m.describe());
            },
        },
        m.law());
}

double call_price(const PricingMeasure& m, double strike) {
    if (!m.has_moment(1.0)) throw PricingError("measure " + m.describe() + " has no finite mean; calls cannot be priced");
    return std::visit(Overloaded{
                          [&](const DiscreteLaw& d) { return discrete_expectation(d, Call{strike}); },
                          [&](const TwoSidedExponential& e) {
                              if (strike < 0.0) return 1.0 / e.rate - strike;
                              return std::exp(-e.rate * strike) / e.rate;
                          },
                          [&](const TwoSidedPareto& p) { return pareto_call(p.tail_index, p.scale, strike); },
                      },
                      m.law());
}

double powered_call_price(const PricingMeasure& m, double r, double level) {
    if (r == 1.0) return call_price(m, level);
    if (!m.has_moment(r))
        throw PricingError("measure " + m.describe() + " lacks the moment of order " + format_real(r));
    return std::visit(Overloaded{
                          [&](const DiscreteLaw& d) { return discrete_expectation(d, PoweredCall{r, level}); },
                          [&](const TwoSidedExponential& e) {
                              const double mean_r = std::tgamma(r + 1.0) / std::pow(e.rate, r);
                              if (level <= 0.0) return mean_r - level;
                              const double a = e.rate * std::pow(level, 1.0 / r);
                              return r * std::pow(e.rate, -r) * boost::math::tgamma(r, a);
                          },
                          [&](const TwoSidedPareto& p) {
                              return pareto_call(p.tail_index / r, std::pow(p.scale, r), level);
                          },
                      },
                      m.law());
}

double price_hedge(const PricingMeasure& m, const HedgeKind& h) {
    require_moments(m, h);
    return std::visit(
        Overloaded{
            [&](const PowerHedge& p) {
                return std::visit(Overloaded{
                                      [&](const DiscreteLaw& d) { return discrete_expectation(d, h); },
                                      [&](const TwoSidedExponential& e) {
                                          return std::tgamma(p.exponent + 1.0) / std::pow(e.rate, p.exponent);
                                      },
                                      [&](const TwoSidedPareto& par) {
                                          return par.tail_index * std::pow(par.scale, p.exponent) /
                                                 (par.tail_index - p.exponent);
                                      },
                                  },
                                  m.law());
            },
            [&](const Call& c) { return call_price(m, c.strike); },
            [&](const PoweredCall& c) { return powered_call_price(m, c.r, c.level); },
            [&](const BullSpread& s) {
                const double k = static_cast<double>(s.k);
                return powered_call_price(m, s.r, k) - powered_call_price(m, s.r, k + 1.0);
            },
            [&](const UnitPayoff&) { return 1.0; },
            [&](const TrapezoidStrip& s) { return strip_price_from_levels(m, s); },
            [&](const GeneralSymmetric&) { return price_by_quadrature(m, h); },
        },
        h);
}

} // namespace gtp
