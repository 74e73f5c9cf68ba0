#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gtp/hedge.hpp"

namespace gtp {

/// Finite symmetric support: every point's mirror carries the same mass.
struct DiscreteLaw {
    std::vector<double> points;
    std::vector<double> weights;  // normalized to 1
};

/// Density (rate/2) e^{-rate |x|}.
struct TwoSidedExponential {
    double rate = 1.0;
};

/// |x| ~ Pareto(tail_index, scale), sign independent and fair.
struct TwoSidedPareto {
    double tail_index = 2.5;
    double scale = 1.0;
};

/// Symmetric law for a single move. Symmetry gives the bare move price 0, and
/// pricing every hedge as an expectation under one law keeps the game coherent.
class PricingMeasure {
public:
    using Law = std::variant<DiscreteLaw, TwoSidedExponential, TwoSidedPareto>;

    static PricingMeasure discrete(std::vector<double> points, std::vector<double> weights);
    static PricingMeasure uniform(std::vector<double> points);
    static PricingMeasure exponential(double rate);
    static PricingMeasure pareto(double tail_index, double scale);

    const Law& law() const noexcept { return law_; }

    /// E|x|^p < inf
    bool has_moment(double p) const noexcept;
    bool has_first_moment() const noexcept { return has_moment(1.0); }
    bool has_second_moment() const noexcept { return has_moment(2.0); }

    /// One draw from two independent uniforms in (0, 1).
    double sample(double u_magnitude, double u_sign) const noexcept;

    std::string describe() const;

private:
    explicit PricingMeasure(Law law) : law_(std::move(law)) {}
    Law law_;
};

/// E_m[h(x)]: closed form where one exists, quadrature otherwise.
/// Throws PricingError if the measure lacks the moments h needs, NumericError
/// if quadrature does not converge.
double price_hedge(const PricingMeasure& m, const HedgeKind& h);

/// Same expectation computed only by adaptive quadrature (continuous laws) or
/// direct summation (discrete). Independent route used to cross-check the
/// closed forms.
double price_by_quadrature(const PricingMeasure& m, const HedgeKind& h);

/// Price of (|x| - strike)_+ for a real strike.
double call_price(const PricingMeasure& m, double strike);
/// Price of (|x|^r - level)_+.
double powered_call_price(const PricingMeasure& m, double r, double level);

} // namespace gtp
