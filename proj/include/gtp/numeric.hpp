#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace gtp {

/// Compensated (Neumaier) running sum. Deterministic: the same sequence of
/// additions always yields the same bits.
class NeumaierSum {
public:
    NeumaierSum() = default;
    explicit NeumaierSum(double initial) : sum_(initial) {}

    void add(double v) noexcept;
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Pairwise summation; result does not depend on how the input was produced.
double pairwise_sum(std::span<const double> values);

/// Hurwitz zeta  sum_{n>=0} (a+n)^{-s}  for s > 1, a > 0 (Euler-Maclaurin).
double hurwitz_zeta(double s, double a);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for a Bernoulli proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double confidence);

/// Two-sided standard normal quantile z with P(|Z| <= z) = confidence.
double two_sided_normal_quantile(double confidence);

/// Locale-independent formatting with 17 significant digits ('.' decimal).
std::string format_real(double v);

/// a >= b up to the project-wide tolerance 1e-9 scaled by magnitude.
inline bool ge_tol(double a, double b, double tol = 1e-9) {
    const double scale = 1.0 + (a < 0 ? -a : a) + (b < 0 ? -b : b);
    return a >= b - tol * scale;
}

} // namespace gtp
