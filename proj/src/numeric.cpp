#include "gtp/numeric.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "gtp/errors.hpp"

namespace gtp {

void NeumaierSum::add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
        comp_ += (sum_ - t) + v;
    else
        comp_ += (v - t) + sum_;
    sum_ = t;
}

namespace {

double pairwise_impl(const double* p, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += p[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_impl(p, half) + pairwise_impl(p + half, n - half);
}

} // namespace

double pairwise_sum(std::span<const double> values) {
    return pairwise_impl(values.data(), values.size());
}

double hurwitz_zeta(double s, double a) {
    if (!(s > 1.0)) throw NumericError("hurwitz_zeta: s must exceed 1");
    if (!(a > 0.0)) throw NumericError("hurwitz_zeta: a must be positive");

    // Direct terms up to a shift, then Euler-Maclaurin on the remainder.
    constexpr int shift = 10;
    // B_{2j} / (2j)!
    static constexpr std::array<double, 6> bern = {
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    };

    double head = 0.0;
    for (int k = shift - 1; k >= 0; --k) head += std::pow(a + k, -s);

    const double w = a + shift;
    const double w_pow = std::pow(w, -s);
    double tail = w * w_pow / (s - 1.0) + 0.5 * w_pow;

    // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * w^{-s-2j+1}
    double rising = s;
    double wp = w_pow / w;
    for (std::size_t j = 0; j < bern.size(); ++j) {
        tail += bern[j] * rising * wp;
        const double m = static_cast<double>(2 * j + 1);
        rising *= (s + m) * (s + m + 1.0);
        wp /= w * w;
    }
    return head + tail;
}

double two_sided_normal_quantile(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0))
        throw NumericError("confidence must lie in (0, 1)");
    const boost::math::normal_distribution<double> z;
    return boost::math::quantile(z, 0.5 + 0.5 * confidence);
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double confidence) {
    if (trials == 0) return {0.0, 1.0};
    if (successes > trials) throw NumericError("wilson_interval: successes exceed trials");
    const double z = two_sided_normal_quantile(confidence);
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    Interval out{centre - half, centre + half};
    if (successes == 0) out.lo = 0.0;
    if (successes == trials) out.hi = 1.0;
    out.lo = std::max(out.lo, 0.0);
    out.hi = std::min(out.hi, 1.0);
    return out;
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

} // namespace gtp
