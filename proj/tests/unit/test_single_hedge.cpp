#include <doctest.h>

#include <cmath>

#include "gtp/errors.hpp"
#include "gtp/single_hedge.hpp"

using namespace gtp;

TEST_CASE("x^2 and |x|^1.5 are usable from c = 1") {
    for (double p : {2.0, 1.5}) {
        const auto rep = validate_single_hedge(PowerHedge{p}, 1.0);
        CHECK(rep.growth.status == CheckStatus::Pass);
        CHECK(rep.shape.status == CheckStatus::Pass);
        CHECK(rep.summable.status == CheckStatus::Pass);
        CHECK(rep.linear_ratio.increasing);
        CHECK(rep.square_ratio.monotone());
        CHECK(rep.usable());
    }
}

TEST_CASE("|x| fails summability") {
    const auto rep = validate_single_hedge(PowerHedge{1.0}, 0.0);
    CHECK(rep.growth.status == CheckStatus::Pass);
    CHECK(rep.summable.status == CheckStatus::Fail);
    CHECK_FALSE(rep.usable());
}

TEST_CASE("x^2 fails growth below 1") {
    const auto rep = validate_single_hedge(PowerHedge{2.0}, 0.0);
    CHECK(rep.growth.status == CheckStatus::Fail);
}

TEST_CASE("x log^2 x: usable beyond e^2, shape grid reports near-linear alphas") {
    const HedgeKind h = GeneralSymmetric::linear_log_squared();
    const auto rep = validate_single_hedge(h, 8.0);
    CHECK(rep.growth.status == CheckStatus::Pass);
    CHECK(rep.summable.status == CheckStatus::Pass);
    CHECK(rep.linear_ratio.increasing);
    CHECK(rep.square_ratio.decreasing);
    CHECK(rep.usable());
    // h/x^1.25 rises then falls for any finite c.
    CHECK(rep.shape.status == CheckStatus::Fail);
    CHECK_FALSE(rep.alpha_grid[1].monotone());

    const auto low = validate_single_hedge(h, 1.0);
    CHECK_FALSE(low.usable());
}

TEST_CASE("x log(1+x) diverges") {
    const auto rep = validate_single_hedge(GeneralSymmetric::linear_log(), 3.0);
    CHECK(rep.summable.status == CheckStatus::Fail);
    CHECK_FALSE(rep.usable());
}

TEST_CASE("tabulated hedges never pass summability") {
    const auto h = GeneralSymmetric::tabulated({0.0, 1.0, 10.0}, {0.0, 1.0, 100.0});
    const auto rep = validate_single_hedge(h, 1.0);
    CHECK(rep.summable.status == CheckStatus::Fail);
}

TEST_CASE("reciprocal series bounds") {
    // zeta(1.5) - 1
    CHECK(reciprocal_series_bound(PowerHedge{1.5}, 2) == doctest::Approx(1.61237534868548834).epsilon(1e-8));
    // sum_{n >= 9} 1/(n log^2 n): direct sum to 1e7 plus the Euler-Maclaurin tail
    const double b = reciprocal_series_bound(GeneralSymmetric::linear_log_squared(), 9);
    CHECK(b >= 0.4670330068766);
    CHECK(b == doctest::Approx(0.4670330068766).epsilon(1e-8));
    CHECK_THROWS_AS(reciprocal_series_bound(PowerHedge{1.0}, 1), ConfigError);
}

TEST_CASE("context with an unvalidated hedge") {
    auto ctx = SingleHedgeContext::make(PowerHedge{1.0}, 1.0, {.require_valid = false});
    CHECK(std::isinf(ctx.series));
    CHECK(ctx.n0 == 1);
    CHECK(ctx.epsilon_ceiling() == doctest::Approx(0.25));
    CHECK_THROWS_AS(SingleHedgeContext::make(PowerHedge{2.0}, 0.0, {.c = 1.0}), ConfigError);
}

TEST_CASE("series tail by quadrature") {
    // (x^1.5 - 1)_+ : sum_{n >= 2} 1/(n^1.5 - 1), cross-checked by direct summation to 1e7 plus 2/sqrt(1e7)
    double direct = 0.0;
    for (long n = 10000000; n >= 2; --n) direct += 1.0 / (std::pow(double(n), 1.5) - 1.0);
    direct += 2.0 / std::sqrt(1e7);
    CHECK(reciprocal_series_bound(PoweredCall{1.5, 1.0}, 2) == doctest::Approx(direct).epsilon(1e-6));
}
