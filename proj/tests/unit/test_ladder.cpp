#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gtp/errors.hpp"
#include "gtp/ladder.hpp"
#include "gtp/numeric.hpp"

using namespace gtp;

TEST_CASE("three-point ladder") {
    auto m = PricingMeasure::uniform({-2.0, 0.0, 2.0});
    auto l = build_ladder(m, LadderFamily::calls(), 4);
    REQUIRE(l.depth() == 4);
    CHECK(l.nu(0) == doctest::Approx(4.0 / 3.0));
    CHECK(l.nu(1) == doctest::Approx(2.0 / 3.0));
    CHECK(l.nu(2) == 0.0);
    CHECK(l.nu(3) == 0.0);
    CHECK(l.nu(4) == 0.0);
    CHECK_THROWS_AS(l.nu(5), ConfigError);
    CHECK(check_coherence(l, 1e-12).passed());
    CHECK_THROWS_AS(build_ladder(m, LadderFamily::calls(), 3), ConfigError);
}

TEST_CASE("narrow support gives zero prices beyond the first strike") {
    auto m = PricingMeasure::uniform({-0.7, 0.7, -1.0, 1.0});
    auto l = build_ladder(m, LadderFamily::calls(), 6);
    for (std::size_t k = 1; k <= 6; ++k) CHECK(l.nu(k) == 0.0);
}

TEST_CASE("exponential ladder is e^-k") {
    auto l = build_ladder(PricingMeasure::exponential(1.0), LadderFamily::calls(), 30);
    for (std::size_t k = 0; k <= 30; ++k) CHECK(l.nu(k) == doctest::Approx(std::exp(-double(k))).epsilon(1e-15));
}

TEST_CASE("bull spread and trapezoid payoffs") {
    auto l = build_ladder(PricingMeasure::exponential(1.0), LadderFamily::calls(), 10);
    auto b = bull_spread(l, 3);
    CHECK(b.payoff(3.5) == doctest::Approx(0.5));
    CHECK(b.payoff(100.0) == doctest::Approx(1.0));
    CHECK(b.payoff(0.0) == 0.0);
    CHECK(b.total_price() == doctest::Approx(l.nu(3) - l.nu(4)));

    auto t2 = trapezoid(l, 2);
    CHECK(t2.payoff(2.5) == doctest::Approx(1.0));
    CHECK(t2.payoff(1.5) == doctest::Approx(0.5));
    CHECK(t2.payoff(10.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(t2.total_price() == doctest::Approx(l.mu(2)));
    auto t0 = trapezoid(l, 0);
    CHECK(t0.payoff(0.0) == doctest::Approx(1.0));
    CHECK(t0.total_price() == doctest::Approx(1.0 - l.nu(1) + l.nu(2)));

    for (std::size_t k = 0; k <= 6; ++k) {
        auto bs = bull_spread(l, k);
        auto tr = trapezoid(l, k);
        for (double x = -9.0; x <= 9.0; x += 0.01) {
            const double ax = std::fabs(x);
            const double v = bs.payoff(x);
            CHECK(v >= -1e-12);
            CHECK(v <= 1.0 + 1e-12);
            if (ax >= k + 1.0) CHECK(v >= 1.0 - 1e-12);
            if (ax >= k && ax <= k + 1.0) CHECK(tr.payoff(x) >= 1.0 - 1e-12);
            CHECK(tr.payoff(x) == doctest::Approx(trapezoid_level(ax, k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("powered trapezoid") {
    const double r = 1.5;
    auto l = build_ladder(PricingMeasure::exponential(1.0), LadderFamily::powered(r), 10);
    auto t = trapezoid_r(l, 1, r);
    CHECK(t.payoff(std::pow(1.5, 1.0 / r)) == doctest::Approx(1.0));
    CHECK(t.payoff(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(t.payoff(std::pow(0.5, 1.0 / r)) == doctest::Approx(0.5));
    CHECK_THROWS_AS(trapezoid_r(build_ladder(PricingMeasure::exponential(1.0), LadderFamily::calls(), 10), 1, r),
                    ConfigError);
}

TEST_CASE("coherence report flags a non-vanishing tail and names the index") {
    PriceLadder flat(LadderFamily::calls(), {1.0, 0.9, 0.9, 0.9, 0.9, 0.9});
    auto rep = check_coherence(flat, 1e-6);
    CHECK_FALSE(rep.passed());
    CHECK_FALSE(rep.tail_decay);
    PriceLadder concave(LadderFamily::calls(), {1.0, 0.9, 0.5, 0.0, 0.0, 0.0});
    auto rep2 = check_coherence(concave, 1e-9);
    CHECK_FALSE(rep2.convex);
    REQUIRE(rep2.failing_index);
    CHECK(*rep2.failing_index == 1);
    PriceLadder rising(LadderFamily::calls(), {1.0, 1.1, 0.0, 0.0, 0.0});
    CHECK_FALSE(check_coherence(rising, 1e-9).monotone);
}

TEST_CASE("telescoping spreads reproduce |x|") {
    auto l = build_ladder(PricingMeasure::uniform({-2.0, 0.0, 2.0}), LadderFamily::calls(), 4);
    const double x = 2.5;
    double partial = 0.0;
    for (std::size_t k = 0; k < 3; ++k) partial += bull_spread(l, k).payoff(x);
    CHECK(partial == 2.5);
    const double xs[] = {-3.75, 0.0, 1.0, 2.5};
    CHECK(check_coherence(l, 1e-12, xs).telescoping);
}

TEST_CASE("ladder cache extends by doubling without changing prices") {
    auto cache = std::make_shared<LadderCache>(PricingMeasure::exponential(0.5), LadderFamily::calls(), 8);
    auto s0 = cache->current();
    auto s1 = cache->at_least(100);
    CHECK(s1->depth() >= 100);
    for (std::size_t k = 0; k <= s0->depth(); ++k) CHECK(s0->nu(k) == s1->nu(k));
    auto fixed = std::make_shared<LadderCache>(PriceLadder(LadderFamily::calls(), {1.0, 0.5, 0.2, 0.05, 0.0}));
    CHECK_THROWS_AS(fixed->at_least(5), ConfigError);
}

TEST_CASE("strip pricer matches the direct trapezoid sum") {
    auto m = PricingMeasure::exponential(1.0);
    auto cache = std::make_shared<LadderCache>(m, LadderFamily::calls(), 4);
    StripPricer sp(cache, 2.0);
    for (std::size_t count : {std::size_t{1}, std::size_t{5}, std::size_t{17}, std::size_t{200}}) {
        const double direct = price_hedge(m, TrapezoidStrip{1.0, count, 2.0});
        CHECK(sp.price(count) == doctest::Approx(direct).epsilon(1e-12));
    }
    const auto h = sp.strip(5);
    CHECK(std::get<TrapezoidStrip>(h.kind).count == 5);
}

TEST_CASE("strip budgets respect the budget factors") {
    auto exp1 = PricingMeasure::exponential(1.0);
    auto three = PricingMeasure::uniform({-2.0, 0.0, 2.0});
    for (const auto& m : {exp1, three}) {
        auto l = build_ladder(m, LadderFamily::calls(), 4096);
        auto b = strip_budget(l, 2.0, 2.0);
        CHECK(b.rigorous);
        CHECK(b.total() <= kCallStripBudgetFactor * l.nu(0));
        CHECK(b.tail >= 0.0);
        for (double r : {1.2, 1.5, 1.8}) {
            auto lr = build_ladder(m, LadderFamily::powered(r), 4096);
            auto br = strip_budget(lr, 2.0 / r, 2.0 / r);
            CHECK(br.rigorous);
            CHECK(br.total() <= powered_strip_budget_factor(r) * lr.nu(0));
        }
    }
    // Direct double sum for the three-point law: finitely many non-zero trapezoid prices.
    auto l = build_ladder(three, LadderFamily::calls(), 64);
    double direct = 0.0;
    for (int n = 1; n <= 2000000; ++n) {
        double inner = 0.0;
        for (int k = 0; k < std::min(n, 6); ++k) inner += (k + 1.0) * (k + 1.0) * l.mu(k);
        direct += inner / (double(n) * n);
    }
    CHECK(strip_budget(l, 2.0, 2.0).finite_part == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("small-scale laws exceed the fixed call-strip factor") {
    // T_0(0) = 1 puts a cash leg into the strip, so the total price does not scale with nu_0.
    auto m = PricingMeasure::uniform({-0.1, 0.1});
    auto l = build_ladder(m, LadderFamily::calls(), 64);
    CHECK(strip_budget(l, 2.0, 2.0).total() > kCallStripBudgetFactor * l.nu(0));
}

TEST_CASE("root-strike dominance of powered calls") {
    for (double r : {1.2, 1.5, 1.8}) {
        auto m = PricingMeasure::exponential(1.0);
        auto l1 = build_ladder(m, LadderFamily::powered(r), 200);
        auto l2 = build_ladder(m, LadderFamily::root_strike(r), 200);
        for (std::size_t n = 1; n <= 200; ++n)
            CHECK(l2.nu(n) <= std::pow(double(n), 1.0 / r - 1.0) * l1.nu(n) * (1.0 + 1e-12));
    }
}

TEST_CASE("root-strike ladder telescopes on the |x|^r scale") {
    auto l = build_ladder(PricingMeasure::exponential(1.0), LadderFamily::root_strike(1.5), 400);
    const auto rep = check_coherence(l, 1e-6);
    CHECK_MESSAGE(rep.passed(), rep.summary());
    const std::vector<double> xs{2.5, 30.0};
    CHECK(check_coherence(l, 1e-6, xs).telescoping);
}

TEST_CASE("ladder csv") {
    std::ostringstream os;
    write_ladder_csv(os, PriceLadder(LadderFamily::calls(), {1.0, 0.5, 0.25, 0.125, 0.0625}));
    CHECK(os.str() == "k,nu_k,mu_k\n0,1,0.75\n1,0.5,0.375\n2,0.25,0.1875\n3,0.125,\n4,0.0625,\n");
}
