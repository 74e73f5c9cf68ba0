#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gtp/errors.hpp"
#include "gtp/reality.hpp"
#include "gtp/skeptic.hpp"

using namespace gtp;

namespace {

SingleHedgeContext square_ctx() { return SingleHedgeContext::make(PowerHedge{2.0}, 1.0, {.c = 1.0}); }
SingleHedgeGame game_of(const SingleHedgeContext& c) { return {c.h, c.nu}; }

LadderSource exp_calls() {
    return std::make_shared<const LadderCache>(PricingMeasure::exponential(1.0), LadderFamily::calls());
}

class Stake : public ClonableStrategy<Stake> {
public:
    std::string id() const override { return "stake"; }

protected:
    RoundBet propose(std::size_t, std::span<const double>) override {
        RoundBet b;
        b.stake = 1.0;
        return b;
    }
};

class Overpriced : public PortfolioSchedule {
public:
    std::string id() const override { return "overpriced"; }
    HedgePortfolio at(std::size_t) override {
        HedgePortfolio p;
        p.add(PricedHedge{UnitPayoff{}, 1.0}, 0.01);
        return p;
    }
    double total_price_bound() const override { return 1.0; }
    std::unique_ptr<PortfolioSchedule> clone() const override { return std::make_unique<Overpriced>(); }
};

} // namespace

TEST_CASE("single-hedge context for x^2") {
    const auto ctx = square_ctx();
    CHECK(ctx.n0 == 2);
    CHECK(ctx.series == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0 - 1.0).epsilon(1e-12));
    CHECK(ctx.epsilon == doctest::Approx(0.9 / (2.0 * (1.0 + 1.0 / 4.0))));
    CHECK_THROWS_AS(SingleHedgeContext::make(PowerHedge{2.0}, 1.0), ConfigError);  // growth fails below 1
    CHECK_THROWS_AS(SingleHedgeContext::make(PowerHedge{1.0}, 1.0, {.c = 1.0}), ConfigError);
    CHECK_THROWS_AS(SingleHedgeContext::make(PowerHedge{2.0}, 1.0, {.c = 1.0, .epsilon = 0.5}), ConfigError);
}

TEST_CASE("Borel-Cantelli on x = 0 spends its budget") {
    const auto ctx = square_ctx();
    auto s = borel_cantelli_single(ctx);
    auto r = zeros_path();
    auto h = run_game(game_of(ctx), *s, *r, 1000);
    double spent = 0.0;
    for (std::size_t n = 1; n <= 1000; ++n) {
        if (n >= 2) spent += 1.0 / double(n * n);
        CHECK(h.capital[n] == doctest::Approx(1.0 - spent / ctx.series).epsilon(1e-12));
    }
    CHECK(h.final_capital > 0.0);
}

TEST_CASE("Borel-Cantelli grows linearly on x_n = n") {
    const auto ctx = square_ctx();
    auto s = borel_cantelli_single(ctx);
    auto r = ramp_path(1.0);
    auto h = run_game(game_of(ctx), *s, *r, 500);
    for (std::size_t n = 2; n <= 500; ++n) CHECK(h.capital[n] >= double(n - 1) / ctx.series);
}

TEST_CASE("weighted Borel-Cantelli") {
    const auto ctx = square_ctx();
    CHECK_THROWS_AS(weighted_bc_single(ctx, 1.0), ConfigError);
    auto s = weighted_bc_single(ctx, 2.0);
    auto r = zeros_path();
    auto h = run_game(game_of(ctx), *s, *r, 200);
    double sum = 0.0;
    for (std::size_t i = 1; i <= 200; ++i) sum += 1.0 / double(i * i);
    CHECK(h.final_capital == doctest::Approx(1.0 - sum * 6.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("drift strategy on x = 0 is a product") {
    const auto ctx = square_ctx();
    auto s = drift_single(ctx, -1);
    auto r = zeros_path();
    auto h = run_game(game_of(ctx), *s, *r, 300);
    double k = 1.0;
    for (std::size_t i = 2; i <= 300; ++i) k *= 1.0 - ctx.epsilon * ctx.nu / double(i * i);
    CHECK(h.final_capital == doctest::Approx(k).epsilon(1e-12));
}

TEST_CASE("drift factor stays above one half on an adversarial grid") {
    const auto ctx = square_ctx();
    for (int sign : {-1, 1}) {
        for (std::size_t n = ctx.n0; n <= 60; ++n) {
            for (double x = -3.0 * n; x <= 3.0 * n; x += 0.25) {
                const double f = 1.0 + sign * ctx.epsilon * x / n + ctx.epsilon * (x * x - ctx.nu) / double(n * n);
                CHECK(f >= 0.5);
            }
        }
    }
}

TEST_CASE("hedged move cases") {
    const auto l = exp_calls()->at_least(10);
    CHECK(hedged_move(-7.0, 5, *l, false).value == -5.0);
    CHECK(hedged_move(3.0, 5, *l, false).value == 3.0);
    CHECK(hedged_move(7.0, 5, *l, false).value == 9.0);
    CHECK(hedged_move(7.0, 5, *l, true).value == -5.0);
    CHECK(hedged_move(7.0, 5, *l, false).price == doctest::Approx(std::exp(-5.0)));
}

TEST_CASE("countable-hedge context") {
    const auto ctx = CountableHedgeContext::make(exp_calls());
    CHECK(ctx.nu0 == doctest::Approx(1.0));
    CHECK(ctx.epsilon == doctest::Approx(0.9 * 0.25));
    CHECK(ctx.strip_normalizer >= 6.0 * ctx.nu0);
    CHECK(ctx.strip_normalizer >= ctx.strip_budget);
    CHECK_THROWS_AS(CountableHedgeContext::make(exp_calls(), {.epsilon = 0.25}), ConfigError);
    auto powered = std::make_shared<const LadderCache>(PricingMeasure::exponential(1.0), LadderFamily::powered(1.5));
    CHECK_THROWS_AS(CountableHedgeContext::make(powered), ConfigError);
}

TEST_CASE("tail forcer counts threshold crossings") {
    const auto ctx = CountableHedgeContext::make(exp_calls());
    auto s = tail_event_forcer(ctx);
    auto r = ramp_path(1.0);
    auto h = run_game(HedgeSetGame{ctx.ladder}, *s, *r, 200);
    for (std::size_t n = 1; n <= 200; ++n) CHECK(h.capital[n] >= double(n) / ctx.nu0 - 1e-9);

    auto s0 = tail_event_forcer(ctx);
    auto z = zeros_path();
    auto h0 = run_game(HedgeSetGame{ctx.ladder}, *s0, *z, 200);
    CHECK(h0.final_capital == doctest::Approx(std::exp(-200.0)).epsilon(1e-6));
}

TEST_CASE("truncated-variance forcer lower bound") {
    const auto ctx = CountableHedgeContext::make(exp_calls());
    auto s = truncated_variance_forcer(ctx);
    auto r = iid_sampler(PricingMeasure::exponential(1.0), 4);
    GameOptions o;
    double lower = 0.0;
    o.on_round = [&](const RoundRecord& rec) {
        const double n = double(rec.n);
        if (std::fabs(rec.x) <= n) lower += rec.x * rec.x / (n * n);
        CHECK(rec.capital >= lower / ctx.strip_normalizer * (1.0 - 1e-7));
        CHECK(rec.capital >= 0.0);
    };
    run_game(HedgeSetGame{ctx.ladder}, *s, *r, 500, o);
}

TEST_CASE("hedged drift on x = 0") {
    const auto ctx = CountableHedgeContext::make(exp_calls());
    auto s = hedged_drift(ctx, false);
    auto r = zeros_path();
    auto h = run_game(HedgeSetGame{ctx.ladder}, *s, *r, 100);
    double k = 1.0;
    for (int i = 1; i <= 100; ++i) k *= 1.0 - ctx.epsilon * std::exp(-double(i)) / i;
    CHECK(h.final_capital == doctest::Approx(k).epsilon(1e-12));
}

TEST_CASE("generic Borel-Cantelli schedules") {
    auto e = generic_borel_cantelli(empty_schedule());
    auto r = alternating_path(3.0);
    auto h = run_game(HedgeSetGame{exp_calls()}, *e, *r, 50);
    CHECK(h.final_capital == 1.0);
    CHECK_THROWS_AS(generic_borel_cantelli(std::make_unique<Overpriced>()), ConfigError);
    CHECK_NOTHROW(generic_borel_cantelli(std::make_unique<Overpriced>(), 50));
}

TEST_CASE("powered-call context") {
    const auto m = PricingMeasure::exponential(1.0);
    CHECK_THROWS_AS(MZContext::from_measure(2.0, m, {}), ConfigError);
    CHECK_THROWS_AS(MZContext::from_measure(1.0, m, {}), ConfigError);
    const auto ctx = MZContext::from_measure(1.5, m, {});
    CHECK(ctx.strip_coef_exponent == doctest::Approx(4.0 / 3.0));
    CHECK(ctx.strip_budget_rigorous);
    CHECK(ctx.nu0_root == doctest::Approx(1.0));
    CHECK(ctx.denominator_at(8) == doctest::Approx(4.0));
    const auto lit = MZContext::from_measure(1.5, m, {.coefficients = MZContext::StripCoefficients::Literal});
    CHECK(lit.strip_coef_exponent == 2.0);
    CHECK_FALSE(lit.strip_budget_rigorous);
    CHECK(lit.strip_normalizer == doctest::Approx(powered_strip_budget_factor(1.5) * lit.nu0_powered));

    const auto l = ctx.root_calls->at_least(10);
    const auto mv = mz_hedged_move(-20.0, 8, *l, 1.5, false);
    CHECK(mv.value == doctest::Approx(-4.0));
    CHECK(mv.price == doctest::Approx(std::exp(-4.0)));
}

TEST_CASE("powered-call strategies stay collateral-safe on stress paths") {
    const auto ctx = MZContext::from_measure(1.5, PricingMeasure::exponential(1.0), {});
    PoweredHedgeSetGame g{1.5, ctx.powered, ctx.root_calls};
    std::vector<std::unique_ptr<RealityStrategy>> paths;
    paths.push_back(zeros_path());
    paths.push_back(constant_path(1.0));
    paths.push_back(spike_path(1.0));
    paths.push_back(ramp_path(-1.0));
    for (auto& p : paths) {
        auto s = mz_slln(ctx);
        auto h = run_game(g, *s, *p, 300);
        CHECK(h.min_capital >= 0.0);
    }
}

TEST_CASE("upcrossing overlay") {
    SUBCASE("two-phase target") {
        std::vector<double> path{-0.6};
        for (int i = 0; i < 5; ++i) {
            path.push_back(1.0);
            path.push_back(-1.0);
        }
        UpcrossingStrategy u(0.5, 1.2, std::make_unique<Stake>());
        auto r = replay_path(path);
        auto h = run_game(HedgeSetGame{exp_calls()}, u, *r, path.size());
        CHECK(u.completed() == 5);
        CHECK(h.final_capital - 0.5 >= 5 * (1.2 - 0.5));
    }
    SUBCASE("constant target") {
        UpcrossingStrategy u(0.5, 1.2, null_strategy());
        auto r = constant_path(1.0);
        auto h = run_game(HedgeSetGame{exp_calls()}, u, *r, 10);
        CHECK(h.final_capital == 0.5);
        CHECK(u.completed() == 0);
    }
    SUBCASE("monotone target") {
        UpcrossingStrategy u(0.5, 1.2, std::make_unique<Stake>());
        auto r = constant_path(-0.1);
        auto h = run_game(HedgeSetGame{exp_calls()}, u, *r, 10);
        CHECK(h.final_capital - 0.5 >= -0.5);
    }
    CHECK_THROWS_AS(UpcrossingStrategy(1.0, 1.0, null_strategy()), ConfigError);
    CHECK_THROWS_AS(UpcrossingStrategy(0.0, 1.0, null_strategy()), ConfigError);
}
