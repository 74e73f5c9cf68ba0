#include "gtp/skeptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gtp/errors.hpp"
#include "gtp/numeric.hpp"

namespace gtp {

namespace {

RoundBet hedge_only(const PricedHedge& h, double units) {
    RoundBet b;
    b.portfolio.add(h, units);
    return b;
}

class BorelCantelliSingle : public ClonableStrategy<BorelCantelliSingle> {
public:
    explicit BorelCantelliSingle(const SingleHedgeContext& ctx) : ctx_(ctx) {
        if (!std::isfinite(ctx_.series) || !(ctx_.series > 0.0))
            throw ConfigError("borel_cantelli_single needs a convergent sum of 1/h(n)");
    }
    std::string id() const override { return "borel_cantelli_single"; }

protected:
    RoundBet propose(std::size_t n, std::span<const double>) override {
        if (n < ctx_.n0) return {};
        return hedge_only(ctx_.priced(), 1.0 / (ctx_.series * ctx_.nu * ctx_.h_at(n)));
    }

private:
    SingleHedgeContext ctx_;
};

class WeightedBorelCantelliSingle : public ClonableStrategy<WeightedBorelCantelliSingle> {
public:
    WeightedBorelCantelliSingle(const SingleHedgeContext& ctx, double q) : ctx_(ctx), q_(q) {
        if (!(q > 1.0)) throw ConfigError("weights n^-q need q > 1 to be summable, got q = " + format_real(q));
        zeta_ = hurwitz_zeta(q, 1.0);
    }
    std::string id() const override { return "weighted_borel_cantelli_single"; }

protected:
    RoundBet propose(std::size_t n, std::span<const double>) override {
        const double nd = static_cast<double>(n);
        const double w = q_ == 2.0 ? nd * nd : std::pow(nd, q_);
        return hedge_only(ctx_.priced(), 1.0 / (zeta_ * ctx_.nu * w));
    }

private:
    SingleHedgeContext ctx_;
    double q_;
    double zeta_ = 0.0;
};

class DriftSingle : public ClonableStrategy<DriftSingle> {
public:
    DriftSingle(const SingleHedgeContext& ctx, int sign) : ctx_(ctx), sign_(sign > 0 ? 1.0 : -1.0) {
        if (sign == 0) throw ConfigError("drift strategy sign must be +1 or -1");
    }
    std::string id() const override { return sign_ > 0 ? "drift_single_plus" : "drift_single_minus"; }

protected:
    RoundBet propose(std::size_t n, std::span<const double>) override {
        if (n < ctx_.n0) return {};
        const double f = ctx_.epsilon * capital();
        RoundBet b = hedge_only(ctx_.priced(), f / ctx_.h_at(n));
        b.stake = sign_ * f / static_cast<double>(n);
        return b;
    }

private:
    SingleHedgeContext ctx_;
    double sign_;
};

class GenericBorelCantelli : public ClonableStrategy<GenericBorelCantelli> {
public:
    GenericBorelCantelli(std::unique_ptr<PortfolioSchedule> s, std::size_t check_depth) : schedule_(std::move(s)) {
        if (!schedule_) throw ConfigError("generic Borel-Cantelli strategy needs a schedule");
        bound_ = schedule_->total_price_bound();
        if (!(bound_ > 0.0) || !std::isfinite(bound_))
            throw ConfigError("schedule " + schedule_->id() + " declares no finite positive total price");
        auto probe = schedule_->clone();
        NeumaierSum spent;
        for (std::size_t n = 1; n <= check_depth; ++n) {
            spent.add(probe->at(n).total_price());
        }
        if (spent.value() > bound_ * (1.0 + 1e-12))
            throw ConfigError("schedule " + schedule_->id() + " spends " + format_real(spent.value()) +
                              " within " + std::to_string(check_depth) + " rounds, above its declared bound " +
                              format_real(bound_));
    }
    GenericBorelCantelli(const GenericBorelCantelli& o)
        : ClonableStrategy<GenericBorelCantelli>(o), schedule_(o.schedule_->clone()), bound_(o.bound_) {}

    std::string id() const override { return schedule_->id(); }

protected:
    RoundBet propose(std::size_t n, std::span<const double>) override {
        RoundBet b;
        b.portfolio = schedule_->at(n);
        b.portfolio.scale(1.0 / bound_);
        return b;
    }

private:
    std::unique_ptr<PortfolioSchedule> schedule_;
    double bound_ = 0.0;
};

class BullSpreadSchedule : public PortfolioSchedule {
public:
    explicit BullSpreadSchedule(LadderSource l) : ladder_(std::move(l)), snap_(ladder_->current()) {
        if (!(snap_->nu(0) > 0.0)) throw ConfigError("bull spread schedule needs nu_0 > 0");
    }
    std::string id() const override {
        return ladder_->family().kind == LadderFamily::Kind::PoweredCall ? "mz_tail_forcer" : "tail_forcer";
    }
    HedgePortfolio at(std::size_t n) override {
        if (snap_->depth() < n) snap_ = ladder_->at_least(n);
        return bull_spread(*snap_, n - 1);
    }
    double total_price_bound() const override { return snap_->nu(0); }
    std::unique_ptr<PortfolioSchedule> clone() const override { return std::make_unique<BullSpreadSchedule>(*this); }

private:
    LadderSource ladder_;
    std::shared_ptr<const PriceLadder> snap_;
};

class StripSchedule : public PortfolioSchedule {
public:
    StripSchedule(LadderSource l, double c, double q, double bound)
        : pricer_(l, c), powered_(l->family().kind == LadderFamily::Kind::PoweredCall), q_(q), bound_(bound) {}
    std::string id() const override {
        return powered_ ? "mz_truncated_variance_forcer" : "truncated_variance_forcer";
    }
    HedgePortfolio at(std::size_t n) override {
        HedgePortfolio p;
        const double nd = static_cast<double>(n);
        const double w = q_ == 2.0 ? nd * nd : std::pow(nd, q_);
        p.add(pricer_.strip(n), 1.0 / w);
        return p;
    }
    double total_price_bound() const override { return bound_; }
    std::unique_ptr<PortfolioSchedule> clone() const override { return std::make_unique<StripSchedule>(*this); }

private:
    StripPricer pricer_;
    bool powered_;
    double q_;
    double bound_;
};

class EmptySchedule : public PortfolioSchedule {
public:
    std::string id() const override { return "empty_schedule"; }
    HedgePortfolio at(std::size_t) override { return {}; }
    double total_price_bound() const override { return 1.0; }
    std::unique_ptr<PortfolioSchedule> clone() const override { return std::make_unique<EmptySchedule>(); }
};

class HedgedDrift : public ClonableStrategy<HedgedDrift> {
public:
    HedgedDrift(const CountableHedgeContext& ctx, bool mirror)
        : ladder_(ctx.ladder), snap_(ctx.ladder->current()), eps_(ctx.epsilon), mirror_(mirror) {}
    std::string id() const override { return mirror_ ? "hedged_drift_mirror" : "hedged_drift_plus"; }

protected:
    RoundBet propose(std::size_t n, std::span<const double>) override {
        if (snap_->depth() < n) snap_ = ladder_->at_least(n);
        const double f = eps_ * capital() / static_cast<double>(n);
        RoundBet b = hedge_only(snap_->rung(n), f);
        b.stake = mirror_ ? -f : f;
        return b;
    }

private:
    LadderSource ladder_;
    std::shared_ptr<const PriceLadder> snap_;
    double eps_;
    bool mirror_;
};

class MZHedgedDrift : public ClonableStrategy<MZHedgedDrift> {
public:
    MZHedgedDrift(const MZContext& ctx, bool mirror)
        : ctx_(ctx), snap_(ctx.root_calls->current()), mirror_(mirror) {}
    std::string id() const override { return mirror_ ? "mz_hedged_drift_mirror" : "mz_hedged_drift_plus"; }

protected:
    RoundBet propose(std::size_t n, std::span<const double>) override {
        if (snap_->depth() < n) snap_ = ctx_.root_calls->at_least(n);
        const double f = ctx_.epsilon * capital() / ctx_.denominator_at(n);
        RoundBet b = hedge_only(snap_->rung(n), f);
        b.stake = mirror_ ? -f : f;
        return b;
    }

private:
    MZContext ctx_;
    std::shared_ptr<const PriceLadder> snap_;
    bool mirror_;
};

class NullStrategy : public ClonableStrategy<NullStrategy> {
public:
    std::string id() const override { return "null"; }

protected:
    RoundBet propose(std::size_t, std::span<const double>) override { return {}; }
};

void check_shape(const PriceLadder& l, const std::string& what) {
    auto rep = check_coherence(l, 1e-12, std::span<const double>{});
    if (!rep.monotone || !rep.convex) throw ConfigError(what + " ladder is not coherent: " + rep.summary());
}

} // namespace

std::unique_ptr<SkepticStrategy> borel_cantelli_single(const SingleHedgeContext& ctx) {
    return std::make_unique<BorelCantelliSingle>(ctx);
}

std::unique_ptr<SkepticStrategy> weighted_bc_single(const SingleHedgeContext& ctx, double q) {
    return std::make_unique<WeightedBorelCantelliSingle>(ctx, q);
}

std::unique_ptr<SkepticStrategy> drift_single(const SingleHedgeContext& ctx, int sign) {
    return std::make_unique<DriftSingle>(ctx, sign);
}

std::unique_ptr<SkepticStrategy> drift_pair_single(const SingleHedgeContext& ctx) {
    std::vector<std::unique_ptr<SkepticStrategy>> parts;
    parts.push_back(drift_single(ctx, +1));
    parts.push_back(drift_single(ctx, -1));
    return combine_equal(std::move(parts), "drift_pair_single");
}

std::unique_ptr<SkepticStrategy> slln_single(const SingleHedgeContext& ctx) {
    std::vector<std::unique_ptr<SkepticStrategy>> parts;
    parts.push_back(borel_cantelli_single(ctx));
    parts.push_back(weighted_bc_single(ctx, 2.0));
    parts.push_back(drift_single(ctx, +1));
    parts.push_back(drift_single(ctx, -1));
    return combine_equal(std::move(parts), "slln_single");
}

std::unique_ptr<SkepticStrategy> generic_borel_cantelli(std::unique_ptr<PortfolioSchedule> schedule,
                                                        std::size_t check_depth) {
    return std::make_unique<GenericBorelCantelli>(std::move(schedule), check_depth);
}

std::unique_ptr<PortfolioSchedule> bull_spread_schedule(LadderSource ladder) {
    return std::make_unique<BullSpreadSchedule>(std::move(ladder));
}

std::unique_ptr<PortfolioSchedule> strip_schedule(LadderSource ladder, double c, double q, double bound) {
    return std::make_unique<StripSchedule>(std::move(ladder), c, q, bound);
}

std::unique_ptr<PortfolioSchedule> empty_schedule() {
    return std::make_unique<EmptySchedule>();
}

CountableHedgeContext CountableHedgeContext::make(LadderSource ladder, const Options& opts) {
    if (!ladder || ladder->family() != LadderFamily::calls())
        throw ConfigError("countable-hedge strategies need the plain call ladder");
    CountableHedgeContext ctx;
    ctx.ladder = ladder;
    const auto snap = ladder->extensible() ? ladder->at_least(opts.budget_depth) : ladder->current();
    check_shape(*snap, "call");
    ctx.nu0 = snap->nu(0);
    if (!(ctx.nu0 > 0.0)) throw ConfigError("call ladder needs nu_0 > 0");
    const double ceiling = ctx.epsilon_ceiling();
    ctx.epsilon = opts.epsilon.value_or(0.9 * ceiling);
    if (!(ctx.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (ctx.epsilon >= ceiling && !opts.allow_unsafe_epsilon)
        throw ConfigError("epsilon " + format_real(ctx.epsilon) + " must stay below 1/(2(1+nu_0)) = " +
                          format_real(ceiling));
    ctx.strip_budget = ::gtp::strip_budget(*snap, 2.0, 2.0).total();
    ctx.strip_normalizer = std::max(kCallStripBudgetFactor * ctx.nu0, ctx.strip_budget);
    return ctx;
}

std::unique_ptr<SkepticStrategy> tail_event_forcer(const CountableHedgeContext& ctx) {
    return generic_borel_cantelli(bull_spread_schedule(ctx.ladder));
}

std::unique_ptr<SkepticStrategy> truncated_variance_forcer(const CountableHedgeContext& ctx) {
    return generic_borel_cantelli(strip_schedule(ctx.ladder, 2.0, 2.0, ctx.strip_normalizer));
}

HedgedMove hedged_move(double x, std::size_t n, const PriceLadder& ladder, bool mirror) {
    const double nd = static_cast<double>(n);
    const double v = (mirror ? -x : x) + std::max(std::fabs(x) - nd, 0.0);
    return {v, ladder.nu(n)};
}

std::unique_ptr<SkepticStrategy> hedged_drift(const CountableHedgeContext& ctx, bool mirror) {
    return std::make_unique<HedgedDrift>(ctx, mirror);
}

std::unique_ptr<SkepticStrategy> slln_calls(const CountableHedgeContext& ctx) {
    std::vector<std::unique_ptr<SkepticStrategy>> parts;
    parts.push_back(tail_event_forcer(ctx));
    parts.push_back(truncated_variance_forcer(ctx));
    parts.push_back(hedged_drift(ctx, false));
    parts.push_back(hedged_drift(ctx, true));
    return combine_equal(std::move(parts), "slln_calls");
}

MZContext MZContext::make(double r, LadderSource powered, LadderSource root_calls, const Options& opts) {
    if (!(r > 1.0 && r < 2.0)) throw ConfigError("powered-call strategies need 1 < r < 2, got " + format_real(r));
    if (!powered || powered->family() != LadderFamily::powered(r))
        throw ConfigError("powered-call strategies need the powered ladder for r = " + format_real(r));
    if (!root_calls || root_calls->family() != LadderFamily::root_strike(r))
        throw ConfigError("powered-call strategies need the root-strike call ladder for r = " + format_real(r));
    MZContext ctx;
    ctx.r = r;
    ctx.powered = powered;
    ctx.root_calls = root_calls;
    ctx.denominator = opts.denominator;
    ctx.coefficients = opts.coefficients;
    const auto ps = powered->extensible() ? powered->at_least(opts.budget_depth) : powered->current();
    const auto rs = root_calls->current();
    check_shape(*ps, "powered call");
    ctx.nu0_powered = ps->nu(0);
    ctx.nu0_root = rs->nu(0);
    if (!(ctx.nu0_powered > 0.0) || !(ctx.nu0_root > 0.0)) throw ConfigError("ladders need positive nu_0");

    const double ceiling = ctx.epsilon_ceiling();
    ctx.epsilon = opts.epsilon.value_or(0.9 * ceiling);
    if (!(ctx.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (ctx.epsilon >= ceiling && !opts.allow_unsafe_epsilon)
        throw ConfigError("epsilon " + format_real(ctx.epsilon) + " must stay below 1/(2(1+nu_0)) = " +
                          format_real(ceiling));

    const double q = 2.0 / r;
    const double factor_bound = powered_strip_budget_factor(r) * ctx.nu0_powered;
    if (ctx.coefficients == StripCoefficients::Safe) {
        ctx.strip_coef_exponent = q;
        const auto b = ::gtp::strip_budget(*ps, q, q);
        ctx.strip_budget = b.total();
        ctx.strip_budget_rigorous = b.rigorous;
        ctx.strip_normalizer = std::max(factor_bound, ctx.strip_budget);
    } else {
        ctx.strip_coef_exponent = 2.0;
        const auto b = ::gtp::strip_budget(*ps, 2.0, q);
        ctx.strip_budget = b.finite_part;
        ctx.strip_budget_rigorous = false;
        ctx.strip_normalizer = factor_bound;
    }
    return ctx;
}

MZContext MZContext::from_measure(double r, const PricingMeasure& m, const Options& opts) {
    auto powered = std::make_shared<const LadderCache>(m, LadderFamily::powered(r));
    auto roots = std::make_shared<const LadderCache>(m, LadderFamily::root_strike(r));
    return make(r, powered, roots, opts);
}

double MZContext::denominator_at(std::size_t n) const {
    const double nd = static_cast<double>(n);
    return denominator == Denominator::RootN ? std::pow(nd, 1.0 / r) : nd;
}

HedgedMove mz_hedged_move(double x, std::size_t n, const PriceLadder& root_calls, double r, bool mirror) {
    const double strike = std::get<Call>(root_calls.family().hedge_at(n)).strike;
    (void)r;
    const double v = (mirror ? -x : x) + std::max(std::fabs(x) - strike, 0.0);
    return {v, root_calls.nu(n)};
}

std::unique_ptr<SkepticStrategy> mz_tail_event_forcer(const MZContext& ctx) {
    return generic_borel_cantelli(bull_spread_schedule(ctx.powered));
}

std::unique_ptr<SkepticStrategy> mz_truncated_variance_forcer(const MZContext& ctx) {
    return generic_borel_cantelli(
        strip_schedule(ctx.powered, ctx.strip_coef_exponent, 2.0 / ctx.r, ctx.strip_normalizer));
}

std::unique_ptr<SkepticStrategy> mz_hedged_drift(const MZContext& ctx, bool mirror) {
    return std::make_unique<MZHedgedDrift>(ctx, mirror);
}

std::unique_ptr<SkepticStrategy> mz_slln(const MZContext& ctx) {
    std::vector<std::unique_ptr<SkepticStrategy>> parts;
    parts.push_back(mz_tail_event_forcer(ctx));
    parts.push_back(mz_truncated_variance_forcer(ctx));
    parts.push_back(mz_hedged_drift(ctx, false));
    parts.push_back(mz_hedged_drift(ctx, true));
    return combine_equal(std::move(parts), "mz_slln");
}

std::unique_ptr<SkepticStrategy> null_strategy() {
    return std::make_unique<NullStrategy>();
}

UpcrossingStrategy::UpcrossingStrategy(double a, double b, std::unique_ptr<SkepticStrategy> target)
    : a_(a), b_(b), target_(std::move(target)) {
    if (!target_) throw ConfigError("upcrossing strategy needs a target");
    if (!(a > 0.0)) throw ConfigError("upcrossing strategy needs a > 0 (it is also the initial capital)");
    if (!(b > a)) throw ConfigError("upcrossing strategy needs b > a");
    holding_ = target_->capital() < a_;
}

UpcrossingStrategy::UpcrossingStrategy(const UpcrossingStrategy& o)
    : ClonableStrategy<UpcrossingStrategy>(o),
      a_(o.a_),
      b_(o.b_),
      target_(o.target_->clone()),
      holding_(o.holding_),
      completed_(o.completed_) {}

RoundBet UpcrossingStrategy::propose(std::size_t n, std::span<const double> past) {
    const RoundBet& t = target_->bet(n, past);
    if (!holding_) return {};
    return t;
}

void UpcrossingStrategy::observe(std::size_t n, double x) {
    target_->settle(n, x);
    const double k = target_->capital();
    if (!holding_ && k < a_) {
        holding_ = true;
    } else if (holding_ && k > b_) {
        holding_ = false;
        ++completed_;
    }
}

std::unique_ptr<SkepticStrategy> upcrossing_strategy(double a, double b, std::unique_ptr<SkepticStrategy> target) {
    return std::make_unique<UpcrossingStrategy>(a, b, std::move(target));
}

} // namespace gtp
