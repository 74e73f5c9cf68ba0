#include "gtp/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gtp/errors.hpp"
#include "gtp/numeric.hpp"

namespace gtp {

LadderFamily LadderFamily::powered(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("powered ladder: r must be positive");
    return {Kind::PoweredCall, r};
}

LadderFamily LadderFamily::root_strike(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("root-strike ladder: r must be positive");
    return {Kind::RootStrikeCall, r};
}

HedgeKind LadderFamily::hedge_at(std::size_t k) const {
    const double kd = static_cast<double>(k);
    switch (kind) {
    case Kind::Call:
        return Call{kd};
    case Kind::PoweredCall:
        return PoweredCall{r, kd};
    case Kind::RootStrikeCall:
        return Call{std::pow(kd, 1.0 / r)};
    }
    return Call{kd};
}

std::string LadderFamily::describe() const {
    switch (kind) {
    case Kind::Call:
        return "call";
    case Kind::PoweredCall:
        return "powered_call(r=" + format_real(r) + ")";
    case Kind::RootStrikeCall:
        return "root_strike_call(r=" + format_real(r) + ")";
    }
    return "?";
}

PriceLadder::PriceLadder(LadderFamily family, std::vector<double> prices)
    : family_(family), prices_(std::move(prices)) {
    if (prices_.empty()) throw ConfigError("price ladder must hold at least one price");
    for (std::size_t k = 0; k < prices_.size(); ++k)
        if (!std::isfinite(prices_[k]) || prices_[k] < 0.0)
            throw ConfigError("price ladder: nu_" + std::to_string(k) + " must be finite and non-negative");
}

double PriceLadder::nu(std::size_t k) const {
    if (k >= prices_.size())
        throw ConfigError("ladder too shallow: need nu_" + std::to_string(k) + ", depth is " + std::to_string(depth()));
    return prices_[k];
}

double PriceLadder::mu(std::size_t k) const {
    if (k == 0) return 1.0 - nu(1) + nu(2);
    return nu(k - 1) - nu(k) - nu(k + 1) + nu(k + 2);
}

PricedHedge PriceLadder::rung(std::size_t k) const {
    return {family_.hedge_at(k), nu(k)};
}

PriceLadder build_ladder(const PricingMeasure& m, LadderFamily family, std::size_t depth) {
    if (depth < 4) throw ConfigError("ladder depth must be at least 4");
    std::vector<double> nu(depth + 1);
    for (std::size_t k = 0; k <= depth; ++k) {
        const double kd = static_cast<double>(k);
        switch (family.kind) {
        case LadderFamily::Kind::Call:
            nu[k] = call_price(m, kd);
            break;
        case LadderFamily::Kind::PoweredCall:
            nu[k] = powered_call_price(m, family.r, kd);
            break;
        case LadderFamily::Kind::RootStrikeCall:
            nu[k] = call_price(m, std::pow(kd, 1.0 / family.r));
            break;
        }
    }
    return PriceLadder(family, std::move(nu));
}

LadderCache::LadderCache(PricingMeasure m, LadderFamily family, std::size_t initial_depth)
    : family_(family), measure_(std::move(m)) {
    snapshot_ = std::make_shared<const PriceLadder>(build_ladder(*measure_, family_, std::max<std::size_t>(initial_depth, 4)));
}

LadderCache::LadderCache(PriceLadder fixed)
    : family_(fixed.family()), snapshot_(std::make_shared<const PriceLadder>(std::move(fixed))) {}

std::shared_ptr<const PriceLadder> LadderCache::current() const {
    std::lock_guard lock(mutex_);
    return snapshot_;
}

std::shared_ptr<const PriceLadder> LadderCache::at_least(std::size_t depth) const {
    std::lock_guard lock(mutex_);
    if (snapshot_->depth() >= depth) return snapshot_;
    if (!measure_)
        throw ConfigError("ladder too shallow: need depth " + std::to_string(depth) + ", fixed ladder has " +
                          std::to_string(snapshot_->depth()));
    std::size_t target = snapshot_->depth();
    while (target < depth) target *= 2;
    // Rungs are priced independently, so extending never changes earlier prices.
    std::vector<double> nu = snapshot_->prices();
    const PriceLadder ext = build_ladder(*measure_, family_, target);
    nu.insert(nu.end(), ext.prices().begin() + static_cast<std::ptrdiff_t>(nu.size()), ext.prices().end());
    snapshot_ = std::make_shared<const PriceLadder>(family_, std::move(nu));
    return snapshot_;
}

StripPricer::StripPricer(LadderSource ladder, double coef_exponent)
    : ladder_(std::move(ladder)), coef_exponent_(coef_exponent), prefix_{0.0} {
    if (!ladder_) throw ConfigError("strip pricer needs a ladder");
    snap_ = ladder_->current();
}

double StripPricer::price(std::size_t count) {
    while (prefix_.size() <= count) {
        const std::size_t k = prefix_.size() - 1;
        if (snap_->depth() < k + 2) snap_ = ladder_->at_least(k + 2);
        acc_.add(std::pow(static_cast<double>(k + 1), coef_exponent_) * snap_->mu(k));
        prefix_.push_back(acc_.value());
    }
    return prefix_[count];
}

PricedHedge StripPricer::strip(std::size_t count) {
    const double r = ladder_->family().level_exponent();
    return {TrapezoidStrip{r, count, coef_exponent_}, price(count)};
}

namespace {

// Spread (h_k - h_{k+1}) as one hedge on level families, two calls otherwise.
void add_spread(HedgePortfolio& p, const PriceLadder& ladder, std::size_t k, double units) {
    const auto& fam = ladder.family();
    if (fam.kind == LadderFamily::Kind::RootStrikeCall) {
        p.add(ladder.rung(k), units);
        p.add(ladder.rung(k + 1), -units);
        return;
    }
    p.add(PricedHedge{BullSpread{fam.level_exponent(), k}, ladder.nu(k) - ladder.nu(k + 1)}, units);
}

} // namespace

HedgePortfolio bull_spread(const PriceLadder& ladder, std::size_t k) {
    HedgePortfolio p;
    add_spread(p, ladder, k, 1.0);
    return p;
}

HedgePortfolio trapezoid(const PriceLadder& ladder, std::size_t k) {
    // T_k = S_{k-1} - S_{k+1}, with S_{-1} = (y + 1)_+ - y_+ = 1 on y >= 0
    HedgePortfolio p;
    if (k == 0)
        p.add(PricedHedge{UnitPayoff{}, 1.0}, 1.0);
    else
        add_spread(p, ladder, k - 1, 1.0);
    add_spread(p, ladder, k + 1, -1.0);
    return p;
}

HedgePortfolio trapezoid_r(const PriceLadder& ladder, std::size_t k, double r) {
    if (ladder.family().kind != LadderFamily::Kind::PoweredCall || ladder.family().r != r)
        throw ConfigError("trapezoid_r needs the powered-call ladder with r = " + format_real(r));
    return trapezoid(ladder, k);
}

double powered_strip_budget_factor(double r) {
    const double q = 2.0 / r;
    if (!(q > 1.0)) throw ConfigError("powered strip budget needs r < 2");
    return 3.0 * std::pow(2.0, q - 1.0) / (q - 1.0);
}

StripBudget strip_budget(const PriceLadder& ladder, double c, double q) {
    if (!(q > 1.0)) throw ConfigError("strip budget: denominator exponent must exceed 1");
    if (ladder.depth() < 4) throw ConfigError("strip budget: ladder too shallow");
    StripBudget b;
    const std::size_t a = ladder.depth() - 1;
    b.cutoff = a;
    NeumaierSum s;
    for (std::size_t k = 0; k < a; ++k) {
        const double mu = ladder.mu(k);
        if (mu == 0.0) continue;
        const double kp1 = static_cast<double>(k + 1);
        s.add(std::pow(kp1, c) * mu * hurwitz_zeta(q, kp1));
    }
    b.finite_part = s.value();
    // For k >= a: (k+1)^c zeta(q, k+1) <= 1 + (k+1)/(q-1) when c <= q, and the
    // trapezoid prices telescope: sum_{k>=a} mu_k <= 2P, sum_{k>=a} (k+1) mu_k
    // <= (2a+1)P + 2 nu_a with P = nu_{a-1} - nu_a.
    const double p = std::max(0.0, ladder.nu(a - 1) - ladder.nu(a));
    const double nu_a = ladder.nu(a);
    const double ad = static_cast<double>(a);
    b.tail = 2.0 * p + ((2.0 * ad + 1.0) * p + 2.0 * nu_a) / (q - 1.0);
    b.rigorous = c <= q;
    return b;
}

std::string CoherenceReport::summary() const {
    if (passed()) return "coherent";
    std::string s = "incoherent:";
    for (const auto& f : failures) s += " " + f + ";";
    return s;
}

CoherenceReport check_coherence(const PriceLadder& ladder, double tol, std::span<const double> sample_x) {
    CoherenceReport rep;
    const auto& nu = ladder.prices();
    const std::size_t depth = ladder.depth();
    auto fail = [&](bool& flag, std::size_t k, std::string what) {
        if (flag) rep.failures.push_back(std::move(what) + " at k=" + std::to_string(k));
        flag = false;
        if (!rep.failing_index || k < *rep.failing_index) rep.failing_index = k;
    };

    for (std::size_t k = 0; k + 1 <= depth; ++k)
        if (nu[k + 1] > nu[k] + tol) fail(rep.monotone, k + 1, "price increases");
    for (std::size_t k = 1; k + 2 <= depth; ++k)
        if (ladder.mu(k) < -tol) fail(rep.convex, k, "negative trapezoid price");
    if (!(nu[depth] <= tol)) fail(rep.tail_decay, depth, "tail price " + format_real(nu[depth]) + " above tolerance");

    // sum_k [h_k - h_{k+1}] telescopes to h_0, and reaches it once the level is below the depth.
    std::vector<double> defaults;
    if (sample_x.empty()) {
        for (double x : {0.0, 0.25, 0.5, 1.0, 1.5, 2.5, 3.14159, 7.75, 31.3, 250.5})
            defaults.push_back(x);
        sample_x = defaults;
    }
    const LadderFamily& fam = ladder.family();
    for (double x : sample_x) {
        // strikes k^{1/r} and levels k both sit at k on the |x|^r scale
        const double level = fam.kind == LadderFamily::Kind::Call ? std::fabs(x) : std::pow(std::fabs(x), fam.r);
        if (!(level < static_cast<double>(depth))) continue;
        const double target = eval_hedge(fam.hedge_at(0), x);
        const auto upto = static_cast<std::size_t>(std::ceil(level));
        double partial = 0.0;
        for (std::size_t k = 0; k < upto; ++k)
            partial += eval_hedge(fam.hedge_at(k), x) - eval_hedge(fam.hedge_at(k + 1), x);
        if (std::fabs(partial - target) > 1e-12 * (1.0 + target)) {
            if (rep.telescoping)
                rep.failures.push_back("spread telescoping gives " + format_real(partial) + " instead of " +
                                       format_real(target) + " at x=" + format_real(x));
            rep.telescoping = false;
        }
    }
    return rep;
}

void write_ladder_csv(std::ostream& os, const PriceLadder& ladder) {
    os << "k,nu_k,mu_k\n";
    for (std::size_t k = 0; k <= ladder.depth(); ++k) {
        os << k << ',' << format_real(ladder.nu(k)) << ',';
        if (k + 2 <= ladder.depth()) os << format_real(ladder.mu(k));
        os << '\n';
    }
}

} // namespace gtp
