#include "gtp/game.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gtp/errors.hpp"

namespace gtp {

double RoundBet::gain(double x) const {
    return stake * x + portfolio.net_gain(x);
}

void RoundBet::scale(double factor) noexcept {
    stake *= factor;
    portfolio.scale(factor);
}

void RoundBet::add(const RoundBet& other, double weight) {
    stake += weight * other.stake;
    portfolio.add(other.portfolio, weight);
}

std::string describe(const GameSpec& g) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SingleHedgeGame>) {
                return "single_hedge(" + describe(v.hedge) + ", price=" + format_real(v.price) + ")";
            } else if constexpr (std::is_same_v<T, HedgeSetGame>) {
                return "hedge_set(calls)";
            } else {
                return "powered_hedge_set(r=" + format_real(v.r) + ")";
            }
        },
        g);
}

namespace {

bool price_matches(double posted, double expected) {
    return std::fabs(posted - expected) <= 1e-9 * std::fabs(expected) + 1e-15;
}

std::optional<std::size_t> integer_index(double v) {
    if (!(v >= 0.0) || v > 9.0e15 || v != std::floor(v)) return std::nullopt;
    return static_cast<std::size_t>(v);
}

} // namespace

PriceBook::PriceBook(GameSpec spec, std::size_t max_entries) : spec_(std::move(spec)), max_entries_(max_entries) {
    if (const auto* s = std::get_if<SingleHedgeGame>(&spec_)) {
        if (!(s->price > 0.0) || !std::isfinite(s->price)) throw ConfigError("single hedge price must be positive");
    } else if (const auto* h = std::get_if<HedgeSetGame>(&spec_)) {
        if (!h->calls || h->calls->family() != LadderFamily::calls())
            throw ConfigError("hedge-set game needs a plain call ladder");
        calls_ = h->calls->current();
    } else {
        const auto& p = std::get<PoweredHedgeSetGame>(spec_);
        if (!(p.r > 1.0 && p.r < 2.0)) throw ConfigError("powered hedge-set game needs 1 < r < 2");
        if (!p.powered || p.powered->family() != LadderFamily::powered(p.r))
            throw ConfigError("powered hedge-set game needs the powered-call ladder for r");
        if (!p.root_calls || p.root_calls->family() != LadderFamily::root_strike(p.r))
            throw ConfigError("powered hedge-set game needs the root-strike call ladder for r");
        powered_ = p.powered->current();
        roots_ = p.root_calls->current();
    }
}

double PriceBook::ladder_price(const LadderSource& src, std::shared_ptr<const PriceLadder>& snap, std::size_t k) {
    if (snap->depth() < k) snap = src->at_least(k);
    return snap->nu(k);
}

double PriceBook::strip_price(const LadderSource& src, const TrapezoidStrip& s) {
    const auto key = std::make_pair(src->family().level_exponent(), s.coef_exponent);
    auto it = strips_.find(key);
    if (it == strips_.end()) it = strips_.emplace(key, StripPricer(src, s.coef_exponent)).first;
    return it->second.price(s.count);
}

double PriceBook::price_of(const HedgeKind& h) {
    auto unavailable = [&]() -> double {
        throw ProtocolError("hedge " + describe(h) + " is not available in " + describe(spec_));
    };
    if (const auto* s = std::get_if<SingleHedgeGame>(&spec_)) {
        if (!(h == s->hedge)) return unavailable();
        return s->price;
    }
    if (std::holds_alternative<UnitPayoff>(h)) return 1.0;
    if (const auto* g = std::get_if<HedgeSetGame>(&spec_)) {
        if (const auto* c = std::get_if<Call>(&h)) {
            if (auto k = integer_index(c->strike)) return ladder_price(g->calls, calls_, *k);
        } else if (const auto* b = std::get_if<BullSpread>(&h)) {
            if (b->r == 1.0) return ladder_price(g->calls, calls_, b->k) - ladder_price(g->calls, calls_, b->k + 1);
        } else if (const auto* t = std::get_if<TrapezoidStrip>(&h)) {
            if (t->r == 1.0) return strip_price(g->calls, *t);
        }
        return unavailable();
    }
    const auto& p = std::get<PoweredHedgeSetGame>(spec_);
    if (const auto* pc = std::get_if<PoweredCall>(&h)) {
        if (pc->r == p.r)
            if (auto k = integer_index(pc->level)) return ladder_price(p.powered, powered_, *k);
    } else if (const auto* c = std::get_if<Call>(&h)) {
        const double level = std::round(std::pow(c->strike, p.r));
        if (auto k = integer_index(level)) {
            const HedgeKind listed = p.root_calls->family().hedge_at(*k);
            if (std::get<Call>(listed).strike == c->strike) return ladder_price(p.root_calls, roots_, *k);
        }
    } else if (const auto* b = std::get_if<BullSpread>(&h)) {
        if (b->r == p.r) return ladder_price(p.powered, powered_, b->k) - ladder_price(p.powered, powered_, b->k + 1);
    } else if (const auto* t = std::get_if<TrapezoidStrip>(&h)) {
        if (t->r == p.r) return strip_price(p.powered, *t);
    }
    return unavailable();
}

void PriceBook::check(const RoundBet& bet) {
    if (!std::isfinite(bet.stake)) throw ProtocolError("non-finite stake");
    const auto& entries = bet.portfolio.entries();
    if (entries.size() > max_entries_)
        throw ProtocolError("portfolio has " + std::to_string(entries.size()) + " entries, cap is " +
                            std::to_string(max_entries_));
    const bool single = std::holds_alternative<SingleHedgeGame>(spec_);
    if (single && entries.size() > 1) throw ProtocolError("single-hedge game allows one hedge entry");
    for (const auto& e : entries) {
        if (!std::isfinite(e.units)) throw ProtocolError("non-finite hedge units for " + describe(e.hedge.kind));
        if (single && e.units < 0.0)
            throw ProtocolError("single-hedge game requires non-negative units, got " + format_real(e.units));
        const double expected = price_of(e.hedge.kind);
        if (!price_matches(e.hedge.price, expected))
            throw ProtocolError("hedge " + describe(e.hedge.kind) + " quoted at " + format_real(e.hedge.price) +
                                ", posted price is " + format_real(expected));
    }
}

const RoundBet& SkepticStrategy::bet(std::size_t n, std::span<const double> past) {
    if (!capital_) capital_.emplace(initial_capital());
    last_ = propose(n, past);
    return last_;
}

void SkepticStrategy::settle(std::size_t n, double x) {
    if (!capital_) capital_.emplace(initial_capital());
    capital_->add(last_.gain(x));
    observe(n, x);
}

double collateral_tolerance(double initial_capital) noexcept {
    return 1e-9 * std::max(1.0, initial_capital);
}

Game::Game(GameSpec spec, SkepticStrategy& skeptic, RealityStrategy& reality, GameOptions opts)
    : book_(std::move(spec), opts.max_entries),
      skeptic_(skeptic),
      reality_(reality),
      opts_(std::move(opts)),
      capital_(skeptic.initial_capital()),
      tolerance_(collateral_tolerance(skeptic.initial_capital())) {
    hist_.skeptic_id = skeptic.id();
    hist_.reality_id = reality.id();
    hist_.initial_capital = skeptic.initial_capital();
    hist_.final_capital = hist_.max_capital = hist_.min_capital = hist_.initial_capital;
    if (opts_.keep_series) hist_.capital.push_back(hist_.initial_capital);
}

const RoundRecord& Game::play_round() {
    if (stopped()) throw ProtocolError(hist_.violation ? "game stopped after a collateral violation"
                                                       : "game stopped after capital saturated");
    const std::size_t n = hist_.rounds + 1;
    const RoundBet& bet = skeptic_.bet(n, path_);
    book_.check(bet);
    const double x = reality_.move(n, path_, opts_.reveal_bet ? &bet : nullptr);
    if (!std::isfinite(x)) throw NumericError("reality produced a non-finite move at round " + std::to_string(n));

    const double gain = bet.gain(x);
    capital_.add(gain);
    const double k = capital_.value();
    if (std::isnan(k)) throw NumericError("capital is NaN at round " + std::to_string(n));
    skeptic_.settle(n, x);
    path_.push_back(x);

    hist_.rounds = n;
    hist_.final_capital = k;
    hist_.max_capital = std::max(hist_.max_capital, k);
    hist_.min_capital = std::min(hist_.min_capital, k);
    const double cost = bet.portfolio.total_price();
    if (opts_.keep_series) {
        hist_.moves.push_back(x);
        hist_.stakes.push_back(bet.stake);
        hist_.costs.push_back(cost);
        hist_.capital.push_back(k);
    }
    if (opts_.record_bets) hist_.bets.push_back(bet);

    last_ = RoundRecord{n, x, bet.stake, cost, gain, k, &bet};
    if (opts_.on_round) opts_.on_round(last_);

    if (k < -tolerance_) {
        hist_.violation = ViolationRecord{n, k, tolerance_};
        if (!opts_.capture_violation) throw CollateralViolation(n, k, tolerance_);
    } else if (k < 0.0) {
        ++hist_.slack_warnings;
    } else if (k > kCapitalCeiling) {
        hist_.saturated = n;
    }
    return last_;
}

GameHistory run_game(const GameSpec& spec, SkepticStrategy& skeptic, RealityStrategy& reality, std::size_t n_rounds,
                     GameOptions opts) {
    if (n_rounds == 0) throw ConfigError("a game needs at least one round");
    Game g(spec, skeptic, reality, std::move(opts));
    for (std::size_t i = 0; i < n_rounds && !g.stopped(); ++i) g.play_round();
    return g.history();
}

std::vector<double> replay_capital(double initial_capital, std::span<const RoundBet> bets,
                                   std::span<const double> moves) {
    if (bets.size() != moves.size()) throw ConfigError("replay needs one bet per move");
    std::vector<double> out{initial_capital};
    NeumaierSum k(initial_capital);
    for (std::size_t i = 0; i < bets.size(); ++i) {
        k.add(bets[i].gain(moves[i]));
        out.push_back(k.value());
    }
    return out;
}

MixtureStrategy::MixtureStrategy(std::string id, std::vector<std::unique_ptr<SkepticStrategy>> parts,
                                 std::vector<double> weights)
    : id_(std::move(id)), parts_(std::move(parts)), weights_(std::move(weights)) {
    if (parts_.empty()) throw ConfigError("mixture needs at least one strategy");
    if (parts_.size() != weights_.size()) throw ConfigError("mixture needs one weight per strategy");
    double total = 0.0;
    for (std::size_t j = 0; j < parts_.size(); ++j) {
        if (!parts_[j]) throw ConfigError("mixture part is empty");
        if (!(weights_[j] > 0.0)) throw ConfigError("mixture weights must be positive");
        total += weights_[j];
    }
    if (std::fabs(total - 1.0) > 1e-12) throw ConfigError("mixture weights sum to " + format_real(total) + ", not 1");
}

MixtureStrategy::MixtureStrategy(const MixtureStrategy& other)
    : ClonableStrategy<MixtureStrategy>(other), id_(other.id_), weights_(other.weights_) {
    for (const auto& p : other.parts_) parts_.push_back(p->clone());
}

double MixtureStrategy::initial_capital() const {
    double k = 0.0;
    for (std::size_t j = 0; j < parts_.size(); ++j) k += weights_[j] * parts_[j]->initial_capital();
    return k;
}

RoundBet MixtureStrategy::propose(std::size_t n, std::span<const double> past) {
    RoundBet out;
    for (std::size_t j = 0; j < parts_.size(); ++j) out.add(parts_[j]->bet(n, past), weights_[j]);
    return out;
}

void MixtureStrategy::observe(std::size_t n, double x) {
    for (auto& p : parts_) p->settle(n, x);
}

std::unique_ptr<SkepticStrategy> combine_strategies(std::vector<std::unique_ptr<SkepticStrategy>> parts,
                                                    std::vector<double> weights, std::string id) {
    return std::make_unique<MixtureStrategy>(std::move(id), std::move(parts), std::move(weights));
}

std::unique_ptr<SkepticStrategy> combine_equal(std::vector<std::unique_ptr<SkepticStrategy>> parts, std::string id) {
    std::vector<double> w(parts.size(), parts.empty() ? 0.0 : 1.0 / static_cast<double>(parts.size()));
    return combine_strategies(std::move(parts), std::move(w), std::move(id));
}

std::unique_ptr<SkepticStrategy> combine_geometric(std::vector<std::unique_ptr<SkepticStrategy>> parts,
                                                   std::string id) {
    std::vector<double> w;
    double total = 0.0, wj = 0.5;
    for (std::size_t j = 0; j < parts.size(); ++j, wj *= 0.5) {
        w.push_back(wj);
        total += wj;
    }
    for (double& v : w) v /= total;
    // Renormalized weights can miss 1 by an ulp; put the remainder on the first part.
    if (!w.empty()) {
        double s = 0.0;
        for (std::size_t j = 1; j < w.size(); ++j) s += w[j];
        w[0] = 1.0 - s;
    }
    return combine_strategies(std::move(parts), std::move(w), std::move(id));
}

ScaledStrategy::ScaledStrategy(std::unique_ptr<SkepticStrategy> inner, double delta)
    : inner_(std::move(inner)), delta_(delta) {
    if (!inner_) throw ConfigError("scaled strategy needs an inner strategy");
    if (!(delta_ > 0.0) || !std::isfinite(delta_)) throw ConfigError("scale factor must be positive and finite");
}

ScaledStrategy::ScaledStrategy(const ScaledStrategy& other)
    : ClonableStrategy<ScaledStrategy>(other), inner_(other.inner_->clone()), delta_(other.delta_) {}

RoundBet ScaledStrategy::propose(std::size_t n, std::span<const double> past) {
    RoundBet b = inner_->bet(n, past);
    b.scale(delta_);
    return b;
}

void ScaledStrategy::observe(std::size_t n, double x) {
    inner_->settle(n, x);
}

std::unique_ptr<SkepticStrategy> scale_strategy(std::unique_ptr<SkepticStrategy> s, double delta) {
    return std::make_unique<ScaledStrategy>(std::move(s), delta);
}

void write_trajectory_csv(std::ostream& os, const GameHistory& h, std::size_t stride) {
    if (stride == 0) stride = 1;
    os << "n,x_n,M_n,portfolio_cost_n,K_n\n";
    if (h.capital.empty()) return;
    os << "0,,,," << format_real(h.capital[0]) << '\n';
    const std::size_t n_rows = h.moves.size();
    for (std::size_t i = 0; i < n_rows; ++i) {
        const std::size_t n = i + 1;
        if (n % stride != 0 && n != n_rows) continue;
        os << n << ',' << format_real(h.moves[i]) << ',' << format_real(h.stakes[i]) << ',' << format_real(h.costs[i])
           << ',' << format_real(h.capital[n]) << '\n';
    }
}

} // namespace gtp
