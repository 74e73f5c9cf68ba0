#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gtp/hedge.hpp"
#include "gtp/ladder.hpp"
#include "gtp/numeric.hpp"

namespace gtp {

/// Skeptic's announcement for one round: stake on the bare move plus hedge units.
struct RoundBet {
    double stake = 0.0;
    HedgePortfolio portfolio;

    /// Capital change if Reality answers x.
    double gain(double x) const;
    void scale(double factor) noexcept;
    void add(const RoundBet& other, double weight);
};

/// One hedge h at a fixed price; units must be non-negative.
struct SingleHedgeGame {
    HedgeKind hedge;
    double price = 1.0;
};

/// Calls (|x| - k)_+ at every integer strike, the unit payoff, and
/// trapezoid strips built from them.
struct HedgeSetGame {
    LadderSource calls;
};

/// Powered calls (|x|^r - k)_+ and calls struck at k^{1/r}.
struct PoweredHedgeSetGame {
    double r = 1.5;
    LadderSource powered;
    LadderSource root_calls;
};

using GameSpec = std::variant<SingleHedgeGame, HedgeSetGame, PoweredHedgeSetGame>;
std::string describe(const GameSpec& g);

/// Enforces which hedges exist in a game and at what price. Owns per-run
/// strip price caches, so one book per run.
class PriceBook {
public:
    explicit PriceBook(GameSpec spec, std::size_t max_entries = 64);

    const GameSpec& spec() const noexcept { return spec_; }
    /// Throws ProtocolError for unavailable hedges, wrong prices, negative
    /// single-hedge units, or too many entries.
    void check(const RoundBet& bet);
    /// Posted price of a hedge in this game; ProtocolError when unavailable.
    double price_of(const HedgeKind& h);

private:
    GameSpec spec_;
    std::size_t max_entries_;
    std::map<std::pair<double, double>, StripPricer> strips_;  // (level exponent, coef exponent)
    std::shared_ptr<const PriceLadder> calls_, powered_, roots_;

    double ladder_price(const LadderSource& src, std::shared_ptr<const PriceLadder>& snap, std::size_t k);
    double strip_price(const LadderSource& src, const TrapezoidStrip& s);
};

/// Strategy for Skeptic. The base class tracks the strategy's own capital
/// from the bets it proposed, so mixtures can hand every part its own
/// capital process.
class SkepticStrategy {
public:
    virtual ~SkepticStrategy() = default;

    virtual std::string id() const = 0;
    virtual double initial_capital() const { return 1.0; }
    virtual std::unique_ptr<SkepticStrategy> clone() const = 0;

    /// Bet for round n (1-based) given x_1..x_{n-1}.
    const RoundBet& bet(std::size_t n, std::span<const double> past);
    /// Applies the outcome of round n to the tracked capital.
    void settle(std::size_t n, double x);

    /// Capital after the last settled round.
    double capital() const noexcept { return capital_ ? capital_->value() : initial_capital(); }

protected:
    SkepticStrategy() = default;
    SkepticStrategy(const SkepticStrategy&) = default;

    virtual RoundBet propose(std::size_t n, std::span<const double> past) = 0;
    virtual void observe(std::size_t /*n*/, double /*x*/) {}

private:
    std::optional<NeumaierSum> capital_;
    RoundBet last_;
};

template <class Derived>
class ClonableStrategy : public SkepticStrategy {
public:
    std::unique_ptr<SkepticStrategy> clone() const override {
        return std::make_unique<Derived>(static_cast<const Derived&>(*this));
    }
};

class RealityStrategy {
public:
    virtual ~RealityStrategy() = default;
    virtual std::string id() const = 0;
    virtual std::unique_ptr<RealityStrategy> clone() const = 0;
    /// x_n given x_1..x_{n-1}; `bet` is Skeptic's announcement when revealed.
    virtual double move(std::size_t n, std::span<const double> past, const RoundBet* bet) = 0;
};

struct RoundRecord {
    std::size_t n = 0;
    double x = 0.0;
    double stake = 0.0;
    double cost = 0.0;  // total price of the hedge portfolio
    double gain = 0.0;
    double capital = 0.0;
    const RoundBet* bet = nullptr;
};

struct GameOptions {
    bool record_bets = false;
    bool keep_series = true;
    /// Reality sees the bet before moving (worst case). Off for sampled Realities
    /// makes no difference to their draws.
    bool reveal_bet = true;
    /// Return the partial history instead of throwing on a collateral violation.
    bool capture_violation = false;
    std::size_t max_entries = 64;
    std::function<void(const RoundRecord&)> on_round;
};

struct ViolationRecord {
    std::size_t round = 0;
    double capital = 0.0;
    double tolerance = 0.0;
};

/// Realized path and capital process. moves[i] is x_{i+1}; capital[0] is K_0.
struct GameHistory {
    std::string skeptic_id;
    std::string reality_id;
    double initial_capital = 1.0;
    std::vector<double> moves;
    std::vector<double> stakes;
    std::vector<double> costs;
    std::vector<double> capital;
    std::vector<RoundBet> bets;  // only with record_bets
    std::size_t rounds = 0;
    double final_capital = 1.0;
    double max_capital = 1.0;
    double min_capital = 1.0;
    std::size_t slack_warnings = 0;  // rounds with -tolerance <= K_n < 0
    std::optional<ViolationRecord> violation;
    /// Round at which K_n passed kCapitalCeiling; the run stops there.
    std::optional<std::size_t> saturated;
};

/// Capital above this ends a run: stakes scale with K and would overflow soon after.
inline constexpr double kCapitalCeiling = 1e250;

/// Collateral tolerance 1e-9 * max(1, K_0).
double collateral_tolerance(double initial_capital) noexcept;

/// Round-by-round driver for one run.
class Game {
public:
    Game(GameSpec spec, SkepticStrategy& skeptic, RealityStrategy& reality, GameOptions opts = {});

    /// Plays round n = rounds() + 1. Throws CollateralViolation (unless
    /// captured), ProtocolError for illegal bets, NumericError for non-finite
    /// moves or capital.
    const RoundRecord& play_round();
    const GameHistory& history() const noexcept { return hist_; }
    /// After a captured collateral violation or once capital is saturated.
    bool stopped() const noexcept { return hist_.violation.has_value() || hist_.saturated.has_value(); }

private:
    PriceBook book_;
    SkepticStrategy& skeptic_;
    RealityStrategy& reality_;
    GameOptions opts_;
    GameHistory hist_;
    std::vector<double> path_;  // always kept: strategies and Realities see the past
    NeumaierSum capital_;
    double tolerance_;
    RoundRecord last_;
};

GameHistory run_game(const GameSpec& spec, SkepticStrategy& skeptic, RealityStrategy& reality, std::size_t n_rounds,
                     GameOptions opts = {});

/// Recomputes K_0..K_n from stored bets and moves with the same accumulation
/// as the engine; equal bit-for-bit to the stored series.
std::vector<double> replay_capital(double initial_capital, std::span<const RoundBet> bets,
                                   std::span<const double> moves);

/// Weighted sum of strategies (weights positive, summing to 1). Each part keeps
/// its own capital process; the mixture's capital is their weighted sum.
class MixtureStrategy : public ClonableStrategy<MixtureStrategy> {
public:
    MixtureStrategy(std::string id, std::vector<std::unique_ptr<SkepticStrategy>> parts, std::vector<double> weights);
    MixtureStrategy(const MixtureStrategy& other);

    std::string id() const override { return id_; }
    double initial_capital() const override;
    std::size_t size() const noexcept { return parts_.size(); }
    const SkepticStrategy& part(std::size_t j) const { return *parts_.at(j); }
    double weight(std::size_t j) const { return weights_.at(j); }

protected:
    RoundBet propose(std::size_t n, std::span<const double> past) override;
    void observe(std::size_t n, double x) override;

private:
    std::string id_;
    std::vector<std::unique_ptr<SkepticStrategy>> parts_;
    std::vector<double> weights_;
};

std::unique_ptr<SkepticStrategy> combine_strategies(std::vector<std::unique_ptr<SkepticStrategy>> parts,
                                                    std::vector<double> weights, std::string id = "mixture");
/// Equal weights.
std::unique_ptr<SkepticStrategy> combine_equal(std::vector<std::unique_ptr<SkepticStrategy>> parts, std::string id);
/// Countable family truncated at its length, weights 2^{-j} renormalized.
std::unique_ptr<SkepticStrategy> combine_geometric(std::vector<std::unique_ptr<SkepticStrategy>> parts,
                                                   std::string id = "geometric_mixture");

/// All bets and the initial capital multiplied by delta > 0.
class ScaledStrategy : public ClonableStrategy<ScaledStrategy> {
public:
    ScaledStrategy(std::unique_ptr<SkepticStrategy> inner, double delta);
    ScaledStrategy(const ScaledStrategy& other);

    std::string id() const override { return inner_->id() + "*" + format_real(delta_); }
    double initial_capital() const override { return delta_ * inner_->initial_capital(); }

protected:
    RoundBet propose(std::size_t n, std::span<const double> past) override;
    void observe(std::size_t n, double x) override;

private:
    std::unique_ptr<SkepticStrategy> inner_;
    double delta_;
};

std::unique_ptr<SkepticStrategy> scale_strategy(std::unique_ptr<SkepticStrategy> s, double delta);

/// Columns n, x_n, M_n, portfolio_cost_n, K_n; row 0 carries K_0 only.
/// Every stride-th round is written, plus the last one.
void write_trajectory_csv(std::ostream& os, const GameHistory& h, std::size_t stride = 1);

} // namespace gtp
