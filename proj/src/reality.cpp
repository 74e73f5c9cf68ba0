#include "gtp/reality.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "gtp/errors.hpp"
#include "gtp/numeric.hpp"

namespace gtp {

namespace {

template <class F>
class FormulaPath : public RealityStrategy {
public:
    FormulaPath(std::string id, F f) : id_(std::move(id)), f_(std::move(f)) {}
    std::string id() const override { return id_; }
    std::unique_ptr<RealityStrategy> clone() const override { return std::make_unique<FormulaPath>(*this); }
    double move(std::size_t n, std::span<const double>, const RoundBet*) override { return f_(n); }

private:
    std::string id_;
    F f_;
};

template <class F>
std::unique_ptr<RealityStrategy> formula(std::string id, F f) {
    return std::make_unique<FormulaPath<F>>(std::move(id), std::move(f));
}

class ReplayPath : public RealityStrategy {
public:
    ReplayPath(std::vector<double> moves, std::string id)
        : moves_(std::make_shared<const std::vector<double>>(std::move(moves))), id_(std::move(id)) {}
    std::string id() const override { return id_; }
    std::unique_ptr<RealityStrategy> clone() const override { return std::make_unique<ReplayPath>(*this); }
    double move(std::size_t n, std::span<const double>, const RoundBet*) override {
        if (n > moves_->size())
            throw ConfigError("replayed path has " + std::to_string(moves_->size()) + " moves, round " +
                              std::to_string(n) + " requested");
        return (*moves_)[n - 1];
    }

private:
    std::shared_ptr<const std::vector<double>> moves_;
    std::string id_;
};

class IidSampler : public RealityStrategy {
public:
    IidSampler(PricingMeasure m, std::uint64_t seed, std::uint64_t stream)
        : m_(std::move(m)), rng_(seed, stream) {}
    std::string id() const override { return "iid(" + m_.describe() + ")"; }
    std::unique_ptr<RealityStrategy> clone() const override { return std::make_unique<IidSampler>(*this); }
    double move(std::size_t n, std::span<const double>, const RoundBet*) override {
        const auto b = rng_.block(n);
        return m_.sample(CounterRng::to_open_unit(b[0]), CounterRng::to_open_unit(b[1]));
    }

private:
    PricingMeasure m_;
    CounterRng rng_;
};

class Adversary : public RealityStrategy {
public:
    explicit Adversary(AdversarySpec spec) : spec_(std::move(spec)), rng_(spec_.seed, spec_.stream) {}
    std::string id() const override { return describe(spec_); }
    std::unique_ptr<RealityStrategy> clone() const override { return std::make_unique<Adversary>(*this); }
    double move(std::size_t n, std::span<const double>, const RoundBet*) override {
        const RoundLaw law = adversary_round_law(spec_, n);
        if (!law.active) return 0.0;
        const double u = CounterRng::to_open_unit(rng_.block(n)[0]);
        if (u < 0.5 * law.prob) return -law.threshold;
        if (u < law.prob) return law.threshold;
        return 0.0;
    }

private:
    AdversarySpec spec_;
    CounterRng rng_;
};

} // namespace

std::unique_ptr<RealityStrategy> zeros_path() {
    return formula("zeros", [](std::size_t) { return 0.0; });
}

std::unique_ptr<RealityStrategy> constant_path(double c) {
    return formula("constant(" + format_real(c) + ")", [c](std::size_t) { return c; });
}

std::unique_ptr<RealityStrategy> alternating_path(double c) {
    return formula("alternating(" + format_real(c) + ")", [c](std::size_t n) { return n % 2 == 0 ? c : -c; });
}

std::unique_ptr<RealityStrategy> spike_path(double scale) {
    return formula("spike(" + format_real(scale) + ")", [scale](std::size_t n) {
        return (n & (n - 1)) == 0 ? scale * static_cast<double>(n) : 0.0;
    });
}

std::unique_ptr<RealityStrategy> harmonic_drift_path(double c) {
    return formula("harmonic_drift(" + format_real(c) + ")", [c](std::size_t n) {
        const double s = std::sqrt(static_cast<double>(n));
        return n % 2 == 0 ? c + s : c - s;
    });
}

std::unique_ptr<RealityStrategy> ramp_path(double c) {
    return formula("ramp(" + format_real(c) + ")", [c](std::size_t n) { return c * static_cast<double>(n); });
}

std::unique_ptr<RealityStrategy> replay_path(std::vector<double> moves, std::string id) {
    for (std::size_t i = 0; i < moves.size(); ++i)
        if (!std::isfinite(moves[i])) throw ConfigError("replayed move " + std::to_string(i + 1) + " is not finite");
    return std::make_unique<ReplayPath>(std::move(moves), std::move(id));
}

std::unique_ptr<RealityStrategy> iid_sampler(const PricingMeasure& m, std::uint64_t seed, std::uint64_t stream) {
    return std::make_unique<IidSampler>(m, seed, stream);
}

RoundLaw adversary_round_law(const AdversarySpec& spec, std::size_t n) {
    const double nd = static_cast<double>(n);
    return std::visit(
        [nd](const auto& a) -> RoundLaw {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, PowerThresholdAdversary>) {
                if (!(nd > a.nu)) return {};
                return {true, std::pow(nd, 1.0 / a.r), a.nu / nd};
            } else {
                const double hn = eval_hedge(a.h, nd);
                if (!(hn > a.nu)) return {};
                return {true, nd, a.nu / hn};
            }
        },
        spec.law);
}

std::unique_ptr<RealityStrategy> adversary(const AdversarySpec& spec) {
    std::visit(
        [](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if (!(a.nu > 0.0) || !std::isfinite(a.nu)) throw ConfigError("adversary nu must be positive and finite");
            if constexpr (std::is_same_v<T, PowerThresholdAdversary>) {
                if (!(a.r > 0.0) || !std::isfinite(a.r)) throw ConfigError("adversary r must be positive and finite");
            }
        },
        spec.law);
    return std::make_unique<Adversary>(spec);
}

std::string describe(const AdversarySpec& spec) {
    return std::visit(
        [](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, PowerThresholdAdversary>)
                return "power_threshold_adversary(r=" + format_real(a.r) + ",nu=" + format_real(a.nu) + ")";
            else
                return "hedge_threshold_adversary(" + describe(a.h) + ",nu=" + format_real(a.nu) + ")";
        },
        spec.law);
}

void write_path_csv(std::ostream& os, std::span<const double> moves) {
    os << "x_n\n";
    for (double x : moves) os << format_real(x) << '\n';
}

std::vector<double> read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("path CSV is empty");
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            out.push_back(cell);
        }
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };
    const auto header = split(line);
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == "x_n") col = i;
    if (col == header.size()) throw ConfigError("path CSV has no x_n column");

    std::vector<double> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (col >= cells.size()) throw ConfigError("path CSV line " + std::to_string(lineno) + " is short");
        const std::string& c = cells[col];
        double v = 0.0;
        const auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
        if (ec != std::errc{} || p != c.data() + c.size() || !std::isfinite(v))
            throw ConfigError("path CSV line " + std::to_string(lineno) + ": bad x_n value '" + c + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace gtp
