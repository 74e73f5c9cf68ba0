#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gtp/game.hpp"
#include "gtp/hedge.hpp"
#include "gtp/measure.hpp"
#include "gtp/rng.hpp"

namespace gtp {

// Deterministic paths.
std::unique_ptr<RealityStrategy> zeros_path();
std::unique_ptr<RealityStrategy> constant_path(double c);
/// x_n = (-1)^n c
std::unique_ptr<RealityStrategy> alternating_path(double c);
/// x_n = scale * n when n is a power of two, 0 otherwise.
std::unique_ptr<RealityStrategy> spike_path(double scale);
/// x_n = c + (-1)^n sqrt(n): mean drifts to c while |x_n| stays below n.
std::unique_ptr<RealityStrategy> harmonic_drift_path(double c);
/// x_n = c n
std::unique_ptr<RealityStrategy> ramp_path(double c);

/// Replays a fixed path; moves past its end are an error.
std::unique_ptr<RealityStrategy> replay_path(std::vector<double> moves, std::string id = "replay");

/// i.i.d. draws from m; round n uses block n of stream (seed, stream).
std::unique_ptr<RealityStrategy> iid_sampler(const PricingMeasure& m, std::uint64_t seed, std::uint64_t stream = 0);

/// x_n in {0, +-n^{1/r}}: P(x_n != 0) = nu/n for n > nu, else x_n = 0.
struct PowerThresholdAdversary {
    double r = 1.0;
    double nu = 1.0;
};

/// x_n in {0, +-n}: P(x_n != 0) = nu/h(n) once h(n) > nu, else x_n = 0.
struct HedgeThresholdAdversary {
    HedgeKind h;
    double nu = 1.0;
};

struct AdversarySpec {
    std::variant<PowerThresholdAdversary, HedgeThresholdAdversary> law;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Law of round n: x_n = +-threshold with probability prob/2 each, 0 otherwise.
struct RoundLaw {
    bool active = false;
    double threshold = 0.0;
    double prob = 0.0;
};

RoundLaw adversary_round_law(const AdversarySpec& spec, std::size_t n);
/// Throws ConfigError for r <= 0, nu <= 0 or a non-finite spec.
std::unique_ptr<RealityStrategy> adversary(const AdversarySpec& spec);
std::string describe(const AdversarySpec& spec);

/// Path CSV: header x_n, one move per line.
void write_path_csv(std::ostream& os, std::span<const double> moves);
/// Reads a column named x_n (other columns ignored). Throws ConfigError on bad input.
std::vector<double> read_path_csv(std::istream& is);

} // namespace gtp
