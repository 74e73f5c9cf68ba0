#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace gtp {

/// Name recorded in experiment configs; bump the suffix if the stream layout changes.
inline constexpr std::string_view kRngName = "philox4x64-10/v1";

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

/// Philox4x64 with 10 rounds (Salmon et al.), bit-compatible with Random123
/// and numpy.random.Philox.
PhiloxCounter philox4x64_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Stateless counter-based stream: every (counter, lane) pair maps to a fixed
/// block, so draws never depend on how many values were consumed before.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    PhiloxCounter block(std::uint64_t counter, std::uint64_t lane = 0) const noexcept;

    /// Uniform in the open interval (0, 1) from the top 52 bits, centred in its cell.
    static double to_open_unit(std::uint64_t bits) noexcept;

    std::uint64_t seed() const noexcept { return key_[0]; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    PhiloxKey key_;
    std::uint64_t stream_;
};

} // namespace gtp
