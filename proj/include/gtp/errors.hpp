#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gtp {

/// Invalid or inconsistent configuration (bad parameter, ladder too shallow, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A bet that the active protocol does not allow.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A hedge that cannot be priced under the chosen measure.
class PricingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reading or writing an artifact failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Skeptic's capital went below the collateral tolerance.
class CollateralViolation : public std::runtime_error {
public:
    CollateralViolation(std::size_t round, double capital, double tolerance);

    std::size_t round() const noexcept { return round_; }
    double capital() const noexcept { return capital_; }
    double tolerance() const noexcept { return tolerance_; }

private:
    std::size_t round_;
    double capital_;
    double tolerance_;
};

} // namespace gtp
