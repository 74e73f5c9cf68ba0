#include "gtp/errors.hpp"

#include "gtp/numeric.hpp"

namespace gtp {

CollateralViolation::CollateralViolation(std::size_t round, double capital, double tolerance)
    : std::runtime_error("collateral violation at round " + std::to_string(round) + ": capital " +
                         format_real(capital) + " below -" + format_real(tolerance)),
      round_(round), capital_(capital), tolerance_(tolerance) {}

} // namespace gtp
