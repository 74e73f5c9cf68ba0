"""Simulations of the betting game with hedges.

Thin wrapper over the C++ core; see ``run_config`` for config-driven runs.
"""

from ._core import (
    ConfigError,
    Hedge,
    PricingError,
    PricingMeasure,
    ProtocolError,
    check_coherence,
    config_schema_version,
    ladder_prices,
    philox_block,
    rng_name,
    run_config,
    upcrossing_count,
    validate_single_hedge,
    wilson_interval,
)

__all__ = [
    "ConfigError",
    "Hedge",
    "PricingError",
    "PricingMeasure",
    "ProtocolError",
    "check_coherence",
    "config_schema_version",
    "ladder_prices",
    "philox_block",
    "rng_name",
    "run_config",
    "upcrossing_count",
    "validate_single_hedge",
    "wilson_interval",
]

__version__ = "0.1.0"
