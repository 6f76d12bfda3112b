"""Rogue-wave solutions, verification and propagation for the nonlinear option-pricing wave model."""

from .model import (
    MarketParams,
    ParameterError,
    SpaceTimeGrid,
    WaveField,
    background_amplitude,
    make_grid,
    make_params,
)
from .rogons import (
    carrier_phase,
    eval_field,
    peak_statistics,
    plane_wave,
    rogon1,
    rogon2,
    rogon2_polynomials,
)

__all__ = [
    "MarketParams",
    "ParameterError",
    "SpaceTimeGrid",
    "WaveField",
    "background_amplitude",
    "carrier_phase",
    "eval_field",
    "make_grid",
    "make_params",
    "peak_statistics",
    "plane_wave",
    "rogon1",
    "rogon2",
    "rogon2_polynomials",
]

__version__ = "0.1.0"
