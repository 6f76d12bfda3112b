"""Core parameter, grid and field types for the nonlinear option-pricing wave model.

The model evolves a complex option-price wave function psi(S, t) by

    i psi_t = -(sigma/2) psi_SS - beta |psi|^2 psi

with constant volatility ``sigma`` and adaptive market potential ``beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ParameterError(ValueError):
    """Raised when model, grid or contract parameters are invalid."""


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise ParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class MarketParams:
    """Validated model parameters (sigma, beta, alpha, k)."""

    sigma: float
    beta: float
    alpha: float
    k: float

    def __post_init__(self) -> None:
        for name in ("sigma", "beta", "alpha", "k"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _require_finite(sigma=self.sigma, beta=self.beta, alpha=self.alpha, k=self.k)
        if not self.sigma * self.beta > 0.0:
            raise ParameterError(
                f"sigma*beta > 0 is required (got sigma={self.sigma!r}, beta={self.beta!r})"
            )
        if self.alpha == 0.0:
            raise ParameterError("alpha must be non-zero")


def make_params(sigma: float, beta: float, alpha: float, k: float) -> MarketParams:
    return MarketParams(sigma, beta, alpha, k)


def _unchecked_params(sigma: float, beta: float, alpha: float, k: float) -> MarketParams:
    # Test hook: bypasses validation, e.g. for the linear (beta = 0) limit.
    p = object.__new__(MarketParams)
    for name, value in zip(("sigma", "beta", "alpha", "k"), (sigma, beta, alpha, k)):
        object.__setattr__(p, name, float(value))
    return p


def background_amplitude(p: MarketParams) -> float:
    """Plane-wave level ``alpha * sqrt(sigma / (2 beta))``.

    Negative ``alpha`` gives a negative amplitude (a global sign flip of psi).
    """
    return p.alpha * math.sqrt(p.sigma / (2.0 * p.beta))


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform (S, t) grid.

    S is sampled periodically with the right endpoint excluded,
    ``S_j = s_min + j * ds`` for ``j = 0 .. n_s - 1``. Time includes both
    endpoints, ``t_i = t_min + i * dt`` with ``dt = (t_max - t_min) / max(n_t - 1, 1)``.
    """

    s_min: float
    s_max: float
    n_s: int
    t_min: float
    t_max: float
    n_t: int

    def __post_init__(self) -> None:
        for name in ("s_min", "s_max", "t_min", "t_max"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("n_s", "n_t"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ParameterError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        _require_finite(s_min=self.s_min, s_max=self.s_max, t_min=self.t_min, t_max=self.t_max)
        if not self.s_min < self.s_max:
            raise ParameterError(f"s_min < s_max required (got {self.s_min}, {self.s_max})")
        if not self.t_min <= self.t_max:
            raise ParameterError(f"t_min <= t_max required (got {self.t_min}, {self.t_max})")
        if self.n_s < 1 or self.n_t < 1:
            raise ParameterError("n_s and n_t must be >= 1")

    @property
    def length(self) -> float:
        return self.s_max - self.s_min

    @property
    def ds(self) -> float:
        return (self.s_max - self.s_min) / self.n_s

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / max(self.n_t - 1, 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_t, self.n_s)

    def s_values(self) -> np.ndarray:
        return self.s_min + np.arange(self.n_s) * self.ds

    def t_values(self) -> np.ndarray:
        return self.t_min + np.arange(self.n_t) * self.dt


def make_grid(
    s_min: float, s_max: float, n_s: int, t_min: float, t_max: float, n_t: int
) -> SpaceTimeGrid:
    return SpaceTimeGrid(s_min, s_max, n_s, t_min, t_max, n_t)


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex samples of psi on a grid, shape ``(n_t, n_s)`` (time-major)."""

    grid: SpaceTimeGrid
    samples: np.ndarray
    params: MarketParams
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.complex128)
        if samples.shape != self.grid.shape:
            raise ParameterError(
                f"samples shape {samples.shape} does not match grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(samples)):
            raise ParameterError("field samples must be finite")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def intensity(self) -> np.ndarray:
        return self.samples.real**2 + self.samples.imag**2
