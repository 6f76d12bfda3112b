"""Black-Scholes European call baseline.

Prices are expressed in time to maturity ``tau``; the calendar-time PDE

    C_t + (1/2) sigma^2 S^2 C_SS + r S C_S - r C = 0

is checked with ``C_t = -C_tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable

from .model import ParameterError, _require_finite


@dataclass(frozen=True)
class BsParams:
    r: float
    sigma_bs: float
    strike: float
    maturity: float

    def __post_init__(self) -> None:
        _require_finite(r=self.r, sigma_bs=self.sigma_bs, strike=self.strike, maturity=self.maturity)
        if not self.sigma_bs > 0.0:
            raise ParameterError("sigma_bs must be positive")
        if not self.strike > 0.0:
            raise ParameterError("strike must be positive")
        if not self.maturity >= 0.0:
            raise ParameterError("maturity must be non-negative")


def norm_cdf(x: float) -> float:
    # erfc keeps full relative accuracy in the lower tail.
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _d1_d2(s: float, bp: BsParams) -> tuple[float, float]:
    vol = bp.sigma_bs * math.sqrt(bp.maturity)
    d1 = (math.log(s / bp.strike) + (bp.r + 0.5 * bp.sigma_bs**2) * bp.maturity) / vol
    return d1, d1 - vol


def _check_spot(s: float) -> None:
    if not (s > 0.0 and math.isfinite(s)):
        raise ParameterError(f"spot must be positive and finite, got {s!r}")


def bs_call_price(s: float, bp: BsParams) -> float:
    _check_spot(s)
    if bp.maturity == 0.0:
        return max(s - bp.strike, 0.0)
    d1, d2 = _d1_d2(s, bp)
    return s * norm_cdf(d1) - bp.strike * math.exp(-bp.r * bp.maturity) * norm_cdf(d2)


def bs_put_price(s: float, bp: BsParams) -> float:
    _check_spot(s)
    if bp.maturity == 0.0:
        return max(bp.strike - s, 0.0)
    d1, d2 = _d1_d2(s, bp)
    return bp.strike * math.exp(-bp.r * bp.maturity) * norm_cdf(-d2) - s * norm_cdf(-d1)


def put_call_parity_gap(s: float, bp: BsParams) -> float:
    forward = s - bp.strike * math.exp(-bp.r * bp.maturity)
    return abs(bs_call_price(s, bp) - bs_put_price(s, bp) - forward)


PriceFn = Callable[[float, BsParams], float]


def _stencil5(f: Callable[[float], float], x: float, h: float) -> tuple[float, float, float]:
    """Value, first and second derivative from the 5-point centered stencil."""
    fm2, fm1, f0, fp1, fp2 = (f(x + m * h) for m in (-2, -1, 0, 1, 2))
    d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
    d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)
    return f0, d1, d2


def _residual_points(price_fn: PriceFn, s_grid: list[float], bp: BsParams, bump: float) -> list[float]:
    dtau = bump * bp.maturity
    out = []
    for s in s_grid:
        c0, c_s, c_ss = _stencil5(lambda x: price_fn(x, bp), s, bump * s)
        _, c_tau, _ = _stencil5(lambda tau: price_fn(s, replace(bp, maturity=tau)), bp.maturity, dtau)
        out.append(-c_tau + 0.5 * bp.sigma_bs**2 * s * s * c_ss + bp.r * s * c_s - bp.r * c0)
    return out


def bs_pde_residual(price_fn: PriceFn, s_grid: Iterable[float], bp: BsParams, bump: float = 1e-3) -> float:
    """Max |PDE left-hand side| of ``price_fn`` over ``s_grid``.

    Derivatives are fourth-order centered differences with relative step
    ``bump`` in both S and maturity. As an internal accuracy check the
    residual is recomputed at ``bump/2``; disagreement beyond 1% of the price
    scale means the bump is too large for the grid.
    """
    grid = [float(s) for s in s_grid]
    if not grid or any(not s > 0.0 for s in grid):
        raise ParameterError("s_grid must be non-empty and strictly positive")
    if not 0.0 < bump < 0.1:
        raise ParameterError(f"bump must lie in (0, 0.1), got {bump!r}")
    if bp.maturity <= 0.0:
        raise ParameterError("the PDE residual needs a positive maturity")
    coarse = _residual_points(price_fn, grid, bp, bump)
    fine = _residual_points(price_fn, grid, bp, 0.5 * bump)
    scale = max(1.0, max(abs(price_fn(s, bp)) for s in grid))
    if max(abs(a - b) for a, b in zip(coarse, fine)) > 1e-2 * scale:
        raise ParameterError(f"bump {bump!r} is too large: residual not converged")
    return max(abs(v) for v in coarse)
