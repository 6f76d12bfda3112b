"""Closed-form plane-wave, one-rogon and two-rogon solutions.

All evaluators accept scalars or numpy arrays for ``s`` and ``t`` and
broadcast them. The rogon envelopes depend on (S, t) only through the
comoving coordinate ``xi = S - sigma*k*t`` and ``t``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, NamedTuple

import numpy as np

from .model import MarketParams, SpaceTimeGrid, WaveField, background_amplitude

Sampler = Callable[[MarketParams, "np.ndarray | float", "np.ndarray | float"], "np.ndarray | complex"]

R2_FLOOR = 1e-300


class DegenerateDenominatorError(ArithmeticError):
    """The two-rogon denominator R2 vanished (or went negative)."""


class PolynomialTriple(NamedTuple):
    p2: np.ndarray | float
    q2: np.ndarray | float
    r2: np.ndarray | float


class PeakStats(NamedTuple):
    max_intensity: float
    s_at: float
    t_at: float


def _unwrap(value):
    if isinstance(value, np.ndarray) and value.ndim == 0:
        return value[()]
    return value


def carrier_phase(p: MarketParams, s, t):
    return _unwrap(p.k * np.asarray(s, dtype=float) + 0.5 * p.sigma * (p.alpha**2 - p.k**2) * np.asarray(t, dtype=float))


def _carrier(p: MarketParams, s, t) -> np.ndarray:
    return np.exp(1j * carrier_phase(p, s, t))


def plane_wave(p: MarketParams, s, t):
    return _unwrap(background_amplitude(p) * _carrier(p, s, t))


def _scaled(p: MarketParams, s, t) -> tuple[np.ndarray, np.ndarray]:
    # X = alpha*xi and T = sigma*alpha^2*t make both envelopes parameter-free.
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    xi = s - p.sigma * p.k * t
    return p.alpha * xi, p.sigma * p.alpha**2 * t


def rogon1(p: MarketParams, s, t):
    x, tau = _scaled(p, s, t)
    bracket = 1.0 - 4.0 * (1.0 + 1j * tau) / (1.0 + 2.0 * x * x + tau * tau)
    return _unwrap(background_amplitude(p) * bracket * _carrier(p, s, t))


def _polynomials_scaled(x: np.ndarray, tau: np.ndarray) -> PolynomialTriple:
    # Horner form in x^2 with t^2-polynomial coefficients.
    x2 = x * x
    t2 = tau * tau
    p2 = 3 / 8 - 9 / 4 * t2 - 5 / 8 * t2 * t2 + x2 * (-3 / 2 - 3 / 2 * t2 + x2 * (-1 / 2))
    q2 = -0.5 * tau * (
        -15 / 4 + 1 / 2 * t2 + 1 / 4 * t2 * t2 + x2 * (-3 + t2 + x2)
    )
    r2 = (
        3 / 32
        + t2 * (33 / 32 + t2 * (9 / 32 + t2 * (1 / 96)))
        + x2 * (
            9 / 16 + t2 * (-3 / 8 + t2 * (1 / 16))
            + x2 * (1 / 8 + t2 * (1 / 8) + x2 * (1 / 12))
        )
    )
    return PolynomialTriple(p2, q2, r2)


def rogon2_polynomials(p: MarketParams, s, t) -> PolynomialTriple:
    """Values of the two-rogon polynomials P2, Q2, R2 at (s, t)."""
    x, tau = _scaled(p, s, t)
    return PolynomialTriple(*(_unwrap(np.asarray(v)) for v in _polynomials_scaled(x, tau)))


def rogon2(p: MarketParams, s, t):
    x, tau = _scaled(p, s, t)
    p2, q2, r2 = _polynomials_scaled(x, tau)
    if not np.all(r2 > R2_FLOOR):
        raise DegenerateDenominatorError(
            f"two-rogon denominator R2 <= {R2_FLOOR} (min {np.min(r2)!r})"
        )
    bracket = 1.0 + (p2 + 1j * q2) / r2
    return _unwrap(background_amplitude(p) * bracket * _carrier(p, s, t))


SOLUTIONS: dict[str, Sampler] = {
    "plane": plane_wave,
    "rogon1": rogon1,
    "rogon2": rogon2,
}


def eval_field(which: str, p: MarketParams, g: SpaceTimeGrid, workers: int = 1) -> WaveField:
    """Sample a closed-form solution on every grid point.

    Rows (fixed t) are evaluated independently, so the result is bitwise
    identical for any ``workers`` count.
    """
    try:
        sampler = SOLUTIONS[which]
    except KeyError:
        raise ValueError(f"unknown solution {which!r}; expected one of {sorted(SOLUTIONS)}") from None
    s = g.s_values()
    ts = g.t_values()

    def row(t: float) -> np.ndarray:
        return np.broadcast_to(np.asarray(sampler(p, s, t), dtype=np.complex128), s.shape)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, ts))
    else:
        rows = [row(t) for t in ts]
    return WaveField(grid=g, samples=np.stack(rows), params=p, label=which)


def peak_statistics(f: WaveField, rel_tie: float = 1e-13) -> PeakStats:
    """Grid maximum of |psi|^2; ties go to the smallest t, then smallest S.

    Samples within ``rel_tie`` of the maximum count as tied, so rounding noise
    on a constant-intensity field does not decide the location.
    """
    intensity = f.intensity
    if intensity.size == 0:
        raise ValueError("empty field")
    top = float(intensity.max())
    flat = int(np.argmax(intensity >= top * (1.0 - rel_tie)))
    i, j = np.unravel_index(flat, intensity.shape)
    return PeakStats(float(intensity[i, j]), float(f.grid.s_values()[j]), float(f.grid.t_values()[i]))
