"""PDE residual checks for candidate solutions.

The residual of a pointwise sampler psi(S, t) is

    R = i psi_t + (sigma/2) psi_SS + beta |psi|^2 psi

with psi_SS from a Fourier second derivative along each S row and psi_t from
a five-point centered difference of the sampler itself, so the time step used
for checking is independent of any plotting grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import spectral
from .model import MarketParams, SpaceTimeGrid
from .rogons import Sampler


@dataclass(frozen=True)
class ResidualReport:
    linf: float
    l2: float
    n_s: int
    n_t: int
    dt_probe: float
    # largest |f(b) - f(a)| and |f'(b) - f'(a)| across the S period, over rows
    value_mismatch: float = 0.0
    slope_mismatch: float = 0.0
    boundary_correction: bool = True


def admissible_k(k: float, length: float) -> float:
    """Nearest wavenumber ``2*pi*m/length`` whose carrier is periodic on the domain."""
    step = 2.0 * np.pi / length
    return round(k / step) * step


def snap_k(p: MarketParams, length: float) -> MarketParams:
    return replace(p, k=admissible_k(p.k, length))


def _time_derivative(sampler: Sampler, p: MarketParams, s: np.ndarray, t: float, h: float) -> np.ndarray:
    fm2 = sampler(p, s, t - 2 * h)
    fm1 = sampler(p, s, t - h)
    fp1 = sampler(p, s, t + h)
    fp2 = sampler(p, s, t + 2 * h)
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)


def _endpoint_derivatives(sampler: Sampler, p: MarketParams, s: float, t: float, h: float) -> np.ndarray:
    """Value and first three S-derivatives at ``s`` by centered differences."""
    pts = s + h * np.arange(-2.0, 3.0)
    fm2, fm1, f0, fp1, fp2 = np.asarray(sampler(p, pts, t), dtype=np.complex128)
    return np.array(
        [
            f0,
            (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h),
            (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h),
            (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h**3),
        ]
    )


def boundary_jumps(sampler: Sampler, p: MarketParams, g: SpaceTimeGrid, t: float) -> np.ndarray:
    """``f^(m)(s_max) - f^(m)(s_min)`` for m = 0..3 at time ``t``."""
    right = _endpoint_derivatives(sampler, p, g.s_max, t, g.ds)
    left = _endpoint_derivatives(sampler, p, g.s_min, t, g.ds)
    return right - left


def _row_residual(
    sampler: Sampler, p: MarketParams, g: SpaceTimeGrid, t: float, dt_probe: float, corrected: bool
) -> tuple[np.ndarray, np.ndarray]:
    s = g.s_values()
    f = np.broadcast_to(np.asarray(sampler(p, s, t), dtype=np.complex128), s.shape)
    jumps = boundary_jumps(sampler, p, g, t)
    if corrected:
        f_ss = spectral.second_derivative_corrected(f, g.length, jumps)
    else:
        f_ss = spectral.second_derivative(f, g.length)
    f_t = _time_derivative(sampler, p, s, t, dt_probe)
    r = 1j * f_t + 0.5 * p.sigma * f_ss + p.beta * (f.real**2 + f.imag**2) * f
    return r, jumps


def residual_at(
    sampler: Sampler,
    p: MarketParams,
    g: SpaceTimeGrid,
    dt_probe: float,
    boundary_correction: bool = True,
) -> ResidualReport:
    """Evaluate the PDE residual of ``sampler`` on every time row of ``g``.

    The analytic rogons approach their background only algebraically, so on a
    finite period the samples carry small value/derivative jumps at the wrap
    point. With ``boundary_correction`` (the default) jumps up to third order
    are measured from the sampler and removed before Fourier differentiation.
    Without it, the residual next to the wrap point measures those jumps rather
    than the formula.

    Norms: ``linf = max |R|``; ``l2 = max over rows of sqrt(dS * sum |R|^2)``.
    """
    spectral.check_spectral_size(g.n_s)
    if not dt_probe > 0.0 or not math.isfinite(dt_probe):
        raise ValueError(f"dt_probe must be positive, got {dt_probe!r}")
    linf = l2 = vmis = smis = 0.0
    for t in g.t_values():
        r, jumps = _row_residual(sampler, p, g, float(t), dt_probe, boundary_correction)
        mag = np.abs(r)
        linf = max(linf, float(mag.max()))
        l2 = max(l2, math.sqrt(g.ds * float(np.sum(mag * mag))))
        vmis = max(vmis, float(abs(jumps[0])))
        smis = max(smis, float(abs(jumps[1])))
    return ResidualReport(
        linf=linf,
        l2=l2,
        n_s=g.n_s,
        n_t=g.n_t,
        dt_probe=dt_probe,
        value_mismatch=vmis,
        slope_mismatch=smis,
        boundary_correction=boundary_correction,
    )


def convergence_study(
    sampler: Sampler, p: MarketParams, g: SpaceTimeGrid, dt_probes: Sequence[float]
) -> list[ResidualReport]:
    probes = list(dt_probes)
    if len(probes) < 2:
        raise ValueError("convergence_study needs at least two dt_probes")
    if any(b >= a for a, b in zip(probes, probes[1:])):
        raise ValueError("dt_probes must be strictly decreasing")
    return [residual_at(sampler, p, g, h) for h in probes]


def shifted(sampler: Sampler, t0: float) -> Sampler:
    """The time-translated sampler psi(S, t + t0)."""

    def wrapped(p, s, t):
        return sampler(p, s, np.asarray(t, dtype=float) + t0)

    return wrapped


def time_shift_check(
    sampler: Sampler, p: MarketParams, g: SpaceTimeGrid, t0: float, dt_probe: float = 1e-3
) -> ResidualReport:
    return residual_at(shifted(sampler, t0), p, g, dt_probe)
