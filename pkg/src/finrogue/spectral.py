"""Fourier differentiation on the periodic S grid."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .model import is_power_of_two


def wavenumbers(n: int, length: float) -> np.ndarray:
    """Angular wavenumbers in numpy FFT order for ``n`` points on a period ``length``."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)


def check_spectral_size(n: int) -> None:
    if not is_power_of_two(n) or n < 8:
        raise ValueError(f"spectral grids need a power-of-two size >= 8, got {n}")


def second_derivative(f: np.ndarray, length: float) -> np.ndarray:
    """Spectral d^2/dS^2 of periodic samples along the last axis."""
    kappa = wavenumbers(f.shape[-1], length)
    return np.fft.ifft(-(kappa**2) * np.fft.fft(f, axis=-1), axis=-1)


def first_derivative(f: np.ndarray, length: float) -> np.ndarray:
    n = f.shape[-1]
    kappa = wavenumbers(n, length)
    if n % 2 == 0:
        kappa[n // 2] = 0.0  # Nyquist mode has no odd-derivative partner
    return np.fft.ifft(1j * kappa * np.fft.fft(f, axis=-1), axis=-1)


# Bernoulli polynomials B_0 .. B_4 on u in [0, 1).
_BERNOULLI = (
    lambda u: np.ones_like(u),
    lambda u: u - 0.5,
    lambda u: u * u - u + 1.0 / 6.0,
    lambda u: u * (u * (u - 1.5) + 0.5),
    lambda u: u * u * (u * (u - 2.0) + 1.0) - 1.0 / 30.0,
)


def second_derivative_corrected(f: np.ndarray, length: float, jumps: Sequence[complex]) -> np.ndarray:
    """Spectral d^2/dS^2 of a smooth but non-periodic row.

    ``jumps[m] = f^(m)(b) - f^(m)(a)`` across the period [a, b) for
    ``m = 0 .. len(jumps) - 1`` (at most four). A sum of periodic Bernoulli
    polynomials with the same jumps is subtracted before the FFT and its exact
    second derivative added back, leaving a remainder that is smooth to that
    order at the wrap point.
    """
    if len(jumps) > 4:
        raise ValueError("at most four derivative jumps are supported")
    n = f.shape[-1]
    u = np.arange(n) / n
    h = np.zeros(n, dtype=np.complex128)
    h_ss = np.zeros(n, dtype=np.complex128)
    for m, jump in enumerate(jumps):
        h += jump * length**m / math.factorial(m + 1) * _BERNOULLI[m + 1](u)
        if m >= 1:
            h_ss += jump * length ** (m - 2) / math.factorial(m - 1) * _BERNOULLI[m - 1](u)
    return second_derivative(f - h, length) + h_ss
