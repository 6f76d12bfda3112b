"""Deterministic CSV and binary-graymap (P5) export of wave fields."""

from __future__ import annotations

import io
import os
from typing import IO, Sequence

import numpy as np

from .model import WaveField

CSV_HEADER = "S,t,re,im,intensity"


class DegenerateNormalizationError(ValueError):
    pass


def format_number(x: float) -> str:
    """Shortest round-trip decimal; integral values drop the trailing ``.0``."""
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def _open_text(destination) -> tuple[IO[str], bool]:
    if isinstance(destination, (str, os.PathLike)):
        return open(destination, "w", encoding="ascii", newline="\n"), True
    return destination, False


def write_rows(header: str, rows: Sequence[Sequence[float]], destination) -> None:
    out, owned = _open_text(destination)
    try:
        out.write(header + "\n")
        for row in rows:
            out.write(",".join(format_number(v) for v in row) + "\n")
    finally:
        if owned:
            out.close()


def write_csv(field: WaveField, destination) -> None:
    """Write ``S,t,re,im,intensity`` rows, time-major then S order."""
    if field.samples.size == 0:
        raise ValueError("empty field")
    s = field.grid.s_values().tolist()
    ts = field.grid.t_values().tolist()
    re = field.samples.real.tolist()
    im = field.samples.imag.tolist()
    inten = field.intensity.tolist()
    out, owned = _open_text(destination)
    try:
        out.write(CSV_HEADER + "\n")
        for i, t in enumerate(ts):
            tt = format_number(t)
            for j, sv in enumerate(s):
                out.write(
                    f"{format_number(sv)},{tt},{format_number(re[i][j])},"
                    f"{format_number(im[i][j])},{format_number(inten[i][j])}\n"
                )
    finally:
        if owned:
            out.close()


def csv_text(field: WaveField) -> str:
    buf = io.StringIO()
    write_csv(field, buf)
    return buf.getvalue()


def intensity_range(field: WaveField, normalization: Sequence) -> tuple[float, float]:
    mode = normalization[0]
    if mode == "fixed":
        lo, hi = float(normalization[1]), float(normalization[2])
    elif mode == "global-minmax":
        inten = field.intensity
        lo, hi = float(inten.min()), float(inten.max())
        # Rounding noise on a constant-intensity field must not count as range.
        if hi - lo <= 1e-12 * max(abs(hi), 1.0):
            raise DegenerateNormalizationError(
                "intensity is constant over the field; use fixed normalization "
                "(render.normalization = fixed with render.lo / render.hi)"
            )
    else:
        raise ValueError(f"unknown normalization {mode!r}")
    if not hi > lo:
        raise DegenerateNormalizationError(f"normalization needs hi > lo (got lo={lo}, hi={hi})")
    return lo, hi


def render_heatmap(field: WaveField, normalization: Sequence = ("global-minmax",)) -> bytes:
    """Binary PGM of |psi|^2: width n_s, height n_t, first row at t_min.

    Pixels are ``floor(255*(I - lo)/(hi - lo) + 0.5)`` clamped to [0, 255].
    """
    lo, hi = intensity_range(field, normalization)
    scaled = np.floor(255.0 * (field.intensity - lo) / (hi - lo) + 0.5)
    pixels = np.clip(scaled, 0, 255).astype(np.uint8)
    n_t, n_s = pixels.shape
    return f"P5\n{n_s} {n_t}\n255\n".encode("ascii") + pixels.tobytes()


def read_pgm(data: bytes) -> np.ndarray:
    """Decode a P5 image written by :func:`render_heatmap`."""
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5" or parts[2] != b"255":
        raise ValueError("not an 8-bit P5 image")
    width, height = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(height, width)
