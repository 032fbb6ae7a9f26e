"""One-dimensional peak search: coarse grid, golden section, cusp fallback."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ScanRangeError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Peak:
    x: float
    value: float
    method: str


def golden_section_max(f, lo, hi, width=1e-8, f_lo=None, f_hi=None):
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def slope_sign_bisection(f, lo, hi, width=1e-8):
    """Locate a cusp maximum as the sign change of the forward slope."""
    step = max(width / 4.0, 1e-12)

    def rising(x):
        return f(x + step) > f(x)

    a, b = lo, hi
    while b - a > width:
        m = 0.5 * (a + b)
        if rising(m):
            a = m
        else:
            b = m
    x = 0.5 * (a + b)
    return x, f(x)


def maximize(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    n_grid: int = 400,
    width: float = 1e-8,
    allow_lower_edge: bool = True,
) -> Peak:
    """Maximize ``f`` on [lo, hi].

    A maximum on the upper grid edge means the scan range is too small and
    raises :class:`ScanRangeError`.  ``lo`` is usually a physical boundary
    (h = 0), so a maximum there is accepted unless ``allow_lower_edge`` is
    false.
    """
    xs = np.linspace(lo, hi, n_grid + 1)
    values = np.array([f(x) for x in xs])
    if not np.all(np.isfinite(values)):
        raise ScanRangeError("objective is not finite on the scan grid")
    i = int(np.argmax(values))
    if i == len(xs) - 1:
        raise ScanRangeError(f"maximum sits on the upper scan edge {hi:g}")
    if i == 0:
        if not allow_lower_edge:
            raise ScanRangeError(f"maximum sits on the lower scan edge {lo:g}")
        x, v = golden_section_max(f, xs[0], xs[1], width)
        if v < values[0]:
            return Peak(float(xs[0]), float(values[0]), "edge")
        return Peak(float(x), float(v), "golden")
    a, b = xs[i - 1], xs[i + 1]
    x, v = golden_section_max(f, a, b, width)
    if v >= values[i]:
        return Peak(float(x), float(v), "golden")
    x, v = slope_sign_bisection(f, a, b, width)
    if v >= values[i]:
        return Peak(float(x), float(v), "bisection")
    return Peak(float(xs[i]), float(values[i]), "grid")
