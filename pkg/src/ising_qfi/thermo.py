"""QFI per site of the infinite chain at positive temperature.

    g1 = beta^2/(8 pi) int_0^pi (J + h cos k)^2 / (Lambda_k^2 cosh^2(beta Lambda_k / 2)) dk
    g2 = 1/(2 pi)      int_0^pi (1 - sech(beta Lambda_k)) h^2 sin^2 k / Lambda_k^4 dk

At large beta both integrands concentrate near k = pi, where the
dispersion has its minimum, so the integration range is pre-split there.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import AccuracyError, DomainError, RegimeError

ZETA3 = 1.2020569031595942
CATALAN = 0.9159655941772190

QUAD_ABS_TOL = 1e-10
QUAD_LIMIT = 1 << 12


@dataclass(frozen=True)
class QfiDensity:
    g1: float
    g2: float
    regime: str

    @property
    def total(self) -> float:
        return self.g1 + self.g2


def regime_of(J: float, h: float, beta: float) -> str:
    """Quantum-critical when temperature exceeds the gap |J - h|."""
    return "quantum-critical" if beta * abs(J - h) < 1.0 else "renormalized-classical"


def _validate(J, h, beta):
    if not (J > 0 and math.isfinite(J)):
        raise DomainError(f"J must be positive and finite, got {J!r}")
    if not (h >= 0 and math.isfinite(h)):
        raise DomainError(f"h must be non-negative and finite, got {h!r}")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta!r}")


def gap_squared(J, h, k):
    # (J cos k + h)^2 + (J sin k)^2 rewritten without cancellation near k = pi
    return (J - h) ** 2 + 4.0 * J * h * np.cos(0.5 * k) ** 2


def sech2_half(x):
    """sech^2(x/2) for x >= 0 without overflow."""
    e = np.exp(-x)
    return 4.0 * e / (1.0 + e) ** 2


def quantum_weight(x):
    """(cosh x - 1) / cosh x, computed as tanh(x/2) tanh(x)."""
    return np.tanh(0.5 * x) * np.tanh(x)


def classical_integrand(k, J, h, beta):
    lam2 = gap_squared(J, h, k)
    lam = np.sqrt(lam2)
    num = (J - h) + 2.0 * h * np.cos(0.5 * k) ** 2
    ratio = np.where(lam2 > 0, num**2 / np.where(lam2 > 0, lam2, 1.0), 0.0)
    return ratio * sech2_half(beta * lam)


def quantum_integrand(k, J, h, beta):
    lam2 = gap_squared(J, h, k)
    weight = 1.0 if math.isinf(beta) else quantum_weight(beta * np.sqrt(lam2))
    return weight * h * h * np.sin(k) ** 2 / lam2**2


def _breakpoints(J, h, beta):
    scale = abs(J - h) + (0.0 if math.isinf(beta) else 1.0 / beta)
    width = scale / math.sqrt(max(J * h, 1e-300))
    pts = [math.pi - c * width for c in (1.0, 10.0, 100.0)]
    return sorted(p for p in pts if 0.0 < p < math.pi)


def _integrate(fn, args, points, tol):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr = integrate.quad(
            fn, 0.0, math.pi, args=args, points=points or None,
            epsabs=tol, epsrel=1e-12, limit=QUAD_LIMIT, full_output=True,
        )[:2]
    if not math.isfinite(value) or abserr > max(tol, 1e-9 * abs(value)):
        raise AccuracyError(f"quadrature did not converge (error estimate {abserr:.3g})", achieved=abserr)
    return value


def gtilde_quadrature(J: float, h: float, beta: float, tol: float = QUAD_ABS_TOL) -> QfiDensity:
    """Per-site QFI (g1, g2) of the infinite chain by adaptive quadrature."""
    _validate(J, h, beta)
    points = _breakpoints(J, h, beta)
    if math.isinf(beta):
        g1 = 0.0
    else:
        pref1 = beta * beta / (8.0 * math.pi)
        g1 = pref1 * _integrate(classical_integrand, (J, h, beta), points, tol / pref1)
    g2 = _integrate(quantum_integrand, (J, h, beta), points, 2.0 * math.pi * tol) / (2.0 * math.pi)
    return QfiDensity(g1, g2, regime_of(J, h, beta))


def gtilde_asymptotic(J: float, h: float, beta: float) -> QfiDensity:
    """Quantum-critical asymptotics of (g1, g2).

    Valid for beta |J - h| < 0.2 and beta (J + h) > 10; outside that window
    a :class:`RegimeError` names the failed inequality.
    """
    _validate(J, h, beta)
    if not beta * abs(J - h) < 0.2:
        raise RegimeError(f"beta*|J-h| = {beta * abs(J - h):.4g} violates beta*|J-h| < 0.2")
    if not beta * (J + h) > 10.0:
        raise RegimeError(f"beta*(J+h) = {beta * (J + h):.4g} violates beta*(J+h) > 10")
    T = 1.0 / beta
    g1 = 9.0 * ZETA3 / (8.0 * math.pi) * T / (J * J * abs(J + h))
    g2 = CATALAN / math.pi**2 * abs(J + h) / (T * J * J) - 1.0 / (8.0 * J * J)
    return QfiDensity(g1, g2, "quantum-critical")


def critical_peak_density(J: float, beta: float) -> float:
    """Leading peak value (2 C / pi^2) / (T J) of the per-site QFI at h = J."""
    return 2.0 * CATALAN / math.pi**2 * beta / J


@dataclass(frozen=True)
class CuspScan:
    h_peak: float
    peak_value: float
    left_slope: float
    right_slope: float
    low_signal: bool

    @property
    def slope_jump(self) -> float:
        return self.left_slope - self.right_slope


def cusp_scan(J: float, beta: float, h_range=None, coarse: int = 200, fine_step: float = 1e-4,
              signal_floor: float = 1e-4) -> CuspScan:
    """Locate the maximum of the per-site QFI in h and its one-sided slopes.

    A coarse grid over ``h_range`` (default [J/2, 3J/2]) is followed by a
    grid of spacing ``fine_step`` around the best coarse point.
    """
    lo, hi = h_range if h_range is not None else (0.5 * J, 1.5 * J)
    if not lo < hi:
        raise DomainError(f"empty h range ({lo}, {hi})")

    def total(h):
        return gtilde_quadrature(J, h, beta).total

    xs = np.linspace(lo, hi, coarse + 1)
    vals = np.array([total(x) for x in xs])
    i = int(np.argmax(vals))
    step = xs[1] - xs[0]
    a, b = max(lo, xs[i] - 2 * step), min(hi, xs[i] + 2 * step)
    n = max(2, int(round((b - a) / fine_step)))
    fine = np.linspace(a, b, n + 1)
    fvals = np.array([total(x) for x in fine])
    j = int(np.argmax(fvals))
    d = fine[1] - fine[0]
    left = (fvals[j] - total(fine[j] - d)) / d
    right = (total(fine[j] + d) - fvals[j]) / d
    peak = float(fvals[j])
    return CuspScan(float(fine[j]), peak, float(left), float(right), peak < signal_floor)
