"""Momentum-space (Bogoliubov) picture of the periodic Ising chain.

Single-particle data at momentum k:

    eps_k    = J cos k + h          delta_k = J sin k
    Lambda_k = sqrt(eps_k^2 + delta_k^2)
    theta_k  = arctan(eps_k / delta_k)

Sums run over the even-fermion-parity momenta k = (2n+1) pi / L,
n = 0 .. L/2 - 1, each carrying one Bogoliubov mode pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import thermo
from .errors import DomainError, FitError
from .estimation import QFIValue, qfi_exact
from .optimize import Peak, maximize
from .spin_exact import MAX_SITES, SpinChainParams


@dataclass(frozen=True)
class MomentumGrid:
    L: int
    momenta: np.ndarray


@dataclass(frozen=True)
class DispersionPoint:
    k: np.ndarray
    eps: np.ndarray
    delta: np.ndarray
    lam: np.ndarray
    theta: np.ndarray
    dlambda_dJ: np.ndarray
    dtheta_dJ: np.ndarray


@dataclass(frozen=True)
class ScalingFit:
    sizes: tuple
    qfi_values: tuple
    exponent: float
    coefficient: float
    residual: float


def momentum_grid(L: int) -> MomentumGrid:
    if int(L) != L or L < 2 or L % 2:
        raise DomainError(f"momentum sums need an even L >= 2, got {L!r}")
    n = np.arange(L // 2)
    return MomentumGrid(int(L), (2 * n + 1) * np.pi / L)


def _check_couplings(J, h):
    if not (J > 0 and math.isfinite(J)):
        raise DomainError(f"J must be positive and finite, got {J!r}")
    if not (h >= 0 and math.isfinite(h)):
        raise DomainError(f"h must be non-negative and finite, got {h!r}")


def dispersion(J: float, h: float, k) -> DispersionPoint:
    """Dispersion, Bogoliubov angle and their exact J-derivatives."""
    _check_couplings(J, h)
    k = np.asarray(k, dtype=float)
    if np.any((k <= 0) | (k >= np.pi)):
        raise DomainError("momenta must lie strictly inside (0, pi)")
    eps = J * np.cos(k) + h
    delta = J * np.sin(k)
    lam2 = thermo.gap_squared(J, h, k)
    lam = np.sqrt(lam2)
    return DispersionPoint(
        k=k,
        eps=eps,
        delta=delta,
        lam=lam,
        theta=np.arctan(eps / delta),
        dlambda_dJ=(J + h * np.cos(k)) / lam,
        dtheta_dJ=-h * np.sin(k) / lam2,
    )


def qfi_zero_T_sum(L: int, J: float, h: float) -> QFIValue:
    """Ground-state QFI, sum_k h^2 sin^2 k / Lambda_k^4."""
    k = momentum_grid(L).momenta
    _check_couplings(J, h)
    lam2 = thermo.gap_squared(J, h, k)
    g = float(np.sum(h * h * np.sin(k) ** 2 / lam2**2))
    return QFIValue(g, 0.0, g)


def qfi_finite_T_sum(L: int, J: float, h: float, beta: float) -> QFIValue:
    """Thermal QFI from the free-fermion occupation statistics."""
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta!r}")
    if math.isinf(beta):
        return qfi_zero_T_sum(L, J, h)
    d = dispersion(J, h, momentum_grid(L).momenta)
    x = beta * d.lam
    classical = 0.25 * beta * beta * float(np.sum(d.dlambda_dJ**2 * thermo.sech2_half(x)))
    quantum = float(np.sum(thermo.quantum_weight(x) * d.dtheta_dJ**2))
    return QFIValue(classical + quantum, classical, quantum)


def euler_maclaurin_expansion(L: int, J: float, z: float) -> float:
    """Large-L expansion of the ground-state QFI at h = J + z/L.

        G = L^2 (1/(8 J^2) - z^2/(48 J^4)) - L/(8 J^2) + O(L^0, z^3)
    """
    return L * L * (1.0 / (8 * J * J) - z * z / (48 * J**4)) - L / (8 * J * J)


def qfi_value(L, J: float, h: float, beta: float = math.inf, backend: str = "auto") -> float:
    """QFI (or, for ``L = inf``, QFI per site) through the chosen backend.

    ``auto`` picks exact diagonalization up to the dense cap, momentum sums
    for longer even chains and quadrature for the infinite chain.
    """
    backend = resolve_backend(L, backend)
    if backend == "thermo":
        return thermo.gtilde_quadrature(J, h, beta).total
    if backend == "exact":
        return qfi_exact(SpinChainParams(int(L), J, h, beta)).value
    return qfi_finite_T_sum(int(L), J, h, beta).value


def resolve_backend(L, backend: str = "auto") -> str:
    if backend not in ("auto", "exact", "fermion", "thermo"):
        raise DomainError(f"unknown backend {backend!r}")
    if backend != "auto":
        return backend
    if math.isinf(L):
        return "thermo"
    if L <= MAX_SITES:
        return "exact"
    if L % 2 == 0:
        return "fermion"
    raise DomainError(f"odd L={L} is beyond the dense cap and has no momentum-sum route")


@dataclass(frozen=True)
class OptimalField:
    h_star: float
    qfi: float
    backend: str
    method: str


def optimal_field(L, J: float, beta: float = math.inf, backend: str = "auto",
                  n_grid: int = 400, h_max: float | None = None, width: float = 1e-8) -> OptimalField:
    """Field h* maximizing the QFI: 400-point grid on [0, 3J], then golden section.

    A maximum on the upper edge raises :class:`ScanRangeError`.
    """
    backend = resolve_backend(L, backend)
    hi = 3.0 * J if h_max is None else h_max

    def objective(h):
        return qfi_value(L, J, h, beta, backend)

    peak: Peak = maximize(objective, 0.0, hi, n_grid=n_grid, width=width)
    return OptimalField(peak.x, peak.value, backend, peak.method)


def pseudo_critical_field(L, J: float, beta: float = math.inf, backend: str = "auto") -> float:
    return optimal_field(L, J, beta, backend).h_star


def scaling_study(sizes, J: float, h: float, beta: float = math.inf) -> ScalingFit:
    """Least-squares fit of log G against log L over momentum-sum QFIs."""
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 3:
        raise FitError("a scaling fit needs at least three sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise FitError("sizes must be strictly increasing")
    values = tuple(qfi_finite_T_sum(L, J, h, beta).value for L in sizes)
    if min(values) <= 0:
        raise FitError("QFI vanishes; log-log fit undefined")
    x, y = np.log(sizes), np.log(values)
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    residual = float(math.sqrt(res[0] / len(sizes))) if len(res) else 0.0
    return ScalingFit(sizes, values, float(slope), float(math.exp(intercept)), residual)
