"""Total-magnetization measurement on a thermal chain.

M_z = (1/L) sum_i sz_i has outcomes m_j = (L - 2j)/L, j = 0..L, where j is
the number of down spins; its projectors are diagonal in the sz basis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDistributionError, DomainError
from .estimation import qfi_exact, state_derivative
from .optimize import maximize
from .spin_exact import (
    DEGENERACY_RTOL,
    MAX_SITES,
    SpinChainParams,
    check_sites,
    d_hamiltonian_dJ,
    ising_terms,
    thermal_state,
)

PROB_FLOOR = 1e-15


@dataclass(frozen=True)
class MagnetizationPOVM:
    L: int
    outcomes: tuple
    sector: np.ndarray  # sector[i] = index of the outcome of basis state i

    @property
    def projectors(self) -> list[np.ndarray]:
        return [np.diag((self.sector == j).astype(float)) for j in range(len(self.outcomes))]

    @property
    def ranks(self) -> tuple:
        return tuple(int(c) for c in np.bincount(self.sector, minlength=len(self.outcomes)))

    def coarse_grain(self, diagonal: np.ndarray) -> np.ndarray:
        """Sum a basis-state distribution (last axis) into outcome sectors."""
        out = np.zeros(diagonal.shape[:-1] + (len(self.outcomes),))
        for j in range(len(self.outcomes)):
            out[..., j] = diagonal[..., self.sector == j].sum(axis=-1)
        return out


@dataclass(frozen=True)
class OutcomeDistribution:
    outcomes: tuple
    probs: np.ndarray

    def as_dict(self) -> dict:
        return dict(zip(self.outcomes, map(float, self.probs)))


def build_povm(L: int, max_sites: int = MAX_SITES) -> MagnetizationPOVM:
    check_sites(L, max_sites)
    down = np.array([bin(i).count("1") for i in range(1 << L)])
    outcomes = tuple((L - 2 * j) / L for j in range(L + 1))
    return MagnetizationPOVM(L, outcomes, down)


def _normalize(probs: np.ndarray) -> np.ndarray:
    probs = np.clip(probs, 0.0, 1.0)
    total = probs.sum(axis=-1, keepdims=True)
    if np.any(np.abs(total - 1.0) > 1e-14):
        probs = probs / total
    return probs


def outcome_distribution(params: SpinChainParams, povm: MagnetizationPOVM | None = None) -> OutcomeDistribution:
    """p(m|J) = Tr[rho P_m]."""
    povm = povm or build_povm(params.L)
    state = thermal_state(params)
    diag = (np.abs(state.vectors) ** 2) @ state.weights
    return OutcomeDistribution(povm.outcomes, _normalize(povm.coarse_grain(diag)))


def two_site_probabilities(J: float, h: float, beta: float) -> dict:
    """Closed-form p(m|J) for L = 2, keyed by outcome m in {1, 0, -1}."""
    r = math.hypot(J, h)
    cj, cr = math.cosh(2 * beta * J), math.cosh(2 * beta * r)
    t = math.tanh(2 * beta * r)
    base = cr / (2 * (cj + cr))
    return {1.0: base * (1 + h / r * t), 0.0: cj / (cj + cr), -1.0: base * (1 - h / r * t)}


def _probability_derivative(params: SpinChainParams, povm: MagnetizationPOVM):
    state = thermal_state(params)
    drho_eig, _ = state_derivative(state, d_hamiltonian_dJ(params))
    V = state.vectors
    diag = (np.abs(V) ** 2) @ state.weights
    ddiag = np.real(np.einsum("ia,ab,ib->i", V.conj(), drho_eig, V))
    return povm.coarse_grain(diag), povm.coarse_grain(ddiag)


def classical_fisher(params: SpinChainParams, povm: MagnetizationPOVM | None = None,
                     mode: str = "exact", step: float = 1e-6) -> float:
    """Fisher information of the magnetization, sum_m (d_J p_m)^2 / p_m.

    ``mode="exact"`` differentiates the state analytically; ``mode="fd"``
    uses central differences of the probabilities and exists for testing.
    """
    povm = povm or build_povm(params.L)
    if mode == "exact":
        p, dp = _probability_derivative(params, povm)
    elif mode == "fd":
        dJ = step * params.J
        p = outcome_distribution(params, povm).probs
        plus = outcome_distribution(params.replace(J=params.J + dJ), povm).probs
        minus = outcome_distribution(params.replace(J=params.J - dJ), povm).probs
        dp = (plus - minus) / (2 * dJ)
    else:
        raise DomainError(f"unknown derivative mode {mode!r}")
    used = p > PROB_FLOOR
    if not np.any(used):
        raise DegenerateDistributionError("every outcome probability is below the floor")
    return float(np.sum(dp[used] ** 2 / p[used]))


def magnetization_table(L: int, h: float, beta: float, J_values, povm: MagnetizationPOVM | None = None) -> np.ndarray:
    """p(m|J) for many J at once; rows follow ``J_values``, columns the outcomes."""
    povm = povm or build_povm(L)
    J_values = np.asarray(J_values, dtype=float)
    if np.any(J_values <= 0):
        raise DomainError("J values must be positive")
    bonds, field = ising_terms(L)
    H = -J_values[:, None, None] * bonds - h * field
    E, V = np.linalg.eigh(H)
    if math.isinf(beta):
        spread = E[:, -1:] - E[:, :1]
        w = (E <= E[:, :1] + DEGENERACY_RTOL * spread).astype(float)
    else:
        w = np.exp(-beta * (E - E[:, :1]))
    w /= w.sum(axis=1, keepdims=True)
    diag = np.einsum("kin,kn->ki", V**2, w)
    return _normalize(povm.coarse_grain(diag))


@dataclass(frozen=True)
class EfficiencyRow:
    L: int
    beta: float
    J: float
    h_tilde: float
    F_tilde: float
    h_star: float
    G_star: float
    ratio: float
    delta_J: float


def optimal_fisher_field(L: int, J: float, beta: float, n_grid: int = 200):
    """Field h~ maximizing the magnetization Fisher information."""
    povm = build_povm(L)
    peak = maximize(lambda h: classical_fisher(SpinChainParams(L, J, h, beta), povm), 0.0, 3.0 * J, n_grid=n_grid)
    return peak.x, peak.value


def optimal_qfi_field(L: int, J: float, beta: float, n_grid: int = 200):
    peak = maximize(lambda h: qfi_exact(SpinChainParams(L, J, h, beta)).value, 0.0, 3.0 * J, n_grid=n_grid)
    return peak.x, peak.value


def delta_ratio(L: int, J: float, h: float, beta: float) -> float:
    """F_J(beta, J, h) / F_J(inf, J, h)."""
    povm = build_povm(L)
    cold = classical_fisher(SpinChainParams(L, J, h, math.inf), povm)
    warm = classical_fisher(SpinChainParams(L, J, h, beta), povm)
    return warm / cold


def efficiency_report(L: int, beta: float, J_list, n_grid: int = 200) -> list[EfficiencyRow]:
    """Per J: h~ = argmax F_J, h* = argmax G_J, F_J(h~)/G_J(h*) and delta_J at h~."""
    rows = []
    for J in J_list:
        h_tilde, F = optimal_fisher_field(L, J, beta, n_grid)
        h_star, G = optimal_qfi_field(L, J, beta, n_grid)
        delta = delta_ratio(L, J, h_tilde, beta) if h_tilde > 0 else float("nan")
        rows.append(EfficiencyRow(L, beta, float(J), h_tilde, F, h_star, G, F / G, delta))
    return rows
