"""Symmetric logarithmic derivative, quantum Fisher information and friends.

Everything here works from a :class:`SpectralState` together with the exact
derivative ``dH`` of the Hamiltonian.  Because H is linear in J, the state
derivative follows from first-order perturbation theory with no step size:

    <a| d rho |b> = dH_ab (p_b - p_a) / (E_b - E_a)              (E_a != E_b)
    <a| d rho |b> = -beta p_a (dH_ab - delta_ab <dH>)            (E_a == E_b)

The second line is the degenerate limit of the divided difference, plus the
derivative of the partition function on the diagonal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, DomainError, StepSizeError
from .spin_exact import (
    SpinChainParams,
    SpectralState,
    d_hamiltonian_dJ,
    thermal_state,
)

SUPPORT_TOL = 1e-14
DEGENERATE_RTOL = 1e-10

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class SLDOperator:
    matrix: np.ndarray
    truncation_tol: float = SUPPORT_TOL


@dataclass(frozen=True)
class QFIValue:
    """Quantum Fisher information split into population and rotation terms."""

    value: float
    classical_part: float
    quantum_part: float

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class QSNRValue:
    value: float


def _degenerate_pairs(energies, rtol=DEGENERATE_RTOL):
    spread = energies[-1] - energies[0]
    gap = np.abs(energies[:, None] - energies[None, :])
    return gap <= rtol * spread, gap


def _check_dims(state, dH):
    if dH.shape != (state.dim, state.dim):
        raise DomainError(f"dH has shape {dH.shape}, state has dimension {state.dim}")


def state_derivative(state: SpectralState, dH: np.ndarray):
    """Return (d rho in the eigenbasis, mask of degenerate pairs).

    Raises :class:`DegeneracyError` when two degenerate levels carry
    different weights, which cannot happen for a genuine Gibbs state.
    """
    _check_dims(state, dH)
    E, p, beta = state.energies, state.weights, state.beta
    V = state.vectors
    dH_eig = V.conj().T @ dH @ V
    degenerate, gap = _degenerate_pairs(E)

    # Gibbs populations of levels split by less than the tolerance may
    # still differ by a factor exp(-beta gap); anything beyond that is
    # inconsistent input
    pmax = p.max()
    allowed = 1e-10 * pmax
    if not math.isinf(beta):
        allowed = allowed + 2.0 * np.abs(np.expm1(-beta * gap)) * np.maximum(p[:, None], p[None, :])
    mismatch = degenerate & (np.abs(p[:, None] - p[None, :]) > allowed)
    if np.any(mismatch):
        raise DegeneracyError("degenerate levels with unequal populations")

    # divided difference of the Boltzmann weights, evaluated from the
    # lower level so that expm1 never overflows
    lower = np.where(E[:, None] <= E[None, :], p[:, None], p[None, :])
    safe_gap = np.where(degenerate, 1.0, gap)
    if math.isinf(beta):
        # populations are 0 or shared equally across the ground space
        signed_gap = np.where(degenerate, 1.0, E[None, :] - E[:, None])
        split = (p[None, :] - p[:, None]) / signed_gap
        same = np.zeros_like(gap)
    else:
        split = lower * np.expm1(-beta * safe_gap) / safe_gap
        same = -beta * 0.5 * (p[:, None] + p[None, :])
    kernel = np.where(degenerate, same, split)
    drho = dH_eig * kernel
    if not math.isinf(beta):
        mean_dH = float(np.real(np.sum(p * np.diag(dH_eig))))
        drho[np.diag_indices_from(drho)] += beta * mean_dH * p
    return drho, degenerate


def sld_spectral(state: SpectralState, dH: np.ndarray, truncation_tol: float = SUPPORT_TOL) -> SLDOperator:
    """SLD from 2 (d rho)_nm / (p_n + p_m), zero where p_n + p_m < tol."""
    drho, _ = state_derivative(state, dH)
    p = state.weights
    denom = p[:, None] + p[None, :]
    keep = denom >= truncation_tol
    lam = np.where(keep, 2.0 * drho / np.where(keep, denom, 1.0), 0.0)
    V = state.vectors
    matrix = V @ lam @ V.conj().T
    return SLDOperator(0.5 * (matrix + matrix.conj().T), truncation_tol)


def qfi_spectral(state: SpectralState, dH: np.ndarray, truncation_tol: float = SUPPORT_TOL) -> QFIValue:
    """QFI = sum_nm 2 |(d rho)_nm|^2 / (p_n + p_m).

    Pairs inside a degenerate level make up the population (classical) term,
    all other pairs the basis-rotation (quantum) term.
    """
    drho, degenerate = state_derivative(state, dH)
    p = state.weights
    denom = p[:, None] + p[None, :]
    keep = denom >= truncation_tol
    terms = np.where(keep, 2.0 * np.abs(drho) ** 2 / np.where(keep, denom, 1.0), 0.0)
    classical = float(np.sum(terms[degenerate]))
    quantum = float(np.sum(terms[~degenerate]))
    return QFIValue(classical + quantum, classical, quantum)


def qfi_pure_state(energies: np.ndarray, vectors: np.ndarray, dH: np.ndarray) -> QFIValue:
    """Ground-state QFI, 4 sum_{n>0} |<n|dH|0>|^2 / (E_n - E_0)^2."""
    spread = energies[-1] - energies[0]
    if len(energies) > 1 and energies[1] - energies[0] <= DEGENERATE_RTOL * spread:
        raise DegeneracyError("ground state is degenerate; use a finite beta")
    column = vectors.conj().T @ (dH @ vectors[:, 0])
    g = 4.0 * np.sum(np.abs(column[1:]) ** 2 / (energies[1:] - energies[0]) ** 2)
    return QFIValue(float(g), 0.0, float(g))


def qfi_exact(params: SpinChainParams) -> QFIValue:
    """QFI of the Gibbs state labelled by ``params`` via exact diagonalization."""
    state = thermal_state(params)
    return qfi_spectral(state, d_hamiltonian_dJ(params))


def sld_exact(params: SpinChainParams) -> tuple[SLDOperator, SpectralState]:
    state = thermal_state(params)
    return sld_spectral(state, d_hamiltonian_dJ(params)), state


def qsnr(J: float, G: QFIValue | float) -> QSNRValue:
    if not J > 0:
        raise DomainError(f"J must be positive, got {J!r}")
    return QSNRValue(J * J * float(G))


def pauli_vector(v) -> np.ndarray:
    return v[0] * PAULI["X"] + v[1] * PAULI["Y"] + v[2] * PAULI["Z"]


def single_qubit_sld(a, da) -> SLDOperator:
    """SLD of rho = exp(-a.sigma)/Z for a J-dependent Bloch vector ``a``.

    With a = |a|, n = a/|a|:

        Lambda = -tanh(a) (dn.sigma) - (da_par) (n.sigma) - tanh(a) (da_par) 1

    where da_par = n.da is the derivative of the modulus.  The last term keeps
    Tr[rho Lambda] = 0.
    """
    a = np.asarray(a, dtype=float)
    da = np.asarray(da, dtype=float)
    norm = float(np.linalg.norm(a))
    if norm < 1e-14:
        raise DomainError("Bloch vector too short to define a direction")
    n = a / norm
    d_norm = float(n @ da)
    dn = (da - n * d_norm) / norm
    t = math.tanh(norm)
    lam = -t * pauli_vector(dn) - d_norm * pauli_vector(n) - t * d_norm * PAULI["I"]
    return SLDOperator(lam)


def two_qubit_block_sld(J: float, h: float, beta: float) -> np.ndarray:
    """Assemble the L=2 SLD from its two single-qubit blocks.

    In the sz basis the L=2 Gibbs state splits into the span of
    {|00>, |11>} with exponent a = -2 beta (J, 0, h) and the span of
    {|01>, |10>} with a = -2 beta (J, 0, 0).  The block populations
    w_i = Z_i / Z add d log w_i times the identity on each block.
    """
    blocks = [((0, 3), np.array([J, 0.0, h])), ((1, 2), np.array([J, 0.0, 0.0]))]
    da = -2.0 * beta * np.array([1.0, 0.0, 0.0])
    exponents = [-2.0 * beta * field for _, field in blocks]
    norms = np.array([np.linalg.norm(a) for a in exponents])
    # log(2 cosh x) up to the shared log 2
    log_z = norms + np.log1p(np.exp(-2.0 * norms))
    d_log_z = np.array([math.tanh(n) * float(a @ da) / n for a, n in zip(exponents, norms)])
    w = np.exp(log_z - log_z.max())
    w /= w.sum()
    mean = float(w @ d_log_z)
    out = np.zeros((4, 4), dtype=complex)
    for (idx, _), a, dlz in zip(blocks, exponents, d_log_z):
        sub = single_qubit_sld(a, da).matrix + (dlz - mean) * PAULI["I"]
        out[np.ix_(idx, idx)] = sub
    return out


def two_qubit_sld_zero_T(J: float, h: float) -> np.ndarray:
    """Closed-form zero-temperature SLD of the two-site chain."""
    X, Y, Z, I = PAULI["X"], PAULI["Y"], PAULI["Z"], PAULI["I"]
    pref = h / (2.0 * (J * J + h * h) ** 1.5)
    return pref * (h * (np.kron(X, X) - np.kron(Y, Y)) - J * (np.kron(Z, I) + np.kron(I, Z)))


def sld_diagnostics(sld: SLDOperator, state: SpectralState, dH: np.ndarray) -> dict:
    """Hermiticity defect, Tr[rho L], Tr[rho L^2] and the SLD-equation residual."""
    rho = state.density_matrix()
    lam = sld.matrix
    drho_eig, _ = state_derivative(state, dH)
    V = state.vectors
    drho = V @ drho_eig @ V.conj().T
    residual = drho - 0.5 * (lam @ rho + rho @ lam)
    return {
        "hermiticity_defect": float(np.max(np.abs(lam - lam.conj().T))),
        "trace_rho_sld": float(np.real(np.trace(rho @ lam))),
        "trace_rho_sld2": float(np.real(np.trace(rho @ lam @ lam))),
        "sld_equation_residual": float(np.max(np.abs(residual))),
    }


def _sqrt_psd(rho):
    w, v = np.linalg.eigh(rho)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def bures_distance_sq(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Squared Bures distance 2 (1 - sqrt F).

    Evaluated as min_U ||sqrt(rho) - sqrt(sigma) U||_F^2 with U from the
    polar decomposition, which avoids the cancellation in 1 - sqrt F for
    nearby states.
    """
    a, b = _sqrt_psd(rho), _sqrt_psd(sigma)
    w, _, xh = np.linalg.svd(b.conj().T @ a)
    u = w @ xh
    return float(np.linalg.norm(a - b @ u) ** 2)


def uhlmann_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """F = (Tr |sqrt(rho) sqrt(sigma)|)^2."""
    a, b = _sqrt_psd(rho), _sqrt_psd(sigma)
    return float(np.sum(np.linalg.svd(a @ b, compute_uv=False)) ** 2)


def bures_distance_fd_oracle(params: SpinChainParams, dJ: float | None = None) -> float:
    """Finite-difference QFI estimate 8 (1 - sqrt F) / dJ^2 between J and J + dJ."""
    if dJ is None:
        dJ = 1e-5 * params.J
    if abs(dJ) < 1e-9 * params.J:
        raise StepSizeError(f"step dJ={dJ!r} is below float resolution for J={params.J!r}")
    rho = thermal_state(params).density_matrix()
    sigma = thermal_state(params.replace(J=params.J + dJ)).density_matrix()
    return 4.0 * bures_distance_sq(rho, sigma) / dJ**2

