"""Dense exact diagonalization of the periodic transverse-field Ising chain.

    H = -J sum_k sx_k sx_{k+1} - h sum_k sz_k,   sx_{L+1} = sx_1

Basis states are labelled by integers whose binary digits are the sz
eigenvalues, site 1 being the most significant bit; bit value 0 means
sz = +1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError

MAX_SITES = 12
HERMITIAN_TOL = 1e-12
DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True)
class SpinChainParams:
    """Coordinates (L, J, h, beta) of a Gibbs state; ``beta=math.inf`` is T = 0."""

    L: int
    J: float
    h: float
    beta: float = math.inf

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 2:
            raise DomainError(f"L must be an integer >= 2, got {self.L!r}")
        if not (self.J > 0 and math.isfinite(self.J)):
            raise DomainError(f"J must be positive and finite, got {self.J!r}")
        if not (self.h >= 0 and math.isfinite(self.h)):
            raise DomainError(f"h must be non-negative and finite, got {self.h!r}")
        if not self.beta > 0:
            raise DomainError(f"beta must be positive (inf for T=0), got {self.beta!r}")

    @property
    def zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    def replace(self, **changes) -> "SpinChainParams":
        fields = dict(L=self.L, J=self.J, h=self.h, beta=self.beta)
        fields.update(changes)
        return SpinChainParams(**fields)


@dataclass(frozen=True)
class SpectralState:
    """Gibbs state in diagonal form.

    ``vectors[:, n]`` is the eigenvector with energy ``energies[n]``;
    ``weights`` are the thermal populations.  ``log_partition`` is
    log Z (kept in log form so that large beta cannot overflow).
    """

    energies: np.ndarray
    vectors: np.ndarray
    weights: np.ndarray
    log_partition: float
    beta: float

    @property
    def partition(self) -> float:
        return math.exp(self.log_partition)

    @property
    def dim(self) -> int:
        return len(self.energies)

    def density_matrix(self) -> np.ndarray:
        return (self.vectors * self.weights) @ self.vectors.conj().T


def check_sites(L: int, max_sites: int = MAX_SITES) -> None:
    if L > max_sites:
        raise CapacityError(f"L={L} exceeds the dense diagonalization cap of {max_sites} sites")


def _bonds(L):
    # PBC; for L=2 the bond (1,2) appears twice
    return [(k, (k + 1) % L) for k in range(L)]


def ising_terms(L: int, max_sites: int = MAX_SITES):
    """Return (bond_sum, field_sum) = (sum sx_k sx_{k+1}, sum sz_k) as dense real matrices."""
    check_sites(L, max_sites)
    dim = 1 << L
    idx = np.arange(dim)
    bonds = np.zeros((dim, dim))
    for a, b in _bonds(L):
        flip = (1 << (L - 1 - a)) | (1 << (L - 1 - b))
        bonds[idx ^ flip, idx] += 1.0
    ones = np.array([bin(i).count("1") for i in range(dim)])
    field = np.diag((L - 2 * ones).astype(float))
    return bonds, field


def build_hamiltonian(params: SpinChainParams, max_sites: int = MAX_SITES) -> np.ndarray:
    bonds, field = ising_terms(params.L, max_sites)
    return -params.J * bonds - params.h * field


def d_hamiltonian_dJ(params: SpinChainParams, max_sites: int = MAX_SITES) -> np.ndarray:
    """Exact J-derivative of the Hamiltonian, -sum_k sx_k sx_{k+1}."""
    bonds, _ = ising_terms(params.L, max_sites)
    return -bonds


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    defect = hermiticity_defect(m)
    if defect > tol:
        raise DomainError(f"operator is not Hermitian (defect {defect:.3g})")


def ground_space_mask(energies: np.ndarray, rtol: float = DEGENERACY_RTOL) -> np.ndarray:
    spread = energies[-1] - energies[0]
    return energies <= energies[0] + rtol * spread


def gibbs_state(H: np.ndarray, beta: float) -> SpectralState:
    """Diagonalize ``H`` and attach Gibbs weights exp(-beta E_n)/Z.

    At ``beta = inf`` the weight is spread uniformly over the ground space,
    where levels within ``1e-9`` of the spectral range count as degenerate.
    """
    check_hermitian(H)
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta!r}")
    energies, vectors = np.linalg.eigh(H)
    if math.isinf(beta):
        weights = ground_space_mask(energies).astype(float)
        degeneracy = weights.sum()
        weights /= degeneracy
        if energies[0] == 0:
            log_z = math.log(degeneracy)
        else:
            log_z = math.inf if energies[0] < 0 else -math.inf
    else:
        boltz = np.exp(-beta * (energies - energies[0]))
        s = boltz.sum()
        weights = boltz / s
        log_z = -beta * energies[0] + math.log(s)
    return SpectralState(energies, vectors, weights, log_z, beta)


def thermal_state(params: SpinChainParams, max_sites: int = MAX_SITES) -> SpectralState:
    return gibbs_state(build_hamiltonian(params, max_sites), params.beta)
