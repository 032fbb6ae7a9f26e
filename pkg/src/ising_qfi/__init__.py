"""Estimation of the Ising coupling J from thermal states of the transverse-field chain."""
__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    CapacityError,
    ConfigError,
    DegeneracyError,
    DomainError,
    IsingQFIError,
    NumericalError,
)
from .spin_exact import SpinChainParams, build_hamiltonian, thermal_state
from .estimation import qfi_exact, qfi_pure_state, qfi_spectral, sld_spectral
from .fermions import optimal_field, qfi_finite_T_sum, qfi_value, qfi_zero_T_sum, scaling_study
from .thermo import cusp_scan, gtilde_asymptotic, gtilde_quadrature
from .measurement import build_povm, classical_fisher, outcome_distribution
from .bayes import bayes_campaign, posterior

__all__ = [
    "AccuracyError", "CapacityError", "ConfigError", "DegeneracyError", "DomainError",
    "IsingQFIError", "NumericalError", "SpinChainParams", "build_hamiltonian",
    "thermal_state", "qfi_exact", "qfi_pure_state", "qfi_spectral", "sld_spectral",
    "optimal_field", "qfi_finite_T_sum", "qfi_value", "qfi_zero_T_sum", "scaling_study",
    "cusp_scan", "gtilde_asymptotic", "gtilde_quadrature", "build_povm",
    "classical_fisher", "outcome_distribution", "bayes_campaign", "posterior",
]
