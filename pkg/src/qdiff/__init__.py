"""Numerics for the quantum diffusion semigroup on continuous-variable systems.

Gaussian states evolve exactly in covariance form, single-mode mixtures evolve
on a sampled phase-space grid, and a truncated Fock basis provides a
brute-force oracle. Verifiers check the functional inequalities of the flow.
"""

from .errors import EXIT_CODES, QDiffError
from .functionals import (
    dirichlet_form,
    entropy,
    entropy_power,
    fisher_J,
    hs_overlap,
    profile,
    purity,
    relative_entropy,
)
from .gaussian import GaussianState, symplectic_eigenvalues, validate, williamson
from .semigroup import evolve_gaussian

__all__ = [
    "EXIT_CODES",
    "GaussianState",
    "QDiffError",
    "dirichlet_form",
    "entropy",
    "entropy_power",
    "evolve_gaussian",
    "fisher_J",
    "hs_overlap",
    "profile",
    "purity",
    "relative_entropy",
    "symplectic_eigenvalues",
    "validate",
    "williamson",
]
__version__ = "0.1.0"
