"""Truncated single-mode Fock-basis oracle.

Used to cross-check the Gaussian closed forms by brute force: states are built
as explicit density matrices and every quantity comes from an eigendecomposition.

Phase-space convention: a mean ``(q, p)`` corresponds to the coherent amplitude
``alpha = (q + i p) / sqrt(2)`` since ``a = (Q + i P) / sqrt(2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import DimensionMismatch, SupportViolation, TailMassTooLarge, ValidationError
from .gaussian import GaussianState, validate

DEFAULT_DIM = 200
TAIL_TOL = 1e-12
SUPPORT_FLOOR = 1e-14
_PAD = 120


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    matrix: np.ndarray
    tail_mass: float = 0.0

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _accept(m: np.ndarray, tail_mass: float) -> FockDensityMatrix:
    if tail_mass >= TAIL_TOL:
        raise TailMassTooLarge(
            f"truncation discards probability {tail_mass:.2e} >= {TAIL_TOL:g}; increase dim"
        )
    m = 0.5 * (m + m.conj().T)
    return FockDensityMatrix(m / np.trace(m).real, float(tail_mass))


def ladder(dim: int) -> np.ndarray:
    """Truncated annihilation operator."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def quadratures(dim: int):
    """Truncated ``Q = (a + a^dag)/sqrt(2)`` and ``P = (a - a^dag)/(i sqrt(2))``."""
    a = ladder(dim)
    return (a + a.T) / np.sqrt(2), (a - a.T) / (1j * np.sqrt(2))


def thermal_probabilities(nu: float, dim: int) -> np.ndarray:
    """Geometric law ``p_k = N^k / (N+1)^(k+1)`` with ``N = nu - 1/2``."""
    if nu < 0.5:
        raise ValidationError(f"symplectic eigenvalue {nu} < 1/2")
    big_n = nu - 0.5
    k = np.arange(dim)
    if big_n == 0:
        p = np.zeros(dim)
        p[0] = 1.0
        return p
    return np.exp(k * np.log(big_n) - (k + 1) * np.log1p(big_n))


def thermal_fock(nu: float, dim: int = DEFAULT_DIM) -> FockDensityMatrix:
    p = thermal_probabilities(nu, dim)
    return _accept(np.diag(p).astype(complex), 1.0 - p.sum())


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    c = np.empty(dim, dtype=complex)
    c[0] = np.exp(-abs(alpha) ** 2 / 2)
    for k in range(1, dim):
        c[k] = c[k - 1] * alpha / np.sqrt(k)
    return c


def coherent_fock(alpha: complex, dim: int = DEFAULT_DIM) -> FockDensityMatrix:
    c = coherent_amplitudes(alpha, dim)
    return _accept(np.outer(c, c.conj()), 1.0 - float(np.sum(np.abs(c) ** 2)))


def displacement_operator(alpha: complex, dim: int, pad: int = _PAD) -> np.ndarray:
    """Top-left ``dim x dim`` block of ``exp(alpha a^dag - conj(alpha) a)``.

    The exponential is taken in a space padded by ``pad`` levels so that the
    truncation of the generator does not reach the returned block. The
    generator is anti-Hermitian, so a Hermitian eigensolver gives the exponential.
    """
    a = ladder(dim + pad)
    w, v = np.linalg.eigh(1j * (alpha * a.T - np.conj(alpha) * a))
    d = (v[:dim] * np.exp(-1j * w)) @ v[:dim].conj().T
    return d


def displaced_thermal_fock(nu: float, alpha: complex, dim: int = DEFAULT_DIM) -> FockDensityMatrix:
    p = thermal_probabilities(nu, dim)
    d = displacement_operator(alpha, dim)
    m = (d * p) @ d.conj().T
    return _accept(m, 1.0 - np.trace(m).real)


def alpha_of(z) -> complex:
    z = np.asarray(z, dtype=float)
    return complex(z[0], z[1]) / np.sqrt(2)


def from_gaussian(state: GaussianState, dim: int = DEFAULT_DIM) -> FockDensityMatrix:
    """Fock matrix of a single-mode thermal, coherent or displaced thermal state.

    Raises:
        DimensionMismatch: for more than one mode.
        ValidationError: for squeezed covariances (no oracle construction).
    """
    validate(state)
    if state.n != 1:
        raise DimensionMismatch("Fock oracle supports single-mode states only")
    cov = state.cov
    nu = cov[0, 0]
    if abs(cov[0, 1]) > 1e-12 or abs(cov[1, 1] - nu) > 1e-12 * max(1.0, nu):
        raise ValidationError("Fock oracle covers covariances proportional to the identity only")
    alpha = alpha_of(state.mean)
    if alpha == 0:
        return thermal_fock(nu, dim)
    if abs(nu - 0.5) < 1e-15:
        return coherent_fock(alpha, dim)
    return displaced_thermal_fock(nu, alpha, dim)


def spectral_entropy(m: FockDensityMatrix) -> float:
    lam = np.clip(np.linalg.eigvalsh(m.matrix), 0.0, None)
    return float(-np.sum(xlogy(lam, lam)))


def spectral_purity(m: FockDensityMatrix) -> float:
    return float(np.sum(np.abs(m.matrix) ** 2))


def spectral_overlap(a: FockDensityMatrix, b: FockDensityMatrix) -> float:
    """``Tr(a b)`` for Hermitian ``a``, ``b``."""
    _same_dim(a, b)
    return float(np.real(np.sum(a.matrix * b.matrix.T)))


def spectral_relative_entropy(a: FockDensityMatrix, b: FockDensityMatrix) -> float:
    """``Tr a (ln a - ln b)`` from eigendecompositions.

    Eigenvalues of ``b`` below 1e-14 are treated as outside its numerical
    support and clamped to that floor.

    Raises:
        SupportViolation: if ``a`` has weight >= 1e-12 outside the support of ``b``.
    """
    _same_dim(a, b)
    lam_b, v_b = np.linalg.eigh(b.matrix)
    weights = np.real(np.sum(v_b.conj() * (a.matrix @ v_b), axis=0))
    outside = lam_b < SUPPORT_FLOOR
    if np.sum(np.abs(weights[outside])) >= TAIL_TOL:
        raise SupportViolation("first state has weight outside the support of the second")
    log_b = np.log(np.maximum(lam_b, SUPPORT_FLOOR))
    return float(-spectral_entropy(a) - np.sum(weights * log_b))


def expectation(m: FockDensityMatrix, op: np.ndarray) -> complex:
    return complex(np.trace(m.matrix @ op))


def _same_dim(a: FockDensityMatrix, b: FockDensityMatrix) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"Fock dimensions differ: {a.dim} vs {b.dim}")
