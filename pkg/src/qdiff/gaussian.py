"""Gaussian states in (mean, covariance) form and symplectic linear algebra.

Conventions: quadratures are ordered ``(q1, p1, ..., qn, pn)``, hbar = 1 so that
``[R_j, R_k] = i Omega_jk`` and the vacuum covariance is ``I/2``. The
characteristic function of a state is ``chi(z) = exp(i mean.z - z.cov.z / 2)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import schur

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NonSymmetricCovariance,
    NotInvertible,
    NumericalFailure,
    ParseError,
    UnphysicalCovariance,
)

SYMMETRY_RTOL = 1e-12
PHYSICALITY_ATOL = 1e-10
EPS_INV = 1e-9


def symplectic_form(n: int) -> np.ndarray:
    r"""Block-diagonal symplectic form :math:`\Omega = [[0, 1], [-1, 0]]^{\oplus n}`."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True, eq=False)
class GaussianState:
    """An ``n``-mode Gaussian state given by its first two moments.

    Construction only checks shapes. Use :func:`validate` for the symmetry and
    uncertainty-principle checks.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size == 0 or mean.size % 2:
            raise DimensionMismatch(f"mean must be a vector of even length, got shape {mean.shape}")
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatch(
                f"cov must be {mean.size}x{mean.size} to match the mean, got shape {cov.shape}"
            )
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n(self) -> int:
        return self.mean.size // 2

    @classmethod
    def vacuum(cls, n: int = 1) -> "GaussianState":
        return cls(np.zeros(2 * n), 0.5 * np.eye(2 * n))

    @classmethod
    def thermal(cls, nu, n: Optional[int] = None) -> "GaussianState":
        """Product of thermal modes with symplectic eigenvalues ``nu``.

        A scalar ``nu`` is repeated over ``n`` modes (default one mode).
        """
        nus = np.atleast_1d(np.asarray(nu, dtype=float))
        if n is not None and nus.size == 1:
            nus = np.repeat(nus, n)
        return cls(np.zeros(2 * nus.size), np.diag(np.repeat(nus, 2)))

    @classmethod
    def coherent(cls, z) -> "GaussianState":
        z = np.asarray(z, dtype=float)
        return cls(z, 0.5 * np.eye(z.size))

    def is_physical(self) -> bool:
        return min_uncertainty_eigenvalue(self.cov) >= -PHYSICALITY_ATOL

    def is_invertible(self) -> bool:
        return self.is_physical() and float(np.min(symplectic_eigenvalues(self.cov))) > 0.5 + EPS_INV

    def to_dict(self) -> dict:
        return {"n": self.n, "mean": self.mean.tolist(), "cov": self.cov.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianState":
        """Parse the ``{"n", "mean", "cov"}`` JSON schema with strict dimension checks."""
        try:
            n = data["n"]
            mean = data["mean"]
            cov = data["cov"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"Gaussian state spec is missing field {exc}") from None
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ParseError(f"field 'n' must be a positive integer, got {n!r}")
        if not isinstance(mean, list) or len(mean) != 2 * n:
            raise DimensionMismatch(f"field 'mean' must have length 2n={2 * n}")
        if not isinstance(cov, list) or len(cov) != 2 * n or any(
            not isinstance(row, list) or len(row) != 2 * n for row in cov
        ):
            raise DimensionMismatch(f"field 'cov' must be a {2 * n}x{2 * n} nested list")
        try:
            return cls(np.array(mean, dtype=float), np.array(cov, dtype=float))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"non-numeric entry in state spec: {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True, eq=False)
class SymplecticData:
    """Williamson normal form ``cov = s @ diag(nu1, nu1, ..., nun, nun) @ s.T``."""

    nu: np.ndarray
    s: np.ndarray

    def diag(self) -> np.ndarray:
        return np.diag(np.repeat(self.nu, 2))

    def reconstruct(self) -> np.ndarray:
        return self.s @ self.diag() @ self.s.T


@dataclass(frozen=True, eq=False)
class GammaMatrix:
    """Quadratic form of ``rho = C exp(-R^T gamma R)`` for a centred invertible state."""

    gamma: np.ndarray
    logC: float


@dataclass(frozen=True)
class Validation:
    state: GaussianState
    physical: bool
    invertible: bool


def min_uncertainty_eigenvalue(cov: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian matrix ``cov + (i/2) Omega``."""
    omega = symplectic_form(cov.shape[0] // 2)
    return float(np.linalg.eigvalsh(cov + 0.5j * omega)[0])


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Moduli of the eigenvalues of ``i Omega cov``, one per mode, descending."""
    n = cov.shape[0] // 2
    w, v = np.linalg.eigh(0.5 * (cov + cov.T))
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    # i root Omega root is Hermitian with eigenvalues +-nu_k
    ev = np.linalg.eigvalsh(1j * root @ symplectic_form(n) @ root)
    return ev[::-1][:n].copy()


def validate(state: GaussianState) -> Validation:
    """Check symmetry and the uncertainty principle; report invertibility.

    Raises:
        NonSymmetricCovariance: if ``cov`` is not symmetric to 1e-12 relative.
        UnphysicalCovariance: if ``cov + (i/2) Omega`` has an eigenvalue below -1e-10.
    """
    cov = state.cov
    scale = max(1.0, float(np.max(np.abs(cov))))
    if np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * scale:
        raise NonSymmetricCovariance("covariance matrix is not symmetric")
    if not np.all(np.isfinite(cov)) or not np.all(np.isfinite(state.mean)):
        raise UnphysicalCovariance("non-finite entries in state")
    lam = min_uncertainty_eigenvalue(cov)
    if lam < -PHYSICALITY_ATOL:
        raise UnphysicalCovariance(
            f"cov + (i/2)Omega has eigenvalue {lam:.3e}; violates the uncertainty principle"
        )
    invertible = float(np.min(symplectic_eigenvalues(cov))) > 0.5 + EPS_INV
    return Validation(state, True, invertible)


def williamson(state: GaussianState) -> SymplecticData:
    r"""Williamson decomposition of the covariance matrix.

    With :math:`K = \Sigma^{-1/2}\Omega\Sigma^{-1/2}` (antisymmetric), the real
    Schur form :math:`K = O T O^T` has blocks ``[[0, 1/nu], [-1/nu, 0]]`` and
    :math:`S = \Sigma^{1/2} O D^{-1/2}` is symplectic with ``S D S^T = Sigma``.

    Symplectic eigenvalues come out descending; degenerate blocks are ordered
    lexicographically by their columns of ``S``.

    Raises:
        NumericalFailure: if the reconstruction residual exceeds 1e-7.
    """
    validate(state)
    cov = 0.5 * (state.cov + state.cov.T)
    n = state.n
    omega = symplectic_form(n)
    w, v = np.linalg.eigh(cov)
    if w[0] <= 0:
        raise NumericalFailure("covariance is not positive definite")
    sqrt_cov = (v * np.sqrt(w)) @ v.T
    isqrt_cov = (v / np.sqrt(w)) @ v.T
    k = isqrt_cov @ omega @ isqrt_cov
    k = 0.5 * (k - k.T)
    t, o = schur(k, output="real")
    o = o.copy()
    b = np.empty(n)
    for m in range(n):
        i, j = 2 * m, 2 * m + 1
        b[m] = t[i, j]
        if b[m] < 0:
            o[:, [i, j]] = o[:, [j, i]]
            b[m] = -b[m]
    nu = 1.0 / b
    s = sqrt_cov @ o @ np.diag(np.repeat(np.sqrt(b), 2))

    order = sorted(
        range(n),
        key=lambda m: (-round(float(nu[m]), 10), tuple(np.round(s[:, 2 * m], 10)), tuple(np.round(s[:, 2 * m + 1], 10))),
    )
    cols = [c for m in order for c in (2 * m, 2 * m + 1)]
    data = SymplecticData(nu=nu[order], s=s[:, cols])

    scale = max(1.0, float(np.max(np.abs(cov))))
    resid = np.max(np.abs(data.reconstruct() - cov)) / scale
    if resid > 1e-7:
        raise NumericalFailure(f"Williamson reconstruction residual {resid:.2e} exceeds 1e-7")
    return data


def gamma_of(state: GaussianState, symp: Optional[SymplecticData] = None) -> GammaMatrix:
    r"""The matrix :math:`\Gamma` with :math:`2\Omega^{-1}\Sigma = \cot(\Gamma\Omega)`.

    Per mode :math:`\gamma_k = \operatorname{arccoth}(2\nu_k)`, transported back by
    ``S^{-T} (.) S^{-1}``. ``logC = -1/2 ln det(Sigma + i Omega / 2)
    = -1/2 sum_k ln(nu_k^2 - 1/4)``.

    Raises:
        NotInvertible: if some symplectic eigenvalue is within 1e-9 of 1/2.
    """
    symp = williamson(state) if symp is None else symp
    nu = symp.nu
    if np.min(nu) <= 0.5 + EPS_INV:
        raise NotInvertible(f"state has a pure mode (nu_min - 1/2 = {np.min(nu) - 0.5:.2e})")
    gam = 0.5 * np.log1p(1.0 / (nu - 0.5))
    s_inv = np.linalg.inv(symp.s)
    gamma = s_inv.T @ np.diag(np.repeat(gam, 2)) @ s_inv
    gamma = 0.5 * (gamma + gamma.T)
    log_c = -0.5 * float(np.sum(np.log(nu - 0.5) + np.log(nu + 0.5)))
    return GammaMatrix(gamma=gamma, logC=log_c)


def displace(state: GaussianState, z) -> GaussianState:
    """Conjugate by the Weyl operator ``V(z)``: shifts the mean by ``z``."""
    z = np.asarray(z, dtype=float)
    if z.shape != state.mean.shape:
        raise DimensionMismatch(f"displacement must have shape {state.mean.shape}, got {z.shape}")
    return GaussianState(state.mean + z, state.cov)


def conjugate_by_exp_iRj(state: GaussianState, j: int, theta: float) -> GaussianState:
    r"""The state :math:`e^{i\theta R_j}\rho e^{-i\theta R_j}` (``j`` is 0-based).

    Since :math:`e^{-i\theta R_j} R_k e^{i\theta R_j} = R_k - i\theta[R_j, R_k]
    = R_k + \theta\Omega_{jk}`, the mean moves by ``theta * Omega[j, :]``:
    conjugating by ``exp(i theta Q)`` raises ``<P>`` by ``theta`` and conjugating
    by ``exp(i theta P)`` lowers ``<Q>`` by ``theta``.
    """
    if not 0 <= j < 2 * state.n:
        raise IndexOutOfRange(f"quadrature index {j} outside 0..{2 * state.n - 1}")
    shift = theta * symplectic_form(state.n)[j]
    return GaussianState(state.mean + shift, state.cov)


def random_orthogonal_symplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random passive (orthogonal and symplectic) transform in q,p-interleaved order."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    u = q * (d / np.abs(d))
    o = np.block([[u.real, -u.imag], [u.imag, u.real]])
    perm = np.ravel(np.column_stack([np.arange(n), np.arange(n, 2 * n)]))
    return o[np.ix_(perm, perm)]


def random_symplectic(n: int, rng: np.random.Generator, max_squeeze: float = 1.0) -> np.ndarray:
    """Random symplectic matrix ``O1 @ diag(e^-r, e^r, ...) @ O2`` (Euler form)."""
    r = rng.uniform(0.0, max_squeeze, size=n)
    sq = np.diag(np.ravel(np.column_stack([np.exp(-r), np.exp(r)])))
    return random_orthogonal_symplectic(n, rng) @ sq @ random_orthogonal_symplectic(n, rng)


def random_state(
    n: int,
    rng: np.random.Generator,
    nu_range=(0.5 + 1e-3, 10.0),
    max_squeeze: float = 1.0,
    centered: bool = True,
    mean_scale: float = 2.0,
) -> GaussianState:
    """Random physical state ``S diag(nu) S^T`` with ``nu`` uniform in ``nu_range``."""
    nu = rng.uniform(*nu_range, size=n)
    s = random_symplectic(n, rng, max_squeeze)
    cov = s @ np.diag(np.repeat(nu, 2)) @ s.T
    cov = 0.5 * (cov + cov.T)
    mean = np.zeros(2 * n) if centered else mean_scale * rng.standard_normal(2 * n)
    return GaussianState(mean, cov)
