"""Entropic and Dirichlet functionals of Gaussian states in closed form.

All entropies are in nats. The Gaussian integrals behind the closed forms:

* purity ``(2pi)^-n int |chi|^2 = (2pi)^-n pi^n det(cov)^-1/2 = 1 / (2^n sqrt(det cov))``
* Dirichlet form ``(1/4)(2pi)^-n int |z|^2 |chi|^2 = tr(cov^-1) / (2^(n+3) sqrt(det cov))``
* overlap ``(2pi)^-n int conj(chi_a) chi_b = det(cov_a + cov_b)^-1/2 exp(-dm.(cov_a+cov_b)^-1.dm / 2)``

For ``ln rho = ln C - R^T Gamma R`` one has ``[R_j, [R_j, R_k R_l]] = -2 Omega_jk Omega_jl``,
so ``Tr(rho [R_j, [R_j, ln rho]]) = 2 (Omega Gamma Omega^T)_jj`` and summing over ``j``
gives ``J = 2 tr(Gamma)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.special import xlogy

from .errors import DimensionMismatch, NotInvertible, SingularCovariance, StepTooSmall
from .gaussian import (
    GaussianState,
    conjugate_by_exp_iRj,
    gamma_of,
    symplectic_eigenvalues,
    validate,
)
from .semigroup import shifted_cov

PURE_MODE_GUARD = 1e-12


def _slogdet_pos(m: np.ndarray, what: str) -> float:
    sign, logdet = np.linalg.slogdet(m)
    if sign <= 0 or not np.isfinite(logdet):
        raise SingularCovariance(f"{what} is singular or not positive definite")
    return float(logdet)


def purity(state: GaussianState) -> float:
    """``Tr(rho^2) = 1 / (2^n sqrt(det cov))``."""
    validate(state)
    logdet = _slogdet_pos(state.cov, "covariance")
    return float(np.exp(-state.n * np.log(2.0) - 0.5 * logdet))


def h_entropy(nu) -> np.ndarray:
    """Entropy of one thermal mode: ``(nu+1/2) ln(nu+1/2) - (nu-1/2) ln(nu-1/2)``."""
    x = np.asarray(nu, dtype=float) - 0.5
    x = np.where(x < PURE_MODE_GUARD, 0.0, x)
    return (x + 1.0) * np.log1p(x) - xlogy(x, x)


def entropy(state: GaussianState) -> float:
    """Von Neumann entropy from the symplectic spectrum."""
    validate(state)
    return float(np.sum(h_entropy(symplectic_eigenvalues(state.cov))))


def entropy_power(state: GaussianState) -> float:
    """``exp(S / n)``."""
    return float(np.exp(entropy(state) / state.n))


def relative_entropy(rho: GaussianState, sigma: GaussianState) -> float:
    """``D(rho||sigma) = -S(rho) - ln C_sigma + tr(Gamma_sigma cov_rho) + dm.Gamma_sigma.dm``.

    Raises:
        NotInvertible: if ``sigma`` has a pure mode (``D`` is infinite or undefined).
    """
    if rho.n != sigma.n:
        raise DimensionMismatch("states have different mode counts")
    validate(rho)
    g = gamma_of(sigma)
    dm = rho.mean - sigma.mean
    return float(
        -entropy(rho) - g.logC + np.sum(g.gamma * rho.cov) + dm @ g.gamma @ dm
    )


def fisher_J(state: GaussianState) -> float:
    """Entropy variation rate ``J = 2 tr(Gamma)``.

    Raises:
        NotInvertible: ``J`` diverges when a mode becomes pure.
    """
    return float(2.0 * np.trace(gamma_of(state).gamma))


def dirichlet_form(state: GaussianState) -> float:
    """``tr(cov^-1) / (2^(n+3) sqrt(det cov))``."""
    validate(state)
    logdet = _slogdet_pos(state.cov, "covariance")
    tr_inv = float(np.trace(np.linalg.inv(state.cov)))
    return tr_inv * float(np.exp(-(state.n + 3) * np.log(2.0) - 0.5 * logdet))


def hs_overlap(a: GaussianState, b: GaussianState) -> float:
    """Hilbert-Schmidt overlap ``Tr(a b)`` via the Parseval relation."""
    validate(a)
    validate(b)
    tot = a.cov + b.cov
    logdet = _slogdet_pos(tot, "cov_a + cov_b")
    dm = a.mean - b.mean
    quad = float(dm @ np.linalg.solve(tot, dm))
    return float(np.exp(-0.5 * logdet - 0.5 * quad))


@dataclass(frozen=True)
class EntropicProfile:
    purity: float
    entropy: float
    entropy_power: float
    fisher_J: Optional[float]  # None when a mode is pure (J diverges)
    dirichlet: float

    def as_dict(self) -> dict:
        d = asdict(self)
        if d["fisher_J"] is None:
            d["fisher_J"] = "divergent"
        return d


def profile(state: GaussianState) -> EntropicProfile:
    try:
        j = fisher_J(state)
    except NotInvertible:
        j = None
    return EntropicProfile(
        purity=purity(state),
        entropy=entropy(state),
        entropy_power=entropy_power(state),
        fisher_J=j,
        dirichlet=dirichlet_form(state),
    )


def _check_step(f_plus: float, f_minus: float, scale: float, what: str) -> None:
    if abs(f_plus - f_minus) < 64 * np.finfo(float).eps * max(abs(scale), 1e-300):
        raise StepTooSmall(f"{what}: difference lost in roundoff, increase the step")


def entropy_rate_fd(state: GaussianState, t: float = 0.0, delta: float = 1e-5) -> float:
    """Central difference ``dS(rho_t)/dt``.

    Evaluates at ``t - delta``, which may be negative as long as the shifted
    covariance stays physical.

    Raises:
        StepTooSmall: when ``delta`` is too small to resolve the difference.
    """
    s_plus = entropy(shifted_cov(state, t + delta))
    s_minus = entropy(shifted_cov(state, t - delta))
    _check_step(s_plus, s_minus, s_plus, "entropy rate")
    return (s_plus - s_minus) / (2.0 * delta)


def fisher_from_divergence(state: GaussianState, dtheta: float = 1e-4) -> float:
    """``sum_j d^2/dtheta^2 D(rho || e^{i theta R_j} rho e^{-i theta R_j})`` at 0.

    Second central differences of :func:`relative_entropy` under
    :func:`~qdiff.gaussian.conjugate_by_exp_iRj`; independent of ``2 tr Gamma``
    except through the shared Gamma of the conjugated state.
    """
    if not state.is_invertible():
        raise NotInvertible("divergence-based Fisher information needs an invertible state")
    total = 0.0
    d0 = relative_entropy(state, state)
    for j in range(2 * state.n):
        dp = relative_entropy(state, conjugate_by_exp_iRj(state, j, dtheta))
        dm = relative_entropy(state, conjugate_by_exp_iRj(state, j, -dtheta))
        total += (dp - 2.0 * d0 + dm) / dtheta**2
    return float(total)

