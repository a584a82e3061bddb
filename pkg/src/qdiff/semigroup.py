"""Closed-form action of the quantum diffusion semigroup on Gaussian states.

The flow multiplies the characteristic function by ``exp(-|z|^2 t / 4)``. For
``chi(z) = exp(i mean.z - z.cov.z / 2)`` the product is again Gaussian, with

    -z.cov_t.z / 2 = -z.cov.z / 2 - t |z|^2 / 4   =>   cov_t = cov + (t/2) I,

and the mean untouched. Equivalently, the state is convolved with an isotropic
Gaussian of per-axis variance ``t/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NegativeTime, NonpositiveTime
from .gaussian import GaussianState, validate


@dataclass(frozen=True)
class EvolutionParams:
    t: float

    def __post_init__(self):
        if not self.t >= 0:
            raise NegativeTime(f"evolution time must be nonnegative, got {self.t}")


def evolve_gaussian(state: GaussianState, t: float) -> GaussianState:
    """Apply the diffusion map for time ``t``: ``cov -> cov + (t/2) I``."""
    EvolutionParams(t)
    validate(state)
    if t == 0:
        return state
    return GaussianState(state.mean, state.cov + 0.5 * t * np.eye(2 * state.n))


def shifted_cov(state: GaussianState, s: float) -> GaussianState:
    """``cov + (s/2) I`` for any real ``s``; used for central differences at small ``t``.

    Negative ``s`` is not a physical evolution. Callers are responsible for
    staying inside the physical region.
    """
    return GaussianState(state.mean, state.cov + 0.5 * s * np.eye(2 * state.n))


def gaussian_kernel(t: float, z) -> np.ndarray:
    """Density ``(pi t)^-n exp(-|z|^2 / t)`` of the convolution kernel, ``z`` of shape (..., 2n)."""
    if not t > 0:
        raise NonpositiveTime(f"kernel needs t > 0, got {t}")
    z = np.asarray(z, dtype=float)
    n = z.shape[-1] // 2
    return np.exp(-np.sum(z * z, axis=-1) / t) / (np.pi * t) ** n


@dataclass(frozen=True)
class NoInvariantWitness:
    cov_shift_norm: float
    purity_before: float
    purity_after: float

    @property
    def strict_decrease(self) -> bool:
        return self.purity_after < self.purity_before


def no_invariant_state_witness(state: GaussianState, t: float) -> NoInvariantWitness:
    """Evidence that ``state`` moves under the flow: ``||cov_t - cov||_F`` and purities."""
    from .functionals import purity

    if not t > 0:
        raise NonpositiveTime(f"witness needs t > 0, got {t}")
    evolved = evolve_gaussian(state, t)
    return NoInvariantWitness(
        cov_shift_norm=float(np.linalg.norm(evolved.cov - state.cov)),
        purity_before=purity(state),
        purity_after=purity(evolved),
    )
