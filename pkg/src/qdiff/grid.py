"""Single-mode states as sampled characteristic functions on a square grid.

``chi[i, k]`` holds ``chi(q_i, p_k)`` with ``q_i = p_i = -L + i * (2L/m)``, so the
origin sits at index ``m // 2``. Integrals are plain Riemann sums; the samples
decay below 1e-10 at the boundary, which makes the sums spectrally accurate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np

from .errors import BadWeights, DimensionMismatch, GridTooSmall, NegativeTime, QuadratureUnconverged
from .gaussian import GaussianState, validate

DEFAULT_EXTENT = 12.0
DEFAULT_M = 256
BOUNDARY_TOL = 1e-10
HERMITIAN_TOL = 1e-10
CONVERGENCE_TOL = 1e-7
WIGNER_NEG_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class GridState:
    extent: float
    m: int
    chi: np.ndarray
    components: Tuple[Tuple[float, GaussianState], ...]
    t: float = 0.0

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / self.m

    @property
    def axis(self) -> np.ndarray:
        return -self.extent + self.spacing * np.arange(self.m)

    def radius_sq(self) -> np.ndarray:
        x = self.axis
        return x[:, None] ** 2 + x[None, :] ** 2

    def provenance(self) -> dict:
        return {
            "components": [
                {"weight": w, "mean": c.mean.tolist(), "cov": c.cov.tolist()} for w, c in self.components
            ],
            "t": self.t,
        }

    def resampled(self, m: int) -> "GridState":
        """Rebuild from the provenance record on a grid with ``m`` points per axis."""
        g = from_gaussian_mixture(self.components, self.extent, m)
        return evolve_grid(g, self.t) if self.t else g


def _check_m(m: int) -> None:
    if m < 4 or m & (m - 1):
        raise DimensionMismatch(f"samples per axis must be a power of two >= 4, got {m}")


def sample_gaussian_chi(state: GaussianState, axis: np.ndarray) -> np.ndarray:
    """``exp(i mean.z - z.cov.z / 2)`` on the product grid ``axis x axis``."""
    q = axis[:, None]
    p = axis[None, :]
    (a, b), (_, d) = state.cov
    quad = a * q * q + 2.0 * b * q * p + d * p * p
    return np.exp(1j * (state.mean[0] * q + state.mean[1] * p) - 0.5 * quad)


def from_gaussian_mixture(
    components: Sequence[Tuple[float, GaussianState]],
    extent: float = DEFAULT_EXTENT,
    m: int = DEFAULT_M,
) -> GridState:
    """Sample the characteristic function of a convex mixture of Gaussian states.

    The Wigner function of such a mixture is a positive combination of Gaussians,
    so it is nonnegative by construction.

    Raises:
        BadWeights: if a weight is not positive or the weights do not sum to 1.
        GridTooSmall: if ``|chi|`` exceeds 1e-10 on the outermost ring.
    """
    _check_m(m)
    comps = tuple((float(w), c) for w, c in components)
    if not comps:
        raise BadWeights("mixture needs at least one component")
    weights = np.array([w for w, _ in comps])
    if np.any(weights <= 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise BadWeights(f"weights must be positive and sum to 1, got {weights.tolist()}")
    for _, c in comps:
        if c.n != 1:
            raise DimensionMismatch("grid states are single-mode")
        validate(c)
    g = GridState(float(extent), int(m), np.zeros((m, m), dtype=complex), comps)
    chi = sum(w * sample_gaussian_chi(c, g.axis) for w, c in comps)
    g = GridState(g.extent, g.m, chi, comps)
    check_invariants(g)
    return g


def check_invariants(g: GridState) -> None:
    """Unit trace, Hermitian symmetry and boundary decay of the samples."""
    c = g.chi
    mid = g.m // 2
    if abs(c[mid, mid] - 1.0) > 1e-12:
        raise GridTooSmall(f"chi(0) = {c[mid, mid]} != 1")
    # index i pairs with m - i (z -> -z); index 0 has no partner on the grid
    inner = c[1:, 1:]
    if np.max(np.abs(inner - np.conj(inner[::-1, ::-1]))) > HERMITIAN_TOL:
        raise GridTooSmall("samples violate chi(-z) = conj(chi(z))")
    ring = np.concatenate([c[0], c[-1], c[:, 0], c[:, -1]])
    if np.max(np.abs(ring)) >= BOUNDARY_TOL:
        raise GridTooSmall(
            f"|chi| = {np.max(np.abs(ring)):.2e} on the grid boundary; increase the extent"
        )


def evolve_grid(g: GridState, t: float) -> GridState:
    """Multiply the samples by ``exp(-|z|^2 t / 4)``."""
    if not t >= 0:
        raise NegativeTime(f"evolution time must be nonnegative, got {t}")
    if t == 0:
        return g
    chi = g.chi * np.exp(-0.25 * t * g.radius_sq())
    return GridState(g.extent, g.m, chi, g.components, g.t + t)


def _purity_sum(g: GridState) -> float:
    return float(g.spacing**2 * np.sum(np.abs(g.chi) ** 2) / (2 * np.pi))


def _dirichlet_sum(g: GridState) -> float:
    return float(0.25 * g.spacing**2 * np.sum(g.radius_sq() * np.abs(g.chi) ** 2) / (2 * np.pi))


def _converged(g: GridState, rule, check: bool) -> float:
    value = rule(g)
    if check:
        refined = rule(g.resampled(2 * g.m))
        if abs(refined - value) > CONVERGENCE_TOL:
            raise QuadratureUnconverged(
                f"quadrature changed by {abs(refined - value):.2e} when doubling m={g.m}"
            )
    return value


def grid_purity(g: GridState, check: bool = True) -> float:
    """``(2pi)^-1 int |chi|^2`` by a Riemann sum, optionally certified by doubling ``m``."""
    return _converged(g, _purity_sum, check)


def grid_dirichlet(g: GridState, check: bool = True) -> float:
    """``(1/4)(2pi)^-1 int |z|^2 |chi|^2`` by a Riemann sum."""
    return _converged(g, _dirichlet_sum, check)


@dataclass(frozen=True, eq=False)
class WignerGrid:
    axis: np.ndarray
    values: np.ndarray
    minimum: float
    integral: float
    positive: bool


def wigner_samples(g: GridState) -> WignerGrid:
    """Discrete version of ``W(u) = (2pi)^-1 int exp(-i u.z) chi(z) dz``.

    With this normalisation ``W`` integrates to ``2pi``. Output points are
    ``u_j = (j - m/2) * pi / L``.
    """
    m, h = g.m, g.spacing
    sign = (-1.0) ** np.arange(m)
    spec = np.fft.fft2(g.chi * np.outer(sign, sign))
    phase = np.exp(1j * np.pi * (np.arange(m) - m // 2))
    w = (h * h / (2 * np.pi)) * np.outer(phase, phase) * spec
    values = np.real(w)
    du = np.pi / g.extent
    axis = du * (np.arange(m) - m // 2)
    minimum = float(values.min())
    peak = float(values.max())
    return WignerGrid(
        axis=axis,
        values=values,
        minimum=minimum,
        integral=float(values.sum() * du * du),
        positive=minimum >= -WIGNER_NEG_TOL * peak,
    )


def _header(g: GridState, what: str, extra: dict) -> str:
    head = {"what": what, "extent": g.extent, "m": g.m, "provenance": g.provenance()}
    head.update(extra)
    return "# " + json.dumps(head, sort_keys=True) + "\n"


def write_chi_csv(g: GridState, path, extra: dict = None) -> Path:
    """gnuplot-ready rows ``q p re(chi) im(chi)``, blank line between q-blocks."""
    path = Path(path)
    x = g.axis
    lines = [_header(g, "chi", extra or {}), "q,p,chi_re,chi_im\n"]
    for i in range(g.m):
        lines.extend(
            f"{x[i]:.17g},{x[k]:.17g},{g.chi[i, k].real:.17g},{g.chi[i, k].imag:.17g}\n" for k in range(g.m)
        )
        lines.append("\n")
    path.write_text("".join(lines))
    return path


def write_wigner_csv(g: GridState, path, extra: dict = None) -> Path:
    """Rows ``u_q u_p W``; the header carries the minimum and the integral."""
    path = Path(path)
    w = wigner_samples(g)
    meta = {"wigner_min": w.minimum, "wigner_integral": w.integral, "positive": w.positive}
    meta.update(extra or {})
    lines = [_header(g, "wigner", meta), "u_q,u_p,wigner\n"]
    for i in range(g.m):
        lines.extend(f"{w.axis[i]:.17g},{w.axis[k]:.17g},{w.values[i, k]:.17g}\n" for k in range(g.m))
        lines.append("\n")
    path.write_text("".join(lines))
    return path
