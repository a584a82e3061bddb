"""Run configuration shared by the verifiers and the CLI."""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional, Tuple

from .errors import ParseError, ValidationError

CONFIG_ENV = "QDIFF_CONFIG"


def derived_nash_constant(n: int) -> float:
    r"""A valid (non-optimal) constant for ``purity^(1+1/n) <= C_n * dirichlet``.

    Uses only ``|chi| <= 1``. Splitting ``int |chi|^2`` at radius ``R`` in
    ``2n`` dimensions,

    ``(2pi)^n P <= omega R^(2n) + 4 (2pi)^n E / R^2`` with ``omega = pi^n / n!``;

    minimising over ``R`` and raising to the power ``(n+1)/n`` gives

    ``C_n = 4 (1 + 1/n)^((n+1)/n) (n omega)^(1/n) / (2 pi)``  (``C_1 = 8``).
    """
    omega = math.pi**n / math.factorial(n)
    return 4.0 * (1.0 + 1.0 / n) ** ((n + 1) / n) * (n * omega) ** (1.0 / n) / (2.0 * math.pi)


def kappa(n: int, c_n: float) -> float:
    """Ultracontractivity prefactor ``(n C_n / 2)^(n/2)``."""
    return (n * c_n / 2.0) ** (n / 2.0)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    fd_time_step: float = 1e-5
    fd_theta_step: float = 1e-4
    grid_time_step: float = 1e-4
    concavity_step: float = 1e-2
    margin_tol: float = 1e-9
    monotonicity_tol: float = 1e-12
    quad_tol: float = 1e-7
    grid_extent: float = 12.0
    grid_m: int = 256
    fock_dim: int = 200
    nash_constant: Optional[float] = None
    modes: Tuple[int, ...] = (1, 2, 3)
    nash_gaussians: int = 500
    nash_grid_states: int = 50
    logsob_states: int = 200
    blachman_states: int = 20
    concavity_states: int = 50
    debruijn_states: int = 200
    ultra_t_min: float = 0.1
    ultra_t_max: float = 1e5
    ultra_points_per_decade: int = 10
    slope_tol: float = 0.02
    out_dir: str = "reports"

    def __post_init__(self):
        positive = (
            "fd_time_step", "fd_theta_step", "grid_time_step", "concavity_step", "margin_tol",
            "monotonicity_tol", "quad_tol", "grid_extent", "slope_tol", "ultra_t_min",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValidationError(f"config field {name} must be positive")
        m = self.grid_m
        if m < 4 or m & (m - 1):
            raise ValidationError(f"grid_m must be a power of two, got {m}")
        if self.nash_constant is not None and not self.nash_constant > 0:
            raise ValidationError("nash_constant must be positive")
        if self.ultra_t_max <= self.ultra_t_min:
            raise ValidationError("ultra_t_max must exceed ultra_t_min")
        object.__setattr__(self, "modes", tuple(int(k) for k in self.modes))

    def nash_c(self, n: int) -> float:
        return self.nash_constant if self.nash_constant is not None else derived_nash_constant(n)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["modes"] = list(self.modes)
        return d

    def config_hash(self) -> str:
        """Digest of everything that influences report contents (not the output dir)."""
        d = self.to_dict()
        d.pop("out_dir")
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def load_config(path: Optional[str] = None) -> RunConfig:
    """Read a JSON config from ``path``, else ``$QDIFF_CONFIG``, else defaults."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ParseError(f"{path}: unknown config fields {unknown}")
    try:
        return RunConfig(**data)
    except TypeError as exc:
        raise ParseError(f"{path}: {exc}") from None
