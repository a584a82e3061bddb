"""Numerical checks of the functional inequalities and identities of the flow.

Each verifier evaluates both sides of one statement over a corpus and returns a
:class:`VerificationReport`. Record status is ``"pass"`` for a nonnegative
margin, ``"pass-at-tolerance"`` for a margin in ``[-tol * scale, 0)`` and
``"fail"`` otherwise. Extra parameters named ``control_*`` exist only so that
negative controls can deliberately break a check.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from .config import RunConfig, derived_nash_constant, kappa
from .errors import EmptyCorpus, NotInvertible, ValidationError
from .functionals import (
    dirichlet_form,
    entropy,
    entropy_power,
    entropy_rate_fd,
    fisher_J,
    purity,
)
from .gaussian import GaussianState
from .grid import GridState, evolve_grid, grid_dirichlet, grid_purity, wigner_samples
from .semigroup import evolve_gaussian, shifted_cov

THEOREM_IDS = (
    "nash",
    "ultra",
    "purity_decay",
    "entropy_growth",
    "logsob",
    "isoperimetric",
    "blachman_stam",
    "concavity",
    "debruijn",
)

ConstantLike = Union[None, float, Callable[[int], float]]


def _constant(c: ConstantLike, n: int) -> float:
    if c is None:
        return derived_nash_constant(n)
    if callable(c):
        return float(c(n))
    return float(c)


def status(margin: float, scale: float, tol: float) -> str:
    if margin >= 0:
        return "pass"
    if margin >= -tol * max(abs(scale), 1.0):
        return "pass-at-tolerance"
    return "fail"


def describe(state) -> dict:
    if isinstance(state, GridState):
        return {"kind": "grid", "extent": state.extent, "m": state.m, **state.provenance()}
    return {"kind": "gaussian", **state.to_dict()}


@dataclass
class VerificationReport:
    theorem_id: str
    parameters: dict
    states: List[dict] = field(default_factory=list)
    records: List[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)

    def add(self, state: int, params: dict, lhs: float, rhs: float, margin: float, scale: float, tol: float):
        self.records.append(
            {
                "state": state,
                "params": params,
                "lhs": float(lhs),
                "rhs": float(rhs),
                "margin": float(margin),
                "status": status(margin, scale, tol),
            }
        )

    @property
    def failures(self) -> List[dict]:
        return [r for r in self.records if r["status"] == "fail"]

    @property
    def worst_margin(self) -> Optional[float]:
        return min((r["margin"] for r in self.records), default=None)

    @property
    def passed(self) -> bool:
        return not self.failures and all(self.checks.values())

    def summary_line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        tol_hits = sum(r["status"] == "pass-at-tolerance" for r in self.records)
        return (
            f"{self.theorem_id:<15} {flag}  records={len(self.records)} failures={len(self.failures)} "
            f"at-tolerance={tol_hits} worst_margin={self.worst_margin!r} "
            f"checks={sum(self.checks.values())}/{len(self.checks)}"
        )

    def to_dict(self, seed: int, config_hash: str) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "seed": seed,
            "config_hash": config_hash,
            "passed": self.passed,
            "parameters": self.parameters,
            "summary": {**self.summary, "worst_margin": self.worst_margin, "failures": len(self.failures)},
            "checks": self.checks,
            "states": self.states,
            "records": self.records,
        }

    def to_json(self, seed: int, config_hash: str) -> str:
        return json.dumps(self.to_dict(seed, config_hash), indent=1, sort_keys=True) + "\n"

    def to_csv(self, seed: int, config_hash: str) -> str:
        buf = io.StringIO()
        buf.write(f"# theorem_id={self.theorem_id} seed={seed} config_hash={config_hash}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "state", "params", "lhs", "rhs", "margin", "status"])
        for i, r in enumerate(self.records):
            w.writerow(
                [i, r["state"], json.dumps(r["params"], sort_keys=True), repr(r["lhs"]), repr(r["rhs"]),
                 repr(r["margin"]), r["status"]]
            )
        return buf.getvalue()


def _require(states: Sequence, what: str):
    if not states:
        raise EmptyCorpus(f"{what}: empty corpus")


def _require_invertible_centered(state: GaussianState, centered: bool = True) -> None:
    if not state.is_invertible():
        raise NotInvertible("corpus state has a pure mode")
    if centered and np.any(state.mean != 0):
        raise ValidationError("corpus state must be centred")


def verify_nash(
    gaussians: Sequence[GaussianState],
    grids: Sequence[GridState] = (),
    constant: ConstantLike = None,
    tol: float = 1e-9,
) -> VerificationReport:
    """``purity^(1 + 1/n) <= C_n * dirichlet`` over Gaussian and grid states.

    Grid states whose sampled Wigner function is not nonnegative (within
    tolerance) fall outside the hypothesis and are listed as excluded.
    """
    if not gaussians and not grids:
        raise EmptyCorpus("nash: empty corpus")
    rep = VerificationReport("nash", {"constant": "derived" if constant is None else repr(constant), "tol": tol})
    ratios: Dict[int, float] = {}
    excluded = []
    min_wigner = None

    def one(idx, n, p, e):
        c = _constant(constant, n)
        lhs = p ** ((n + 1) / n)
        rhs = c * e
        rep.add(idx, {"n": n, "C_n": c, "purity": p, "dirichlet": e}, lhs, rhs, rhs - lhs, max(lhs, rhs), tol)
        ratios[n] = max(ratios.get(n, 0.0), lhs / e)

    for s in gaussians:
        rep.states.append(describe(s))
        one(len(rep.states) - 1, s.n, purity(s), dirichlet_form(s))
    for g in grids:
        rep.states.append(describe(g))
        idx = len(rep.states) - 1
        w = wigner_samples(g)
        min_wigner = w.minimum if min_wigner is None else min(min_wigner, w.minimum)
        if not w.positive:
            excluded.append(idx)
            continue
        one(idx, 1, grid_purity(g), grid_dirichlet(g))
    rep.summary = {
        "empirical_sup_ratio": {str(k): v for k, v in sorted(ratios.items())},
        "constants": {str(k): _constant(constant, k) for k in sorted(ratios)},
        "excluded_states": excluded,
        "min_wigner_grid": min_wigner,
    }
    return rep


def _fit_slope(ts: np.ndarray, ys: np.ndarray, t_lo: float, t_hi: float) -> float:
    mask = (ts >= t_lo * (1 - 1e-12)) & (ts <= t_hi * (1 + 1e-12))
    return float(np.polyfit(np.log(ts[mask]), np.log(ys[mask]), 1)[0])


def verify_ultracontractivity(
    states: Sequence[GaussianState],
    ts: Sequence[float],
    constant: ConstantLike = None,
    slope_tol: float = 0.02,
    fit_window: Optional[tuple] = None,
    tol: float = 1e-9,
    control_kappa_scale: float = 1.0,
) -> VerificationReport:
    """``||rho_t||_2 <= kappa_n t^(-n/2)`` and the fitted decay exponent.

    The exponent is the least-squares slope of ``ln ||rho_t||_2`` against
    ``ln t`` over ``fit_window`` (default: the top decade of ``ts``) and must
    equal ``-n/2`` within ``slope_tol``.
    """
    _require(states, "ultra")
    ts = np.asarray(sorted(ts), dtype=float)
    window = fit_window or (ts[-1] / 10.0, ts[-1])
    rep = VerificationReport(
        "ultra",
        {"t": ts.tolist(), "fit_window": list(window), "slope_tol": slope_tol, "tol": tol,
         "control_kappa_scale": control_kappa_scale},
    )
    slopes = []
    for s in states:
        rep.states.append(describe(s))
        idx = len(rep.states) - 1
        n = s.n
        k = kappa(n, _constant(constant, n)) * control_kappa_scale
        norms = np.array([math.sqrt(purity(evolve_gaussian(s, t))) for t in ts])
        for t, nm in zip(ts, norms):
            rhs = k * t ** (-n / 2)
            rep.add(idx, {"t": float(t), "kappa": k}, nm, rhs, rhs - nm, rhs, tol)
        slope = _fit_slope(ts, norms, *window)
        slopes.append({"state": idx, "n": n, "slope": slope, "target": -n / 2})
        rep.checks[f"slope[{idx}]"] = abs(slope + n / 2) <= slope_tol
    rep.summary = {"fitted_slopes": slopes}
    return rep


def verify_purity_decay(
    states: Sequence[GaussianState],
    ts: Sequence[float],
    grids: Sequence[GridState] = (),
    grid_ts: Sequence[float] = (0.25, 1.0, 4.0),
    constant: ConstantLike = None,
    dt: float = 1e-5,
    grid_dt: float = 1e-4,
    rate_tol: float = 1e-6,
    grid_rate_tol: float = 1e-5,
    tol: float = 1e-9,
) -> VerificationReport:
    """``Tr rho_t^2 <= kappa_n^2 t^-n`` and ``d/dt Tr rho_t^2 = -2 E(rho_t)``.

    The rate identity is checked by central differences on the closed forms and
    on grid states.
    """
    _require(list(states) + list(grids), "purity_decay")
    rep = VerificationReport(
        "purity_decay",
        {"t": [float(t) for t in ts], "grid_t": [float(t) for t in grid_ts], "dt": dt, "grid_dt": grid_dt,
         "rate_tol": rate_tol, "grid_rate_tol": grid_rate_tol, "tol": tol},
    )
    worst_rate = 0.0
    for s in states:
        rep.states.append(describe(s))
        idx = len(rep.states) - 1
        n = s.n
        k2 = kappa(n, _constant(constant, n)) ** 2
        for t in ts:
            p = purity(evolve_gaussian(s, t))
            rhs = k2 * t ** (-n)
            rep.add(idx, {"check": "bound", "t": float(t)}, p, rhs, rhs - p, rhs, tol)
            if t - dt >= 0:
                rate = (purity(shifted_cov(s, t + dt)) - purity(shifted_cov(s, t - dt))) / (2 * dt)
                target = -2.0 * dirichlet_form(evolve_gaussian(s, t))
                rel = abs(rate - target) / abs(target)
                worst_rate = max(worst_rate, rel)
                rep.add(idx, {"check": "rate", "t": float(t), "dt": dt}, rate, target, rate_tol - rel, 1.0, 0.0)
    for g in grids:
        rep.states.append(describe(g))
        idx = len(rep.states) - 1
        for t in grid_ts:
            up = grid_purity(evolve_grid(g, t + grid_dt))
            down = grid_purity(evolve_grid(g, t - grid_dt))
            rate = (up - down) / (2 * grid_dt)
            target = -2.0 * grid_dirichlet(evolve_grid(g, t))
            rel = abs(rate - target) / abs(target)
            worst_rate = max(worst_rate, rel)
            rep.add(idx, {"check": "grid_rate", "t": float(t), "dt": grid_dt}, rate, target,
                    grid_rate_tol - rel, 1.0, 0.0)
    rep.summary = {"worst_relative_rate_error": worst_rate}
    return rep


def verify_entropy_growth(
    states: Sequence[GaussianState],
    ts: Sequence[float],
    constant: ConstantLike = None,
    tol: float = 1e-9,
) -> VerificationReport:
    """``S(rho_t) >= (n/2) ln(kappa_n^(-2/n) t)``.

    Also reports the range of ``S(rho_t) - n ln t`` over the top decade. Each
    mode contributes ``h(nu + t/2) = ln(t/2) + 1 + O(1/t)``, so this offset
    tends to ``n (1 - ln 2)``.
    """
    _require(states, "entropy_growth")
    ts = np.asarray(sorted(ts), dtype=float)
    rep = VerificationReport("entropy_growth", {"t": ts.tolist(), "tol": tol})
    offsets = []
    for s in states:
        rep.states.append(describe(s))
        idx = len(rep.states) - 1
        n = s.n
        k = kappa(n, _constant(constant, n))
        excess = []
        for t in ts:
            ent = entropy(evolve_gaussian(s, t))
            bound = 0.5 * n * math.log(k ** (-2.0 / n) * t)
            rep.add(idx, {"t": float(t), "kappa": k}, bound, ent, ent - bound, max(abs(ent), 1.0), tol)
            excess.append(ent - n * math.log(t))
        top = np.array(excess)[ts >= ts[-1] / 10]
        offsets.append({"state": idx, "n": n, "offset_min": float(top.min()), "offset_max": float(top.max())})
    rep.summary = {"entropy_minus_n_log_t_top_decade": offsets}
    return rep


def verify_logsob(
    states: Sequence[GaussianState], tol: float = 1e-9, control_rhs_scale: float = 1.0
) -> VerificationReport:
    """``Tr(rho ln rho) + n <= J(rho) / (2e)`` for centred invertible states."""
    _require(states, "logsob")
    rep = VerificationReport("logsob", {"tol": tol, "control_rhs_scale": control_rhs_scale})
    for s in states:
        _require_invertible_centered(s)
        rep.states.append(describe(s))
        lhs = -entropy(s) + s.n
        rhs = control_rhs_scale * fisher_J(s) / (2 * math.e)
        rep.add(len(rep.states) - 1, {"n": s.n}, lhs, rhs, rhs - lhs, max(abs(lhs), abs(rhs)), tol)
    return rep


def verify_isoperimetric(
    states: Sequence[GaussianState], tol: float = 1e-9, control_lhs_scale: float = 1.0
) -> VerificationReport:
    """``J(rho) E(rho) >= 2 e n`` for centred invertible states."""
    _require(states, "isoperimetric")
    rep = VerificationReport("isoperimetric", {"tol": tol, "control_lhs_scale": control_lhs_scale})
    ratios = []
    for s in states:
        _require_invertible_centered(s)
        rep.states.append(describe(s))
        lhs = control_lhs_scale * 2 * math.e * s.n
        rhs = fisher_J(s) * entropy_power(s)
        ratios.append(rhs / (2 * math.e * s.n))
        rep.add(len(rep.states) - 1, {"n": s.n}, lhs, rhs, rhs - lhs, lhs, tol)
    rep.summary = {"min_JE_over_2en": min(ratios)}
    return rep


def verify_blachman_stam(
    states: Sequence[GaussianState],
    alphas: Sequence[float],
    betas: Sequence[float],
    ts: Sequence[float],
    tol: float = 1e-9,
    monotonicity_tol: float = 1e-12,
    control_rhs_scale: float = 1.0,
) -> VerificationReport:
    """``(a+b)^2 J(rho_t) <= a^2 J(rho) + 4 n b^2 / t``; ``b = 0`` gives ``J(rho_t) <= J(rho)``."""
    _require(states, "blachman_stam")
    rep = VerificationReport(
        "blachman_stam",
        {"alphas": list(map(float, alphas)), "betas": list(map(float, betas)), "t": list(map(float, ts)),
         "tol": tol, "monotonicity_tol": monotonicity_tol, "control_rhs_scale": control_rhs_scale},
    )
    closest = 0.0
    for s in states:
        _require_invertible_centered(s, centered=False)
        rep.states.append(describe(s))
        idx = len(rep.states) - 1
        n = s.n
        j0 = fisher_J(s)
        for t in ts:
            jt = fisher_J(evolve_gaussian(s, t))
            rep.add(idx, {"check": "monotone", "t": float(t), "alpha": 1.0, "beta": 0.0}, jt, j0, j0 - jt, j0,
                    monotonicity_tol)
            for a in alphas:
                for b in betas:
                    lhs = (a + b) ** 2 * jt
                    rhs = control_rhs_scale * (a * a * j0 + 4 * n * b * b / t)
                    closest = max(closest, lhs / rhs)
                    rep.add(idx, {"t": float(t), "alpha": float(a), "beta": float(b)}, lhs, rhs, rhs - lhs,
                            rhs, tol)
    rep.summary = {"max_lhs_over_rhs": closest}
    return rep


def verify_concavity(
    states: Sequence[GaussianState],
    ts: Sequence[float],
    step: float = 1e-2,
    tol: float = 1e-8,
    asymptote_t: float = 1e3,
    asymptote_tol: float = 0.01,
    control_power: float = 1.0,
) -> VerificationReport:
    """Second central differences of ``t -> E(rho_t)`` are ``<= 0`` (within ``tol``).

    The step at time ``t`` is ``min(step, t/2)``. Because a concave function has
    nonpositive second differences at any step, no truncation error enters.
    Also checks ``|dE/dt - e/2| < asymptote_tol`` at ``asymptote_t``.
    ``control_power`` raises ``E`` to a power before differencing.
    """
    _require(states, "concavity")
    rep = VerificationReport(
        "concavity",
        {"t": list(map(float, ts)), "step": step, "tol": tol, "asymptote_t": asymptote_t,
         "asymptote_tol": asymptote_tol, "control_power": control_power},
    )

    def ep(s, t):
        return entropy_power(evolve_gaussian(s, t)) ** control_power

    slopes = []
    for s in states:
        rep.states.append(describe(s))
        idx = len(rep.states) - 1
        for t in ts:
            h = min(step, t / 2)
            d2 = ep(s, t + h) - 2 * ep(s, t) + ep(s, t - h)
            # status() scales tol by max(|scale|, 1); pass scale=1 for an absolute tolerance
            rep.add(idx, {"check": "second_difference", "t": float(t), "h": h}, d2, 0.0, -d2, 1.0, tol)
        slope = (ep(s, asymptote_t + 1.0) - ep(s, asymptote_t - 1.0)) / 2.0
        slopes.append(slope)
        dev = abs(slope - math.e / 2)
        rep.add(idx, {"check": "asymptote", "t": asymptote_t, "h": 1.0}, slope, math.e / 2,
                asymptote_tol - dev, 1.0, 0.0)
    rep.summary = {"asymptotic_slopes": slopes, "target_slope": math.e / 2}
    return rep


def verify_debruijn(
    states: Sequence[GaussianState],
    ts: Sequence[float],
    delta: float = 1e-5,
    rel_tol: float = 1e-6,
    control_rate_factor: float = 0.25,
) -> VerificationReport:
    """``dS(rho_t)/dt = J(rho_t) / 4`` by central differences with step ``delta``."""
    _require(states, "debruijn")
    rep = VerificationReport(
        "debruijn",
        {"t": list(map(float, ts)), "delta": delta, "rel_tol": rel_tol, "control_rate_factor": control_rate_factor},
    )
    worst = 0.0
    for s in states:
        _require_invertible_centered(s)
        rep.states.append(describe(s))
        idx = len(rep.states) - 1
        for t in ts:
            rate = entropy_rate_fd(s, t, delta)
            j = fisher_J(evolve_gaussian(s, t))
            lhs = rate / control_rate_factor
            rel = abs(lhs - j) / j
            worst = max(worst, rel)
            rep.add(idx, {"t": float(t), "delta": delta}, lhs, j, rel_tol - rel, 1.0, 0.0)
    rep.summary = {"worst_relative_error": worst}
    return rep


def verify_concavity_and_debruijn(states, ts, delta=1e-5, debruijn_ts=(0.1, 1.0, 10.0), **kw):
    """Both flow checks on one corpus; returns ``(concavity, debruijn)`` reports."""
    return verify_concavity(states, ts, **kw), verify_debruijn(states, debruijn_ts, delta)


def run_all(cfg: RunConfig, only: Optional[Sequence[str]] = None) -> List[VerificationReport]:
    """Build the seeded corpora and run the selected verifiers in a fixed order."""
    from . import corpus

    wanted = THEOREM_IDS if not only else tuple(t for t in THEOREM_IDS if t in only)
    c = cfg.nash_constant
    modes = cfg.modes
    decades = math.log10(cfg.ultra_t_max / cfg.ultra_t_min)
    flow_ts = np.geomspace(cfg.ultra_t_min, cfg.ultra_t_max, int(round(decades * cfg.ultra_points_per_decade)) + 1)
    reports = []
    for tag in wanted:
        rng = corpus.rng_for(cfg.seed, tag)
        if tag == "nash":
            gs = [GaussianState.vacuum(n) for n in modes]
            gs += corpus.random_gaussians(rng, cfg.nash_gaussians - len(gs), modes, centered=False)
            grids = [corpus.coherent_cat_mixture(cfg.grid_extent, cfg.grid_m)]
            grids += corpus.random_mixtures(rng, cfg.nash_grid_states - 1, cfg.grid_extent, cfg.grid_m)
            reports.append(verify_nash(gs, grids, c, cfg.margin_tol))
        elif tag == "ultra":
            reports.append(
                verify_ultracontractivity(corpus.flow_states(rng, modes), flow_ts, c, cfg.slope_tol,
                                          tol=cfg.margin_tol)
            )
        elif tag == "purity_decay":
            grids = corpus.random_mixtures(rng, 5, cfg.grid_extent, cfg.grid_m)
            reports.append(
                verify_purity_decay(corpus.flow_states(rng, modes), [0.1, 1.0, 10.0, 100.0, 1000.0], grids,
                                    constant=c, dt=cfg.fd_time_step, grid_dt=cfg.grid_time_step,
                                    tol=cfg.margin_tol)
            )
        elif tag == "entropy_growth":
            reports.append(verify_entropy_growth(corpus.flow_states(rng, modes), flow_ts, c, cfg.margin_tol))
        elif tag in ("logsob", "isoperimetric"):
            states = [GaussianState.thermal(1.5)]
            states += corpus.random_gaussians(rng, cfg.logsob_states - 1, modes)
            fn = verify_logsob if tag == "logsob" else verify_isoperimetric
            reports.append(fn(states, cfg.margin_tol))
        elif tag == "blachman_stam":
            states = [GaussianState.thermal(1.5)] + corpus.random_gaussians(rng, cfg.blachman_states - 1, modes)
            grid7 = np.logspace(-1, 1, 7)
            reports.append(
                verify_blachman_stam(states, grid7, grid7, [0.1, 1.0, 10.0], cfg.margin_tol, cfg.monotonicity_tol)
            )
        elif tag == "concavity":
            states = corpus.random_gaussians(rng, cfg.concavity_states, modes)
            reports.append(verify_concavity(states, np.geomspace(0.01, 50.0, 25), cfg.concavity_step))
        elif tag == "debruijn":
            states = [GaussianState.thermal(1.5)] + corpus.random_gaussians(rng, cfg.debruijn_states - 1, modes)
            reports.append(verify_debruijn(states, [0.1, 1.0, 10.0], cfg.fd_time_step))
    return reports
