"""Command-line interface: ``qdiff {state,evolve,verify,oracle,plot-data}``.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 verification
failure, 5 numerical failure (unconverged quadrature, step too small).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from . import fock
from .config import RunConfig, load_config
from .errors import DimensionMismatch, ParseError, QDiffError, VerificationFailure
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
from .gaussian import GaussianState, symplectic_eigenvalues, validate
from .grid import GridState, evolve_grid, from_gaussian_mixture, grid_dirichlet, grid_purity, wigner_samples
from .grid import write_chi_csv, write_wigner_csv
from .semigroup import evolve_gaussian
from .verifiers import THEOREM_IDS, run_all

Spec = Union[GaussianState, GridState]
FLOW_COLUMNS = ("t", "entropy", "purity", "J", "dirichlet", "entropy_power")


def read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def parse_spec(data, cfg: RunConfig) -> Spec:
    """A Gaussian state ``{"n", "mean", "cov"}`` or a single-mode mixture
    ``{"mixture": [{"weight", "mean", "cov"}, ...], "extent"?, "m"?}``.

    Shape errors in the document are schema errors and raise ``ParseError``.
    """
    if not isinstance(data, dict):
        raise ParseError("state spec must be a JSON object")
    try:
        if "mixture" not in data:
            return GaussianState.from_dict(data)
        items = data["mixture"]
        if not isinstance(items, list) or not items:
            raise ParseError("field 'mixture' must be a non-empty list")
        comps = []
        for k, item in enumerate(items):
            if not isinstance(item, dict) or "weight" not in item:
                raise ParseError(f"mixture[{k}] must be an object with a 'weight' field")
            body = {"n": 1, **{key: v for key, v in item.items() if key != "weight"}}
            try:
                comps.append((float(item["weight"]), GaussianState.from_dict(body)))
            except (TypeError, ValueError):
                raise ParseError(f"mixture[{k}].weight is not a number") from None
            except ParseError as exc:
                raise ParseError(f"mixture[{k}]: {exc}") from None
        extent = float(data.get("extent", cfg.grid_extent))
        m = int(data.get("m", cfg.grid_m))
    except DimensionMismatch as exc:
        raise _SpecShapeError(str(exc)) from None
    return from_gaussian_mixture(comps, extent, m)


class _SpecShapeError(ParseError):
    """Shape error found while reading an input document (reported as DimensionMismatch)."""

    label = "DimensionMismatch"


def load_spec(path: str, cfg: RunConfig) -> Spec:
    return parse_spec(read_json(path), cfg)


def state_summary(spec: Spec) -> dict:
    if isinstance(spec, GridState):
        w = wigner_samples(spec)
        return {
            "kind": "mixture",
            "extent": spec.extent,
            "m": spec.m,
            "purity": grid_purity(spec),
            "dirichlet": grid_dirichlet(spec),
            "wigner_min": w.minimum,
            "wigner_positive": w.positive,
        }
    v = validate(spec)
    return {
        "kind": "gaussian",
        "n": spec.n,
        "validation": {"physical": v.physical, "invertible": v.invertible},
        "symplectic_eigenvalues": symplectic_eigenvalues(spec.cov).tolist(),
        "profile": profile(spec).as_dict(),
    }


def _stamp(cfg: RunConfig) -> str:
    return f"# config_hash={cfg.config_hash()} seed={cfg.seed}\n"


def flow_rows(state: GaussianState, ts: Sequence[float]) -> List[list]:
    rows = []
    for t in ts:
        s = evolve_gaussian(state, t)
        j = fisher_J(s) if s.is_invertible() else math.inf
        rows.append([float(t), entropy(s), purity(s), j, dirichlet_form(s), entropy_power(s)])
    return rows


def flow_csv(state: GaussianState, ts: Sequence[float], cfg: RunConfig) -> str:
    buf = io.StringIO()
    buf.write(_stamp(cfg))
    buf.write(",".join(FLOW_COLUMNS) + "\n")
    for row in flow_rows(state, ts):
        buf.write(",".join(repr(x) for x in row) + "\n")
    return buf.getvalue()


def _need_gaussian(spec: Spec, what: str) -> GaussianState:
    if not isinstance(spec, GaussianState):
        raise ParseError(f"{what} needs a Gaussian state spec")
    return spec


def _need_grid(spec: Spec, cfg: RunConfig) -> GridState:
    if isinstance(spec, GridState):
        return spec
    if spec.n != 1:
        raise DimensionMismatch("phase-space grids are single-mode")
    return from_gaussian_mixture([(1.0, spec)], cfg.grid_extent, cfg.grid_m)


def cmd_state(args, cfg: RunConfig) -> int:
    print(json.dumps(state_summary(load_spec(args.spec, cfg)), indent=1, sort_keys=True))
    return 0


def cmd_evolve(args, cfg: RunConfig) -> int:
    state = _need_gaussian(load_spec(args.spec, cfg), "evolve")
    text = flow_csv(state, args.t, cfg)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "evolve.csv").write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    tags = None if args.theorem == "all" else [args.theorem]
    reports = run_all(cfg, tags)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h = cfg.config_hash()
    for rep in reports:
        (out / f"{rep.theorem_id}.json").write_text(rep.to_json(cfg.seed, h))
        (out / f"{rep.theorem_id}.csv").write_text(rep.to_csv(cfg.seed, h))
        print(rep.summary_line())
    failed = [r.theorem_id for r in reports if not r.passed]
    if failed:
        raise VerificationFailure(f"hard checks failed: {', '.join(failed)}")
    return 0


def cmd_oracle(args, cfg: RunConfig) -> int:
    a = _need_gaussian(load_spec(args.spec, cfg), "oracle")
    fa = fock.from_gaussian(a, args.dim or cfg.fock_dim)
    rows = {
        "entropy": (entropy(a), fock.spectral_entropy(fa)),
        "purity": (purity(a), fock.spectral_purity(fa)),
    }
    if args.against:
        b = _need_gaussian(load_spec(args.against, cfg), "oracle")
        fb = fock.from_gaussian(b, args.dim or cfg.fock_dim)
        rows["relative_entropy"] = (relative_entropy(a, b), fock.spectral_relative_entropy(fa, fb))
        rows["overlap"] = (hs_overlap(a, b), fock.spectral_overlap(fa, fb))
    result = {k: {"closed_form": c, "fock": f, "abs_diff": abs(c - f)} for k, (c, f) in rows.items()}
    result["tail_mass"] = fa.tail_mass
    print(json.dumps(result, indent=1, sort_keys=True))
    return 0


def cmd_plot_data(args, cfg: RunConfig) -> int:
    spec = load_spec(args.spec, cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    extra = {"config_hash": cfg.config_hash(), "seed": cfg.seed}
    if args.what == "flow":
        path = out / "flow.csv"
        path.write_text(flow_csv(_need_gaussian(spec, "flow"), args.t, cfg))
        print(path)
        return 0
    base = _need_grid(spec, cfg)
    writer = write_wigner_csv if args.what == "wigner" else write_chi_csv
    for t in args.t:
        path = writer(evolve_grid(base, t), out / f"{args.what}_t{t:g}.csv", extra)
        print(path)
    return 0


def _nonneg_times(text: str) -> float:
    try:
        t = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not t >= 0:
        raise argparse.ArgumentTypeError(f"time must be nonnegative, got {text}")
    return t


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config (fallback: $QDIFF_CONFIG)")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--nash-constant", type=float)
    common.add_argument("--delta", type=float, help="finite-difference time step")
    common.add_argument("--grid-l", type=float, help="grid half-width L")
    common.add_argument("--grid-m", type=int, help="grid points per axis (power of two)")

    p = argparse.ArgumentParser(prog="qdiff", description="Quantum diffusion semigroup numerics.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("state", parents=[common], help="summarise a state spec")
    s.add_argument("spec")
    s.set_defaults(func=cmd_state)

    e = sub.add_parser("evolve", parents=[common], help="functionals along the flow as CSV")
    e.add_argument("spec")
    e.add_argument("--t", type=_nonneg_times, nargs="+", default=[0.0, 1.0, 2.0])
    e.set_defaults(func=cmd_evolve)

    v = sub.add_parser("verify", parents=[common], help="run theorem verifiers")
    v.add_argument("theorem", choices=list(THEOREM_IDS) + ["all"])
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", parents=[common], help="compare closed forms with the Fock oracle")
    o.add_argument("spec")
    o.add_argument("--against", help="second state for relative entropy and overlap")
    o.add_argument("--dim", type=int)
    o.set_defaults(func=cmd_oracle)

    d = sub.add_parser("plot-data", parents=[common], help="emit CSV grids or flow curves")
    d.add_argument("spec")
    d.add_argument("--what", choices=["wigner", "chi", "flow"], required=True)
    d.add_argument("--t", type=_nonneg_times, nargs="+", default=[0.0])
    d.set_defaults(func=cmd_plot_data)
    return p


def config_from_args(args) -> RunConfig:
    cfg = load_config(args.config)
    return cfg.with_overrides(
        seed=args.seed,
        out_dir=args.out,
        nash_constant=args.nash_constant,
        fd_time_step=args.delta,
        grid_extent=args.grid_l,
        grid_m=args.grid_m,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        cfg = config_from_args(args)
        return args.func(args, cfg)
    except QDiffError as exc:
        label = getattr(exc, "label", type(exc).__name__)
        print(f"{label}: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"NumericalFailure: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
