"""Command-line interface: run experiments, list presets, compare snapshots."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .errors import SimulationDiverged, SolverFailure, StepRejected
from .experiment import parse_dt_rule, run_experiment
from .kernels import INFLUENCE_PRESETS, POTENTIAL_PRESETS, Model
from .output import read_snapshot
from .presets import PRESET_NAMES, build_preset

OUTPUT_DIR_ENV = "VSKINETIC_OUTPUT_DIR"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vskinetic",
        description="Velocity-scaling solver for kinetic aggregation and flocking models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute an experiment preset")
    run_p.add_argument("--preset", required=True, choices=PRESET_NAMES)
    run_p.add_argument("--eps", type=float, default=None,
                       help="run a single relaxation parameter instead of the preset sweep")
    run_p.add_argument("--nx", type=int, default=None, help="spatial cells")
    run_p.add_argument("--nxi", type=int, default=None, help="velocity cells")
    run_p.add_argument("--tfinal", type=float, default=None, help="final time")
    run_p.add_argument("--out", default=None,
                       help=f"output directory (default ${OUTPUT_DIR_ENV} or ./runs/<preset>)")
    run_p.add_argument("--cg-tol", type=float, default=None, help="CG relative tolerance")
    run_p.add_argument("--dt-rule", default=None, help="paper | safe | fixed:<dt>")
    run_p.add_argument("--snapshots", default=None,
                       help="comma-separated snapshot times (overrides preset)")
    run_p.add_argument("--stride", type=int, default=None, help="diagnostics sampling stride")
    run_p.add_argument("--model", choices=[m.value for m in Model], default=None)
    run_p.add_argument("--potential", choices=sorted(POTENTIAL_PRESETS), default=None)
    run_p.add_argument("--influence", choices=sorted(INFLUENCE_PRESETS), default=None)

    cmp_p = sub.add_parser("compare", help="norm of the difference of two snapshots")
    cmp_p.add_argument("--a", required=True)
    cmp_p.add_argument("--b", required=True)
    cmp_p.add_argument("--norm", choices=("l1", "linf"), default="l1")
    cmp_p.add_argument("--column", default="rho",
                       help="profile column to compare (ignored for phase snapshots)")

    sub.add_parser("presets", help="list available presets")
    return parser


def _overrides_from_args(args) -> dict:
    overrides = {}
    if args.eps is not None:
        overrides["eps_list"] = (args.eps,)
    if args.nx is not None:
        overrides["n_x"] = args.nx
    if args.nxi is not None:
        overrides["n_xi"] = args.nxi
    if args.tfinal is not None:
        overrides["t_final"] = args.tfinal
        overrides["snapshot_times"] = (0.0, args.tfinal)
    if args.cg_tol is not None:
        overrides["cg_rel_tol"] = args.cg_tol
    if args.dt_rule is not None:
        parse_dt_rule(args.dt_rule)  # fail fast on bad syntax
        overrides["dt_rule"] = args.dt_rule
    if args.snapshots is not None:
        times = tuple(float(tok) for tok in args.snapshots.split(",") if tok)
        overrides["snapshot_times"] = times
    if args.stride is not None:
        overrides["diag_stride"] = args.stride
    if args.model is not None:
        overrides["model"] = Model(args.model)
    if args.potential is not None:
        overrides["potential"] = POTENTIAL_PRESETS[args.potential]
    if args.influence is not None:
        overrides["influence"] = INFLUENCE_PRESETS[args.influence]
    return overrides


def _cmd_run(args) -> int:
    config = build_preset(args.preset, **_overrides_from_args(args))
    out = args.out or os.environ.get(OUTPUT_DIR_ENV) or str(Path("runs") / args.preset)
    manifest = run_experiment(config, out)
    print(f"wrote {Path(out) / 'manifest.json'} ({len(manifest['runs'])} runs)")
    return 0


def _select_compare_data(meta: dict, data: np.ndarray, column: str) -> np.ndarray:
    if meta.get("kind") == "profile":
        names = str(meta["columns"]).split(",")
        if column not in names:
            raise ValueError(f"no column {column!r} in {names}")
        return data[:, names.index(column)]
    return data


def _cmd_compare(args) -> int:
    meta_a, data_a = read_snapshot(Path(args.a))
    meta_b, data_b = read_snapshot(Path(args.b))
    if meta_a.get("kind") != meta_b.get("kind"):
        raise ValueError("snapshots are of different kinds")
    for key in ("n_x", "x_lo", "x_hi") + (
        ("n_xi", "xi_lo", "xi_hi") if meta_a.get("kind") == "phase" else ()
    ):
        if meta_a.get(key) != meta_b.get(key):
            raise ValueError(f"grid mismatch on {key}: {meta_a.get(key)} vs {meta_b.get(key)}")
    sel_a = _select_compare_data(meta_a, data_a, args.column)
    sel_b = _select_compare_data(meta_b, data_b, args.column)
    if sel_a.shape != sel_b.shape:
        raise ValueError(f"shape mismatch: {sel_a.shape} vs {sel_b.shape}")
    diff = np.abs(sel_a - sel_b)
    dx = (meta_a["x_hi"] - meta_a["x_lo"]) / meta_a["n_x"]
    if args.norm == "linf":
        value = float(diff.max())
    elif meta_a.get("kind") == "phase":
        dxi = (meta_a["xi_hi"] - meta_a["xi_lo"]) / meta_a["n_xi"]
        value = float(diff.sum() * dx * dxi)
    else:
        value = float(diff.sum() * dx)
    print(f"{value:.17g}")
    return 0


def _cmd_presets() -> int:
    for name in PRESET_NAMES:
        print(name)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_presets()
    except (ValueError, OSError, StepRejected, SolverFailure, SimulationDiverged) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
