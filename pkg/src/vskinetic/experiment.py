"""Experiment driver: executes a configuration and writes all files.

A run directory holds one subdirectory per solver run (unique owner per
directory), each with a diagnostics CSV and snapshot files, plus a single
manifest tying every parameter and output path together. The pipeline is
deterministic: re-running a configuration byte-reproduces every numeric file.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .grids import DENSITY_FLOOR, PhaseField, build_grid, moment_0, moment_1
from .kernels import build_tables
from .limiting import run_limiting, stationary_profile
from .output import (
    format_floats,
    write_diagnostics_csv,
    write_manifest,
    write_phase_snapshot,
    write_profile_snapshot,
)
from .presets import ExperimentConfig, initial_phase_values
from .rescaled import FixedDt, PaperCFL, SafeCFL, SolverConfig, make_state, run
from .reference import run_direct

MANIFEST_SCHEMA = "vskinetic-manifest-v1"

# Discretization choices that affect reproducibility of the monitors.
NUMERICS_NOTES = {
    "macroscopic_gradients": "central-2 periodic",
    "transport_flux": "donor-cell upwind",
    "density_floor": DENSITY_FLOOR,
}


def parse_dt_rule(rule: str):
    if rule == "paper":
        return PaperCFL()
    if rule == "safe":
        return SafeCFL()
    if rule.startswith("fixed:"):
        dt = float(rule.split(":", 1)[1])
        if dt <= 0:
            raise ValueError("fixed time step must be positive")
        return FixedDt(dt)
    raise ValueError(f"unknown dt rule {rule!r}; use paper, safe, or fixed:<dt>")


def config_to_dict(config: ExperimentConfig) -> dict:
    raw = asdict(config)
    raw["model"] = config.model.value
    raw["influence"] = config.influence.kind if config.influence else None
    return raw


def config_digest(config: ExperimentConfig) -> str:
    payload = json.dumps(config_to_dict(config), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def provenance_string(config: ExperimentConfig) -> str:
    return f"vskinetic {__version__} | config sha256:{config_digest(config)}"


def _time_tag(t: float) -> str:
    return f"{t:g}"


class _SnapshotWriter:
    """Writes profile and phase snapshots for one run directory."""

    def __init__(self, run_dir: Path, grid, digest: str):
        self.run_dir = run_dir
        self.grid = grid
        self.digest = digest
        self.profiles: list[dict] = []
        self.phase: list[dict] = []

    def _meta(self, t: float) -> dict:
        grid = self.grid
        return {
            "t": float(t),
            "n_x": grid.n_x,
            "n_xi": grid.n_xi,
            "x_lo": grid.x_lo,
            "x_hi": grid.x_hi,
            "xi_lo": grid.xi_lo,
            "xi_hi": grid.xi_hi,
            "prov": self.digest,
        }

    def write(self, t: float, columns: dict[str, np.ndarray], phase_values: np.ndarray):
        tag = _time_tag(t)
        profile_path = self.run_dir / f"profile_t{tag}.csv"
        write_profile_snapshot(profile_path, columns, self._meta(t))
        self.profiles.append({"t": float(t), "path": str(profile_path)})
        phase_path = self.run_dir / f"phase_t{tag}.csv"
        write_phase_snapshot(phase_path, phase_values, self._meta(t))
        self.phase.append({"t": float(t), "path": str(phase_path)})


def _rescaled_snapshot(writer: _SnapshotWriter, state) -> None:
    writer.write(
        state.t,
        {
            "x": writer.grid.x_centers,
            "rho": state.rho.values,
            "u": state.u.values,
            "m": state.m.values,
            "omega": state.omega.values,
            "P": state.P.values,
        },
        state.g.values,
    )


def _moments_snapshot(writer: _SnapshotWriter, f: PhaseField, t: float) -> None:
    rho = moment_0(f).values
    m = moment_1(f).values
    u = m / np.maximum(rho, DENSITY_FLOOR)
    writer.write(t, {"x": writer.grid.x_centers, "rho": rho, "u": u, "m": m}, f.values)


def _relative_paths(entries: list[dict], base: Path) -> list[dict]:
    return [
        {**entry, "path": str(Path(entry["path"]).relative_to(base))}
        for entry in entries
    ]


def run_experiment(config: ExperimentConfig, output_dir: str | Path) -> dict:
    """Execute every solver run of the configuration; returns the manifest."""
    started = time.monotonic()
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    digest = config_digest(config)

    grid = config.build_grid()
    tables = build_tables(grid, config.potential, config.influence)
    solver_config = SolverConfig(
        dt_rule=parse_dt_rule(config.dt_rule), cg_rel_tol=config.cg_rel_tol
    )
    g0 = initial_phase_values(config.preset, grid)

    runs = []
    for eps in config.eps_list:
        run_dir = out / f"rescaled-eps{eps:g}"
        run_dir.mkdir(exist_ok=True)
        writer = _SnapshotWriter(run_dir, grid, digest)
        state = make_state(g0)
        final, records = run(
            state,
            tables,
            config.params_for(eps),
            solver_config,
            config.t_final,
            diag_stride=config.diag_stride,
            snapshot_times=config.snapshot_times,
            on_snapshot=lambda s, w=writer: _rescaled_snapshot(w, s),
        )
        diag_path = run_dir / "diagnostics.csv"
        write_diagnostics_csv(diag_path, records)
        runs.append(
            {
                "kind": "rescaled",
                "eps": eps,
                "dir": run_dir.name,
                "diagnostics": str(diag_path.relative_to(out)),
                "profiles": _relative_paths(writer.profiles, out),
                "phase_snapshots": _relative_paths(writer.phase, out),
                "final_time": final.t,
                "steps": final.n,
            }
        )

    if config.direct_n_v > 0:
        grid_v = build_grid(config.n_x, config.direct_n_v, config.xi_max)
        tables_v = build_tables(grid_v, config.potential, config.influence)
        run_dir = out / f"direct-nv{config.direct_n_v}"
        run_dir.mkdir(exist_ok=True)
        writer = _SnapshotWriter(run_dir, grid_v, digest)
        f0 = initial_phase_values(config.preset, grid_v)
        final_f, history = run_direct(
            f0,
            config.params_for(config.eps_list[0]),
            tables_v,
            config.t_final,
            snapshot_times=config.snapshot_times,
            on_snapshot=lambda f, t, w=writer: _moments_snapshot(w, f, t),
        )
        mass_path = run_dir / "mass_history.csv"
        mass_lines = ["t,mass"] + [format_floats(row) for row in history]
        mass_path.write_text("\n".join(mass_lines) + "\n")
        runs.append(
            {
                "kind": "direct",
                "eps": config.eps_list[0],
                "dir": run_dir.name,
                "mass_history": str(mass_path.relative_to(out)),
                "profiles": _relative_paths(writer.profiles, out),
                "phase_snapshots": _relative_paths(writer.phase, out),
                "final_time": config.t_final,
                "steps": len(history) - 1,
            }
        )

    if config.include_limiting:
        run_dir = out / "limiting"
        run_dir.mkdir(exist_ok=True)
        writer = _SnapshotWriter(run_dir, grid, digest)
        rho_lim, u_lim = run_limiting(
            moment_0(g0),
            tables,
            config.params_for(config.eps_list[0]),
            config.t_final,
            cg_rel_tol=config.cg_rel_tol,
        )
        write_profile_snapshot(
            run_dir / f"profile_t{_time_tag(config.t_final)}.csv",
            {
                "x": grid.x_centers,
                "rho": rho_lim.values,
                "u": u_lim.values,
                "m": rho_lim.values * u_lim.values,
            },
            writer._meta(config.t_final),
        )
        runs.append(
            {
                "kind": "limiting",
                "dir": run_dir.name,
                "profiles": [
                    {
                        "t": config.t_final,
                        "path": str(
                            (run_dir / f"profile_t{_time_tag(config.t_final)}.csv").relative_to(out)
                        ),
                    }
                ],
                "final_time": config.t_final,
            }
        )

    if config.include_stationary:
        run_dir = out / "stationary"
        run_dir.mkdir(exist_ok=True)
        writer = _SnapshotWriter(run_dir, grid, digest)
        result = stationary_profile(
            moment_0(g0),
            tables,
            config.params_for(config.eps_list[0]),
            t_long=config.stationary_t_long,
            settle_tol=config.stationary_settle_tol,
            cg_rel_tol=config.cg_rel_tol,
        )
        path = run_dir / "profile_stationary.csv"
        write_profile_snapshot(
            path,
            {
                "x": grid.x_centers,
                "rho": result.rho.values,
                "u": result.u.values,
                "m": result.rho.values * result.u.values,
            },
            writer._meta(result.t_reached),
        )
        runs.append(
            {
                "kind": "stationary",
                "dir": run_dir.name,
                "profiles": [{"t": result.t_reached, "path": str(path.relative_to(out))}],
                "settled": result.settled,
                "final_time": result.t_reached,
            }
        )

    manifest = {
        "schema": MANIFEST_SCHEMA,
        "preset": config.preset,
        "provenance": provenance_string(config),
        "wall_time_s": time.monotonic() - started,
        "config": config_to_dict(config),
        "numerics": NUMERICS_NOTES,
        "runs": runs,
    }
    write_manifest(out / "manifest.json", manifest)
    return manifest
