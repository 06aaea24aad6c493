"""The four study figures, rendered from a run manifest.

monitors          time series of the three oscillation monitors per run
consistency       density/velocity overlays of the scaled vs direct solver,
                  plus the two phase-space heatmaps at the final time
ap_overlay        final density and velocity for every relaxation parameter
                  against the limiting-system reference
application_grid  snapshot rows (phase-space, density, momentum, scaling
                  factor) of the flocking study, stationary profile dashed

Rendering never touches the simulation outputs; every figure carries the
manifest's provenance string in a footer and in the image metadata.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .runfiles import (
    Manifest,
    load_manifest,
    profile_columns,
    read_diagnostics,
    read_snapshot,
    same_x_grid,
)

FIGURE_KINDS = ("monitors", "consistency", "ap_overlay", "application_grid")

MONITOR_PANELS = (
    ("max_grad_u", r"$\max_x|\partial_x u|$"),
    ("max_grad_rho_over_rho", r"$\max_x|\partial_x\rho|/\rho$"),
    ("max_grad_P_over_rho", r"$\max_x|\partial_x P|/\rho$"),
)

plt.rcParams.update({"figure.dpi": 110, "axes.grid": True, "grid.alpha": 0.3})


def _eps_label(eps: float) -> str:
    return rf"$\varepsilon$ = {eps:g}"


def _annotate_empty(ax, message: str) -> None:
    ax.text(
        0.5, 0.5, message, transform=ax.transAxes,
        ha="center", va="center", color="tab:red",
    )


def _finish(fig, manifest: Manifest, out_path: Path) -> Path:
    fig.text(0.995, 0.005, manifest.provenance, ha="right", va="bottom",
             fontsize=6, color="gray")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, metadata={"Software": manifest.provenance})
    plt.close(fig)
    return out_path


def render_monitors(manifest: Manifest):
    runs = manifest.runs("rescaled")
    if not runs:
        raise ValueError("manifest holds no rescaled runs to plot monitors for")
    fig, axes = plt.subplots(1, 3, figsize=(13, 3.6), constrained_layout=True)
    for ax, (column, title) in zip(axes, MONITOR_PANELS):
        plotted = 0
        for run in runs:
            series = read_diagnostics(manifest.resolve(run["diagnostics"]))
            if series["t"].size == 0:
                continue
            ax.plot(series["t"], series[column], label=_eps_label(run["eps"]))
            plotted += 1
        ax.set_xlabel("t")
        ax.set_title(title)
        if plotted:
            ax.legend(fontsize=8)
        else:
            _annotate_empty(ax, "no diagnostics samples")
    fig.suptitle(f"oscillation monitors ({manifest.preset})")
    return fig


def _profile_series(manifest: Manifest, run: dict) -> list[tuple[float, dict, dict]]:
    out = []
    for entry in run.get("profiles", []):
        meta, columns = profile_columns(manifest.resolve(entry["path"]))
        out.append((entry["t"], meta, columns))
    return out


def render_consistency(manifest: Manifest):
    rescaled = manifest.runs("rescaled")
    direct = manifest.runs("direct")
    if not rescaled or not direct:
        raise ValueError("consistency figure needs one rescaled and one direct run")
    res_profiles = _profile_series(manifest, rescaled[0])
    dir_profiles = _profile_series(manifest, direct[0])
    if not res_profiles or not dir_profiles:
        raise ValueError("consistency figure needs profile snapshots in both runs")
    for (_, meta_r, _), (_, meta_d, _) in zip(res_profiles, dir_profiles):
        if not same_x_grid(meta_r, meta_d):
            raise ValueError("refusing to overlay profiles from different spatial grids")

    fig, axes = plt.subplots(2, 2, figsize=(11, 8), constrained_layout=True)
    for ax, column, title in (
        (axes[0, 0], "rho", r"density $\rho(x)$"),
        (axes[0, 1], "u", r"velocity $u(x)$"),
    ):
        for t, _, cols in dir_profiles:
            ax.plot(cols["x"], cols[column], "-", color="tab:blue",
                    label=f"direct t={t:g}")
        for t, _, cols in res_profiles:
            ax.plot(cols["x"], cols[column], "--", color="tab:red",
                    label=f"scaled t={t:g}")
        ax.set_xlabel("x")
        ax.set_title(title)
        ax.legend(fontsize=7)

    for ax, run, label in (
        (axes[1, 0], direct[0], "direct solver f(x, v)"),
        (axes[1, 1], rescaled[0], r"scaled solver g(x, $\xi$)"),
    ):
        snaps = run.get("phase_snapshots", [])
        if not snaps:
            _annotate_empty(ax, "no phase snapshot")
            continue
        meta, values = read_snapshot(manifest.resolve(snaps[-1]["path"]))
        extent = (meta["x_lo"], meta["x_hi"], meta["xi_lo"], meta["xi_hi"])
        image = ax.imshow(values.T, origin="lower", aspect="auto", extent=extent,
                          cmap="viridis")
        fig.colorbar(image, ax=ax, shrink=0.85)
        ax.set_title(f"{label}, t={meta['t']:g}")
        ax.set_xlabel("x")
    fig.suptitle(f"scaled vs direct solver ({manifest.preset})")
    return fig


def render_ap_overlay(manifest: Manifest):
    kinetic = manifest.runs("rescaled")
    limiting = manifest.runs("limiting")
    if not kinetic:
        raise ValueError("overlay figure needs rescaled runs")
    fig, axes = plt.subplots(1, 2, figsize=(11, 4), constrained_layout=True)
    reference_meta = None
    for ax, column, title in (
        (axes[0], "rho", r"density $\rho(x)$"),
        (axes[1], "u", r"velocity $u(x)$"),
    ):
        for run in kinetic:
            profiles = _profile_series(manifest, run)
            if not profiles:
                _annotate_empty(ax, "run without profile snapshots")
                continue
            t, meta, cols = profiles[-1]
            if reference_meta is None:
                reference_meta = meta
            elif not same_x_grid(reference_meta, meta):
                raise ValueError("refusing to overlay profiles from different spatial grids")
            ax.plot(cols["x"], cols[column], label=_eps_label(run["eps"]))
        for run in limiting:
            t, meta, cols = _profile_series(manifest, run)[-1]
            if reference_meta is not None and not same_x_grid(reference_meta, meta):
                raise ValueError("refusing to overlay profiles from different spatial grids")
            ax.plot(cols["x"], cols[column], "k--", linewidth=2, label="limiting system")
        ax.set_xlabel("x")
        ax.set_title(title)
        ax.legend(fontsize=8)
    fig.suptitle(f"vanishing-relaxation overlay ({manifest.preset})")
    return fig


def render_application_grid(manifest: Manifest):
    kinetic = manifest.runs("rescaled")
    if not kinetic:
        raise ValueError("application figure needs a rescaled run")
    run = min(kinetic, key=lambda r: r["eps"])  # strongest interaction
    profiles = _profile_series(manifest, run)
    snaps = run.get("phase_snapshots", [])
    if not profiles or not snaps:
        raise ValueError("application figure needs profile and phase snapshots")
    stationary = manifest.runs("stationary")
    stationary_cols = (
        profile_columns(manifest.resolve(stationary[0]["profiles"][0]["path"]))[1]
        if stationary
        else None
    )

    n_rows = len(profiles)
    fig, axes = plt.subplots(
        n_rows, 4, figsize=(15, 2.6 * n_rows), constrained_layout=True, squeeze=False
    )
    for row, ((t, meta, cols), snap) in enumerate(zip(profiles, snaps)):
        phase_meta, phase_values = read_snapshot(manifest.resolve(snap["path"]))
        extent = (
            phase_meta["x_lo"], phase_meta["x_hi"],
            phase_meta["xi_lo"], phase_meta["xi_hi"],
        )
        ax = axes[row, 0]
        ax.imshow(phase_values.T, origin="lower", aspect="auto", extent=extent,
                  cmap="viridis")
        ax.set_ylabel(f"t = {t:g}")
        columns = (
            ("rho", r"$\rho$", 1),
            ("m", r"$\rho u$", 2),
            ("omega", r"$\omega$", 3),
        )
        for name, label, col_idx in columns:
            ax = axes[row, col_idx]
            ax.plot(cols["x"], cols[name], color="tab:blue")
            if row == 0:
                ax.set_title(label)
            last_row = row == n_rows - 1
            if last_row and stationary_cols is not None and name in ("rho", "m"):
                ax.plot(stationary_cols["x"], stationary_cols[name], "r--",
                        label="stationary limit")
                ax.legend(fontsize=7)
        if row == 0:
            axes[0, 0].set_title(r"g(x, $\xi$)")
    for ax in axes[-1]:
        ax.set_xlabel("x")
    fig.suptitle(
        f"flocking application ({manifest.preset}, {_eps_label(run['eps'])})"
    )
    return fig


_RENDERERS = {
    "monitors": render_monitors,
    "consistency": render_consistency,
    "ap_overlay": render_ap_overlay,
    "application_grid": render_application_grid,
}


def render(manifest_path: str | Path, figure: str, out_dir: str | Path | None = None):
    """Render one figure kind; returns (output path, matplotlib figure).

    The figure object is returned before closing so callers (and tests) can
    inspect its axes; it is saved to <out_dir>/<figure>.png, defaulting to
    the manifest's directory.
    """
    if figure not in _RENDERERS:
        raise ValueError(f"unknown figure kind {figure!r}; choose from {FIGURE_KINDS}")
    manifest = load_manifest(manifest_path)
    fig = _RENDERERS[figure](manifest)
    out = Path(out_dir) if out_dir is not None else manifest.base_dir
    out_path = _finish(fig, manifest, out / f"{figure}.png")
    return out_path, fig
