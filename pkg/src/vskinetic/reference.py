"""Direct forward-Euler solver for the unscaled kinetic equation.

Used as the ground truth in the consistency experiment at eps = 1. The
interaction operator is written in velocity-conservative form d_v(c f) with a
model-dependent advection speed c. Spatial transport uses donor-cell upwind
like the rescaled solver; the velocity flux upwinds a minmod-limited linear
reconstruction instead, because the solution concentrates toward a few cells
and the plain donor flux then biases the momentum by O(dv) times the peak
height. The velocity-direction CFL carries a 1/eps factor, which is exactly
why this solver is impractical for small eps.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import SimulationDiverged
from .grids import DENSITY_FLOOR, PhaseField, ScalarField, donor_flux, shift_down, shift_up
from .kernels import KernelTables, Model, ModelParams


def collision_flux_velocity(
    params: ModelParams,
    tables: KernelTables,
    rho: ScalarField,
    u: ScalarField,
    v: np.ndarray,
) -> np.ndarray:
    """Advection speed c(x, v) of the velocity-conservative interaction flux.

    Aggregation: c = v + (K' * rho). 3-zone: c = A(x) v - J(x) + (K' * rho)
    with A = phi * rho and J = phi * (rho u).
    """
    grid = rho.grid
    force = tables.gradK @ rho.values * grid.dx
    if params.model is Model.AGGREGATION:
        return v[None, :] + force[:, None]
    a = tables.phi @ rho.values * grid.dx
    j = tables.phi @ (rho.values * u.values) * grid.dx
    return a[:, None] * v[None, :] + (force - j)[:, None]


def _minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.where(a * b > 0.0, np.where(np.abs(a) < np.abs(b), a, b), 0.0)


def _fluxes(f: PhaseField, params: ModelParams, tables: KernelTables):
    grid = f.grid
    values = f.values
    rho = ScalarField(grid, values.sum(axis=1) * grid.dxi)
    m = values @ grid.xi_centers * grid.dxi
    u = ScalarField(grid, m / np.maximum(rho.values, DENSITY_FLOOR))

    # x-transport at speed v: the face speed equals the column velocity.
    speed_x = grid.xi_centers[None, :]
    flux_x = donor_flux(np.broadcast_to(speed_x, values.shape), values, shift_up(values))

    # v-transport at speed -c/eps; zero flux through the outermost faces.
    # Limited linear reconstruction toward the faces keeps the momentum
    # moment second-order accurate where the profile is resolved.
    v_faces = grid.xi_lo + np.arange(1, grid.n_xi) * grid.dxi
    speed_v = -collision_flux_velocity(params, tables, rho, u, v_faces) / params.eps
    jumps = np.diff(values, axis=1)
    slope = np.zeros_like(values)
    slope[:, 1:-1] = _minmod(jumps[:, :-1], jumps[:, 1:])
    from_left = values[:, :-1] + 0.5 * slope[:, :-1]
    from_right = values[:, 1:] - 0.5 * slope[:, 1:]
    flux_v = np.zeros((grid.n_x, grid.n_xi + 1))
    flux_v[:, 1:-1] = donor_flux(speed_v, from_left, from_right)
    return flux_x, flux_v, speed_v


def direct_step(
    f: PhaseField, params: ModelParams, tables: KernelTables, dt: float
) -> PhaseField:
    """One forward-Euler update of the unscaled density."""
    grid = f.grid
    flux_x, flux_v, _ = _fluxes(f, params, tables)
    div_x = (flux_x - shift_down(flux_x)) / grid.dx
    div_v = (flux_v[:, 1:] - flux_v[:, :-1]) / grid.dxi
    return PhaseField(grid, f.values - dt * (div_x + div_v))


def stable_dt(
    f: PhaseField, params: ModelParams, tables: KernelTables, safety: float = 0.9
) -> float:
    """min(dx/20, safety * dv / max|c/eps|): both directional CFL limits."""
    grid = f.grid
    _, _, speed_v = _fluxes(f, params, tables)
    dt_x = grid.dx / 20.0
    max_v = float(np.max(np.abs(speed_v))) if speed_v.size else 0.0
    dt_v = safety * grid.dxi / max_v if max_v > 0 else np.inf
    return min(dt_x, dt_v)


def run_direct(
    f: PhaseField,
    params: ModelParams,
    tables: KernelTables,
    t_final: float,
    safety: float = 0.9,
    snapshot_times: Sequence[float] = (),
    on_snapshot: Callable[[PhaseField, float], None] | None = None,
) -> tuple[PhaseField, list[tuple[float, float]]]:
    """March the direct solver to t_final with an adaptive stable step.

    Returns the final density and a (t, mass) history sampled every step.
    """
    grid = f.grid
    t = 0.0
    n = 0
    history = [(t, float(f.values.sum() * grid.dx * grid.dxi))]
    events = sorted({float(s) for s in snapshot_times if 0.0 < s <= t_final})
    if on_snapshot is not None and any(np.isclose(t, s) for s in snapshot_times):
        on_snapshot(f, t)
    tiny = 1e-12 * max(1.0, abs(t_final))
    while t < t_final - tiny:
        dt = stable_dt(f, params, tables, safety)
        next_stop = events[0] if events else t_final
        dt = min(dt, next_stop - t)
        f = direct_step(f, params, tables, dt)
        t += dt
        n += 1
        if not np.all(np.isfinite(f.values)):
            raise SimulationDiverged(n, t, "unscaled phase-space density")
        history.append((t, float(f.values.sum() * grid.dx * grid.dxi)))
        if events and t >= events[0] - tiny:
            events.pop(0)
            if on_snapshot is not None:
                on_snapshot(f, t)
    return f, history
