"""Macroscopic solvers for the vanishing-relaxation limit systems.

Aggregation closes the continuity equation with an explicit nonlocal
velocity. The 3-zone limit instead determines u from a linear balance between
alignment and attraction; that operator is symmetric positive semidefinite in
the rho-weighted inner product with the constants as kernel, so the solve is
a projected conjugate gradient under the zero-total-momentum constraint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StepRejected
from .grids import DENSITY_FLOOR, ScalarField, donor_flux, shift_down, shift_up
from .kernels import KernelTables, Model, ModelParams
from .linalg import weighted_cg


def limit_velocity_aggregation(tables: KernelTables, rho: ScalarField) -> ScalarField:
    """u = -(K' * rho): the aggregation limit velocity is local force balance."""
    return ScalarField(rho.grid, -(tables.gradK @ rho.values) * rho.grid.dx)


def limit_velocity_threezone(
    tables: KernelTables,
    rho: ScalarField,
    cg_rel_tol: float = 1e-10,
    cg_max_iter: int | None = None,
) -> ScalarField:
    """Solve the alignment balance for u under zero total momentum.

    The operator L u = A u - phi*(rho u) annihilates constants; iterates are
    projected onto the rho-orthogonal complement, which is exactly the
    momentum-conservation condition selecting the unique solution.
    """
    grid = rho.grid
    rho_floor = np.maximum(rho.values, DENSITY_FLOOR)
    mass = float(rho_floor.sum() * grid.dx)
    phi = tables.phi
    a = phi @ rho_floor * grid.dx

    def apply_op(u):
        return a * u - phi @ (rho_floor * u) * grid.dx

    def project(u):
        return u - np.sum(rho_floor * u) * grid.dx / mass

    b = -(tables.gradK @ rho.values) * grid.dx
    u, _ = weighted_cg(
        apply_op,
        b,
        rho_floor,
        grid.dx,
        rel_tol=cg_rel_tol,
        max_iter=cg_max_iter if cg_max_iter is not None else 10 * grid.n_x,
        project=project,
        what="limit velocity",
    )
    return ScalarField(grid, u)


def limit_velocity(
    params: ModelParams, tables: KernelTables, rho: ScalarField, cg_rel_tol: float = 1e-10
) -> ScalarField:
    if params.model is Model.AGGREGATION:
        return limit_velocity_aggregation(tables, rho)
    return limit_velocity_threezone(tables, rho, cg_rel_tol)


def advect_density(rho: ScalarField, u: ScalarField, dt: float) -> ScalarField:
    """Conservative donor-cell continuity update at face-averaged speeds."""
    grid = rho.grid
    speed = 0.5 * (u.values + shift_up(u.values))
    flux = donor_flux(speed, rho.values, shift_up(rho.values))
    return ScalarField(grid, rho.values - dt * (flux - shift_down(flux)) / grid.dx)


def limit_step(
    rho: ScalarField,
    tables: KernelTables,
    params: ModelParams,
    dt: float,
    cg_rel_tol: float = 1e-10,
    enforce_cfl: bool = False,
    cfl_number: float = 0.9,
) -> ScalarField:
    """One semi-discrete limiting update; velocity recomputed from rho."""
    u = limit_velocity(params, tables, rho, cg_rel_tol)
    if enforce_cfl:
        max_u = float(np.max(np.abs(u.values)))
        dt_ok = cfl_number * rho.grid.dx / max_u if max_u > 0 else np.inf
        if dt > dt_ok * (1.0 + 1e-12):
            raise StepRejected(dt, dt_ok)
    return advect_density(rho, u, dt)


def run_limiting(
    rho: ScalarField,
    tables: KernelTables,
    params: ModelParams,
    t_final: float,
    dt: float | None = None,
    cg_rel_tol: float = 1e-10,
) -> tuple[ScalarField, ScalarField]:
    """March the limiting system to t_final with a fixed step (default dx/20)."""
    grid = rho.grid
    if dt is None:
        dt = grid.dx / 20.0
    t = 0.0
    tiny = 1e-12 * max(1.0, abs(t_final))
    u = limit_velocity(params, tables, rho, cg_rel_tol)
    while t < t_final - tiny:
        dt_step = min(dt, t_final - t)
        rho = advect_density(rho, u, dt_step)
        t += dt_step
        u = limit_velocity(params, tables, rho, cg_rel_tol)
    return rho, u


@dataclass(frozen=True)
class StationaryResult:
    rho: ScalarField
    u: ScalarField
    settled: bool
    t_reached: float


def stationary_profile(
    rho0: ScalarField,
    tables: KernelTables,
    params: ModelParams,
    t_long: float = 2000.0,
    settle_tol: float = 1e-8,
    cfl_number: float = 0.9,
    cg_rel_tol: float = 1e-10,
) -> StationaryResult:
    """Integrate the limiting system until the density stops moving.

    Stationarity is declared when the per-unit-time density residual
    max|rho_new - rho| / dt falls below settle_tol; that criterion is
    independent of the step size, so the march may take the largest stable
    step. Returns the best state with a settled flag either way.
    """
    grid = rho0.grid
    rho = rho0
    t = 0.0
    u = limit_velocity(params, tables, rho, cg_rel_tol)
    while t < t_long:
        max_u = float(np.max(np.abs(u.values)))
        dt = cfl_number * grid.dx / max_u if max_u > 0 else t_long - t
        dt = min(dt, t_long - t)
        rho_new = advect_density(rho, u, dt)
        residual = float(np.max(np.abs(rho_new.values - rho.values))) / dt
        rho = rho_new
        t += dt
        u = limit_velocity(params, tables, rho, cg_rel_tol)
        if residual <= settle_tol:
            return StationaryResult(rho, u, True, t)
    return StationaryResult(rho, u, False, t)
