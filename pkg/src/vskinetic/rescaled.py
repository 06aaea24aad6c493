"""Time stepper for the rescaled system in the scaled velocity frame.

One step advances the solution triple (g, u, omega) plus the derived
macroscopic fields in a fixed order: explicit conservative transport of g
with donor-cell fluxes in both directions, density update by velocity
integration, implicit momentum relaxation (closed form for aggregation,
weighted conjugate gradient for the 3-zone alignment operator), and finally
the pointwise-implicit update of the scaling factor. The stiff relaxation is
implicit, so the admissible time step is set by transport speeds alone and
does not depend on the relaxation parameter.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .diagnostics import DiagnosticsRecord, record_from_fields
from .errors import SimulationDiverged, StepRejected
from .grids import (
    DENSITY_FLOOR,
    PhaseField,
    PhaseGrid,
    ScalarField,
    central_diff_x,
    donor_flux,
    shift_down,
    shift_up,
)
from .kernels import KernelTables, Model, ModelParams, relaxation_lower_bound
from .linalg import weighted_cg

BOUNDARY_MASS_WARN = 1e-8


@dataclass(frozen=True)
class PaperCFL:
    """Fixed dt = dx/20, the reference choice for all experiments."""

    divisor: float = 20.0


@dataclass(frozen=True)
class SafeCFL:
    """Additionally bound dt by both directional transport speeds."""

    number: float = 0.9


@dataclass(frozen=True)
class FixedDt:
    dt: float


DtRule = PaperCFL | SafeCFL | FixedDt


@dataclass(frozen=True)
class SolverConfig:
    dt_rule: DtRule = PaperCFL()
    cg_rel_tol: float = 1e-10
    cg_max_iter: int | None = None  # defaults to 10 * n_x
    positivity_clip: bool = False

    def __post_init__(self):
        if self.cg_rel_tol <= 0:
            raise ValueError("CG tolerance must be positive")

    def max_iter_for(self, grid: PhaseGrid) -> int:
        return self.cg_max_iter if self.cg_max_iter is not None else 10 * grid.n_x


@dataclass
class RescaledState:
    """Solution triple plus derived macroscopic fields at one time level."""

    g: PhaseField
    rho: ScalarField
    m: ScalarField
    u: ScalarField
    omega: ScalarField
    P: ScalarField
    t: float
    n: int
    cg_iters: int = 0


def make_state(
    g: PhaseField,
    m: ScalarField | None = None,
    omega: ScalarField | None = None,
    t: float = 0.0,
) -> RescaledState:
    """Assemble a consistent state from g and optional momentum / scaling data."""
    grid = g.grid
    rho = ScalarField(grid, g.values.sum(axis=1) * grid.dxi)
    if m is None:
        m = ScalarField(grid, np.zeros(grid.n_x))
    if omega is None:
        omega = ScalarField(grid, np.ones(grid.n_x))
    u = ScalarField(grid, m.values / np.maximum(rho.values, DENSITY_FLOOR))
    P = ScalarField(grid, g.values @ grid.xi_centers**2 * grid.dxi)
    return RescaledState(g=g, rho=rho, m=m, u=u, omega=omega, P=P, t=t, n=0)


def _xi_speed(state: RescaledState, xi: np.ndarray) -> np.ndarray:
    """Velocity-direction flux coefficient a(x, xi) evaluated at given xi values.

    a = xi^2 d_x(omega) + xi d_x(u) - d_x(omega^2 P) / (rho * omega), with
    central differences for every macroscopic gradient and a floored
    denominator so collapsed-scaling states stay finite.
    """
    grid = state.g.grid
    dx = grid.dx
    grad_omega = central_diff_x(state.omega.values, dx)
    grad_u = central_diff_x(state.u.values, dx)
    grad_press = central_diff_x(state.omega.values**2 * state.P.values, dx)
    denom = np.maximum(state.rho.values * state.omega.values, DENSITY_FLOOR)
    return (
        grad_omega[:, None] * xi[None, :] ** 2
        + grad_u[:, None] * xi[None, :]
        - (grad_press / denom)[:, None]
    )


def xi_coefficient(state: RescaledState) -> PhaseField:
    """a(x, xi) at cell centers (diagnostic view of the xi-direction speed)."""
    grid = state.g.grid
    return PhaseField(grid, _xi_speed(state, grid.xi_centers))


def _transport_fluxes(state: RescaledState):
    """Donor-cell face fluxes for the conservative transport of g.

    Returns (F_x, G_xi) where F_x[i] is the flux through the face between
    cells i and i+1 (periodic) and G_xi[:, k] the flux through xi-face k
    (n_xi + 1 faces; zero flux through the outermost faces, where the
    solution is required to vanish).
    """
    grid = state.g.grid
    g = state.g.values
    u, w = state.u.values, state.omega.values

    u_face = 0.5 * (u + shift_up(u))
    w_face = 0.5 * (w + shift_up(w))
    speed_x = u_face[:, None] + w_face[:, None] * grid.xi_centers[None, :]
    flux_x = donor_flux(speed_x, g, shift_up(g))

    xi_faces = grid.xi_lo + np.arange(1, grid.n_xi) * grid.dxi
    speed_xi = -_xi_speed(state, xi_faces)
    flux_xi = np.zeros((grid.n_x, grid.n_xi + 1))
    flux_xi[:, 1:-1] = donor_flux(speed_xi, g[:, :-1], g[:, 1:])
    return flux_x, flux_xi, speed_x, speed_xi


def admissible_dt(state: RescaledState, nu: float = 0.9) -> float:
    """Largest step allowed by the directional CFL limits (safety factor nu)."""
    grid = state.g.grid
    _, _, speed_x, speed_xi = _transport_fluxes(state)
    max_x = float(np.max(np.abs(speed_x)))
    max_xi = float(np.max(np.abs(speed_xi))) if speed_xi.size else 0.0
    dt_x = grid.dx / max_x if max_x > 0 else np.inf
    dt_xi = grid.dxi / max_xi if max_xi > 0 else np.inf
    return nu * min(dt_x, dt_xi)


def explicit_g_step(state: RescaledState, dt: float, config: SolverConfig) -> PhaseField:
    """Forward-Euler finite-volume transport of g; conservative by construction."""
    grid = state.g.grid
    flux_x, flux_xi, speed_x, speed_xi = _transport_fluxes(state)
    if isinstance(config.dt_rule, SafeCFL):
        nu = config.dt_rule.number
        max_x = float(np.max(np.abs(speed_x)))
        max_xi = float(np.max(np.abs(speed_xi))) if speed_xi.size else 0.0
        dt_x = grid.dx / max_x if max_x > 0 else np.inf
        dt_xi = grid.dxi / max_xi if max_xi > 0 else np.inf
        dt_ok = nu * min(dt_x, dt_xi)
        if dt > dt_ok * (1.0 + 1e-12):
            raise StepRejected(dt, dt_ok)
    div_x = (flux_x - shift_down(flux_x)) / grid.dx
    div_xi = (flux_xi[:, 1:] - flux_xi[:, :-1]) / grid.dxi
    g_new = state.g.values - dt * (div_x + div_xi)
    if config.positivity_clip:
        g_new = np.maximum(g_new, 0.0)
    return PhaseField(grid, g_new)


def _momentum_rhs(state: RescaledState, dt: float) -> np.ndarray:
    """Explicit part of the momentum balance: convection upwinded by the sign
    of the face velocity, pressure gradient central."""
    grid = state.g.grid
    m, u, w, P = state.m.values, state.u.values, state.omega.values, state.P.values
    u_face = 0.5 * (u + shift_up(u))
    conv_flux = donor_flux(u_face, m, shift_up(m))
    conv_div = (conv_flux - shift_down(conv_flux)) / grid.dx
    grad_press = central_diff_x(w**2 * P, grid.dx)
    return m - dt * (conv_div + grad_press)


def implicit_momentum_solve(
    state: RescaledState,
    rho_new: ScalarField,
    tables: KernelTables,
    params: ModelParams,
    dt: float,
    config: SolverConfig,
) -> tuple[ScalarField, int]:
    """Implicit relaxation step for the momentum density.

    Aggregation reduces to a pointwise closed form. The 3-zone alignment
    operator is symmetric positive semidefinite in the 1/rho-weighted inner
    product (constants in velocity span its kernel), so the linear system is
    solved by conjugate gradient in that inner product.
    """
    grid = state.g.grid
    rhs = _momentum_rhs(state, dt)
    ratio = dt / params.eps
    rho = rho_new.values
    force = rho * (tables.gradK @ rho * grid.dx)
    if params.model is Model.AGGREGATION:
        m_new = (rhs - ratio * force) / (1.0 + ratio)
        return ScalarField(grid, m_new), 0

    phi = tables.phi
    a_new = phi @ rho * grid.dx

    def apply_op(m):
        return m + ratio * (a_new * m - rho * (phi @ m * grid.dx))

    weight = 1.0 / np.maximum(rho, DENSITY_FLOOR)
    m_new, iters = weighted_cg(
        apply_op,
        rhs - ratio * force,
        weight,
        grid.dx,
        rel_tol=config.cg_rel_tol,
        max_iter=config.max_iter_for(grid),
        what="momentum relaxation",
    )
    return ScalarField(grid, m_new), iters


def implicit_omega_update(
    omega: ScalarField, u: ScalarField, A_new: ScalarField, dt: float, eps: float
) -> ScalarField:
    """Advect the scaling factor explicitly, relax it implicitly.

    The division by 1 + dt*A/eps makes the update stable for any ratio
    dt/eps and yields the discrete geometric decay chain.
    """
    grid = omega.grid
    w = omega.values
    backward = (w - shift_down(w)) / grid.dx
    forward = (shift_up(w) - w) / grid.dx
    advection = u.values * np.where(u.values > 0.0, backward, forward)
    return ScalarField(grid, (w - dt * advection) / (1.0 + dt * A_new.values / eps))


def step(
    state: RescaledState,
    tables: KernelTables,
    params: ModelParams,
    config: SolverConfig,
    dt: float,
) -> RescaledState:
    """One full update: transport, density, momentum, scaling factor."""
    grid = state.g.grid
    g_new = explicit_g_step(state, dt, config)
    rho_new = ScalarField(grid, g_new.values.sum(axis=1) * grid.dxi)
    m_new, iters = implicit_momentum_solve(state, rho_new, tables, params, dt, config)
    if params.model is Model.AGGREGATION:
        A_new = ScalarField(grid, np.ones(grid.n_x))
    else:
        A_new = ScalarField(grid, tables.phi @ rho_new.values * grid.dx)
    omega_new = implicit_omega_update(state.omega, state.u, A_new, dt, params.eps)
    u_new = ScalarField(grid, m_new.values / np.maximum(rho_new.values, DENSITY_FLOOR))
    P_new = ScalarField(grid, g_new.values @ grid.xi_centers**2 * grid.dxi)
    return RescaledState(
        g=g_new,
        rho=rho_new,
        m=m_new,
        u=u_new,
        omega=omega_new,
        P=P_new,
        t=state.t + dt,
        n=state.n + 1,
        cg_iters=iters,
    )


def _rule_dt(state: RescaledState, config: SolverConfig) -> float:
    grid = state.g.grid
    if isinstance(config.dt_rule, FixedDt):
        return config.dt_rule.dt
    if isinstance(config.dt_rule, PaperCFL):
        return grid.dx / config.dt_rule.divisor
    return min(grid.dx / 20.0, admissible_dt(state, config.dt_rule.number))


def run(
    state: RescaledState,
    tables: KernelTables,
    params: ModelParams,
    config: SolverConfig,
    t_final: float,
    diag_stride: int = 5,
    snapshot_times: Sequence[float] = (),
    on_snapshot: Callable[[RescaledState], None] | None = None,
) -> tuple[RescaledState, list[DiagnosticsRecord]]:
    """March to t_final, sampling diagnostics every diag_stride steps.

    The step is truncated to land exactly on every snapshot time and on
    t_final. Any non-finite value aborts with the offending step number.
    """
    if t_final < state.t:
        raise ValueError("final time precedes current state time")
    grid = state.g.grid
    tiny = 1e-12 * max(1.0, abs(t_final))
    if t_final <= state.t + tiny:
        return state, []
    mass0 = float(state.rho.values.sum() * grid.dx)
    c_low = relaxation_lower_bound(params, mass0)
    omega_bound = 1.0

    events = sorted({float(s) for s in snapshot_times if state.t < s <= t_final})
    records = [
        record_from_fields(
            state.t, state.g, state.rho, state.m, state.u, state.omega, state.P,
            omega_bound, state.cg_iters,
        )
    ]
    if on_snapshot is not None and any(np.isclose(state.t, s) for s in snapshot_times):
        on_snapshot(state)

    warned_boundary = False
    while state.t < t_final - tiny:
        dt = _rule_dt(state, config)
        next_stop = events[0] if events else t_final
        dt = min(dt, next_stop - state.t)
        state = step(state, tables, params, config, dt)
        omega_bound /= 1.0 + c_low * dt / params.eps
        if not np.all(np.isfinite(state.g.values)):
            raise SimulationDiverged(state.n, state.t, "rescaled phase-space density")
        if not (np.all(np.isfinite(state.m.values)) and np.all(np.isfinite(state.omega.values))):
            raise SimulationDiverged(state.n, state.t, "macroscopic fields")
        if events and state.t >= events[0] - tiny:
            events.pop(0)
            if on_snapshot is not None:
                on_snapshot(state)
        at_end = state.t >= t_final - tiny
        if state.n % diag_stride == 0 or at_end:
            rec = record_from_fields(
                state.t, state.g, state.rho, state.m, state.u, state.omega, state.P,
                omega_bound, state.cg_iters,
            )
            if not np.all(np.isfinite(rec.as_row())):
                raise SimulationDiverged(state.n, state.t, "diagnostic monitors")
            records.append(rec)
            if not warned_boundary and rec.boundary_mass_fraction > BOUNDARY_MASS_WARN:
                warnings.warn(
                    f"velocity-domain boundary holds {rec.boundary_mass_fraction:.2e} "
                    "of the mass; truncation radius may be too small",
                    stacklevel=2,
                )
                warned_boundary = True
    return state, records
