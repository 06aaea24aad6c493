"""Monitored quantities: oscillation ratios, support radius, conservation totals.

Everything here is a pure reduction of the current fields. The time loops
sample these into records; nothing in this module performs I/O.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .grids import (
    DENSITY_FLOOR,
    PhaseField,
    ScalarField,
    central_diff_x,
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    momentum: float
    max_grad_u: float
    max_grad_rho_over_rho: float
    max_grad_P_over_rho: float
    G: float
    R: float
    omega_max: float
    omega_bound: float
    first_xi_moment_max: float
    boundary_mass_fraction: float
    cg_iters: int

    @staticmethod
    def field_names() -> list[str]:
        return [f.name for f in fields(DiagnosticsRecord)]

    def as_row(self) -> list[float]:
        return [getattr(self, name) for name in self.field_names()]


def nonosc_monitors(
    rho: ScalarField, u: ScalarField, P: ScalarField
) -> tuple[float, float, float]:
    """Max over x of |du/dx|, |drho/dx|/rho and |dP/dx|/rho (densities floored)."""
    dx = rho.grid.dx
    rho_floor = np.maximum(rho.values, DENSITY_FLOOR)
    max_grad_u = float(np.max(np.abs(central_diff_x(u.values, dx))))
    max_grad_rho = float(np.max(np.abs(central_diff_x(rho.values, dx)) / rho_floor))
    max_grad_P = float(np.max(np.abs(central_diff_x(P.values, dx)) / rho_floor))
    return max_grad_u, max_grad_rho, max_grad_P


def support_radius(g: PhaseField, threshold_frac: float = 1e-9) -> float:
    """Radius of the velocity support above a relative threshold.

    Discrete fields carry roundoff tails, so support is measured where the
    (clipped) density exceeds threshold_frac times its maximum; the radius
    extends to the outer edge of the last occupied cell.
    """
    if not 0.0 < threshold_frac < 1.0:
        raise ValueError("threshold fraction must lie in (0, 1)")
    values = np.maximum(g.values, 0.0)
    peak = values.max()
    if peak == 0.0:
        return 0.0
    occupied = np.any(values > threshold_frac * peak, axis=0)
    if not occupied.any():
        return 0.0
    return float(np.max(np.abs(g.grid.xi_centers[occupied])) + 0.5 * g.grid.dxi)


def compare_fields(a: ScalarField, b: ScalarField, norm: str = "l1") -> float:
    """L1 or max-norm distance between two fields on the same grid."""
    if not a.grid.same_layout(b.grid):
        raise ValueError("cannot compare fields on different grids")
    diff = np.abs(a.values - b.values)
    if norm == "l1":
        return float(diff.sum() * a.grid.dx)
    if norm == "linf":
        return float(diff.max())
    raise ValueError(f"unknown norm {norm!r}")


def first_xi_moment_max(g: PhaseField) -> float:
    grid = g.grid
    return float(np.max(np.abs(g.values @ grid.xi_centers * grid.dxi)))


def boundary_mass_fraction(g: PhaseField) -> float:
    """Fraction of mass in the outermost velocity cells (domain-truncation monitor)."""
    total = g.values.sum()
    if total == 0.0:
        return 0.0
    edge = g.values[:, 0].sum() + g.values[:, -1].sum()
    return float(edge / total)


def record_from_fields(
    t: float,
    g: PhaseField,
    rho: ScalarField,
    m: ScalarField,
    u: ScalarField,
    omega: ScalarField,
    P: ScalarField,
    omega_bound: float,
    cg_iters: int = 0,
) -> DiagnosticsRecord:
    grid = g.grid
    max_grad_u, max_grad_rho, max_grad_P = nonosc_monitors(rho, u, P)
    return DiagnosticsRecord(
        t=t,
        mass=float(rho.values.sum() * grid.dx),
        momentum=float(m.values.sum() * grid.dx),
        max_grad_u=max_grad_u,
        max_grad_rho_over_rho=max_grad_rho,
        max_grad_P_over_rho=max_grad_P,
        G=float(np.max(np.abs(g.values))),
        R=support_radius(g),
        omega_max=float(np.max(omega.values)),
        omega_bound=omega_bound,
        first_xi_moment_max=first_xi_moment_max(g),
        boundary_mass_fraction=boundary_mass_fraction(g),
        cg_iters=cg_iters,
    )
