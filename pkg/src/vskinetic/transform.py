"""Velocity scaling between the physical frame and the rescaled frame.

The rescaled density g(x, xi) = omega(x) * f(x, u(x) + omega(x) * xi) shares
its zeroth moment with f and has zero first moment in xi. Both directions are
realized by linear interpolation with zero extension outside the velocity
domain, which is first-order consistent and positivity preserving.
"""

from __future__ import annotations

import numpy as np

from .grids import (
    DENSITY_FLOOR,
    PhaseField,
    PhaseGrid,
    ScalarField,
    moment_0,
    moment_1,
)


def _require_positive_omega(omega: ScalarField):
    if np.min(omega.values) <= 0.0:
        raise ValueError("scaling factor must be strictly positive everywhere")


def transform_forward(f: PhaseField, u: ScalarField, omega: ScalarField) -> PhaseField:
    """Map f(x, v) to the rescaled g(x, xi) on the same velocity layout."""
    _require_positive_omega(omega)
    grid = f.grid
    g = np.empty_like(f.values)
    for i in range(grid.n_x):
        v_samples = u.values[i] + omega.values[i] * grid.xi_centers
        g[i] = omega.values[i] * np.interp(
            v_samples, grid.xi_centers, f.values[i], left=0.0, right=0.0
        )
    return PhaseField(grid, g)


def transform_inverse(
    g: PhaseField, u: ScalarField, omega: ScalarField, v_grid: PhaseGrid
) -> PhaseField:
    """Reconstruct f(x, v) = g(x, (v - u)/omega) / omega on ``v_grid``."""
    _require_positive_omega(omega)
    f = np.empty((v_grid.n_x, v_grid.n_xi))
    for i in range(v_grid.n_x):
        xi_samples = (v_grid.xi_centers - u.values[i]) / omega.values[i]
        f[i] = (
            np.interp(xi_samples, g.grid.xi_centers, g.values[i], left=0.0, right=0.0)
            / omega.values[i]
        )
    return PhaseField(v_grid, f)


def initialize_triple(
    f0: PhaseField,
) -> tuple[PhaseField, ScalarField, ScalarField, ScalarField]:
    """Build the initial (g, rho, u, omega) from unscaled data.

    No scaling is performed at t = 0: omega starts at one and g is f shifted
    to its local bulk velocity, so the first xi-moment of g vanishes.
    """
    if np.min(f0.values) < 0.0:
        raise ValueError("initial phase-space density must be nonnegative")
    grid = f0.grid
    rho0 = moment_0(f0)
    u0 = ScalarField(grid, moment_1(f0).values / np.maximum(rho0.values, DENSITY_FLOOR))
    omega0 = ScalarField(grid, np.ones(grid.n_x))
    g0 = transform_forward(f0, u0, omega0)
    return g0, rho0, u0, omega0
