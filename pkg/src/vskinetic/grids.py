"""Phase-space grids, fields, and the discrete calculus shared by all solvers.

The computational domain is the periodic torus x in [-pi, pi) crossed with a
truncated velocity interval (v for the unscaled density, xi for the rescaled
one). Everything lives on uniform cell-centered finite-volume meshes; moments
use midpoint quadrature so conservation statements telescope to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Floor applied to every density appearing in a denominator. Far below the
# 1e-8 vacuum background of the sparsest preset.
DENSITY_FLOOR = 1e-14


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform cell-centered mesh, periodic in x, truncated in the velocity axis.

    Cell centers sit at midpoints, so for even ``n_xi`` no center falls on
    the velocity origin and odd moments of even profiles cancel in pairs.
    """

    n_x: int
    n_xi: int
    x_lo: float
    x_hi: float
    xi_lo: float
    xi_hi: float
    dx: float
    dxi: float
    x_centers: np.ndarray
    xi_centers: np.ndarray

    def wrap_index(self, i: int) -> int:
        """Periodic index arithmetic in x."""
        return i % self.n_x

    def same_layout(self, other: "PhaseGrid") -> bool:
        return (
            self.n_x == other.n_x
            and self.n_xi == other.n_xi
            and self.x_lo == other.x_lo
            and self.x_hi == other.x_hi
            and self.xi_lo == other.xi_lo
            and self.xi_hi == other.xi_hi
        )


@dataclass(frozen=True)
class PhaseField:
    """Cell averages of a phase-space density on a :class:`PhaseGrid`."""

    grid: PhaseGrid
    values: np.ndarray  # shape (n_x, n_xi)


@dataclass(frozen=True)
class ScalarField:
    """A macroscopic field (rho, u, m, omega, P, A or B) on the x-grid."""

    grid: PhaseGrid
    values: np.ndarray  # shape (n_x,)


def build_grid(n_x: int, n_xi: int, xi_max: float = 6.0) -> PhaseGrid:
    """Construct the periodic-x by truncated-velocity mesh.

    Args:
        n_x: number of cells on [-pi, pi), periodic.
        n_xi: number of cells on [-xi_max, xi_max].
        xi_max: velocity truncation radius.
    """
    if n_x < 2 or n_xi < 2:
        raise ValueError(f"grid needs at least 2 cells per axis, got ({n_x}, {n_xi})")
    if xi_max <= 0:
        raise ValueError(f"velocity truncation must be positive, got {xi_max}")
    x_lo, x_hi = -np.pi, np.pi
    xi_lo, xi_hi = -float(xi_max), float(xi_max)
    dx = (x_hi - x_lo) / n_x
    dxi = (xi_hi - xi_lo) / n_xi
    x_centers = x_lo + (np.arange(n_x) + 0.5) * dx
    xi_centers = xi_lo + (np.arange(n_xi) + 0.5) * dxi
    return PhaseGrid(n_x, n_xi, x_lo, x_hi, xi_lo, xi_hi, dx, dxi, x_centers, xi_centers)


def phase_field(grid: PhaseGrid, values: np.ndarray) -> PhaseField:
    """Wrap values on ``grid``, validating shape and finiteness."""
    values = np.asarray(values, dtype=float)
    if values.shape != (grid.n_x, grid.n_xi):
        raise ValueError(f"expected shape {(grid.n_x, grid.n_xi)}, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("phase field contains non-finite values")
    return PhaseField(grid, values)


def scalar_field(grid: PhaseGrid, values: np.ndarray) -> ScalarField:
    values = np.broadcast_to(np.asarray(values, dtype=float), (grid.n_x,)).copy()
    if not np.all(np.isfinite(values)):
        raise ValueError("scalar field contains non-finite values")
    return ScalarField(grid, values)


def wrap_periodic(z):
    """Shift by multiples of 2*pi into [-pi, pi). Idempotent."""
    return (z + np.pi) % TWO_PI - np.pi


def shift_up(a: np.ndarray) -> np.ndarray:
    """Periodic shift along axis 0: entry i becomes a[i+1] (wraps at the end)."""
    out = np.empty_like(a)
    out[:-1] = a[1:]
    out[-1] = a[0]
    return out


def shift_down(a: np.ndarray) -> np.ndarray:
    """Periodic shift along axis 0: entry i becomes a[i-1] (wraps at the start)."""
    out = np.empty_like(a)
    out[1:] = a[:-1]
    out[0] = a[-1]
    return out


def central_diff_x(values: np.ndarray, dx: float) -> np.ndarray:
    """Second-order central difference along axis 0 with periodic wrap."""
    return (shift_up(values) - shift_down(values)) / (2.0 * dx)


def gradient_x(field: ScalarField) -> ScalarField:
    """Periodic central-difference x-derivative of a macroscopic field."""
    return ScalarField(field.grid, central_diff_x(field.values, field.grid.dx))


def donor_flux(speed: np.ndarray, q_left: np.ndarray, q_right: np.ndarray) -> np.ndarray:
    """First-order upwind face flux: take the upstream cell value by sign of speed."""
    return speed * np.where(speed > 0.0, q_left, q_right)


def moment_0(f: PhaseField) -> ScalarField:
    """Density: midpoint quadrature of f over the velocity axis."""
    return ScalarField(f.grid, f.values.sum(axis=1) * f.grid.dxi)


def moment_1(f: PhaseField) -> ScalarField:
    """Momentum density: first velocity moment of f."""
    return ScalarField(f.grid, f.values @ f.grid.xi_centers * f.grid.dxi)


def moment_2_centered(g: PhaseField) -> ScalarField:
    """Pressure: second moment of the (already centered) rescaled density."""
    return ScalarField(g.grid, g.values @ g.grid.xi_centers**2 * g.grid.dxi)


def total_mass(f: PhaseField) -> float:
    return float(f.values.sum() * f.grid.dx * f.grid.dxi)


def total_momentum_of(m: ScalarField) -> float:
    return float(m.values.sum() * m.grid.dx)
