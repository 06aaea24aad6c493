"""Interaction potentials, influence weights, and the nonlocal model coefficients.

Attraction-repulsion forces and alignment weights act through periodic
convolutions on the torus. Kernels are tabulated once per grid as dense
n_x-by-n_x matrices evaluated at the minimal periodic image. The force table
is exactly antisymmetric and the alignment table exactly symmetric by
construction, which makes the discrete momentum bookkeeping exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .grids import PhaseGrid, ScalarField


class Model(Enum):
    AGGREGATION = "aggregation"
    THREE_ZONE = "3zone"


@dataclass(frozen=True)
class PotentialSpec:
    """Morse-type radial potential K(x) = -c_a*exp(-|x|/l_a) + c_r*exp(-|x|/l_r)."""

    c_a: float
    l_a: float
    c_r: float
    l_r: float

    def __post_init__(self):
        if self.l_a <= 0 or self.l_r <= 0:
            raise ValueError("potential length scales must be positive")


MORSE_DEFAULT = PotentialSpec(1.0, 2.0, 1.0, 1.0)
MORSE_RESCALED = PotentialSpec(1.0, 1.0, 1.0, 0.5)


@dataclass(frozen=True)
class InfluenceSpec:
    """Alignment weight phi(r) = 1/sqrt(1 + r^2); phi(0) = 1, non-increasing."""

    kind: str = "inverse-sqrt"

    def __post_init__(self):
        if self.kind != "inverse-sqrt":
            raise ValueError(f"unknown influence kind {self.kind!r}")


INVERSE_SQRT = InfluenceSpec()

POTENTIAL_PRESETS = {"morse": MORSE_DEFAULT, "morse-rescaled": MORSE_RESCALED}
INFLUENCE_PRESETS = {"inverse-sqrt": INVERSE_SQRT}


@dataclass(frozen=True)
class ModelParams:
    """Model kind, relaxation parameter, and its interaction kernels."""

    model: Model
    eps: float
    potential: PotentialSpec
    influence: InfluenceSpec | None = None

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError(f"relaxation parameter must be positive, got {self.eps}")
        if self.model is Model.THREE_ZONE and self.influence is None:
            raise ValueError("3-zone model requires an influence spec")


@dataclass(frozen=True)
class KernelTables:
    """Dense periodic kernel tables on a fixed x-grid.

    ``gradK[i, j] = K'(minimal image of x_i - x_j)`` and
    ``phi[i, j] = phi(|minimal image of x_i - x_j|)`` (3-zone only).
    """

    grid: PhaseGrid
    gradK: np.ndarray
    phi: np.ndarray | None


def potential_grad(spec: PotentialSpec, z):
    """Radial derivative K'(z) of the Morse potential; 0 at the origin kink."""
    az = np.abs(z)
    mag = spec.c_a / spec.l_a * np.exp(-az / spec.l_a) - spec.c_r / spec.l_r * np.exp(
        -az / spec.l_r
    )
    return np.sign(z) * mag


def influence_eval(spec: InfluenceSpec, r):
    return 1.0 / np.sqrt(1.0 + np.square(r))


def build_tables(
    grid: PhaseGrid, potential: PotentialSpec, influence: InfluenceSpec | None = None
) -> KernelTables:
    """Tabulate K' and phi at every periodic pairwise separation.

    Separations are built from integer index offsets so that gradK is
    antisymmetric to the bit. For even n_x the antipodal separation is its
    own periodic mirror; the wrapped distance has a smooth maximum there, so
    its symmetric derivative vanishes and the entry is set to zero.
    """
    n = grid.n_x
    idx = np.arange(n)
    offsets = (idx[:, None] - idx[None, :] + n // 2) % n - n // 2
    z = offsets * grid.dx
    gradK = potential_grad(potential, z)
    gradK[2 * offsets == -n] = 0.0
    phi = influence_eval(influence, np.abs(z)) if influence is not None else None
    return KernelTables(grid, gradK, phi)


def conv_gradK(tables: KernelTables, rho: ScalarField) -> ScalarField:
    """Periodic force convolution (K' * rho) by midpoint quadrature."""
    return ScalarField(rho.grid, tables.gradK @ rho.values * rho.grid.dx)


def conv_phi(tables: KernelTables, field: ScalarField) -> ScalarField:
    """Alignment-weighted average (phi * field) by midpoint quadrature."""
    if tables.phi is None:
        raise ValueError("no influence table was built for this model")
    return ScalarField(field.grid, tables.phi @ field.values * field.grid.dx)


def compute_A(params: ModelParams, tables: KernelTables, rho: ScalarField) -> ScalarField:
    """Relaxation-rate coefficient: 1 for aggregation, phi * rho for 3-zone."""
    if params.model is Model.AGGREGATION:
        return ScalarField(rho.grid, np.ones(rho.grid.n_x))
    return conv_phi(tables, rho)


def relaxation_lower_bound(params: ModelParams, mass: float) -> float:
    """Positive lower bound c on the relaxation coefficient A.

    Aggregation has A identically one. For the 3-zone model every pairwise
    wrapped distance is at most pi, so A >= phi(pi) * total mass.
    """
    if params.model is Model.AGGREGATION:
        return 1.0
    return float(influence_eval(params.influence, np.pi) * mass)


def compute_B(
    params: ModelParams, tables: KernelTables, rho: ScalarField, u: ScalarField
) -> ScalarField:
    """Velocity forcing coefficient for the macroscopic momentum balance."""
    force = conv_gradK(tables, rho).values
    if params.model is Model.AGGREGATION:
        return ScalarField(rho.grid, -u.values - force)
    weighted = conv_phi(tables, ScalarField(rho.grid, rho.values * u.values)).values
    a = conv_phi(tables, rho).values
    return ScalarField(rho.grid, weighted - u.values * a - force)
