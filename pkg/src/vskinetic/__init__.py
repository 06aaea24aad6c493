"""Velocity-scaling asymptotic-preserving solver for kinetic interaction models.

A phase-space finite-volume code for kinetic equations whose vanishing-
relaxation limit concentrates to a single velocity per point. The solution is
evolved in a rescaled velocity frame where it stays bounded and compactly
supported uniformly in the relaxation parameter, together with direct and
limiting-system reference solvers and the diagnostics needed to check the
scheme's stability and limit behavior.
"""

__version__ = "0.1.0"

from .grids import (
    DENSITY_FLOOR,
    PhaseField,
    PhaseGrid,
    ScalarField,
    build_grid,
    gradient_x,
    moment_0,
    moment_1,
    moment_2_centered,
    phase_field,
    scalar_field,
    total_mass,
    wrap_periodic,
)
from .kernels import (
    INVERSE_SQRT,
    MORSE_DEFAULT,
    MORSE_RESCALED,
    InfluenceSpec,
    KernelTables,
    Model,
    ModelParams,
    PotentialSpec,
    build_tables,
    compute_A,
    compute_B,
    conv_gradK,
    influence_eval,
    potential_grad,
)
from .transform import initialize_triple, transform_forward, transform_inverse
from .rescaled import (
    FixedDt,
    PaperCFL,
    RescaledState,
    SafeCFL,
    SolverConfig,
    make_state,
)
from .errors import SimulationDiverged, SolverFailure, StepRejected

__all__ = [name for name in dir() if not name.startswith("_")]
