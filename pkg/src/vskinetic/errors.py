"""Exception types shared across the solvers."""


class StepRejected(RuntimeError):
    """Requested time step violates the active CFL rule.

    Carries the largest admissible step so callers can retry.
    """

    def __init__(self, dt_requested: float, dt_admissible: float):
        super().__init__(
            f"time step {dt_requested:.6g} rejected by CFL rule; "
            f"admissible dt <= {dt_admissible:.6g}"
        )
        self.dt_requested = dt_requested
        self.dt_admissible = dt_admissible


class SolverFailure(RuntimeError):
    """An iterative solve did not reach its tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


class SimulationDiverged(RuntimeError):
    """A state field became NaN or infinite during time stepping."""

    def __init__(self, step: int, t: float, what: str):
        super().__init__(f"non-finite values in {what} at step {step}, t={t:.6g}")
        self.step = step
        self.t = t
