"""Conjugate gradient in a diagonally weighted inner product.

Both implicit solves (momentum relaxation and the limiting velocity equation)
are symmetric positive semidefinite in an inner product weighted by the local
density. CG run with that inner product sees a symmetric operator; an optional
projection keeps iterates inside a constraint subspace when the operator has
a known one-dimensional kernel.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import SolverFailure


def weighted_cg(
    apply_op: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    weight: np.ndarray,
    dx: float,
    rel_tol: float = 1e-10,
    max_iter: int = 1000,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
    what: str = "weighted CG",
) -> tuple[np.ndarray, int]:
    """Solve apply_op(x) = b with CG in <a, c> = sum(a*c*weight)*dx.

    Stops when the max-norm residual drops below rel_tol * max|b|. Returns
    (solution, iterations). Raises SolverFailure on stagnation.
    """

    def inner(a, c):
        return float(np.sum(a * c * weight) * dx)

    if project is not None:
        b = project(b)
    b_scale = float(np.max(np.abs(b)))
    x = np.zeros_like(b)
    if b_scale == 0.0:
        return x, 0

    r = b.copy()
    p = r.copy()
    rz = inner(r, r)
    tol_abs = rel_tol * b_scale
    for k in range(1, max_iter + 1):
        op_p = apply_op(p)
        denom = inner(p, op_p)
        if denom <= 0.0:
            raise SolverFailure(
                f"{what}: operator lost positivity on the Krylov space",
                residual=float(np.max(np.abs(r))),
                iterations=k,
            )
        alpha = rz / denom
        x = x + alpha * p
        r = r - alpha * op_p
        if project is not None:
            x = project(x)
            r = project(r)
        if float(np.max(np.abs(r))) <= tol_abs:
            return x, k
        rz_new = inner(r, r)
        p = r + (rz_new / rz) * p
        rz = rz_new
    raise SolverFailure(
        f"{what}: no convergence within {max_iter} iterations",
        residual=float(np.max(np.abs(r))),
        iterations=max_iter,
    )
