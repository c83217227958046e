"""Projected-gradient solver for the box-constrained metamodel.

Matrix-free: each iteration costs one P̃x and one P̃ᵀv product. Trial steps use
the Barzilai-Borwein length and are shortened by Armijo backtracking, so
accepted objective values never increase.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from odcal.errors import InvalidInputError, NumericError
from odcal.metamodel.problem import MetamodelProblem, metamodel_gradient, metamodel_value
from odcal.network.types import ODVector

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-6
DEFAULT_MAX_ITERATIONS = 10_000
ARMIJO = 1e-4
MAX_BACKTRACKS = 60
STEP_BOUNDS = (1e-12, 1e12)


@dataclass(frozen=True)
class SolveResult:
    x: ODVector
    value: float
    iterations: int
    converged: bool
    nonconvex: bool
    projected_gradient_norm: float


def projected_gradient_norm(x: ODVector, grad: npt.NDArray[np.float64], problem: MetamodelProblem) -> float:
    return float(np.linalg.norm(problem.project(x - grad) - x))


def solve_metamodel(
    problem: MetamodelProblem,
    start: npt.ArrayLike,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> SolveResult:
    """Minimize m(x; β) over the box [lower, upper] starting from ``start``.

    Stops when ‖Π(x − ∇m) − x‖ ≤ tolerance·(1 + |m(x)|) or after
    ``max_iterations`` accepted steps.
    """
    x0 = np.asarray(start, dtype=float)
    if x0.shape != (problem.n_od,):
        raise InvalidInputError(f"start must have length {problem.n_od}, got shape {x0.shape}")
    nonconvex = not problem.is_convex()

    x = problem.project(x0)
    value = _finite(metamodel_value(x, problem), "objective")
    grad = _finite_vec(metamodel_gradient(x, problem), "gradient")
    step = 1.0 / max(1.0, float(np.max(np.abs(grad))) if grad.size else 1.0)
    pg_norm = projected_gradient_norm(x, grad, problem)

    iterations = 0
    converged = pg_norm <= tolerance * (1.0 + abs(value))
    while not converged and iterations < max_iterations:
        t = step
        for _ in range(MAX_BACKTRACKS):
            candidate = problem.project(x - t * grad)
            move = candidate - x
            cand_value = _finite(metamodel_value(candidate, problem), "objective")
            if cand_value <= value + ARMIJO * float(grad @ move):
                break
            t *= 0.5
        else:
            logger.debug("Backtracking stalled after %d halvings at iteration %d", MAX_BACKTRACKS, iterations)
            break

        cand_grad = _finite_vec(metamodel_gradient(candidate, problem), "gradient")
        s = move
        y = cand_grad - grad
        sy = float(s @ y)
        step = float(s @ s) / sy if sy > 0 else 2.0 * t
        step = min(max(step, STEP_BOUNDS[0]), STEP_BOUNDS[1])

        x, value, grad = candidate, cand_value, cand_grad
        iterations += 1
        pg_norm = projected_gradient_norm(x, grad, problem)
        converged = pg_norm <= tolerance * (1.0 + abs(value))

    if not converged:
        logger.warning("Metamodel solve stopped after %d iterations (projected gradient %.3g)", iterations, pg_norm)
    logger.debug("Metamodel solve: %d iterations, value=%.6g, converged=%s", iterations, value, converged)
    return SolveResult(
        x=x,
        value=value,
        iterations=iterations,
        converged=converged,
        nonconvex=nonconvex,
        projected_gradient_norm=pg_norm,
    )


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise NumericError(f"non-finite metamodel {what}")
    return value


def _finite_vec(vec: npt.NDArray[np.float64], what: str) -> npt.NDArray[np.float64]:
    if not np.all(np.isfinite(vec)):
        raise NumericError(f"non-finite metamodel {what}")
    return vec


def projected_descent(
    problem: MetamodelProblem,
    start: npt.ArrayLike,
    learning_rate: float,
    max_steps: int,
    tolerance: float = DEFAULT_TOLERANCE,
) -> SolveResult:
    """Fixed-step projected gradient descent: x ← Π(x − η∇m(x)).

    Uses the same stopping test as :func:`solve_metamodel`,
    ‖Π(x − ∇m) − x‖ ≤ tolerance·(1 + |m(x)|), or stops after ``max_steps``.
    """
    x0 = np.asarray(start, dtype=float)
    if x0.shape != (problem.n_od,):
        raise InvalidInputError(f"start must have length {problem.n_od}, got shape {x0.shape}")
    x = problem.project(x0)
    value = _finite(metamodel_value(x, problem), "objective")
    grad = _finite_vec(metamodel_gradient(x, problem), "gradient")
    pg_norm = projected_gradient_norm(x, grad, problem)
    converged = pg_norm <= tolerance * (1.0 + abs(value))
    steps = 0
    while not converged and steps < max_steps:
        x = problem.project(x - learning_rate * grad)
        value = _finite(metamodel_value(x, problem), "objective")
        grad = _finite_vec(metamodel_gradient(x, problem), "gradient")
        pg_norm = projected_gradient_norm(x, grad, problem)
        converged = pg_norm <= tolerance * (1.0 + abs(value))
        steps += 1
    if not converged:
        logger.debug("Projected descent hit %d steps (projected gradient %.3g)", steps, pg_norm)
    return SolveResult(
        x=x,
        value=value,
        iterations=steps,
        converged=converged,
        nonconvex=not problem.is_convex(),
        projected_gradient_norm=pg_norm,
    )
