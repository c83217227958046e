"""Linear assignment method: re-estimate P̃ from simulation, average, re-solve."""

from __future__ import annotations

import logging

import numpy as np
import numpy.typing as npt

from odcal.calibrators.bounds import resolve_bounds
from odcal.calibrators.history import CalibrationHistory
from odcal.calibrators.objective import EvaluationBudget, record_evaluation
from odcal.errors import CalibrationAborted, InvalidInputError, NumericError
from odcal.metamodel.problem import Beta, MetamodelProblem
from odcal.metamodel.solver import projected_descent
from odcal.models import CalibratorConfig, Method, MSAConvention
from odcal.network.assignment import AssignmentMatrix
from odcal.network.types import Network
from odcal.simulator.estimate import estimate_assignment
from odcal.simulator.loader import Simulator

logger = logging.getLogger(__name__)


def msa_weight(t: int, convention: MSAConvention = MSAConvention.AS_PRINTED) -> float:
    """Weight of the newest estimate at averaging step t ≥ 1."""
    if t < 1:
        raise InvalidInputError(f"averaging step must be >= 1, got {t}")
    if convention == MSAConvention.SHIFTED:
        return 1.0 / (t + 1)
    return 1.0 / t


def msa_update(
    current: AssignmentMatrix,
    estimate: AssignmentMatrix,
    t: int,
    convention: MSAConvention = MSAConvention.AS_PRINTED,
) -> AssignmentMatrix:
    """A^{t+1} = (1 − w)·A^t + w·Â^{t+1}."""
    return current.blend(estimate, msa_weight(t, convention))


def run_lam(
    network: Network,
    field_counts: npt.ArrayLike,
    prior: npt.ArrayLike,
    config: CalibratorConfig,
    simulator: Simulator,
) -> CalibrationHistory:
    y = np.asarray(field_counts, dtype=float)
    x_prior = network.check_od_vector(prior, "prior")
    lower, upper = resolve_bounds(config.bounds, x_prior)
    settings = config.lam
    budget = EvaluationBudget(simulator, y, x_prior, config.delta, seed=config.seed)
    history = CalibrationHistory(method=Method.LAM.value)

    try:
        x = np.clip(x_prior, lower, upper)
        first = budget.evaluate(x)
        record_evaluation(history, 0, first)
        matrix = estimate_assignment(first.result, network).matrix

        for t in range(1, config.max_iterations + 1):
            problem = MetamodelProblem(
                assignment=matrix,
                field_counts=y,
                prior=x_prior,
                delta=config.delta,
                lower=lower,
                upper=upper,
                beta=Beta.default(network.n_od),
            )
            solved = projected_descent(
                problem, x, settings.learning_rate, settings.inner_gd_steps, settings.tolerance
            )
            logger.debug("LAM t=%d: inner descent %d steps, value=%.6g", t, solved.iterations, solved.value)
            x = solved.x

            evaluation = budget.evaluate(x)
            record_evaluation(history, t, evaluation)
            if t < config.max_iterations:
                estimate = estimate_assignment(evaluation.result, network)
                matrix = msa_update(matrix, estimate.matrix, t, settings.msa_convention)
    except NumericError as e:
        message = f"{history.method} aborted after {len(history.records)} record(s): {e}"
        raise CalibrationAborted(message, history) from e

    return history
