"""Metamodel-driven calibration: fit β, solve the analytic problem, simulate the solution.

The assignment matrix comes once from exogenous route travel times and stays
fixed for the whole run; only β learns from simulation.
"""

from __future__ import annotations

import logging

import numpy as np
import numpy.typing as npt

from odcal.calibrators.bounds import resolve_bounds
from odcal.calibrators.history import CalibrationHistory
from odcal.calibrators.objective import EvaluationBudget, record_evaluation
from odcal.errors import CalibrationAborted, NumericError
from odcal.metamodel.fitting import fit_beta
from odcal.metamodel.problem import Beta, MetamodelProblem, Observation
from odcal.metamodel.solver import solve_metamodel
from odcal.models import CalibratorConfig, ChoiceParams, Method
from odcal.network.assignment import AssignmentMatrix, build_assignment_matrix
from odcal.network.types import Network
from odcal.route_choice.logit import route_probabilities
from odcal.route_choice.travel_times import FreeFlowProvider, TravelTimeProvider, get_travel_times
from odcal.simulator.loader import Simulator

logger = logging.getLogger(__name__)


def exogenous_assignment(
    network: Network, provider: TravelTimeProvider, choice: ChoiceParams
) -> AssignmentMatrix:
    table = get_travel_times(provider, network)
    matrix = build_assignment_matrix(network, route_probabilities(network, table, choice))
    logger.debug("Built %s assignment matrix %s with %d nonzeros from %s times",
                 Method.LINEAR_METAMODEL.value, matrix.shape, matrix.nnz, table.provenance.value)
    return matrix


def run_linear_metamodel(
    network: Network,
    field_counts: npt.ArrayLike,
    prior: npt.ArrayLike,
    config: CalibratorConfig,
    simulator: Simulator,
    choice: ChoiceParams | None = None,
    provider: TravelTimeProvider | None = None,
) -> CalibrationHistory:
    """Run ``config.max_iterations`` fit-solve-simulate steps after one initial evaluation."""
    y = np.asarray(field_counts, dtype=float)
    x_prior = network.check_od_vector(prior, "prior")
    lower, upper = resolve_bounds(config.bounds, x_prior)
    assignment = exogenous_assignment(network, provider or FreeFlowProvider(), choice or ChoiceParams())
    fit = config.metamodel

    problem = MetamodelProblem(
        assignment=assignment,
        field_counts=y,
        prior=x_prior,
        delta=config.delta,
        lower=lower,
        upper=upper,
        beta=Beta.default(network.n_od),
    )
    budget = EvaluationBudget(simulator, y, x_prior, config.delta, seed=config.seed)
    history = CalibrationHistory(method=Method.LINEAR_METAMODEL.value)

    try:
        first = budget.evaluate(problem.project(x_prior))
        record_evaluation(history, 0, first)
        observations = [Observation(first.point, first.objective)]

        for k in range(1, config.max_iterations + 1):
            if k == 1:
                beta = Beta.default(network.n_od)
            else:
                beta = fit_beta(observations, history.best_point, problem, ridge=fit.ridge)
            problem = problem.with_beta(beta)

            solved = solve_metamodel(
                problem,
                history.best_point,
                tolerance=fit.solver_tolerance,
                max_iterations=fit.solver_max_iterations,
            )
            if solved.nonconvex:
                logger.warning("Iteration %d: fitted metamodel is nonconvex (scale=%.4g)", k, beta.scale)

            evaluation = budget.evaluate(solved.x)
            record_evaluation(history, k, evaluation)
            observations.append(Observation(evaluation.point, evaluation.objective))
    except NumericError as e:
        message = f"{history.method} aborted after {len(history.records)} record(s): {e}"
        raise CalibrationAborted(message, history) from e

    return history
