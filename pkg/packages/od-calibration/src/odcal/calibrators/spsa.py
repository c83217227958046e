"""Simultaneous perturbation stochastic approximation over the demand box."""

from __future__ import annotations

import logging

import numpy as np
import numpy.typing as npt

from odcal.calibrators.bounds import resolve_bounds
from odcal.calibrators.history import CalibrationHistory
from odcal.calibrators.objective import EvaluationBudget, record_evaluation
from odcal.errors import CalibrationAborted, NumericError
from odcal.models import CalibratorConfig, Method, SPSAConfig
from odcal.network.types import Network
from odcal.simulator.loader import Simulator

logger = logging.getLogger(__name__)


def spsa_gains(k: int, gains: SPSAConfig) -> tuple[float, float]:
    """(a_k, c_k) for 0-based iteration k."""
    a_k = gains.a / (gains.A + k + 1) ** gains.alpha
    c_k = gains.c / (k + 1) ** gains.gamma
    return a_k, c_k


def rademacher(rng: np.random.Generator, size: int) -> npt.NDArray[np.float64]:
    return rng.integers(0, 2, size=size).astype(float) * 2.0 - 1.0


def run_spsa(
    network: Network,
    field_counts: npt.ArrayLike,
    prior: npt.ArrayLike,
    config: CalibratorConfig,
    simulator: Simulator,
) -> CalibrationHistory:
    """One initial evaluation, then two perturbed evaluations per iteration.

    The record of iteration k+1 carries the better perturbed evaluation (the
    plus side on ties) and the updated iterate.
    """
    y = np.asarray(field_counts, dtype=float)
    x_prior = network.check_od_vector(prior, "prior")
    lower, upper = resolve_bounds(config.bounds, x_prior)
    budget = EvaluationBudget(simulator, y, x_prior, config.delta, seed=config.seed)
    history = CalibrationHistory(method=Method.SPSA.value)
    rng = np.random.default_rng([config.seed, 1])

    try:
        x = np.clip(x_prior, lower, upper)
        record_evaluation(history, 0, budget.evaluate(x))

        for k in range(config.max_iterations):
            a_k, c_k = spsa_gains(k, config.spsa)
            delta = rademacher(rng, network.n_od)
            plus = budget.evaluate(np.clip(x + c_k * delta, lower, upper))
            minus = budget.evaluate(np.clip(x - c_k * delta, lower, upper))
            grad = (plus.objective - minus.objective) / (2.0 * c_k * delta)
            if not np.all(np.isfinite(grad)):
                raise NumericError(f"non-finite SPSA gradient at iteration {k + 1}")
            x = np.clip(x - a_k * grad, lower, upper)
            logger.debug("SPSA k=%d a_k=%.5g c_k=%.5g |g|=%.4g", k, a_k, c_k, float(np.linalg.norm(grad)))
            better = plus if plus.objective <= minus.objective else minus
            record_evaluation(history, k + 1, better, iterate=x)
    except NumericError as e:
        message = f"{history.method} aborted after {len(history.records)} record(s): {e}"
        raise CalibrationAborted(message, history) from e

    return history
