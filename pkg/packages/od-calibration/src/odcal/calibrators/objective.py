"""Simulation-based objective and the per-run evaluation budget."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from odcal.calibrators.history import CalibrationHistory
from odcal.errors import InvalidInputError
from odcal.network.types import ODVector
from odcal.reporting.metrics import nrmse
from odcal.simulator.loader import SimulationResult, Simulator

logger = logging.getLogger(__name__)


def objective_estimate(
    x: npt.ArrayLike,
    sim: SimulationResult,
    field_counts: npt.ArrayLike,
    prior: npt.ArrayLike,
    delta: float,
) -> float:
    """f̂(x) = (1/|I|)·‖y − counts‖² + (δ/|Z|)·‖x − x̃‖² with replication-averaged counts."""
    vec = np.asarray(x, dtype=float)
    y = np.asarray(field_counts, dtype=float)
    x_prior = np.asarray(prior, dtype=float)
    counts = np.asarray(sim.measured_counts, dtype=float)
    if counts.shape != y.shape:
        raise InvalidInputError(f"simulated counts {counts.shape} do not match field counts {y.shape}")
    if vec.shape != x_prior.shape:
        raise InvalidInputError(f"demand {vec.shape} does not match prior {x_prior.shape}")
    mismatch = float(np.mean((y - counts) ** 2)) if y.size else 0.0
    reg = delta / vec.size * float((vec - x_prior) @ (vec - x_prior)) if vec.size else 0.0
    return mismatch + reg


@dataclass(frozen=True)
class Evaluation:
    point: ODVector
    result: SimulationResult
    objective: float
    nrmse: float
    sim_calls: int
    wall_time_s: float


class EvaluationBudget:
    """Counts simulator calls and turns each one into an objective estimate.

    Call ``n`` (0-based) runs with a seed drawn from ``SeedSequence([seed, n])``,
    so the sequence of seeds is fixed by the run seed alone.
    """

    def __init__(
        self,
        simulator: Simulator,
        field_counts: npt.ArrayLike,
        prior: npt.ArrayLike,
        delta: float,
        seed: int = 0,
    ) -> None:
        self._simulator = simulator
        self._field_counts = np.asarray(field_counts, dtype=float)
        self._prior = np.asarray(prior, dtype=float)
        self._delta = delta
        self._seed = seed
        self._calls = 0
        self._started = time.perf_counter()

    @property
    def calls(self) -> int:
        return self._calls

    def call_seed(self, index: int) -> int:
        return int(np.random.SeedSequence([self._seed, index]).generate_state(1)[0])

    def evaluate(self, x: npt.ArrayLike) -> Evaluation:
        point = np.array(x, dtype=float)
        result = self._simulator(point, self.call_seed(self._calls))
        self._calls += 1
        objective = objective_estimate(point, result, self._field_counts, self._prior, self._delta)
        return Evaluation(
            point=point,
            result=result,
            objective=objective,
            nrmse=nrmse(self._field_counts, result.measured_counts),
            sim_calls=self._calls,
            wall_time_s=time.perf_counter() - self._started,
        )


def record_evaluation(
    history: CalibrationHistory, iteration: int, evaluation: Evaluation, iterate: ODVector | None = None
) -> None:
    history.record(
        iteration=iteration,
        sim_calls=evaluation.sim_calls,
        objective=evaluation.objective,
        nrmse=evaluation.nrmse,
        wall_time_s=evaluation.wall_time_s,
        point=evaluation.point,
        iterate=iterate,
        counts=evaluation.result.measured_counts,
    )
    logger.info(
        "%s iteration %d: sim_calls=%d objective=%.6g nrmse=%.3f%%",
        history.method, iteration, evaluation.sim_calls, evaluation.objective, evaluation.nrmse,
    )
