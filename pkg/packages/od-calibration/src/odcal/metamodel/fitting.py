"""Distance-weighted ridge fit of β against simulated objective estimates."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt
from scipy import linalg

from odcal.errors import InvalidInputError, NumericError
from odcal.metamodel.problem import Beta, MetamodelProblem, Observation, f_analytic

logger = logging.getLogger(__name__)

DEFAULT_RIDGE = 1e-3


def design_matrix(observations: Sequence[Observation], problem: MetamodelProblem) -> npt.NDArray[np.float64]:
    """Rows [f_A(x_j), 1, x_j]: m(x_j; β) minus the regularizer is this row times β."""
    rows = [
        np.concatenate(([f_analytic(obs.point, problem.assignment, problem.field_counts), 1.0], obs.point))
        for obs in observations
    ]
    return np.vstack(rows)


def fit_beta(
    observations: Sequence[Observation],
    current: npt.ArrayLike,
    problem: MetamodelProblem,
    ridge: float = DEFAULT_RIDGE,
) -> Beta:
    """Minimize Σ_j w_j (f̂_j − m(x_j; β))² + ridge·‖β − (1, 0, ..., 0)‖².

    w_j = 1 / (1 + ‖x_j − current‖). The ridge pulls β toward the default, so a
    single observation consistent with the analytic term returns the default.
    Uses the normal equations when observations outnumber coefficients and the
    kernel form otherwise.
    """
    if not observations:
        raise InvalidInputError("fit_beta needs at least one observation")
    centre = np.asarray(current, dtype=float)
    for obs in observations:
        if obs.point.shape != (problem.n_od,):
            raise InvalidInputError(f"observation point must have length {problem.n_od}")

    X = design_matrix(observations, problem)
    target = np.array([obs.objective_estimate - problem.regularizer(obs.point) for obs in observations])
    weights = np.array([1.0 / (1.0 + float(np.linalg.norm(obs.point - centre))) for obs in observations])

    anchor = Beta.default(problem.n_od).vector()
    sw = np.sqrt(weights)
    Xs = X * sw[:, np.newaxis]
    rs = (target - X @ anchor) * sw
    n_obs, n_params = Xs.shape

    if ridge == 0.0:
        correction, *_ = linalg.lstsq(Xs, rs)
    elif n_obs > n_params:
        correction = linalg.solve(Xs.T @ Xs + ridge * np.eye(n_params), Xs.T @ rs, assume_a="pos")
    else:
        correction = Xs.T @ linalg.solve(Xs @ Xs.T + ridge * np.eye(n_obs), rs, assume_a="pos")

    vec = anchor + correction
    if not np.all(np.isfinite(vec)):
        raise NumericError("beta fit produced non-finite coefficients")
    logger.debug("Fitted beta from %d observation(s): scale=%.6g intercept=%.6g |linear|=%.6g",
                 n_obs, vec[0], vec[1], float(np.linalg.norm(vec[2:])))
    return Beta.from_vector(vec)
