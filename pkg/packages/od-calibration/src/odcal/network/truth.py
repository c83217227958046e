"""Ground-truth demand and perturbed priors for synthetic experiments."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from odcal.errors import InvalidInputError
from odcal.network.types import Network, ODVector


def _check_range(low: float, high: float) -> None:
    if not (0 <= low <= high):
        raise InvalidInputError(f"range must satisfy 0 <= low <= high, got ({low}, {high})")


def sample_true_demand(network: Network, low: float = 50.0, high: float = 500.0, seed: int = 0) -> ODVector:
    """Uniform demand in [low, high] veh/h for every OD pair."""
    _check_range(low, high)
    rng = np.random.default_rng([seed, 0])
    return rng.uniform(low, high, size=network.n_od)


def perturb_prior(truth: npt.ArrayLike, low: float = 0.5, high: float = 1.5, seed: int = 0) -> ODVector:
    """x̃_z = x*_z · u_z with u_z ~ U(low, high)."""
    _check_range(low, high)
    x = np.asarray(truth, dtype=float)
    if np.any(x < 0):
        raise InvalidInputError("true demand must be >= 0")
    rng = np.random.default_rng([seed, 1])
    return x * rng.uniform(low, high, size=x.size)
