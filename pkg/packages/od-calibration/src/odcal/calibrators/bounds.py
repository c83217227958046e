"""Box Ω for the demand vector."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from odcal.errors import InvalidInputError
from odcal.models import Bounds
from odcal.network.types import ODVector


def resolve_bounds(bounds: Bounds, prior: npt.ArrayLike) -> tuple[ODVector, ODVector]:
    """Per-OD (lower, upper); missing sides default to 0 and upper_factor * max(prior)."""
    x_prior = np.asarray(prior, dtype=float)
    n = x_prior.size
    lower = np.zeros(n) if bounds.lower is None else np.asarray(bounds.lower, dtype=float)
    if bounds.upper is not None:
        upper = np.asarray(bounds.upper, dtype=float)
    else:
        peak = float(x_prior.max()) if n else 0.0
        if peak <= 0.0:
            raise InvalidInputError("cannot derive an upper bound from an all-zero prior; set bounds.upper")
        upper = np.full(n, bounds.upper_factor * peak)
    if lower.shape != (n,) or upper.shape != (n,):
        raise InvalidInputError(f"bounds must have {n} entries per side")
    if np.any(lower < 0) or np.any(lower > upper):
        raise InvalidInputError("bounds must satisfy 0 <= lower <= upper")
    return lower, upper
