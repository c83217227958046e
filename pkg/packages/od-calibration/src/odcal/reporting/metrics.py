"""Count-fit metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from odcal.errors import InvalidInputError, UndefinedMetricError


def nrmse(field_counts: npt.ArrayLike, counts: npt.ArrayLike) -> float:
    """Root-mean-square count error as a percentage of the mean field count."""
    y = np.asarray(field_counts, dtype=float)
    c = np.asarray(counts, dtype=float)
    if y.ndim != 1 or y.size == 0 or c.shape != y.shape:
        raise InvalidInputError(f"count vectors must be non-empty and equal length, got {y.shape} and {c.shape}")
    mean = float(y.mean())
    if mean <= 0.0:
        raise UndefinedMetricError("nRMSE is undefined when the mean field count is zero")
    rmse = float(np.sqrt(np.mean((y - c) ** 2)))
    return 100.0 * rmse / mean


@dataclass(frozen=True)
class FitReport:
    label: str
    edge_ids: tuple[int, ...]
    field_counts: npt.NDArray[np.float64]
    simulated_counts: npt.NDArray[np.float64]
    nrmse: float
    # RMSE between the evaluated demand and the prior; None when no prior is known.
    prior_distance: float | None = None

    def __len__(self) -> int:
        return len(self.edge_ids)


def build_fit_report(
    label: str,
    edge_ids: tuple[int, ...],
    field_counts: npt.ArrayLike,
    simulated_counts: npt.ArrayLike,
    demand: npt.ArrayLike | None = None,
    prior: npt.ArrayLike | None = None,
) -> FitReport:
    y = np.asarray(field_counts, dtype=float)
    c = np.asarray(simulated_counts, dtype=float)
    if len(edge_ids) != y.size:
        raise InvalidInputError(f"{len(edge_ids)} edge ids for {y.size} counts")
    distance = None
    if demand is not None and prior is not None:
        diff = np.asarray(demand, dtype=float) - np.asarray(prior, dtype=float)
        distance = float(np.sqrt(np.mean(diff**2))) if diff.size else 0.0
    return FitReport(
        label=label,
        edge_ids=tuple(int(e) for e in edge_ids),
        field_counts=y,
        simulated_counts=c,
        nrmse=nrmse(y, c),
        prior_distance=distance,
    )
