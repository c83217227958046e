"""Multinomial logit route choice over each OD's route set."""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import numpy.typing as npt

from odcal.errors import NumericError
from odcal.models import ChoiceParams
from odcal.network.types import Network
from odcal.route_choice.travel_times import travel_time_vector


@dataclass(frozen=True, eq=False)
class RouteProbabilities(Mapping[int, float]):
    """Route-id keyed choice probabilities, aligned to network route order."""

    route_ids: tuple[int, ...]
    vector: npt.NDArray[np.float64]

    def __getitem__(self, route_id: int) -> float:
        return float(self.vector[self._index[route_id]])

    def __iter__(self) -> Iterator[int]:
        return iter(self.route_ids)

    def __len__(self) -> int:
        return len(self.route_ids)

    @cached_property
    def _index(self) -> dict[int, int]:
        return {rid: i for i, rid in enumerate(self.route_ids)}


def logit_vector(network: Network, route_times: npt.NDArray[np.float64], theta: float) -> npt.NDArray[np.float64]:
    """Per-route logit probabilities from route times in network route order.

    The largest utility of each choice set is subtracted before exponentiation.
    """
    utility = theta * np.asarray(route_times, dtype=float)
    od_index = network.route_od_index
    peak = np.full(network.n_od, -np.inf)
    np.maximum.at(peak, od_index, utility)
    shifted = utility - peak[od_index]
    if not np.all(np.isfinite(shifted)):
        raise NumericError("non-finite logit exponent after stabilization")
    weights = np.exp(shifted)
    totals = np.bincount(od_index, weights=weights, minlength=network.n_od)
    probs = weights / totals[od_index]
    if not np.all(np.isfinite(probs)):
        raise NumericError("non-finite route probability")
    return probs


def route_probabilities(network: Network, times: Mapping[int, float], params: ChoiceParams) -> RouteProbabilities:
    """P_r = exp(θ t_r) / Σ_{j in R₂(r)} exp(θ t_j) for every route of the network."""
    route_times = travel_time_vector(network, times)
    return RouteProbabilities(route_ids=network.route_ids, vector=logit_vector(network, route_times, params.theta))
