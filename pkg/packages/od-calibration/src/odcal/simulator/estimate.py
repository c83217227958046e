"""Empirical assignment matrix Â from one simulator call's route flows."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from odcal.errors import InvalidInputError
from odcal.network.assignment import AssignmentMatrix, assignment_from_route_weights
from odcal.network.types import Network
from odcal.simulator.loader import SimulationResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AssignmentEstimate:
    matrix: AssignmentMatrix
    sampled_trips: np.ndarray
    # OD ids whose replications produced no trips; their columns use the model probabilities.
    fallback_ods: tuple[int, ...]


def estimate_assignment(result: SimulationResult, network: Network) -> AssignmentEstimate:
    """Share of each OD's sampled trips that crossed each measured edge.

    Flows and trips are pooled over replications before dividing, so entry
    (i, z) is the fraction of OD z's vehicles observed on measured edge i.
    """
    flows = np.asarray(result.replication_route_flows, dtype=float).sum(axis=0)
    trips = np.asarray(result.replication_trips, dtype=float).sum(axis=0)
    if flows.shape != (network.n_routes,) or trips.shape != (network.n_od,):
        raise InvalidInputError("simulation result does not match the network")

    od_index = network.route_od_index
    route_trips = trips[od_index]
    weights = np.asarray(result.route_probabilities, dtype=float).copy()
    sampled = route_trips > 0
    weights[sampled] = flows[sampled] / route_trips[sampled]

    empty = tuple(int(z) + 1 for z in np.flatnonzero(trips == 0))
    if empty:
        logger.warning("No sampled trips for %d OD pair(s); using route probabilities", len(empty))
    return AssignmentEstimate(
        matrix=assignment_from_route_weights(network, weights),
        sampled_trips=trips,
        fallback_ods=empty,
    )
