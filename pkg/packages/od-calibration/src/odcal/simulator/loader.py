"""Seeded stochastic mesoscopic loader, the expensive black box of calibration.

One loading: route times start at free flow; a fixed number of logit /
volume-delay sweeps on expected volumes settle the route times; then each
replication draws Poisson trip counts per OD, splits them over routes
multinomially at the converged probabilities, and counts vehicles crossing the
measured edges. Replication ``k`` draws from ``default_rng([seed, k])`` so the
result does not depend on how replications are scheduled.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np
import numpy.typing as npt
import pandas as pd

from odcal.errors import InvalidInputError, NumericError
from odcal.models import ChoiceParams, SimConfig
from odcal.network.types import Network, ODVector
from odcal.route_choice.logit import RouteProbabilities, logit_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConvergedState:
    edge_times: npt.NDArray[np.float64]
    edge_volumes: npt.NDArray[np.float64]
    route_times: npt.NDArray[np.float64]
    probabilities: npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class SimulationResult:
    """Outcome of one simulator call, averaged over its replications.

    ``replication_*`` arrays keep the per-replication draws (one row each);
    the un-prefixed vectors are their means.
    """

    measured_counts: npt.NDArray[np.float64]
    route_flows: npt.NDArray[np.float64]
    od_trips: npt.NDArray[np.float64]
    replication_counts: npt.NDArray[np.float64]
    replication_route_flows: npt.NDArray[np.float64]
    replication_trips: npt.NDArray[np.float64]
    converged_route_times: npt.NDArray[np.float64]
    route_probabilities: npt.NDArray[np.float64]
    edge_times: npt.NDArray[np.float64]
    demand_used: ODVector

    @property
    def replications(self) -> int:
        return int(self.replication_counts.shape[0])


def bpr_times(
    free_flow: npt.NDArray[np.float64],
    volumes: npt.NDArray[np.float64],
    capacities: npt.NDArray[np.float64],
    alpha: float,
    beta: float,
) -> npt.NDArray[np.float64]:
    return free_flow * (1.0 + alpha * np.power(volumes / capacities, beta))


def converge_route_times(
    network: Network, demand: npt.ArrayLike, config: SimConfig, params: ChoiceParams
) -> ConvergedState:
    """Fixed-point sweeps of logit choice and BPR delay on expected volumes."""
    x = _check_demand(network, demand)
    incidence = network.route_edge_incidence
    free_flow = network.free_flow_times
    edge_times = free_flow.copy()
    volumes = np.zeros_like(free_flow)
    route_times = np.asarray(incidence @ edge_times, dtype=float)
    od_index = network.route_od_index

    for sweep in range(config.inner_fixed_point_iters):
        probs = logit_vector(network, route_times, params.theta)
        volumes = np.asarray(incidence.T @ (probs * x[od_index]), dtype=float)
        new_times = bpr_times(free_flow, volumes, network.capacities, config.vdf_alpha, config.vdf_beta)
        if not np.all(np.isfinite(new_times)):
            raise NumericError(f"non-finite edge travel time in fixed-point sweep {sweep + 1}")
        logger.debug("fixed-point sweep %d: max edge time change %.6g s", sweep + 1,
                     float(np.max(np.abs(new_times - edge_times))) if new_times.size else 0.0)
        edge_times = new_times
        route_times = np.asarray(incidence @ edge_times, dtype=float)

    probs = logit_vector(network, route_times, params.theta)
    return ConvergedState(edge_times=edge_times, edge_volumes=volumes, route_times=route_times, probabilities=probs)


def _check_demand(network: Network, demand: npt.ArrayLike) -> ODVector:
    x = network.check_od_vector(demand)
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise InvalidInputError("demand entries must be finite and >= 0")
    return x


def _draw_replication(
    network: Network, x: ODVector, probs: npt.NDArray[np.float64], seed: int, replication: int
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64], npt.NDArray[np.float64]]:
    rng = np.random.default_rng([seed, replication])
    trips = rng.poisson(x)
    flows = np.zeros(network.n_routes, dtype=np.int64)
    for z, positions in enumerate(network.routes_by_od):
        n = int(trips[z])
        if n == 0:
            continue
        if len(positions) == 1:
            flows[positions[0]] = n
            continue
        p = probs[list(positions)]
        flows[list(positions)] = rng.multinomial(n, p / p.sum())
    counts = np.asarray(network.measured_incidence.T @ flows, dtype=float)
    return trips.astype(np.int64), flows, counts


def simulate(network: Network, demand: npt.ArrayLike, config: SimConfig, params: ChoiceParams) -> SimulationResult:
    """Load ``demand`` and return replication-averaged measured counts."""
    x = _check_demand(network, demand)
    state = converge_route_times(network, x, config, params)

    def run(replication: int) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64], npt.NDArray[np.float64]]:
        return _draw_replication(network, x, state.probabilities, config.seed, replication)

    reps = range(config.replications)
    if config.workers > 1 and config.replications > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            draws = list(pool.map(run, reps))
    else:
        draws = [run(k) for k in reps]

    rep_trips = np.vstack([d[0] for d in draws]).astype(float)
    rep_flows = np.vstack([d[1] for d in draws]).astype(float)
    rep_counts = np.vstack([d[2] for d in draws])
    return SimulationResult(
        measured_counts=rep_counts.mean(axis=0),
        route_flows=rep_flows.mean(axis=0),
        od_trips=rep_trips.mean(axis=0),
        replication_counts=rep_counts,
        replication_route_flows=rep_flows,
        replication_trips=rep_trips,
        converged_route_times=state.route_times,
        route_probabilities=state.probabilities,
        edge_times=state.edge_times,
        demand_used=x.copy(),
    )


def expected_result(
    network: Network,
    demand: npt.ArrayLike,
    probabilities: npt.NDArray[np.float64],
    route_times: npt.NDArray[np.float64],
    edge_times: npt.NDArray[np.float64],
) -> SimulationResult:
    """Deterministic result whose counts are the expectation at fixed probabilities."""
    x = _check_demand(network, demand)
    flows = probabilities * x[network.route_od_index]
    counts = np.asarray(network.measured_incidence.T @ flows, dtype=float)
    return SimulationResult(
        measured_counts=counts,
        route_flows=flows,
        od_trips=x.copy(),
        replication_counts=counts[np.newaxis, :],
        replication_route_flows=flows[np.newaxis, :],
        replication_trips=x[np.newaxis, :].copy(),
        converged_route_times=route_times,
        route_probabilities=probabilities,
        edge_times=edge_times,
        demand_used=x.copy(),
    )


# ── Pluggable simulators ────────────────────────────────────────────────────


class Simulator(Protocol):
    """A black box mapping (demand, seed) to a simulation result."""

    network: Network

    def __call__(self, demand: ODVector, seed: int) -> SimulationResult: ...


@dataclass
class StochasticSimulator:
    network: Network
    config: SimConfig
    params: ChoiceParams

    def __call__(self, demand: ODVector, seed: int) -> SimulationResult:
        return simulate(self.network, demand, self.config.model_copy(update={"seed": seed}), self.params)


@dataclass
class ExpectedCountSimulator:
    """Noise-free loader.

    With ``probabilities`` fixed, counts are exactly P̃x for the matching
    assignment matrix; otherwise the probabilities come from the congested
    fixed point at each demand.
    """

    network: Network
    config: SimConfig
    params: ChoiceParams
    probabilities: RouteProbabilities | None = None

    def __call__(self, demand: ODVector, seed: int) -> SimulationResult:
        if self.probabilities is not None:
            probs = np.asarray(self.probabilities.vector, dtype=float)
            route_times = self.network.route_free_flow_times
            edge_times = self.network.free_flow_times
        else:
            state = converge_route_times(self.network, demand, self.config, self.params)
            probs, route_times, edge_times = state.probabilities, state.route_times, state.edge_times
        return expected_result(self.network, demand, probs, route_times, edge_times)


def dump_replication_counts(result: SimulationResult, network: Network, path: Path) -> Path:
    """Write per-replication measured counts as `edge_id,replication,count`."""
    reps, n_measured = result.replication_counts.shape
    if n_measured != network.n_measured:
        raise InvalidInputError("result does not match the network's measured edges")
    frame = pd.DataFrame({
        "edge_id": np.tile(np.asarray(network.measured_edges, dtype=int), reps),
        "replication": np.repeat(np.arange(reps), n_measured),
        "count": result.replication_counts.ravel(),
    })
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.6g", lineterminator="\n")
    return path
