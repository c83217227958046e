"""Exogenous route travel times and the sealed set of providers that supply them.

Providers never touch the network: free-flow sums edge times, the file provider
echoes a `route_id,travel_time_seconds` CSV, and the simulator provider reports
the loader's converged route times at a fixed demand.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Protocol

import numpy as np
import numpy.typing as npt

from odcal.errors import CoverageError, InvalidInputError
from odcal.models import ChoiceParams, SimConfig, TravelTimeConfig, TravelTimeSource
from odcal.network.io import read_table
from odcal.network.types import Network

logger = logging.getLogger(__name__)


class Provenance(str, Enum):
    FREE_FLOW = "free-flow"
    FILE = "file"
    SIMULATOR = "simulator"


@dataclass(frozen=True, eq=False)
class TravelTimeTable(Mapping[int, float]):
    """Route-id keyed travel times in seconds, tagged with where they came from."""

    times: dict[int, float]
    provenance: Provenance
    source: str = ""

    def __post_init__(self) -> None:
        bad = [rid for rid, t in self.times.items() if not (math.isfinite(t) and t > 0)]
        if bad:
            raise InvalidInputError(f"travel times must be finite and > 0 (routes {sorted(bad)[:10]})")

    def __getitem__(self, route_id: int) -> float:
        return self.times[route_id]

    def __iter__(self) -> Iterator[int]:
        return iter(self.times)

    def __len__(self) -> int:
        return len(self.times)

    def check_coverage(self, network: Network) -> None:
        missing = [rid for rid in network.route_ids if rid not in self.times]
        if missing:
            raise CoverageError(f"{self.provenance.value} travel times do not cover the network", missing)


def travel_time_vector(network: Network, times: Mapping[int, float]) -> npt.NDArray[np.float64]:
    missing = [rid for rid in network.route_ids if rid not in times]
    if missing:
        raise CoverageError("travel times do not cover the network", missing)
    return np.array([float(times[rid]) for rid in network.route_ids], dtype=float)


class TravelTimeProvider(Protocol):
    kind: Provenance

    def travel_times(self, network: Network) -> TravelTimeTable: ...


@dataclass
class FreeFlowProvider:
    kind: Provenance = field(default=Provenance.FREE_FLOW, init=False)

    def travel_times(self, network: Network) -> TravelTimeTable:
        sums = network.route_free_flow_times
        return TravelTimeTable(
            times={rid: float(t) for rid, t in zip(network.route_ids, sums)},
            provenance=self.kind,
        )


@dataclass
class FileProvider:
    path: Path
    kind: Provenance = field(default=Provenance.FILE, init=False)

    def travel_times(self, network: Network) -> TravelTimeTable:
        path = Path(self.path)
        frame = read_table(path, ("route_id", "travel_time_seconds"), id_column="route_id")
        times = {int(rid): float(t) for rid, t in zip(frame["route_id"], frame["travel_time_seconds"])}
        table = TravelTimeTable(times=times, provenance=self.kind, source=str(path))
        logger.debug("Read %d route travel times from %s", len(times), path)
        return table


@dataclass
class SimulatorProvider:
    """Converged route times of one loading at ``demand``."""

    demand: npt.NDArray[np.float64]
    sim: SimConfig = field(default_factory=SimConfig)
    choice: ChoiceParams = field(default_factory=ChoiceParams)
    kind: Provenance = field(default=Provenance.SIMULATOR, init=False)

    def travel_times(self, network: Network) -> TravelTimeTable:
        from odcal.simulator.loader import converge_route_times

        state = converge_route_times(network, self.demand, self.sim, self.choice)
        return TravelTimeTable(
            times={rid: float(t) for rid, t in zip(network.route_ids, state.route_times)},
            provenance=self.kind,
        )


def get_travel_times(provider: TravelTimeProvider, network: Network) -> TravelTimeTable:
    """Ask the provider for a table and check it covers every route."""
    table = provider.travel_times(network)
    table.check_coverage(network)
    return table


def provider_from_config(
    config: TravelTimeConfig,
    demand: npt.NDArray[np.float64] | None = None,
    sim: SimConfig | None = None,
    choice: ChoiceParams | None = None,
) -> TravelTimeProvider:
    match config.source:
        case TravelTimeSource.FREE_FLOW:
            return FreeFlowProvider()
        case TravelTimeSource.FILE:
            assert config.path is not None
            return FileProvider(path=config.path)
        case TravelTimeSource.SIMULATOR:
            if demand is None:
                raise InvalidInputError("simulator travel times need a demand vector")
            return SimulatorProvider(demand=demand, sim=sim or SimConfig(), choice=choice or ChoiceParams())
    raise InvalidInputError(f"unknown travel-time source {config.source!r}")
