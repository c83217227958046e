"""Immutable network domain types: edges, OD pairs, routes and the network."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import numpy.typing as npt
from scipy import sparse

from odcal.errors import InvalidInputError

# Expected hourly demand per OD pair, position z-1 holds od_id z.
ODVector = npt.NDArray[np.float64]


@dataclass(frozen=True)
class Edge:
    edge_id: int
    free_flow_time: float  # seconds
    capacity: float  # vehicles/hour
    is_measured: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.free_flow_time) and self.free_flow_time > 0):
            raise InvalidInputError(f"edge {self.edge_id}: free_flow_time must be > 0, got {self.free_flow_time}")
        if not (math.isfinite(self.capacity) and self.capacity > 0):
            raise InvalidInputError(f"edge {self.edge_id}: capacity must be > 0, got {self.capacity}")


@dataclass(frozen=True)
class ODPair:
    od_id: int
    origin_node: int
    destination_node: int
    prior_demand: float = 0.0  # vehicles/hour

    def __post_init__(self) -> None:
        if not (math.isfinite(self.prior_demand) and self.prior_demand >= 0):
            raise InvalidInputError(f"od {self.od_id}: prior_demand must be >= 0, got {self.prior_demand}")


@dataclass(frozen=True)
class Route:
    route_id: int
    od_id: int
    edge_sequence: tuple[int, ...]
    travel_time: float  # seconds

    def __post_init__(self) -> None:
        object.__setattr__(self, "edge_sequence", tuple(self.edge_sequence))
        if not self.edge_sequence:
            raise InvalidInputError(f"route {self.route_id}: edge_sequence is empty")
        if len(set(self.edge_sequence)) != len(self.edge_sequence):
            raise InvalidInputError(f"route {self.route_id}: repeats an edge")
        if not (math.isfinite(self.travel_time) and self.travel_time > 0):
            raise InvalidInputError(f"route {self.route_id}: travel_time must be > 0, got {self.travel_time}")


@dataclass(frozen=True)
class Network:
    """Road network with OD pairs, route sets and an ordered measured-edge list.

    OD pairs are stored sorted by ``od_id``; ``measured_edges`` fixes the row
    order of every count vector and assignment matrix.
    """

    edges: tuple[Edge, ...]
    od_pairs: tuple[ODPair, ...]
    routes: tuple[Route, ...]
    measured_edges: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "od_pairs", tuple(sorted(self.od_pairs, key=lambda od: od.od_id)))
        object.__setattr__(self, "routes", tuple(self.routes))
        object.__setattr__(self, "measured_edges", tuple(self.measured_edges))
        self._validate()

    def _validate(self) -> None:
        edge_ids = [e.edge_id for e in self.edges]
        if len(set(edge_ids)) != len(edge_ids):
            raise InvalidInputError("edge ids are not unique")

        od_ids = [od.od_id for od in self.od_pairs]
        if od_ids != list(range(1, len(od_ids) + 1)):
            raise InvalidInputError("od_id values must form the contiguous set 1..|Z|")

        route_ids = [r.route_id for r in self.routes]
        if len(set(route_ids)) != len(route_ids):
            raise InvalidInputError("route ids are not unique")

        known_edges = set(edge_ids)
        for route in self.routes:
            if not 1 <= route.od_id <= len(od_ids):
                raise InvalidInputError(f"route {route.route_id}: unknown od_id {route.od_id}")
            unknown = [e for e in route.edge_sequence if e not in known_edges]
            if unknown:
                raise InvalidInputError(f"route {route.route_id}: unknown edges {unknown}")

        served = {r.od_id for r in self.routes}
        orphans = [z for z in od_ids if z not in served]
        if orphans:
            raise InvalidInputError(f"od pairs without routes: {orphans}")

        measured_flags = {e.edge_id for e in self.edges if e.is_measured}
        if len(set(self.measured_edges)) != len(self.measured_edges):
            raise InvalidInputError("measured_edges contains duplicates")
        stray = [e for e in self.measured_edges if e not in measured_flags]
        if stray:
            raise InvalidInputError(f"measured_edges not flagged is_measured: {stray}")

    # -- sizes ---------------------------------------------------------------

    @property
    def n_od(self) -> int:
        return len(self.od_pairs)

    @property
    def n_routes(self) -> int:
        return len(self.routes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_measured(self) -> int:
        return len(self.measured_edges)

    # -- lookups -------------------------------------------------------------

    @cached_property
    def edge_position(self) -> dict[int, int]:
        return {e.edge_id: i for i, e in enumerate(self.edges)}

    @cached_property
    def route_position(self) -> dict[int, int]:
        return {r.route_id: i for i, r in enumerate(self.routes)}

    @cached_property
    def measured_position(self) -> dict[int, int]:
        return {e: i for i, e in enumerate(self.measured_edges)}

    @cached_property
    def route_ids(self) -> tuple[int, ...]:
        return tuple(r.route_id for r in self.routes)

    @cached_property
    def route_od_index(self) -> npt.NDArray[np.int64]:
        """Zero-based OD position of every route, in route order."""
        return np.array([r.od_id - 1 for r in self.routes], dtype=np.int64)

    @cached_property
    def routes_by_od(self) -> tuple[tuple[int, ...], ...]:
        """Route positions grouped per OD position."""
        groups: list[list[int]] = [[] for _ in range(self.n_od)]
        for pos, route in enumerate(self.routes):
            groups[route.od_id - 1].append(pos)
        return tuple(tuple(g) for g in groups)

    # -- vectors -------------------------------------------------------------

    @cached_property
    def free_flow_times(self) -> npt.NDArray[np.float64]:
        return np.array([e.free_flow_time for e in self.edges], dtype=float)

    @cached_property
    def capacities(self) -> npt.NDArray[np.float64]:
        return np.array([e.capacity for e in self.edges], dtype=float)

    @cached_property
    def prior(self) -> ODVector:
        return np.array([od.prior_demand for od in self.od_pairs], dtype=float)

    @cached_property
    def route_free_flow_times(self) -> npt.NDArray[np.float64]:
        return np.asarray(self.route_edge_incidence @ self.free_flow_times, dtype=float)

    # -- sparse incidence ----------------------------------------------------

    @cached_property
    def route_edge_incidence(self) -> sparse.csr_matrix:
        """0/1 matrix of shape (routes, edges)."""
        rows: list[int] = []
        cols: list[int] = []
        for pos, route in enumerate(self.routes):
            for edge_id in route.edge_sequence:
                rows.append(pos)
                cols.append(self.edge_position[edge_id])
        data = np.ones(len(rows), dtype=float)
        return sparse.csr_matrix(
            (data, (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(self.n_routes, self.n_edges),
        )

    @cached_property
    def measured_incidence(self) -> sparse.csr_matrix:
        """0/1 matrix of shape (routes, measured edges), columns in measured order."""
        rows: list[int] = []
        cols: list[int] = []
        for pos, route in enumerate(self.routes):
            for edge_id in route.edge_sequence:
                col = self.measured_position.get(edge_id)
                if col is not None:
                    rows.append(pos)
                    cols.append(col)
        data = np.ones(len(rows), dtype=float)
        return sparse.csr_matrix(
            (data, (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
            shape=(self.n_routes, self.n_measured),
        )

    @cached_property
    def route_od_indicator(self) -> sparse.csr_matrix:
        """0/1 matrix of shape (routes, OD pairs)."""
        data = np.ones(self.n_routes, dtype=float)
        return sparse.csr_matrix(
            (data, (np.arange(self.n_routes), self.route_od_index)),
            shape=(self.n_routes, self.n_od),
        )

    # -- helpers -------------------------------------------------------------

    def check_od_vector(self, demand: npt.ArrayLike, name: str = "demand") -> ODVector:
        vec = np.asarray(demand, dtype=float)
        if vec.shape != (self.n_od,):
            raise InvalidInputError(f"{name} must have length {self.n_od}, got shape {vec.shape}")
        return vec

    def route_length(self, route: Route) -> float:
        return float(sum(self.edges[self.edge_position[e]].free_flow_time for e in route.edge_sequence))

    def with_prior(self, prior: npt.ArrayLike) -> Network:
        vec = self.check_od_vector(prior, "prior")
        od_pairs = tuple(replace(od, prior_demand=float(v)) for od, v in zip(self.od_pairs, vec))
        return Network(edges=self.edges, od_pairs=od_pairs, routes=self.routes, measured_edges=self.measured_edges)
