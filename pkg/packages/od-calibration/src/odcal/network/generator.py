"""Synthetic scenario generation and route overlap.

Networks are perturbed grids: nodes sit on a near-square lattice, candidate
links join orthogonal and diagonal neighbours in both directions, a random
spanning tree (both directions) guarantees strong connectivity, and random
extra candidates fill up to the requested edge count. Route sets come from
k-shortest simple paths on free-flow time, filtered so no two routes of an OD
overlap by more than the cap.
"""

from __future__ import annotations

import itertools
import logging
import math

import networkx as nx
import numpy as np

from odcal.errors import GenerationError, InvalidInputError
from odcal.models import ScenarioSpec
from odcal.network.types import Edge, Network, ODPair, Route

logger = logging.getLogger(__name__)

_OVERLAP_SLACK = 1e-12


def route_overlap(a: Route, b: Route, network: Network) -> float:
    """Shared free-flow length over the shorter route's free-flow length."""
    for route in (a, b):
        known = network.route_position.get(route.route_id)
        if known is None or network.routes[known] != route:
            raise InvalidInputError(f"route {route.route_id} does not belong to the network")
    shared = set(a.edge_sequence) & set(b.edge_sequence)
    if not shared:
        return 0.0
    shared_length = sum(network.edges[network.edge_position[e]].free_flow_time for e in shared)
    shortest = min(network.route_length(a), network.route_length(b))
    return float(min(1.0, max(0.0, shared_length / shortest)))


def _overlap_by_length(a: list[int], b: list[int], length: dict[int, float]) -> float:
    shared = set(a) & set(b)
    if not shared:
        return 0.0
    shortest = min(sum(length[e] for e in a), sum(length[e] for e in b))
    return sum(length[e] for e in shared) / shortest


def _grid_candidates(n_nodes: int) -> list[tuple[int, int]]:
    """Undirected lattice neighbour pairs (orthogonal then diagonal)."""
    cols = math.ceil(math.sqrt(n_nodes))
    pairs: list[tuple[int, int]] = []
    for node in range(n_nodes):
        r, c = divmod(node, cols)
        for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
            rr, cc = r + dr, c + dc
            if 0 <= cc < cols:
                other = rr * cols + cc
                if other < n_nodes:
                    pairs.append((node, other))
    return pairs


def _build_topology(spec: ScenarioSpec, rng: np.random.Generator) -> list[tuple[int, int]]:
    candidates = _grid_candidates(spec.n_nodes)
    lattice = nx.Graph()
    lattice.add_nodes_from(range(spec.n_nodes))
    for u, v in candidates:
        lattice.add_edge(u, v, weight=float(rng.random()))
    if not nx.is_connected(lattice):
        raise GenerationError(f"lattice over {spec.n_nodes} nodes is not connected")

    tree = nx.minimum_spanning_tree(lattice, weight="weight")
    tree_pairs = sorted(tuple(sorted(e)) for e in tree.edges())

    directed: list[tuple[int, int]] = []
    for u, v in tree_pairs:
        directed.extend([(u, v), (v, u)])
    if spec.n_edges < len(directed):
        raise GenerationError(
            f"n_edges={spec.n_edges} cannot keep {spec.n_nodes} nodes strongly connected "
            f"(needs at least {len(directed)})"
        )

    in_tree = set(directed)
    spare = [(u, v) for a, b in candidates for (u, v) in ((a, b), (b, a)) if (u, v) not in in_tree]
    if spec.n_edges > len(directed) + len(spare):
        raise GenerationError(
            f"n_edges={spec.n_edges} exceeds the {len(directed) + len(spare)} lattice links "
            f"available for {spec.n_nodes} nodes"
        )
    order = rng.permutation(len(spare))
    directed.extend(spare[i] for i in order[: spec.n_edges - len(directed)])
    return directed


def generate_synthetic_network(spec: ScenarioSpec, seed: int) -> Network:
    """Generate a network deterministically from (spec, seed)."""
    pairs = spec.n_nodes * (spec.n_nodes - 1)
    if spec.n_od_pairs > pairs:
        raise GenerationError(f"n_od_pairs={spec.n_od_pairs} exceeds the {pairs} ordered node pairs")

    rng = np.random.default_rng(seed)
    links = _build_topology(spec, rng)

    ff_low, ff_high = spec.free_flow_time_range
    cap_low, cap_high = spec.capacity_range
    free_flow = rng.uniform(ff_low, ff_high, size=len(links))
    capacity = rng.uniform(cap_low, cap_high, size=len(links))

    graph = nx.DiGraph()
    graph.add_nodes_from(range(spec.n_nodes))
    length: dict[int, float] = {}
    for idx, (u, v) in enumerate(links):
        edge_id = idx + 1
        length[edge_id] = float(free_flow[idx])
        graph.add_edge(u, v, edge_id=edge_id, weight=float(free_flow[idx]))

    pair_codes = rng.choice(spec.n_nodes * (spec.n_nodes - 1), size=spec.n_od_pairs, replace=False)
    dem_low, dem_high = spec.prior_demand_range
    priors = rng.uniform(dem_low, dem_high, size=spec.n_od_pairs)

    od_pairs: list[ODPair] = []
    routes: list[Route] = []
    max_candidates = spec.routes_per_od * spec.candidate_factor
    for z, code in enumerate(pair_codes):
        origin, rest = divmod(int(code), spec.n_nodes - 1)
        destination = rest if rest < origin else rest + 1
        od_id = z + 1
        od_pairs.append(ODPair(od_id, origin, destination, float(priors[z])))

        accepted: list[list[int]] = []
        try:
            paths = nx.shortest_simple_paths(graph, origin, destination, weight="weight")
            for path in itertools.islice(paths, max_candidates):
                edge_seq = [graph[u][v]["edge_id"] for u, v in zip(path, path[1:])]
                if all(_overlap_by_length(edge_seq, other, length) <= spec.overlap_cap + _OVERLAP_SLACK
                       for other in accepted):
                    accepted.append(edge_seq)
                if len(accepted) == spec.routes_per_od:
                    break
        except nx.NetworkXNoPath as exc:
            raise GenerationError(f"od {od_id}: no path from node {origin} to node {destination}") from exc
        if not accepted:
            raise GenerationError(f"od {od_id}: no route survived the overlap filter")

        for edge_seq in accepted:
            routes.append(Route(
                route_id=len(routes) + 1,
                od_id=od_id,
                edge_sequence=tuple(edge_seq),
                travel_time=sum(length[e] for e in edge_seq),
            ))

    used = sorted({e for r in routes for e in r.edge_sequence})
    n_measured = max(1, round(spec.measured_fraction * len(used)))
    measured = sorted(int(e) for e in rng.choice(used, size=n_measured, replace=False))
    measured_set = set(measured)

    edges = tuple(
        Edge(edge_id=idx + 1, free_flow_time=float(free_flow[idx]), capacity=float(capacity[idx]),
             is_measured=(idx + 1) in measured_set)
        for idx in range(len(links))
    )
    network = Network(edges=edges, od_pairs=tuple(od_pairs), routes=tuple(routes), measured_edges=tuple(measured))
    logger.info(
        "Generated network: od_pairs=%d, edges=%d, routes=%d, measured=%d (seed=%d)",
        network.n_od, network.n_edges, network.n_routes, network.n_measured, seed,
    )
    return network
