"""Shared fixtures: a hand-built two-OD network and a small generated one."""

from __future__ import annotations

import numpy as np
import pytest

from odcal.models import ChoiceParams, ScenarioSpec, SimConfig
from odcal.network.generator import generate_synthetic_network
from odcal.network.types import Edge, Network, ODPair, Route
from odcal.route_choice.logit import RouteProbabilities, route_probabilities
from odcal.route_choice.travel_times import FreeFlowProvider


def build_tiny_network() -> Network:
    """OD 1 has two equal-time routes; OD 2 has a 120 s and a 90 s route.

    Measured edges 2 (routes 1 and 3) and 3 (route 2).
    """
    edges = (
        Edge(1, free_flow_time=60.0, capacity=1800.0),
        Edge(2, free_flow_time=60.0, capacity=1800.0, is_measured=True),
        Edge(3, free_flow_time=120.0, capacity=1800.0, is_measured=True),
        Edge(4, free_flow_time=60.0, capacity=1800.0),
        Edge(5, free_flow_time=90.0, capacity=1800.0),
    )
    od_pairs = (
        ODPair(1, origin_node=0, destination_node=2, prior_demand=250.0),
        ODPair(2, origin_node=1, destination_node=3, prior_demand=250.0),
    )
    routes = (
        Route(1, od_id=1, edge_sequence=(1, 2), travel_time=120.0),
        Route(2, od_id=1, edge_sequence=(3,), travel_time=120.0),
        Route(3, od_id=2, edge_sequence=(2, 4), travel_time=120.0),
        Route(4, od_id=2, edge_sequence=(5,), travel_time=90.0),
    )
    return Network(edges=edges, od_pairs=od_pairs, routes=routes, measured_edges=(2, 3))


@pytest.fixture()
def tiny_network() -> Network:
    return build_tiny_network()


@pytest.fixture()
def free_flow_probabilities(tiny_network: Network) -> RouteProbabilities:
    table = FreeFlowProvider().travel_times(tiny_network)
    return route_probabilities(tiny_network, table, ChoiceParams())


@pytest.fixture(scope="session")
def small_spec() -> ScenarioSpec:
    return ScenarioSpec(n_nodes=16, n_edges=50, n_od_pairs=10, routes_per_od=3)


@pytest.fixture(scope="session")
def small_network(small_spec: ScenarioSpec) -> Network:
    return generate_synthetic_network(small_spec, seed=3)


@pytest.fixture()
def uncongested() -> SimConfig:
    return SimConfig(vdf_alpha=0.0, replications=1, seed=0)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
