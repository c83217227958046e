"""Tests for the stochastic loader, the expected-count loader and the Â estimate."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from odcal.errors import InvalidInputError
from odcal.models import ChoiceParams, SimConfig
from odcal.network.assignment import build_assignment_matrix, predict_counts
from odcal.network.types import Network
from odcal.route_choice.logit import RouteProbabilities
from odcal.simulator import (
    ExpectedCountSimulator,
    StochasticSimulator,
    bpr_times,
    converge_route_times,
    dump_replication_counts,
    estimate_assignment,
    simulate,
)


class TestBpr:
    def test_free_flow_at_zero_volume(self) -> None:
        t = bpr_times(np.array([60.0]), np.array([0.0]), np.array([1800.0]), 0.15, 4.0)
        assert t[0] == pytest.approx(60.0)

    def test_at_capacity(self) -> None:
        t = bpr_times(np.array([60.0]), np.array([1800.0]), np.array([1800.0]), 0.15, 4.0)
        assert t[0] == pytest.approx(69.0)


class TestConvergence:
    def test_uncongested_keeps_free_flow(self, tiny_network: Network, uncongested: SimConfig) -> None:
        state = converge_route_times(tiny_network, [500.0, 500.0], uncongested, ChoiceParams())
        np.testing.assert_allclose(state.route_times, tiny_network.route_free_flow_times)
        assert state.probabilities[:2] == pytest.approx([0.5, 0.5])

    def test_congestion_shifts_demand(self, tiny_network: Network) -> None:
        free = converge_route_times(tiny_network, [1.0, 1.0], SimConfig(), ChoiceParams())
        busy = converge_route_times(tiny_network, [4000.0, 4000.0], SimConfig(), ChoiceParams())
        assert np.all(busy.route_times >= free.route_times)
        assert np.all(busy.edge_volumes >= free.edge_volumes)

    @pytest.mark.parametrize(("low", "high"), [(0.0, 0.25), (0.25, 0.5), (0.5, 1.0), (1.0, 2.0), (2.0, 4.0)])
    def test_more_demand_never_speeds_up_an_edge(self, tiny_network: Network, low: float, high: float) -> None:
        base = np.array([1000.0, 1000.0])
        lighter = converge_route_times(tiny_network, low * base, SimConfig(), ChoiceParams())
        heavier = converge_route_times(tiny_network, high * base, SimConfig(), ChoiceParams())
        assert np.all(heavier.edge_times >= lighter.edge_times - 1e-9)
        assert heavier.edge_volumes.sum() >= lighter.edge_volumes.sum()

    def test_zero_demand(self, tiny_network: Network) -> None:
        state = converge_route_times(tiny_network, [0.0, 0.0], SimConfig(), ChoiceParams())
        np.testing.assert_allclose(state.edge_times, tiny_network.free_flow_times)


class TestSimulate:
    def test_seeded_determinism(self, small_network: Network) -> None:
        config = SimConfig(replications=3, seed=7)
        a = simulate(small_network, small_network.prior, config, ChoiceParams())
        b = simulate(small_network, small_network.prior, config, ChoiceParams())
        np.testing.assert_array_equal(a.measured_counts, b.measured_counts)
        np.testing.assert_array_equal(a.replication_route_flows, b.replication_route_flows)

    def test_different_seeds_differ(self, small_network: Network) -> None:
        a = simulate(small_network, small_network.prior, SimConfig(seed=1), ChoiceParams())
        b = simulate(small_network, small_network.prior, SimConfig(seed=2), ChoiceParams())
        assert not np.array_equal(a.replication_route_flows, b.replication_route_flows)

    def test_route_flows_conserve_trips(self, small_network: Network) -> None:
        result = simulate(small_network, small_network.prior, SimConfig(replications=4), ChoiceParams())
        for k in range(result.replications):
            per_od = np.bincount(
                small_network.route_od_index,
                weights=result.replication_route_flows[k],
                minlength=small_network.n_od,
            )
            np.testing.assert_array_equal(per_od, result.replication_trips[k])

    def test_counts_follow_route_flows(self, small_network: Network) -> None:
        result = simulate(small_network, small_network.prior, SimConfig(replications=2), ChoiceParams())
        expected = small_network.measured_incidence.T @ result.replication_route_flows[0]
        np.testing.assert_allclose(result.replication_counts[0], expected)
        assert np.all(result.measured_counts >= 0)

    def test_parallel_matches_serial(self, small_network: Network) -> None:
        serial = simulate(small_network, small_network.prior, SimConfig(replications=6, seed=3), ChoiceParams())
        parallel = simulate(
            small_network, small_network.prior, SimConfig(replications=6, seed=3, workers=3), ChoiceParams()
        )
        np.testing.assert_array_equal(serial.replication_counts, parallel.replication_counts)

    def test_zero_demand_gives_zero_counts(self, tiny_network: Network) -> None:
        result = simulate(tiny_network, [0.0, 0.0], SimConfig(replications=2), ChoiceParams())
        assert result.measured_counts.tolist() == [0.0, 0.0]

    def test_mean_matches_expected_counts(self, small_network: Network, uncongested: SimConfig) -> None:
        replications = 200
        config = uncongested.model_copy(update={"replications": replications})
        result = simulate(small_network, small_network.prior, config, ChoiceParams())
        probs = RouteProbabilities(route_ids=small_network.route_ids, vector=result.route_probabilities)
        expected = predict_counts(build_assignment_matrix(small_network, probs), small_network.prior)

        se = np.sqrt(expected / replications)
        outside = np.abs(result.measured_counts - expected) > 3 * se + 1e-12
        assert outside.sum() <= max(1, int(0.05 * small_network.n_measured))

    def test_negative_demand_rejected(self, tiny_network: Network) -> None:
        with pytest.raises(InvalidInputError):
            simulate(tiny_network, [-1.0, 2.0], SimConfig(), ChoiceParams())

    def test_wrong_length_rejected(self, tiny_network: Network) -> None:
        with pytest.raises(InvalidInputError):
            simulate(tiny_network, [1.0, 2.0, 3.0], SimConfig(), ChoiceParams())

    def test_stochastic_simulator_uses_call_seed(self, small_network: Network) -> None:
        sim = StochasticSimulator(network=small_network, config=SimConfig(seed=0), params=ChoiceParams())
        direct = simulate(small_network, small_network.prior, SimConfig(seed=9), ChoiceParams())
        np.testing.assert_array_equal(sim(small_network.prior, 9).measured_counts, direct.measured_counts)


class TestExpectedCountSimulator:
    def test_fixed_probabilities_equal_linear_counts(
        self, tiny_network: Network, free_flow_probabilities: RouteProbabilities
    ) -> None:
        sim = ExpectedCountSimulator(
            network=tiny_network, config=SimConfig(), params=ChoiceParams(), probabilities=free_flow_probabilities
        )
        x = np.array([300.0, 200.0])
        matrix = build_assignment_matrix(tiny_network, free_flow_probabilities)
        np.testing.assert_allclose(sim(x, 0).measured_counts, predict_counts(matrix, x))

    def test_ignores_seed(self, small_network: Network) -> None:
        sim = ExpectedCountSimulator(network=small_network, config=SimConfig(), params=ChoiceParams())
        np.testing.assert_array_equal(
            sim(small_network.prior, 0).measured_counts, sim(small_network.prior, 99).measured_counts
        )


class TestEstimateAssignment:
    def test_exact_for_expected_result(
        self, tiny_network: Network, free_flow_probabilities: RouteProbabilities
    ) -> None:
        sim = ExpectedCountSimulator(
            network=tiny_network, config=SimConfig(), params=ChoiceParams(), probabilities=free_flow_probabilities
        )
        estimate = estimate_assignment(sim(np.array([100.0, 40.0]), 0), tiny_network)
        expected = build_assignment_matrix(tiny_network, free_flow_probabilities)
        np.testing.assert_allclose(estimate.matrix.to_dense(), expected.to_dense())
        assert estimate.fallback_ods == ()

    def test_zero_trip_od_falls_back_to_probabilities(
        self, tiny_network: Network, uncongested: SimConfig, caplog: pytest.LogCaptureFixture
    ) -> None:
        config = uncongested.model_copy(update={"replications": 2})
        result = simulate(tiny_network, [0.0, 500.0], config, ChoiceParams())
        with caplog.at_level(logging.WARNING, logger="odcal.simulator.estimate"):
            estimate = estimate_assignment(result, tiny_network)
        assert any("No sampled trips" in r.getMessage() for r in caplog.records)
        assert estimate.fallback_ods == (1,)
        np.testing.assert_allclose(estimate.matrix.column(1), [0.5, 0.5])

    def test_entries_are_observed_shares(self, small_network: Network) -> None:
        result = simulate(small_network, small_network.prior, SimConfig(replications=3), ChoiceParams())
        dense = estimate_assignment(result, small_network).matrix.to_dense()
        assert np.all(dense >= 0) and np.all(dense <= 1)
        trips = result.replication_trips.sum(axis=0)
        pooled = result.replication_counts.sum(axis=0)
        np.testing.assert_allclose(dense @ trips, pooled)

    def test_mismatched_result_rejected(self, tiny_network: Network, small_network: Network) -> None:
        result = simulate(small_network, small_network.prior, SimConfig(), ChoiceParams())
        with pytest.raises(InvalidInputError):
            estimate_assignment(result, tiny_network)


class TestDumpReplicationCounts:
    def test_long_format(self, tiny_network: Network, tmp_path: Path) -> None:
        result = simulate(tiny_network, [100.0, 100.0], SimConfig(replications=3), ChoiceParams())
        path = dump_replication_counts(result, tiny_network, tmp_path / "reps.csv")
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["edge_id", "replication", "count"]
        assert len(frame) == 6
        assert frame["edge_id"].tolist() == [2, 3, 2, 3, 2, 3]
        assert frame["replication"].tolist() == [0, 0, 1, 1, 2, 2]
        np.testing.assert_allclose(frame["count"].to_numpy(), result.replication_counts.ravel())
