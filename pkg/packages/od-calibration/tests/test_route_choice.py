"""Tests for logit route probabilities and travel-time providers."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from odcal.errors import CoverageError, InvalidInputError
from odcal.models import ChoiceParams, TravelTimeConfig, TravelTimeSource
from odcal.network.types import Network
from odcal.route_choice.logit import RouteProbabilities, route_probabilities
from odcal.route_choice.travel_times import (
    FileProvider,
    FreeFlowProvider,
    Provenance,
    SimulatorProvider,
    TravelTimeTable,
    get_travel_times,
    provider_from_config,
)


class TestLogit:
    def test_one_unit_utility_gap(self, tiny_network: Network) -> None:
        # theta * 600 s = -1
        times = {1: 60.0, 2: 660.0, 3: 100.0, 4: 100.0}
        probs = route_probabilities(tiny_network, times, ChoiceParams())
        assert probs[1] == pytest.approx(0.73106, abs=1e-5)
        assert probs[2] == pytest.approx(0.26894, abs=1e-5)
        assert probs[3] == pytest.approx(0.5)

    def test_normalized_per_od(self, small_network: Network, rng: np.random.Generator) -> None:
        draws = rng.uniform(30, 3000, small_network.n_routes)
        times = {rid: float(t) for rid, t in zip(small_network.route_ids, draws)}
        probs = route_probabilities(small_network, times, ChoiceParams())
        sums = np.bincount(small_network.route_od_index, weights=probs.vector)
        np.testing.assert_allclose(sums, 1.0, atol=1e-12)
        assert np.all(probs.vector > 0)

    def test_invariant_to_common_shift(self, tiny_network: Network) -> None:
        times = {1: 100.0, 2: 200.0, 3: 300.0, 4: 50.0}
        shifted = {rid: t + 1234.0 for rid, t in times.items()}
        a = route_probabilities(tiny_network, times, ChoiceParams())
        b = route_probabilities(tiny_network, shifted, ChoiceParams())
        np.testing.assert_allclose(a.vector, b.vector, atol=1e-12)

    def test_slower_route_loses_share(self, tiny_network: Network) -> None:
        base = route_probabilities(tiny_network, {1: 100.0, 2: 100.0, 3: 100.0, 4: 100.0}, ChoiceParams())
        slower = route_probabilities(tiny_network, {1: 160.0, 2: 100.0, 3: 100.0, 4: 100.0}, ChoiceParams())
        assert slower[1] < base[1]
        assert slower[2] > base[2]

    def test_zero_theta_is_uniform(self, small_network: Network) -> None:
        times = dict(zip(small_network.route_ids, small_network.route_free_flow_times.tolist()))
        probs = route_probabilities(small_network, times, ChoiceParams(theta=0.0))
        for group in small_network.routes_by_od:
            np.testing.assert_allclose(probs.vector[list(group)], 1.0 / len(group))

    def test_extreme_times_stay_finite(self, tiny_network: Network) -> None:
        times = {1: 1e7, 2: 1e7 + 60.0, 3: 5.0, 4: 1e9}
        probs = route_probabilities(tiny_network, times, ChoiceParams(theta=-1.0))
        assert np.all(np.isfinite(probs.vector))
        assert probs[1] == pytest.approx(1.0)
        assert probs[3] == pytest.approx(1.0)

    def test_missing_route_time(self, tiny_network: Network) -> None:
        with pytest.raises(CoverageError):
            route_probabilities(tiny_network, {1: 10.0, 2: 10.0, 3: 10.0}, ChoiceParams())

    def test_mapping_interface(self, free_flow_probabilities: RouteProbabilities) -> None:
        assert list(free_flow_probabilities) == [1, 2, 3, 4]
        assert len(free_flow_probabilities) == 4
        assert free_flow_probabilities[1] == pytest.approx(0.5)

    def test_per_minute_constructor(self) -> None:
        assert ChoiceParams.per_minute(-0.1).theta == pytest.approx(-0.1 / 60.0)


class TestProviders:
    def test_free_flow(self, tiny_network: Network) -> None:
        table = get_travel_times(FreeFlowProvider(), tiny_network)
        assert table.provenance is Provenance.FREE_FLOW
        assert dict(table) == {1: 120.0, 2: 120.0, 3: 120.0, 4: 90.0}

    def test_file(self, tiny_network: Network, tmp_path: Path) -> None:
        path = tmp_path / "times.csv"
        path.write_text("route_id,travel_time_seconds\n1,100\n2,200\n3,300\n4,400\n")
        table = get_travel_times(FileProvider(path=path), tiny_network)
        assert table.provenance is Provenance.FILE
        assert table[4] == 400.0
        assert table.source == str(path)

    def test_file_missing_routes(self, tiny_network: Network, tmp_path: Path) -> None:
        path = tmp_path / "times.csv"
        path.write_text("route_id,travel_time_seconds\n1,100\n2,200\n")
        with pytest.raises(CoverageError) as exc:
            get_travel_times(FileProvider(path=path), tiny_network)
        assert exc.value.missing == [3, 4]

    def test_file_wrong_header(self, tiny_network: Network, tmp_path: Path) -> None:
        path = tmp_path / "times.csv"
        path.write_text("route,seconds\n1,100\n")
        with pytest.raises(InvalidInputError):
            FileProvider(path=path).travel_times(tiny_network)

    @pytest.mark.parametrize(
        "body",
        [
            "1,abc\n2,200\n3,300\n4,400\n",
            "1,100\n2,\n3,300\n4,400\n",
            "1.5,100\n2,200\n3,300\n4,400\n",
        ],
        ids=["non-numeric-time", "missing-time", "fractional-id"],
    )
    def test_file_malformed_rows(self, tiny_network: Network, tmp_path: Path, body: str) -> None:
        path = tmp_path / "times.csv"
        path.write_text("route_id,travel_time_seconds\n" + body)
        with pytest.raises(InvalidInputError):
            FileProvider(path=path).travel_times(tiny_network)

    def test_nonpositive_time_rejected(self) -> None:
        with pytest.raises(InvalidInputError):
            TravelTimeTable(times={1: 0.0}, provenance=Provenance.FILE)

    def test_simulator_uncongested_equals_free_flow(self, tiny_network: Network, uncongested) -> None:
        provider = SimulatorProvider(demand=np.array([300.0, 300.0]), sim=uncongested)
        table = get_travel_times(provider, tiny_network)
        assert table.provenance is Provenance.SIMULATOR
        for rid, t in FreeFlowProvider().travel_times(tiny_network).items():
            assert table[rid] == pytest.approx(t)

    def test_simulator_congestion_slows_routes(self, tiny_network: Network) -> None:
        table = SimulatorProvider(demand=np.array([3000.0, 3000.0])).travel_times(tiny_network)
        free = FreeFlowProvider().travel_times(tiny_network)
        assert all(table[rid] > free[rid] for rid in tiny_network.route_ids)

    def test_provider_from_config(self, tmp_path: Path) -> None:
        assert isinstance(provider_from_config(TravelTimeConfig()), FreeFlowProvider)
        file_config = TravelTimeConfig(source=TravelTimeSource.FILE, path=tmp_path / "t.csv")
        assert isinstance(provider_from_config(file_config), FileProvider)
        sim_config = TravelTimeConfig(source=TravelTimeSource.SIMULATOR)
        assert isinstance(provider_from_config(sim_config, np.ones(2)), SimulatorProvider)
        with pytest.raises(InvalidInputError):
            provider_from_config(sim_config)
