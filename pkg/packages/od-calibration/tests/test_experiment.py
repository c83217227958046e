"""Tests for experiment documents, input preparation, scenario generation and the benchmark."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from odcal.benchmark import BENCHMARK_FILE, BenchmarkRow, run_benchmark, summarize, write_benchmark
from odcal.errors import ExperimentConfigError
from odcal.experiment import ExperimentLoader, generate_scenario, prepare_inputs, write_scenario
from odcal.models import BenchmarkConfig, CalibratorConfig, Method, ScenarioSpec, SimConfig
from odcal.network.io import load_network, save_network, write_counts, write_od_vector
from odcal.network.types import Network

REPO_ROOT = Path(__file__).resolve().parents[3]
DESK_BENCHMARK = REPO_ROOT / "scenarios" / "desk-benchmark"


@pytest.fixture()
def experiment_dir(tmp_path: Path, tiny_network: Network) -> Path:
    save_network(tiny_network, tmp_path / "data" / "network.json")
    write_counts([120.0, 80.0], tiny_network, tmp_path / "data" / "counts.csv")
    write_od_vector([300.0, 200.0], tmp_path / "data" / "true_od.csv")
    return tmp_path


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


class TestExperimentLoader:
    def test_relative_paths_resolve_against_document(self, experiment_dir: Path) -> None:
        doc = _write(
            experiment_dir / "experiment.yaml",
            "network: data/network.json\ncounts: data/counts.csv\noutput_dir: out\n",
        )
        config = ExperimentLoader().load(doc)
        assert config.network == experiment_dir / "data" / "network.json"
        assert config.counts == experiment_dir / "data" / "counts.csv"
        assert config.output_dir == experiment_dir / "out"
        assert config.methods == [Method.LINEAR_METAMODEL]

    def test_missing_counts_file(self, experiment_dir: Path) -> None:
        doc = _write(experiment_dir / "experiment.yaml", "network: data/network.json\ncounts: data/nope.csv\n")
        with pytest.raises(ExperimentConfigError, match="counts"):
            ExperimentLoader().load(doc)

    def test_missing_document(self, tmp_path: Path) -> None:
        with pytest.raises(ExperimentConfigError, match="not found"):
            ExperimentLoader().load(tmp_path / "absent.yaml")

    def test_extends_deep_merges(self, experiment_dir: Path) -> None:
        _write(
            experiment_dir / "base.yaml",
            "network: data/network.json\ncounts: data/counts.csv\n"
            "calibrator:\n  max_iterations: 4\n  delta: 0.5\n",
        )
        doc = _write(experiment_dir / "child.yaml", "extends: base.yaml\ncalibrator:\n  delta: 0.25\n")
        config = ExperimentLoader().load(doc)
        assert config.calibrator.max_iterations == 4
        assert config.calibrator.delta == 0.25

    def test_circular_extends(self, tmp_path: Path) -> None:
        _write(tmp_path / "a.yaml", "extends: b.yaml\n")
        _write(tmp_path / "b.yaml", "extends: a.yaml\n")
        with pytest.raises(ExperimentConfigError, match="circular"):
            ExperimentLoader().load(tmp_path / "a.yaml")

    def test_needs_exactly_one_count_source(self, experiment_dir: Path) -> None:
        doc = _write(
            experiment_dir / "experiment.yaml",
            "network: data/network.json\ncounts: data/counts.csv\nsynthetic_truth:\n  true_od: data/true_od.csv\n",
        )
        with pytest.raises(ExperimentConfigError):
            ExperimentLoader().load(doc)

    def test_schema_violation(self, experiment_dir: Path) -> None:
        doc = _write(
            experiment_dir / "experiment.yaml",
            "network: data/network.json\ncounts: data/counts.csv\ncalibrator:\n  max_iterations: 0\n",
        )
        with pytest.raises(ExperimentConfigError, match="max_iterations"):
            ExperimentLoader().load(doc)

    def test_non_mapping_document(self, tmp_path: Path) -> None:
        doc = _write(tmp_path / "list.yaml", "- 1\n- 2\n")
        with pytest.raises(ExperimentConfigError, match="mapping"):
            ExperimentLoader().load(doc)

    def test_broken_yaml(self, tmp_path: Path) -> None:
        doc = _write(tmp_path / "broken.yaml", "network: [unclosed\n")
        with pytest.raises(ExperimentConfigError):
            ExperimentLoader().load(doc)

    def test_json_documents_are_accepted(self, experiment_dir: Path) -> None:
        doc = _write(
            experiment_dir / "experiment.json",
            '{"network": "data/network.json", "counts": "data/counts.csv", "methods": ["spsa", "lam"]}',
        )
        assert ExperimentLoader().load(doc).methods == [Method.SPSA, Method.LAM]

    def test_shipped_scenario_documents(self) -> None:
        spec = ExperimentLoader().load_scenario(DESK_BENCHMARK / "scenario.yaml")
        assert (spec.n_od_pairs, spec.n_edges, spec.routes_per_od) == (40, 150, 3)
        bench = ExperimentLoader().load_benchmark(DESK_BENCHMARK / "benchmark.yaml")
        assert bench.seeds == list(range(10))
        assert bench.scenario == spec
        assert bench.calibrator.max_iterations == 15

    def test_simulation_blocks_of_an_experiment_document(self) -> None:
        blocks = ExperimentLoader().load_simulation(DESK_BENCHMARK / "experiment.yaml")
        assert blocks.sim.inner_fixed_point_iters == 5
        assert blocks.sim.replications == 1
        assert blocks.choice.theta == pytest.approx(-0.1 / 60.0)

    def test_simulation_blocks_validated(self, tmp_path: Path) -> None:
        doc = _write(tmp_path / "sim.yaml", "sim:\n  replications: 0\n")
        with pytest.raises(ExperimentConfigError, match="replications"):
            ExperimentLoader().load_simulation(doc)

    def test_scenario_without_wrapper_key(self, tmp_path: Path) -> None:
        doc = _write(tmp_path / "scenario.yaml", "n_nodes: 9\nn_edges: 20\nn_od_pairs: 4\n")
        assert ExperimentLoader().load_scenario(doc).n_nodes == 9


class TestPrepareInputs:
    def test_counts_file(self, experiment_dir: Path, tiny_network: Network) -> None:
        doc = _write(experiment_dir / "experiment.yaml", "network: data/network.json\ncounts: data/counts.csv\n")
        inputs = prepare_inputs(ExperimentLoader().load(doc))
        assert inputs.field_counts.tolist() == [120.0, 80.0]
        assert inputs.prior.tolist() == tiny_network.prior.tolist()
        assert inputs.truth is None

    def test_synthetic_truth_keeps_network_prior(self, experiment_dir: Path, tiny_network: Network) -> None:
        doc = _write(
            experiment_dir / "experiment.yaml",
            "network: data/network.json\nsynthetic_truth:\n  true_od: data/true_od.csv\n  replications: 4\n",
        )
        inputs = prepare_inputs(ExperimentLoader().load(doc))
        assert inputs.truth is not None and inputs.truth.tolist() == [300.0, 200.0]
        assert inputs.field_counts.shape == (2,)
        assert inputs.prior.tolist() == tiny_network.prior.tolist()

    def test_synthetic_truth_with_prior_noise(self, experiment_dir: Path) -> None:
        doc = _write(
            experiment_dir / "experiment.yaml",
            "network: data/network.json\nsynthetic_truth:\n  true_od: data/true_od.csv\n"
            "  prior_noise: [0.5, 1.5]\n  seed: 3\n",
        )
        inputs = prepare_inputs(ExperimentLoader().load(doc))
        ratio = inputs.prior / np.array([300.0, 200.0])
        assert np.all((ratio >= 0.5) & (ratio <= 1.5))


class TestGenerateScenario:
    def test_deterministic(self, small_spec: ScenarioSpec) -> None:
        a = generate_scenario(small_spec, seed=5, sim=SimConfig(vdf_alpha=0.0))
        b = generate_scenario(small_spec, seed=5, sim=SimConfig(vdf_alpha=0.0))
        np.testing.assert_array_equal(a.truth, b.truth)
        np.testing.assert_array_equal(a.counts, b.counts)
        np.testing.assert_array_equal(a.network.prior, b.network.prior)

    def test_truth_and_prior_ranges(self, small_spec: ScenarioSpec) -> None:
        scenario = generate_scenario(small_spec, seed=1)
        assert np.all((scenario.truth >= 50.0) & (scenario.truth <= 500.0))
        ratio = scenario.network.prior / scenario.truth
        assert np.all((ratio >= 0.5) & (ratio <= 1.5))
        assert scenario.counts.shape == (scenario.network.n_measured,)

    def test_summary(self, small_spec: ScenarioSpec) -> None:
        scenario = generate_scenario(small_spec, seed=1)
        n = scenario.network
        assert scenario.summary() == (
            f"od_pairs=10, edges=50, routes={n.n_routes}, measured={n.n_measured}"
        )

    def test_write_scenario_files(self, small_spec: ScenarioSpec, tmp_path: Path) -> None:
        scenario = generate_scenario(small_spec, seed=2)
        paths = write_scenario(scenario, tmp_path / "gen")
        assert {p.name for p in paths.values()} == {"network.json", "true_od.csv", "counts.csv"}
        reloaded = load_network(paths["network"])
        assert reloaded.n_od == small_spec.n_od_pairs
        assert len(pd.read_csv(paths["counts"])) == reloaded.n_measured


class TestBenchmark:
    def test_rows_and_summary(self, small_spec: ScenarioSpec, tmp_path: Path) -> None:
        config = BenchmarkConfig(
            scenario=small_spec,
            seeds=[0, 1],
            calibrator=CalibratorConfig(max_iterations=2, delta=0.1),
        )
        rows = run_benchmark(config)
        assert len(rows) == 6
        assert {r.method for r in rows} == {m.value for m in Method}
        spsa = [r for r in rows if r.method == Method.SPSA.value]
        assert all(r.sim_calls == 5 for r in spsa)
        assert all(r.best_nrmse <= r.initial_nrmse for r in rows)

        path = write_benchmark(rows, tmp_path)
        assert path.name == BENCHMARK_FILE
        assert len(pd.read_csv(path)) == 6
        table = summarize(rows)
        assert sorted(table.index) == sorted(m.value for m in Method)
        assert list(table.columns) == ["initial_nrmse", "best_nrmse", "reduced_share"]

    @staticmethod
    def _desk_rows(seeds: list[int] | None = None) -> tuple[list[BenchmarkRow], list[BenchmarkRow]]:
        config = ExperimentLoader().load_benchmark(DESK_BENCHMARK / "benchmark.yaml")
        update: dict = {"methods": [Method.LINEAR_METAMODEL, Method.SPSA]}
        if seeds is not None:
            update["seeds"] = seeds
        config = config.model_copy(update=update)
        rows = {(r.seed, r.method): r for r in run_benchmark(config)}
        metamodel = [rows[(s, Method.LINEAR_METAMODEL.value)] for s in config.seeds]
        spsa = [rows[(s, Method.SPSA.value)] for s in config.seeds]
        assert all(r.sim_calls == 16 for r in metamodel)
        assert all(r.sim_calls == 31 for r in spsa)
        return metamodel, spsa

    def test_desk_benchmark_first_seeds(self) -> None:
        metamodel, spsa = self._desk_rows(seeds=[0, 1, 2])
        assert all(r.best_nrmse <= 0.6 * r.initial_nrmse for r in metamodel)
        assert all(m.best_objective <= s.best_objective for m, s in zip(metamodel, spsa))

    @pytest.mark.slow
    def test_desk_benchmark_recovery_and_ordering(self) -> None:
        metamodel, spsa = self._desk_rows()
        recovered = sum(r.best_nrmse <= 0.6 * r.initial_nrmse for r in metamodel)
        assert recovered >= 8
        ahead = sum(m.best_objective <= s.best_objective for m, s in zip(metamodel, spsa))
        assert ahead >= 8

    def test_seed_list_validated(self) -> None:
        with pytest.raises(ValidationError):
            BenchmarkConfig(seeds=[])
        with pytest.raises(ValidationError):
            BenchmarkConfig(seeds=[-1])
