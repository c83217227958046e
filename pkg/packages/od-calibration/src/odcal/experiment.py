"""Experiment loader: YAML documents to validated configs and ready-to-run inputs."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from odcal.errors import ExperimentConfigError
from odcal.models import BenchmarkConfig, ChoiceParams, ExperimentConfig, ScenarioSpec, SimConfig, SimulationSettings
from odcal.network.generator import generate_synthetic_network
from odcal.network.io import load_network, read_counts, read_od_vector, save_network, write_counts, write_od_vector
from odcal.network.truth import perturb_prior, sample_true_demand
from odcal.network.types import Network, ODVector
from odcal.simulator.loader import StochasticSimulator, simulate

logger = logging.getLogger(__name__)

NETWORK_FILE = "network.json"
TRUE_OD_FILE = "true_od.csv"
COUNTS_FILE = "counts.csv"


def _deep_merge(base: dict, override: dict) -> dict:
    """Merge *override* into *base*; nested dicts merge, everything else is replaced."""
    merged = dict(base)
    for key, value in override.items():
        if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _load_yaml(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ExperimentConfigError(f"{path}: not a valid YAML/JSON document: {e}") from e
    if not isinstance(data, dict):
        raise ExperimentConfigError(f"{path}: top level must be a mapping")
    return data


def _resolve(base: Path, p: Path | None) -> Path | None:
    if p is None or p.is_absolute():
        return p
    return base / p


class ExperimentLoader:
    """Load an experiment document.

    A document may name ``extends: other.yaml``; the named document is loaded
    first and this one is deep-merged over it. Relative paths resolve against
    the directory of the document being loaded.
    """

    def load(self, path: Path) -> ExperimentConfig:
        path = Path(path)
        data = self._read(path, seen=set())
        try:
            config = ExperimentConfig.model_validate(data)
        except ValidationError as e:
            raise ExperimentConfigError(f"{path}: {e}") from e
        config = self._resolve_paths(config, path.parent)
        self._check_files(config)
        logger.debug("Loaded experiment %s (methods=%s)", path, [m.value for m in config.methods])
        return config

    def load_scenario(self, path: Path) -> ScenarioSpec:
        path = Path(path)
        data = self._read(path, seen=set())
        try:
            return ScenarioSpec.model_validate(data.get("scenario", data))
        except ValidationError as e:
            raise ExperimentConfigError(f"{path}: {e}") from e

    def load_benchmark(self, path: Path) -> BenchmarkConfig:
        path = Path(path)
        data = self._read(path, seen=set())
        try:
            return BenchmarkConfig.model_validate(data)
        except ValidationError as e:
            raise ExperimentConfigError(f"{path}: {e}") from e

    def load_simulation(self, path: Path) -> SimulationSettings:
        """Read only the loader and route-choice blocks, e.g. from an experiment document."""
        path = Path(path)
        data = self._read(path, seen=set())
        try:
            return SimulationSettings.model_validate(data)
        except ValidationError as e:
            raise ExperimentConfigError(f"{path}: {e}") from e

    def _read(self, path: Path, seen: set[Path]) -> dict:
        if not path.exists():
            raise ExperimentConfigError(f"config file not found: {path}")
        key = path.resolve()
        if key in seen:
            raise ExperimentConfigError(f"{path}: circular 'extends'")
        seen.add(key)
        data = _load_yaml(path)
        parent = data.pop("extends", None)
        if parent is None:
            return data
        base = self._read(path.parent / str(parent), seen)
        return _deep_merge(base, data)

    @staticmethod
    def _resolve_paths(config: ExperimentConfig, base: Path) -> ExperimentConfig:
        update: dict[str, Any] = {
            "network": _resolve(base, config.network),
            "counts": _resolve(base, config.counts),
            "output_dir": _resolve(base, config.output_dir),
        }
        if config.synthetic_truth is not None:
            update["synthetic_truth"] = config.synthetic_truth.model_copy(
                update={"true_od": _resolve(base, config.synthetic_truth.true_od)}
            )
        if config.travel_times.path is not None:
            update["travel_times"] = config.travel_times.model_copy(
                update={"path": _resolve(base, config.travel_times.path)}
            )
        return config.model_copy(update=update)

    @staticmethod
    def _check_files(config: ExperimentConfig) -> None:
        required = [
            ("network", config.network),
            ("counts", config.counts),
            ("travel_times.path", config.travel_times.path),
        ]
        if config.synthetic_truth is not None:
            required.append(("synthetic_truth.true_od", config.synthetic_truth.true_od))
        for name, p in required:
            if p is not None and not Path(p).exists():
                raise ExperimentConfigError(f"{name} file not found: {p}")


# ── Inputs of a run ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class ExperimentInputs:
    network: Network
    field_counts: ODVector
    prior: ODVector
    truth: ODVector | None = None


def prepare_inputs(config: ExperimentConfig) -> ExperimentInputs:
    """Read the network and either the counts file or the synthetic-truth block."""
    network = load_network(config.network)
    if config.counts is not None:
        return ExperimentInputs(network=network, field_counts=read_counts(config.counts, network), prior=network.prior)

    block = config.synthetic_truth
    assert block is not None
    truth = read_od_vector(block.true_od, network)
    sim = config.sim.model_copy(update={"replications": block.replications, "seed": block.seed})
    counts = simulate(network, truth, sim, config.choice).measured_counts
    prior = perturb_prior(truth, *block.prior_noise, seed=block.seed) if block.prior_noise else network.prior
    logger.info("Synthesized %d counts from %s (%d replications)", counts.size, block.true_od, block.replications)
    return ExperimentInputs(network=network, field_counts=counts, prior=prior, truth=truth)


def build_simulator(network: Network, config: ExperimentConfig) -> StochasticSimulator:
    return StochasticSimulator(network=network, config=config.sim, params=config.choice)


# ── Synthetic scenarios ─────────────────────────────────────────────────────


@dataclass(frozen=True)
class GeneratedScenario:
    network: Network
    truth: ODVector
    counts: ODVector

    def summary(self) -> str:
        n = self.network
        return f"od_pairs={n.n_od}, edges={n.n_edges}, routes={n.n_routes}, measured={n.n_measured}"


def generate_scenario(
    spec: ScenarioSpec, seed: int, sim: SimConfig | None = None, choice: ChoiceParams | None = None
) -> GeneratedScenario:
    """Network, true demand, counts at the truth, and a perturbed prior stored on the network."""
    network = generate_synthetic_network(spec, seed)
    truth = sample_true_demand(network, *spec.true_demand_range, seed=seed)
    network = network.with_prior(perturb_prior(truth, *spec.prior_noise, seed=seed))
    count_sim = (sim or SimConfig()).model_copy(update={"replications": spec.count_replications, "seed": seed})
    counts = simulate(network, truth, count_sim, choice or ChoiceParams()).measured_counts
    return GeneratedScenario(network=network, truth=truth, counts=counts)


def write_scenario(scenario: GeneratedScenario, out_dir: Path) -> dict[str, Path]:
    out_dir = Path(out_dir)
    paths = {
        "network": save_network(scenario.network, out_dir / NETWORK_FILE),
        "true_od": write_od_vector(scenario.truth, out_dir / TRUE_OD_FILE),
        "counts": write_counts(scenario.counts, scenario.network, out_dir / COUNTS_FILE),
    }
    logger.info("Wrote scenario files to %s", out_dir)
    return paths
