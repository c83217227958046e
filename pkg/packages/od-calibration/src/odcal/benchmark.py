"""Synthetic recovery benchmark: generate, calibrate with each method, tabulate."""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import pandas as pd

from odcal.calibrators.runner import run_method
from odcal.experiment import generate_scenario
from odcal.models import BenchmarkConfig
from odcal.route_choice.travel_times import provider_from_config
from odcal.simulator.loader import StochasticSimulator

logger = logging.getLogger(__name__)

BENCHMARK_FILE = "benchmark.csv"


@dataclass(frozen=True)
class BenchmarkRow:
    seed: int
    method: str
    initial_nrmse: float
    best_nrmse: float
    best_objective: float
    sim_calls: int
    runtime_s: float


def run_benchmark(config: BenchmarkConfig) -> list[BenchmarkRow]:
    rows: list[BenchmarkRow] = []
    for seed in config.seeds:
        scenario = generate_scenario(config.scenario, seed, config.sim, config.choice)
        network = scenario.network
        simulator = StochasticSimulator(network=network, config=config.sim, params=config.choice)
        calibrator = config.calibrator.model_copy(update={"seed": seed})
        for method in config.methods:
            provider = provider_from_config(config.travel_times, network.prior, config.sim, config.choice)
            started = time.perf_counter()
            history = run_method(
                method, network, scenario.counts, network.prior, calibrator, simulator, config.choice, provider
            )
            row = BenchmarkRow(
                seed=seed,
                method=history.method,
                initial_nrmse=history.initial.nrmse,
                best_nrmse=history.best.nrmse,
                best_objective=history.best_objective,
                sim_calls=history.sim_calls,
                runtime_s=time.perf_counter() - started,
            )
            logger.info(
                "seed=%d %s: nRMSE %.2f%% -> %.2f%% in %d calls (%.1f s)",
                seed, row.method, row.initial_nrmse, row.best_nrmse, row.sim_calls, row.runtime_s,
            )
            rows.append(row)
    return rows


def benchmark_frame(rows: list[BenchmarkRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in rows], columns=[f.name for f in fields(BenchmarkRow)])


def write_benchmark(rows: list[BenchmarkRow], out_dir: Path) -> Path:
    path = Path(out_dir) / BENCHMARK_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    benchmark_frame(rows).to_csv(path, index=False, float_format="%.6g", lineterminator="\n", encoding="utf-8")
    return path


def summarize(rows: list[BenchmarkRow]) -> pd.DataFrame:
    """Per-method mean of the initial and best nRMSE and the share of seeds reaching 60% of the initial."""
    frame = benchmark_frame(rows)
    frame["reduced"] = frame["best_nrmse"] <= 0.6 * frame["initial_nrmse"]
    return frame.groupby("method", sort=True).agg(
        initial_nrmse=("initial_nrmse", "mean"),
        best_nrmse=("best_nrmse", "mean"),
        reduced_share=("reduced", "mean"),
    )
