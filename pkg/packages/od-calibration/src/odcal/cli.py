"""odcal command line: generate, calibrate, evaluate, benchmark.

Exit codes: 0 success, 2 input or configuration error, 3 numeric failure. A calibration
method that aborts keeps its partial outputs and the remaining methods still run.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from odcal.benchmark import run_benchmark, summarize, write_benchmark
from odcal.calibrators.history import CalibrationHistory, export_best_od, export_history
from odcal.calibrators.runner import run_method
from odcal.errors import CalibrationAborted, NumericError, OdcalError
from odcal.experiment import (
    ExperimentInputs,
    ExperimentLoader,
    build_simulator,
    generate_scenario,
    prepare_inputs,
    write_scenario,
)
from odcal.models import BenchmarkConfig, ExperimentConfig, Method, SimConfig, SimulationSettings
from odcal.network.io import load_network, read_counts, read_od_vector
from odcal.reporting.export import export_convergence, export_scatter
from odcal.reporting.metrics import build_fit_report
from odcal.route_choice.travel_times import provider_from_config
from odcal.settings import OdcalSettings
from odcal.simulator.loader import simulate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

METHOD_CHOICES = [m.value for m in Method] + ["all"]


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be >= 0")
    return value


def _methods(choice: str | None, default: list[Method]) -> list[Method]:
    if choice is None:
        return default
    if choice == "all":
        return list(Method)
    return [Method(choice)]


# ── generate ────────────────────────────────────────────────────────────────


def cmd_generate(args: argparse.Namespace, settings: OdcalSettings) -> int:
    spec = ExperimentLoader().load_scenario(Path(args.config))
    sim = SimConfig(workers=settings.sim_workers)
    scenario = generate_scenario(spec, args.seed, sim=sim)
    out = Path(args.out or settings.default_output_dir)
    paths = write_scenario(scenario, out)
    for name, path in paths.items():
        logger.info("%s: %s", name, path)
    print(scenario.summary())
    return EXIT_OK


# ── calibrate ───────────────────────────────────────────────────────────────


def _apply_overrides(config: ExperimentConfig, args: argparse.Namespace, settings: OdcalSettings) -> ExperimentConfig:
    data = config.model_dump()
    data["methods"] = _methods(args.method, config.methods)
    if args.replications is not None:
        data["sim"]["replications"] = args.replications
    if config.sim.workers == 1 and settings.sim_workers > 1:
        data["sim"]["workers"] = settings.sim_workers
    if args.iterations is not None:
        data["calibrator"]["max_iterations"] = args.iterations
    if args.seed is not None:
        data["seed"] = args.seed
    return ExperimentConfig.model_validate(data)


def write_calibration_outputs(
    histories: list[CalibrationHistory], inputs: ExperimentInputs, out: Path
) -> list[Path]:
    written: list[Path] = []
    edge_ids = inputs.network.measured_edges
    for history in histories:
        if not history.records:
            continue
        written.append(export_history(history, out / f"history_{history.method}.csv"))
        written.append(export_best_od(history, out / f"best_od_{history.method}.csv"))
        best = history.best
        if best.counts is not None:
            report = build_fit_report(
                history.method, edge_ids, inputs.field_counts, best.counts, best.point, inputs.prior
            )
            written.extend(export_scatter(report, out / f"scatter_{history.method}.csv"))

    recorded = [h for h in histories if h.records]
    if recorded:
        initial = recorded[0].initial
        if initial.counts is not None:
            report = build_fit_report(
                "initial", edge_ids, inputs.field_counts, initial.counts, initial.point, inputs.prior
            )
            written.extend(export_scatter(report, out / "scatter_initial.csv"))
        written.extend(export_convergence(recorded, out / "convergence.csv"))
    return written


def cmd_calibrate(args: argparse.Namespace, settings: OdcalSettings) -> int:
    config = _apply_overrides(ExperimentLoader().load(Path(args.config)), args, settings)
    out = Path(args.out) if args.out else config.output_dir
    inputs = prepare_inputs(config)
    simulator = build_simulator(inputs.network, config)
    calibrator = config.calibrator.model_copy(update={"seed": config.seed})

    histories: list[CalibrationHistory] = []
    aborted: list[CalibrationAborted] = []
    for method in config.methods:
        provider = None
        if method == Method.LINEAR_METAMODEL:
            provider = provider_from_config(config.travel_times, inputs.prior, config.sim, config.choice)
        try:
            history = run_method(
                method, inputs.network, inputs.field_counts, inputs.prior, calibrator, simulator, config.choice,
                provider,
            )
        except CalibrationAborted as e:
            logger.error("%s aborted: %s", method.value, e)
            aborted.append(e)
            histories.append(e.history)
            continue
        histories.append(history)

    write_calibration_outputs(histories, inputs, out)
    logger.info("Artifacts written to %s", out)

    recorded = [h for h in histories if h.records]
    if recorded:
        print(f"initial nRMSE={recorded[0].initial.nrmse:.2f}%")
    for h in recorded:
        print(f"{h.method}: best nRMSE={h.best.nrmse:.2f}% objective={h.best_objective:.6g} sim_calls={h.sim_calls}")

    for e in aborted:
        print(f"error: {e}", file=sys.stderr)
    if aborted:
        return EXIT_NUMERIC
    return EXIT_OK


# ── evaluate ────────────────────────────────────────────────────────────────


def cmd_evaluate(args: argparse.Namespace, settings: OdcalSettings) -> int:
    network = load_network(Path(args.network))
    demand = read_od_vector(Path(args.od), network)
    counts = read_counts(Path(args.counts), network)
    base = ExperimentLoader().load_simulation(Path(args.config)) if args.config else SimulationSettings()
    data = base.sim.model_dump()
    if args.replications is not None:
        data["replications"] = args.replications
    if args.seed is not None:
        data["seed"] = args.seed
    if base.sim.workers == 1 and settings.sim_workers > 1:
        data["workers"] = settings.sim_workers
    sim = SimConfig.model_validate(data)
    result = simulate(network, demand, sim, base.choice)
    report = build_fit_report(
        "evaluate", network.measured_edges, counts, result.measured_counts, demand, network.prior
    )
    out = Path(args.out or settings.default_output_dir)
    export_scatter(report, out / "scatter_evaluate.csv")
    print(f"nRMSE={report.nrmse:.2f}%")
    return EXIT_OK


# ── benchmark ───────────────────────────────────────────────────────────────


def cmd_benchmark(args: argparse.Namespace, settings: OdcalSettings) -> int:
    config = ExperimentLoader().load_benchmark(Path(args.config))
    data = config.model_dump()
    data["methods"] = _methods(args.method, config.methods)
    if args.seed is not None:
        data["seeds"] = [args.seed]
    if args.iterations is not None:
        data["calibrator"]["max_iterations"] = args.iterations
    if args.replications is not None:
        data["sim"]["replications"] = args.replications
    config = BenchmarkConfig.model_validate(data)

    rows = run_benchmark(config)
    path = write_benchmark(rows, Path(args.out or settings.default_output_dir))
    print(summarize(rows).to_string(float_format=lambda v: f"{v:.3f}"))
    logger.info("Benchmark table written to %s", path)
    return EXIT_OK


# ── entry point ─────────────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="odcal", description="Simulation-based OD demand calibration.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a synthetic network, true OD and counts")
    gen.add_argument("--config", required=True, help="scenario YAML/JSON document")
    gen.add_argument("--seed", type=_seed, default=0)
    gen.add_argument("--out", help="output directory")
    gen.set_defaults(handler=cmd_generate)

    cal = sub.add_parser("calibrate", help="run calibration method(s) from an experiment document")
    cal.add_argument("--config", required=True, help="experiment YAML/JSON document")
    cal.add_argument("--method", choices=METHOD_CHOICES)
    cal.add_argument("--iterations", type=int)
    cal.add_argument("--seed", type=_seed)
    cal.add_argument("--replications", type=int)
    cal.add_argument("--out", help="output directory (default: the document's output_dir)")
    cal.set_defaults(handler=cmd_calibrate)

    ev = sub.add_parser("evaluate", help="simulate an OD vector and compare with counts")
    ev.add_argument("--network", required=True)
    ev.add_argument("--od", required=True, help="CSV od_id,demand")
    ev.add_argument("--counts", required=True, help="CSV edge_id,count")
    ev.add_argument("--config", help="document with sim/choice blocks (default: built-in defaults)")
    ev.add_argument("--seed", type=_seed)
    ev.add_argument("--replications", type=int)
    ev.add_argument("--out", help="output directory")
    ev.set_defaults(handler=cmd_evaluate)

    bench = sub.add_parser("benchmark", help="synthetic recovery benchmark over several seeds")
    bench.add_argument("--config", required=True, help="benchmark YAML/JSON document")
    bench.add_argument("--method", choices=METHOD_CHOICES)
    bench.add_argument("--iterations", type=int)
    bench.add_argument("--seed", type=_seed, help="run a single seed instead of the document's list")
    bench.add_argument("--replications", type=int)
    bench.add_argument("--out", help="output directory")
    bench.set_defaults(handler=cmd_benchmark)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    settings = OdcalSettings()
    logging.basicConfig(level=settings.log_level.upper(), format=settings.log_format)
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args, settings)
    except NumericError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OdcalError, OSError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
