"""Convergence and field-vs-simulated count artifacts (CSV + SVG)."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path
from typing import TYPE_CHECKING

import pandas as pd

from odcal.errors import InvalidInputError
from odcal.reporting.metrics import FitReport
from odcal.reporting.svg import line_chart, scatter_chart

if TYPE_CHECKING:
    from odcal.calibrators.history import CalibrationHistory

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6g"
CONVERGENCE_COLUMNS = ["method", "iteration", "sim_calls", "objective", "nrmse"]
SCATTER_COLUMNS = ["edge_id", "field_count", "simulated_count"]


def _write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    return path


def convergence_frame(histories: Sequence[CalibrationHistory]) -> pd.DataFrame:
    rows = [
        (h.method, r.iteration, r.sim_calls, r.objective, r.nrmse)
        for h in histories
        for r in h.iterations
    ]
    return pd.DataFrame(rows, columns=CONVERGENCE_COLUMNS)


def export_convergence(histories: Sequence[CalibrationHistory], path: Path) -> tuple[Path, Path]:
    """Write the long-format CSV at ``path`` and the best-so-far nRMSE chart beside it.

    The CSV has one row per calibration iteration; the chart series also start
    at the initial evaluation.
    """
    if not histories:
        raise InvalidInputError("export_convergence needs at least one history")
    path = Path(path)
    csv_path = _write_csv(convergence_frame(histories), path)

    series = {
        h.method: [(float(r.sim_calls), best) for r, best in zip(h.records, h.best_so_far())]
        for h in histories
        if h.records
    }
    if not series:
        raise InvalidInputError("export_convergence needs at least one non-empty history")
    chart = line_chart(series, "Best-so-far nRMSE", "simulation calls", "nRMSE (%)")
    svg_path = chart.save(path.with_suffix(".svg"))
    logger.info("Wrote convergence artifacts %s, %s", csv_path, svg_path)
    return csv_path, svg_path


def export_scatter(report: FitReport, path: Path) -> tuple[Path, Path]:
    if len(report) == 0:
        raise InvalidInputError("export_scatter needs a non-empty report")
    path = Path(path)
    frame = pd.DataFrame(
        {
            "edge_id": list(report.edge_ids),
            "field_count": report.field_counts,
            "simulated_count": report.simulated_counts,
        },
        columns=SCATTER_COLUMNS,
    )
    csv_path = _write_csv(frame, path)
    chart = scatter_chart(
        report.field_counts.tolist(),
        report.simulated_counts.tolist(),
        f"{report.label}: nRMSE {report.nrmse:.1f}%",
        "field count (veh/h)",
        "simulated count (veh/h)",
    )
    svg_path = chart.save(path.with_suffix(".svg"))
    logger.info("Wrote scatter artifacts %s, %s", csv_path, svg_path)
    return csv_path, svg_path
