"""Per-run calibration history and its CSV exports."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from odcal.errors import InvalidInputError
from odcal.network.io import write_od_vector
from odcal.network.types import ODVector

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["iteration", "sim_calls", "objective", "nrmse", "is_best"]


@dataclass(frozen=True)
class IterationRecord:
    """One evaluated point. ``iterate`` differs from ``point`` only for SPSA."""

    iteration: int
    sim_calls: int
    objective: float
    nrmse: float
    wall_time_s: float
    point: ODVector
    iterate: ODVector
    # simulated measured counts at ``point``
    counts: ODVector | None = None


@dataclass
class CalibrationHistory:
    method: str
    records: list[IterationRecord] = field(default_factory=list)
    best_iteration: int | None = None

    def record(
        self,
        iteration: int,
        sim_calls: int,
        objective: float,
        nrmse: float,
        wall_time_s: float,
        point: ODVector,
        iterate: ODVector | None = None,
        counts: ODVector | None = None,
    ) -> IterationRecord:
        if self.records and sim_calls < self.records[-1].sim_calls:
            raise InvalidInputError("simulation-call count must not decrease")
        rec = IterationRecord(
            iteration=iteration,
            sim_calls=sim_calls,
            objective=float(objective),
            nrmse=float(nrmse),
            wall_time_s=float(wall_time_s),
            point=np.array(point, dtype=float),
            iterate=np.array(point if iterate is None else iterate, dtype=float),
            counts=None if counts is None else np.array(counts, dtype=float),
        )
        self.records.append(rec)
        # strict: the earliest record keeps a tie
        if self.best_iteration is None or rec.objective < self.best.objective:
            self.best_iteration = len(self.records) - 1
        return rec

    @property
    def best(self) -> IterationRecord:
        if self.best_iteration is None:
            raise InvalidInputError(f"{self.method} history has no records")
        return self.records[self.best_iteration]

    @property
    def best_point(self) -> ODVector:
        return self.best.point

    @property
    def best_objective(self) -> float:
        return self.best.objective

    @property
    def initial(self) -> IterationRecord:
        if not self.records:
            raise InvalidInputError(f"{self.method} history has no records")
        return self.records[0]

    @property
    def sim_calls(self) -> int:
        return self.records[-1].sim_calls if self.records else 0

    @property
    def iterations(self) -> list[IterationRecord]:
        """Records after the initial evaluation."""
        return self.records[1:]

    def best_so_far(self) -> list[float]:
        """Running minimum of the nRMSE of the best-objective point."""
        out: list[float] = []
        best: IterationRecord | None = None
        for rec in self.records:
            if best is None or rec.objective < best.objective:
                best = rec
            out.append(best.nrmse)
        return out

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "iteration": [r.iteration for r in self.records],
                "sim_calls": [r.sim_calls for r in self.records],
                "objective": [r.objective for r in self.records],
                "nrmse": [r.nrmse for r in self.records],
                "is_best": [i == self.best_iteration for i in range(len(self.records))],
            },
            columns=HISTORY_COLUMNS,
        )


def export_history(history: CalibrationHistory, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    history.to_frame().to_csv(path, index=False, float_format="%.6g", lineterminator="\n", encoding="utf-8")
    logger.info("Wrote %s history to %s", history.method, path)
    return path


def export_best_od(history: CalibrationHistory, path: Path) -> Path:
    return write_od_vector(history.best_point, path)
