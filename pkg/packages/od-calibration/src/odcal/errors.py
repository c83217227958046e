"""Exception hierarchy shared by all odcal modules.

The CLI maps these onto its exit-code contract: input/config problems exit 2,
numeric failures exit 3.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from odcal.calibrators.history import CalibrationHistory


class OdcalError(Exception):
    """Base class for every error raised by odcal."""


class InvalidInputError(OdcalError):
    """Raised when an argument violates a documented precondition."""


class NormalizationError(InvalidInputError):
    """Raised when per-OD route probabilities do not sum to one."""


class CoverageError(InvalidInputError):
    """Raised when a travel-time or probability table misses routes."""

    def __init__(self, message: str, missing: list[int] | None = None) -> None:
        self.missing = sorted(missing or [])
        if self.missing:
            shown = ", ".join(str(r) for r in self.missing[:20])
            more = "" if len(self.missing) <= 20 else f" (+{len(self.missing) - 20} more)"
            message = f"{message}: missing route ids [{shown}]{more}"
        super().__init__(message)


class GenerationError(OdcalError):
    """Raised when a synthetic scenario description cannot be realized."""


class NumericError(OdcalError):
    """Raised on non-finite values in a numerical routine."""


class UndefinedMetricError(OdcalError):
    """Raised when a metric is undefined for its inputs (e.g. zero-mean counts)."""


class ExperimentConfigError(OdcalError):
    """Raised when an experiment document is invalid or references missing files."""


class CalibrationAborted(NumericError):
    """Raised when a calibration run stops early; carries the partial history."""

    def __init__(self, message: str, history: CalibrationHistory) -> None:
        super().__init__(message)
        self.history = history
