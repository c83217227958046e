"""Fit metrics and CSV/SVG report artifacts."""

from odcal.reporting.export import export_convergence, export_scatter
from odcal.reporting.metrics import FitReport, build_fit_report, nrmse

__all__ = [
    "FitReport",
    "build_fit_report",
    "export_convergence",
    "export_scatter",
    "nrmse",
]
