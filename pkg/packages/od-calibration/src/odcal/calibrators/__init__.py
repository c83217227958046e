"""Calibration drivers sharing one evaluation budget: linear metamodel, SPSA and LAM."""

from odcal.calibrators.bounds import resolve_bounds
from odcal.calibrators.history import CalibrationHistory, IterationRecord, export_best_od, export_history
from odcal.calibrators.lam import msa_update, msa_weight, run_lam
from odcal.calibrators.linear_metamodel import exogenous_assignment, run_linear_metamodel
from odcal.calibrators.objective import Evaluation, EvaluationBudget, objective_estimate
from odcal.calibrators.runner import expected_sim_calls, run_method
from odcal.calibrators.spsa import rademacher, run_spsa, spsa_gains

__all__ = [
    "CalibrationHistory",
    "Evaluation",
    "EvaluationBudget",
    "IterationRecord",
    "exogenous_assignment",
    "expected_sim_calls",
    "export_best_od",
    "export_history",
    "msa_update",
    "msa_weight",
    "objective_estimate",
    "rademacher",
    "resolve_bounds",
    "run_lam",
    "run_linear_metamodel",
    "run_method",
    "run_spsa",
    "spsa_gains",
]
