"""Analytic metamodel, β fitting and the bound-constrained solver."""

from odcal.metamodel.fitting import fit_beta
from odcal.metamodel.problem import (
    Beta,
    MetamodelProblem,
    Observation,
    f_analytic,
    metamodel_gradient,
    metamodel_value,
)
from odcal.metamodel.solver import SolveResult, projected_descent, solve_metamodel

__all__ = [
    "Beta",
    "MetamodelProblem",
    "Observation",
    "SolveResult",
    "f_analytic",
    "fit_beta",
    "metamodel_gradient",
    "metamodel_value",
    "projected_descent",
    "solve_metamodel",
]
