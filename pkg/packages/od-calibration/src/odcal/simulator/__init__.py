"""Stochastic network loading and the empirical assignment estimate."""

from odcal.simulator.estimate import AssignmentEstimate, estimate_assignment
from odcal.simulator.loader import (
    ConvergedState,
    ExpectedCountSimulator,
    SimulationResult,
    Simulator,
    StochasticSimulator,
    bpr_times,
    converge_route_times,
    dump_replication_counts,
    simulate,
)

__all__ = [
    "AssignmentEstimate",
    "ConvergedState",
    "ExpectedCountSimulator",
    "SimulationResult",
    "Simulator",
    "StochasticSimulator",
    "bpr_times",
    "converge_route_times",
    "dump_replication_counts",
    "estimate_assignment",
    "simulate",
]
