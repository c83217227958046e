"""Dispatch a calibration method by name."""

from __future__ import annotations

import numpy.typing as npt

from odcal.calibrators.history import CalibrationHistory
from odcal.calibrators.lam import run_lam
from odcal.calibrators.linear_metamodel import run_linear_metamodel
from odcal.calibrators.spsa import run_spsa
from odcal.errors import InvalidInputError
from odcal.models import CalibratorConfig, ChoiceParams, Method
from odcal.network.types import Network
from odcal.route_choice.travel_times import TravelTimeProvider
from odcal.simulator.loader import Simulator


def run_method(
    method: Method,
    network: Network,
    field_counts: npt.ArrayLike,
    prior: npt.ArrayLike,
    config: CalibratorConfig,
    simulator: Simulator,
    choice: ChoiceParams | None = None,
    provider: TravelTimeProvider | None = None,
) -> CalibrationHistory:
    try:
        chosen = Method(method)
    except ValueError as e:
        raise InvalidInputError(f"unknown method {method!r}") from e
    match chosen:
        case Method.LINEAR_METAMODEL:
            return run_linear_metamodel(network, field_counts, prior, config, simulator, choice, provider)
        case Method.SPSA:
            return run_spsa(network, field_counts, prior, config, simulator)
        case Method.LAM:
            return run_lam(network, field_counts, prior, config, simulator)
    raise InvalidInputError(f"unsupported method {chosen.value!r}")


def expected_sim_calls(method: Method, max_iterations: int) -> int:
    """Simulator calls a complete run makes, initial evaluation included."""
    if Method(method) == Method.SPSA:
        return 1 + 2 * max_iterations
    return 1 + max_iterations
