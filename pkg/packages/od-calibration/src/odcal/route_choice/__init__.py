"""Multinomial logit route choice and exogenous travel-time providers."""

from odcal.route_choice.logit import RouteProbabilities, logit_vector, route_probabilities
from odcal.route_choice.travel_times import (
    FileProvider,
    FreeFlowProvider,
    Provenance,
    SimulatorProvider,
    TravelTimeProvider,
    TravelTimeTable,
    get_travel_times,
    provider_from_config,
)

__all__ = [
    "FileProvider",
    "FreeFlowProvider",
    "Provenance",
    "RouteProbabilities",
    "SimulatorProvider",
    "TravelTimeProvider",
    "TravelTimeTable",
    "get_travel_times",
    "logit_vector",
    "provider_from_config",
    "route_probabilities",
]
