"""Road network topology, route sets, synthetic scenarios and the linear assignment matrix."""

from odcal.network.assignment import AssignmentMatrix, build_assignment_matrix, predict_counts
from odcal.network.generator import generate_synthetic_network, route_overlap
from odcal.network.io import load_network, read_counts, read_od_vector, save_network, write_counts, write_od_vector
from odcal.network.truth import perturb_prior, sample_true_demand
from odcal.network.types import Edge, Network, ODPair, ODVector, Route

__all__ = [
    "AssignmentMatrix",
    "Edge",
    "Network",
    "ODPair",
    "ODVector",
    "Route",
    "build_assignment_matrix",
    "generate_synthetic_network",
    "load_network",
    "perturb_prior",
    "predict_counts",
    "read_counts",
    "read_od_vector",
    "route_overlap",
    "sample_true_demand",
    "save_network",
    "write_counts",
    "write_od_vector",
]
