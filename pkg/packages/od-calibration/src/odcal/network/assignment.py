"""Linear assignment matrix: expected measured-edge counts as P̃ x."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import sparse

from odcal.errors import CoverageError, InvalidInputError, NormalizationError
from odcal.network.types import Network, ODVector

PROBABILITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class AssignmentMatrix:
    """Sparse |I| x |Z| map from OD demand to expected measured-edge counts.

    Rows follow ``measured_edges``; columns follow ``od_ids`` (ascending).
    Stored row-compressed with sorted column indices and no explicit zeros.
    """

    matrix: sparse.csr_matrix
    measured_edges: tuple[int, ...]
    od_ids: tuple[int, ...]

    def __post_init__(self) -> None:
        expected = (len(self.measured_edges), len(self.od_ids))
        if self.matrix.shape != expected:
            raise InvalidInputError(f"matrix shape {self.matrix.shape} does not match {expected}")

    @classmethod
    def from_sparse(cls, matrix: sparse.spmatrix, network: Network) -> AssignmentMatrix:
        csr = sparse.csr_matrix(matrix, dtype=float)
        csr.eliminate_zeros()
        csr.sort_indices()
        return cls(
            matrix=csr,
            measured_edges=network.measured_edges,
            od_ids=tuple(od.od_id for od in network.od_pairs),
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def matvec(self, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return np.asarray(self.matrix @ x, dtype=float)

    def rmatvec(self, v: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return np.asarray(self.matrix.T @ v, dtype=float)

    def to_dense(self) -> npt.NDArray[np.float64]:
        return self.matrix.toarray()

    def column(self, od_id: int) -> npt.NDArray[np.float64]:
        return self.matrix[:, od_id - 1].toarray().ravel()

    def blend(self, other: AssignmentMatrix, weight: float) -> AssignmentMatrix:
        """Return (1 - weight) * self + weight * other."""
        if other.shape != self.shape:
            raise InvalidInputError(f"cannot blend shapes {self.shape} and {other.shape}")
        mixed = sparse.csr_matrix((1.0 - weight) * self.matrix + weight * other.matrix)
        mixed.eliminate_zeros()
        mixed.sort_indices()
        return AssignmentMatrix(matrix=mixed, measured_edges=self.measured_edges, od_ids=self.od_ids)


def route_probability_vector(network: Network, probabilities: Mapping[int, float]) -> npt.NDArray[np.float64]:
    """Align a route-id keyed probability table to network route order."""
    missing = [rid for rid in network.route_ids if rid not in probabilities]
    if missing:
        raise CoverageError("route probabilities do not cover the network", missing)
    return np.array([float(probabilities[rid]) for rid in network.route_ids], dtype=float)


def check_normalized(network: Network, route_probs: npt.NDArray[np.float64]) -> None:
    if np.any(~np.isfinite(route_probs)) or np.any(route_probs < -PROBABILITY_TOLERANCE):
        raise NormalizationError("route probabilities must be finite and non-negative")
    sums = np.bincount(network.route_od_index, weights=route_probs, minlength=network.n_od)
    off = np.flatnonzero(np.abs(sums - 1.0) > PROBABILITY_TOLERANCE)
    if off.size:
        z = int(off[0])
        raise NormalizationError(
            f"route probabilities of {off.size} OD pair(s) do not sum to 1 (od {z + 1}: sum={sums[z]:.12g})"
        )


def assignment_from_route_weights(network: Network, route_weights: npt.NDArray[np.float64]) -> AssignmentMatrix:
    """Entry (i, z) = sum of route_weights[r] over routes r of OD z that cross measured edge i."""
    weighted = network.measured_incidence.T @ sparse.diags(route_weights) @ network.route_od_indicator
    matrix = sparse.csr_matrix(weighted)
    np.clip(matrix.data, 0.0, 1.0, out=matrix.data)
    return AssignmentMatrix.from_sparse(matrix, network)


def build_assignment_matrix(network: Network, probabilities: Mapping[int, float]) -> AssignmentMatrix:
    """Build P̃ from per-route choice probabilities.

    Raises CoverageError (an InvalidInputError) when a route has no probability
    and NormalizationError when an OD's probabilities are off by more than 1e-9.
    """
    route_probs = route_probability_vector(network, probabilities)
    check_normalized(network, route_probs)
    return assignment_from_route_weights(network, route_probs)


def predict_counts(matrix: AssignmentMatrix, demand: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Expected measured-edge counts λ = P̃ x (vehicles/hour)."""
    x: ODVector = np.asarray(demand, dtype=float)
    if x.shape != (matrix.shape[1],):
        raise InvalidInputError(f"demand must have length {matrix.shape[1]}, got shape {x.shape}")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise InvalidInputError("demand entries must be finite and >= 0")
    return matrix.matvec(x)
