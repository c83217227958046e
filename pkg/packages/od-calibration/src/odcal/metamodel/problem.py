"""Metamodel m(x; β): a scaled analytic count mismatch plus a linear correction.

    m(x; β) = β₀·f_A(x) + β₁ + Σ_z β_{z+2}·x_z + (δ/|Z|)·‖x − x̃‖²
    f_A(x)  = (1/|I|)·‖y − P̃x‖²
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import linalg

from odcal.errors import InvalidInputError
from odcal.network.assignment import AssignmentMatrix
from odcal.network.types import ODVector


@dataclass(frozen=True)
class Beta:
    scale: float
    intercept: float
    linear: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        linear = np.asarray(self.linear, dtype=float)
        object.__setattr__(self, "linear", linear)
        if linear.ndim != 1:
            raise InvalidInputError("beta linear part must be a vector")
        if not (np.isfinite(self.scale) and np.isfinite(self.intercept) and np.all(np.isfinite(linear))):
            raise InvalidInputError("beta must be finite")

    @classmethod
    def default(cls, n_od: int) -> Beta:
        """(1, 0, ..., 0): the metamodel reduces to the analytic term."""
        return cls(scale=1.0, intercept=0.0, linear=np.zeros(n_od))

    @classmethod
    def from_vector(cls, vec: npt.ArrayLike) -> Beta:
        v = np.asarray(vec, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise InvalidInputError(f"beta vector needs at least 2 entries, got shape {v.shape}")
        return cls(scale=float(v[0]), intercept=float(v[1]), linear=v[2:].copy())

    @property
    def size(self) -> int:
        return self.linear.size + 2

    def vector(self) -> npt.NDArray[np.float64]:
        return np.concatenate(([self.scale, self.intercept], self.linear))


@dataclass(frozen=True)
class Observation:
    point: ODVector
    objective_estimate: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        if not np.isfinite(self.objective_estimate) or self.objective_estimate < 0:
            raise InvalidInputError(f"objective estimate must be finite and >= 0, got {self.objective_estimate}")


@dataclass(frozen=True)
class MetamodelProblem:
    """Everything the bound-constrained metamodel solve needs."""

    assignment: AssignmentMatrix
    field_counts: npt.NDArray[np.float64]
    prior: ODVector
    delta: float
    lower: ODVector
    upper: ODVector
    beta: Beta

    def __post_init__(self) -> None:
        n_measured, n_od = self.assignment.shape
        for name in ("field_counts", "prior", "lower", "upper"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.field_counts.shape != (n_measured,):
            raise InvalidInputError(f"field_counts must have length {n_measured}, got {self.field_counts.shape}")
        for name in ("prior", "lower", "upper"):
            if getattr(self, name).shape != (n_od,):
                raise InvalidInputError(f"{name} must have length {n_od}, got {getattr(self, name).shape}")
        if self.delta < 0 or not np.isfinite(self.delta):
            raise InvalidInputError("delta must be finite and >= 0")
        if np.any(self.lower < 0) or np.any(self.lower > self.upper):
            raise InvalidInputError("bounds must satisfy 0 <= lower <= upper")
        if self.beta.linear.size != n_od:
            raise InvalidInputError(f"beta must have {n_od + 2} entries, got {self.beta.size}")

    @property
    def n_od(self) -> int:
        return self.assignment.shape[1]

    @property
    def n_measured(self) -> int:
        return self.assignment.shape[0]

    def with_beta(self, beta: Beta) -> MetamodelProblem:
        return MetamodelProblem(
            assignment=self.assignment,
            field_counts=self.field_counts,
            prior=self.prior,
            delta=self.delta,
            lower=self.lower,
            upper=self.upper,
            beta=beta,
        )

    def project(self, x: npt.ArrayLike) -> ODVector:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def regularizer(self, x: ODVector) -> float:
        diff = x - self.prior
        return self.delta / self.n_od * float(diff @ diff)

    def is_convex(self) -> bool:
        """Whether the Hessian 2β₀/|I|·P̃ᵀP̃ + 2δ/|Z|·I is positive semidefinite."""
        b0 = self.beta.scale
        if b0 >= 0 or self.n_measured == 0:
            return True
        return self.delta / self.n_od >= abs(b0) / self.n_measured * largest_gram_eigenvalue(self.assignment)


def largest_gram_eigenvalue(assignment: AssignmentMatrix) -> float:
    """σ_max(P̃)², from the smaller of the two Gram matrices."""
    dense = assignment.to_dense()
    if dense.size == 0:
        return 0.0
    gram = dense @ dense.T if dense.shape[0] <= dense.shape[1] else dense.T @ dense
    n = gram.shape[0]
    return float(linalg.eigvalsh(gram, subset_by_index=[n - 1, n - 1])[0])


def f_analytic(x: npt.ArrayLike, assignment: AssignmentMatrix, field_counts: npt.ArrayLike) -> float:
    """(1/|I|)·Σ_i (y_i − (P̃x)_i)²."""
    vec = np.asarray(x, dtype=float)
    y = np.asarray(field_counts, dtype=float)
    n_measured, n_od = assignment.shape
    if vec.shape != (n_od,) or y.shape != (n_measured,):
        raise InvalidInputError(f"expected x of length {n_od} and y of length {n_measured}")
    resid = y - assignment.matvec(vec)
    return float(resid @ resid) / n_measured


def metamodel_value(x: npt.ArrayLike, problem: MetamodelProblem) -> float:
    vec = _check_point(x, problem)
    beta = problem.beta
    return (
        beta.scale * f_analytic(vec, problem.assignment, problem.field_counts)
        + beta.intercept
        + float(beta.linear @ vec)
        + problem.regularizer(vec)
    )


def metamodel_gradient(x: npt.ArrayLike, problem: MetamodelProblem) -> npt.NDArray[np.float64]:
    vec = _check_point(x, problem)
    beta = problem.beta
    resid = problem.assignment.matvec(vec) - problem.field_counts
    grad_fa = 2.0 / problem.n_measured * problem.assignment.rmatvec(resid)
    return beta.scale * grad_fa + beta.linear + 2.0 * problem.delta / problem.n_od * (vec - problem.prior)


def _check_point(x: npt.ArrayLike, problem: MetamodelProblem) -> ODVector:
    vec = np.asarray(x, dtype=float)
    if vec.shape != (problem.n_od,):
        raise InvalidInputError(f"x must have length {problem.n_od}, got shape {vec.shape}")
    return vec
