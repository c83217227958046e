"""Pydantic v2 models for scenario, simulation, choice and calibration configs."""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, Field, field_validator, model_validator


# ── Scenario generation ─────────────────────────────────────────────────────


class ScenarioSpec(BaseModel):
    """Parameters of a synthetic road network and its route sets."""

    n_nodes: int = Field(default=36, ge=2)
    n_edges: int = Field(default=150, ge=1)
    n_od_pairs: int = Field(default=40, ge=1)
    routes_per_od: int = Field(default=10, ge=1)
    overlap_cap: float = Field(default=0.70, ge=0.0, le=1.0)
    capacity_range: tuple[float, float] = (1800.0, 3600.0)
    free_flow_time_range: tuple[float, float] = (30.0, 180.0)
    measured_fraction: float = Field(default=0.25, gt=0.0, le=1.0)
    prior_demand_range: tuple[float, float] = (50.0, 500.0)
    # k-shortest candidates examined per OD = routes_per_od * candidate_factor
    candidate_factor: int = Field(default=5, ge=1)
    # Ground truth written by `generate`: demand range, prior noise and count replications
    true_demand_range: tuple[float, float] = (50.0, 500.0)
    prior_noise: tuple[float, float] = (0.5, 1.5)
    count_replications: int = Field(default=10, ge=1)

    @field_validator("capacity_range", "free_flow_time_range")
    @classmethod
    def _positive_range(cls, v: tuple[float, float]) -> tuple[float, float]:
        low, high = v
        if not (0 < low <= high):
            raise ValueError(f"range must satisfy 0 < low <= high, got {v}")
        return v

    @field_validator("prior_demand_range", "true_demand_range", "prior_noise")
    @classmethod
    def _nonnegative_range(cls, v: tuple[float, float]) -> tuple[float, float]:
        low, high = v
        if not (0 <= low <= high):
            raise ValueError(f"range must satisfy 0 <= low <= high, got {v}")
        return v


class SyntheticTruth(BaseModel):
    """Ground-truth block: a true OD file and how to derive counts and prior from it."""

    true_od: Path
    replications: int = Field(default=10, ge=1)
    seed: int = Field(default=0, ge=0)
    # Multiplicative U(low, high) noise applied to the truth to build the prior;
    # None keeps the network's own prior.
    prior_noise: tuple[float, float] | None = None


# ── Route choice ────────────────────────────────────────────────────────────


class ChoiceParams(BaseModel):
    """Logit travel-time scalar theta, in 1/seconds."""

    theta: float = -0.1 / 60.0

    model_config = {"frozen": True}

    @field_validator("theta")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("theta must be finite")
        return v

    @classmethod
    def per_minute(cls, theta_per_minute: float) -> ChoiceParams:
        return cls(theta=theta_per_minute / 60.0)


class TravelTimeSource(str, Enum):
    FREE_FLOW = "free-flow"
    FILE = "file"
    SIMULATOR = "simulator"


class TravelTimeConfig(BaseModel):
    source: TravelTimeSource = TravelTimeSource.FREE_FLOW
    path: Path | None = None

    @model_validator(mode="after")
    def _file_needs_path(self) -> TravelTimeConfig:
        if self.source == TravelTimeSource.FILE and self.path is None:
            raise ValueError("travel_times.path is required when source is 'file'")
        return self


# ── Simulator ───────────────────────────────────────────────────────────────


class SimConfig(BaseModel):
    inner_fixed_point_iters: int = Field(default=5, ge=1)
    vdf_alpha: float = Field(default=0.15, ge=0.0)
    vdf_beta: float = Field(default=4.0, ge=0.0)
    replications: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)
    # Replications run on a thread pool when > 1; results merge in replication order.
    workers: int = Field(default=1, ge=1)


# ── Calibrators ─────────────────────────────────────────────────────────────


class Method(str, Enum):
    LINEAR_METAMODEL = "linear-metamodel"
    SPSA = "spsa"
    LAM = "lam"


class SPSAConfig(BaseModel):
    alpha: float = Field(default=0.602, gt=0.0)
    gamma: float = Field(default=0.101, gt=0.0)
    c: float = Field(default=1.9, gt=0.0)
    a: float = Field(default=0.16, gt=0.0)
    A: float = Field(default=0.02, ge=0.0)


class MSAConvention(str, Enum):
    AS_PRINTED = "as_printed"
    SHIFTED = "shifted"


class LAMConfig(BaseModel):
    learning_rate: float = Field(default=0.001, gt=0.0)
    inner_gd_steps: int = Field(default=5000, ge=1)
    tolerance: float = Field(default=1e-6, gt=0.0)
    msa_convention: MSAConvention = MSAConvention.AS_PRINTED


class MetamodelFitConfig(BaseModel):
    ridge: float = Field(default=1e-3, ge=0.0)
    solver_tolerance: float = Field(default=1e-6, gt=0.0)
    solver_max_iterations: int = Field(default=10_000, ge=1)


class Bounds(BaseModel):
    """Box Omega. Explicit per-OD vectors win; otherwise [0, upper_factor * max(prior)]."""

    lower: list[float] | None = None
    upper: list[float] | None = None
    upper_factor: float = Field(default=3.0, gt=0.0)


class CalibratorConfig(BaseModel):
    max_iterations: int = Field(default=15, ge=1)
    delta: float = Field(default=1.0, ge=0.0)
    bounds: Bounds = Field(default_factory=Bounds)
    seed: int = Field(default=0, ge=0)
    spsa: SPSAConfig = Field(default_factory=SPSAConfig)
    lam: LAMConfig = Field(default_factory=LAMConfig)
    metamodel: MetamodelFitConfig = Field(default_factory=MetamodelFitConfig)


# ── Experiment (assembled) ──────────────────────────────────────────────────


class SimulationSettings(BaseModel):
    """The ``sim`` and ``choice`` blocks of any document; other keys are ignored."""

    sim: SimConfig = Field(default_factory=SimConfig)
    choice: ChoiceParams = Field(default_factory=ChoiceParams)


class ExperimentConfig(BaseModel):
    network: Path
    counts: Path | None = None
    synthetic_truth: SyntheticTruth | None = None
    methods: list[Method] = Field(default_factory=lambda: [Method.LINEAR_METAMODEL])
    calibrator: CalibratorConfig = Field(default_factory=CalibratorConfig)
    sim: SimConfig = Field(default_factory=SimConfig)
    choice: ChoiceParams = Field(default_factory=ChoiceParams)
    travel_times: TravelTimeConfig = Field(default_factory=TravelTimeConfig)
    output_dir: Path = Path("runs")
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _one_count_source(self) -> ExperimentConfig:
        if (self.counts is None) == (self.synthetic_truth is None):
            raise ValueError("exactly one of 'counts' or 'synthetic_truth' must be given")
        return self


class BenchmarkConfig(BaseModel):
    """Repeated synthetic recovery runs over a list of seeds."""

    scenario: ScenarioSpec = Field(default_factory=ScenarioSpec)
    seeds: list[int] = Field(default_factory=lambda: list(range(10)), min_length=1)
    methods: list[Method] = Field(default_factory=lambda: list(Method))
    calibrator: CalibratorConfig = Field(default_factory=CalibratorConfig)
    sim: SimConfig = Field(default_factory=SimConfig)
    choice: ChoiceParams = Field(default_factory=ChoiceParams)
    travel_times: TravelTimeConfig = Field(default_factory=TravelTimeConfig)

    @field_validator("seeds")
    @classmethod
    def _nonnegative_seeds(cls, v: list[int]) -> list[int]:
        if any(s < 0 for s in v):
            raise ValueError("seeds must be >= 0")
        return v
