"""
Pydantic models for scenarios, reports and the HTTP/CLI surfaces.

Array-heavy results (fits, APEs, draws) stay as frozen dataclasses next to
the numerics; everything that crosses a process, file or network boundary
is one of these models.
"""

from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ramplab.config import DEFAULT_OBSERVATIONS, DEFAULT_REPLICATIONS, MAX_REPLICATIONS, APP_VERSION
from ramplab.estimators import DEFAULT_ESTIMATORS, EstimatorKind
from ramplab.exceptions import NonPositiveA


class CovariateDesign(str, Enum):
    SYM_NORMAL = "sym"
    ASYM_LOGNORMAL = "asym"
    UNIFORM_WIDE = "uniwide"


class ErrorLaw(str, Enum):
    UNIFORM = "uniform"
    STD_NORMAL = "normal"


# =========
# SCENARIOS
# =========


class SimScenario(BaseModel):
    """One data-generating process plus the size of the study run on it."""

    design: CovariateDesign = Field(..., description="Covariate design", examples=["sym"])
    error_law: ErrorLaw = Field(..., description="Latent error distribution", examples=["uniform"])
    a: float | None = Field(
        default=0.5,
        description="Half-width of the Uniform(-a, a) error; ignored for normal errors",
        examples=[0.5],
    )
    betas: tuple[float, ...] = Field(
        default=(0.1, 0.2, -0.3),
        description="True (b0, b1, b2[, b3]) on (1, x1, x2[, x1*x2])",
    )
    interaction: bool = False
    n_obs: int = Field(default=DEFAULT_OBSERVATIONS, ge=10, le=10_000_000)
    reps: int = Field(default=DEFAULT_REPLICATIONS, ge=1, le=MAX_REPLICATIONS)
    seed: int = Field(default=20240601, ge=0, lt=2**64)

    @field_validator("a")
    @classmethod
    def a_must_be_positive(cls, v: float | None) -> float | None:
        if v is not None and not v > 0:
            raise NonPositiveA(f"a must be positive, got {v}")
        return v

    @model_validator(mode="after")
    def check_shape(self) -> "SimScenario":
        expected = 4 if self.interaction else 3
        if len(self.betas) != expected:
            raise ValueError(
                f"betas needs {expected} entries {'with' if self.interaction else 'without'} "
                f"an interaction, got {len(self.betas)}"
            )
        if self.error_law is ErrorLaw.UNIFORM and self.a is None:
            raise NonPositiveA("uniform errors need a half-width a")
        return self

    @property
    def true_beta(self) -> np.ndarray:
        return np.asarray(self.betas, dtype=float)

    @property
    def half_width(self) -> float | None:
        return self.a if self.error_law is ErrorLaw.UNIFORM else None

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "examples": [
                {
                    "design": "sym",
                    "error_law": "uniform",
                    "a": 0.5,
                    "betas": [0.1, 0.2, -0.3],
                    "interaction": False,
                    "n_obs": 1000,
                    "reps": 1000,
                    "seed": 42,
                }
            ]
        },
    )


class EstimatorSummary(BaseModel):
    """Across-replication moments for one column of a simulation table."""

    estimator: str
    ape1_mean: float | None = None
    ape1_sd: float | None = None
    ape2_mean: float | None = None
    ape2_sd: float | None = None
    unit_interval: float | None = Field(
        default=None, description="Mean share of fitted values in the unit interval"
    )
    ape1_se_mean: float | None = None
    ape2_se_mean: float | None = None
    n_ok: int = 0
    n_failed: int = 0
    n_fallback: int = 0


class SimReport(BaseModel):
    table_id: int | None = None
    title: str
    scenario: SimScenario
    reps_completed: int
    p_y1: float = Field(..., ge=0, le=1)
    p_band: float | None = Field(default=None, ge=0, le=1)
    summaries: list[EstimatorSummary]

    def summary(self, estimator: str) -> EstimatorSummary:
        for row in self.summaries:
            if row.estimator == estimator:
                return row
        raise KeyError(estimator)


# ===========
# FIT REPORTS
# ===========


class CoefficientRow(BaseModel):
    name: str
    estimate: float
    se: float | None = None


class ApeRow(BaseModel):
    variable: str
    kind: str
    estimate: float
    se: float | None = None
    bootstrap_se: float | None = None
    p_hat: float | None = None


class EstimatorFit(BaseModel):
    """One estimator's column of a fit report; ``error`` is set when it failed."""

    estimator: EstimatorKind
    converged: bool = False
    solver_path: str | None = None
    fallback_reason: str | None = None
    iterations: int = 0
    objective: float | None = None
    coefficients: list[CoefficientRow] = []
    apes: list[ApeRow] = []
    frac_unit_interval: float | None = None
    mse: float | None = None
    error: str | None = None

    def ape(self, variable: str) -> ApeRow:
        for row in self.apes:
            if row.variable == variable:
                return row
        raise KeyError(variable)


class FitReport(BaseModel):
    outcome: str
    n_obs: int
    n_dropped: int = 0
    columns: list[str]
    fits: list[EstimatorFit]

    @property
    def failed(self) -> bool:
        return any(f.error is not None for f in self.fits)

    def fit(self, estimator: EstimatorKind | str) -> EstimatorFit:
        kind = EstimatorKind(estimator)
        for row in self.fits:
            if row.estimator is kind:
                return row
        raise KeyError(kind.value)


# ============
# HTTP SCHEMAS
# ============


class DesignRequest(BaseModel):
    regressors: list[str] = Field(..., min_length=1)
    interactions: list[tuple[str, str]] = []
    full_interactions_with: str | None = None


class FitRequest(BaseModel):
    """Column-oriented data plus the model to fit on it."""

    data: dict[str, list[float | None]] = Field(..., description="Column name -> values")
    outcome: str = Field(..., examples=["y"])
    design: DesignRequest
    estimators: list[EstimatorKind] = Field(default=list(DEFAULT_ESTIMATORS), min_length=1)
    ape_variables: list[str] | None = None
    bootstrap_reps: int = Field(default=0, ge=0, le=5_000)
    seed: int = Field(default=20240601, ge=0, lt=2**64)

    model_config = {
        "json_schema_extra": {
            "examples": [
                {
                    "data": {"y": [0, 1, 1, 0, 1, 0], "x1": [0.1, 0.9, 0.6, 0.2, 0.7, 0.4]},
                    "outcome": "y",
                    "design": {"regressors": ["x1"]},
                    "estimators": ["ols", "ramp"],
                }
            ]
        }
    }


class SimulationRequest(BaseModel):
    """Either a reproducible table id or an explicit scenario."""

    table_id: int | None = Field(default=None, examples=[1])
    scenario: SimScenario | None = None
    seed: int | None = Field(default=None, ge=0, lt=2**64)
    reps: int | None = Field(default=None, ge=1, le=MAX_REPLICATIONS)
    n_obs: int | None = Field(default=None, ge=10)
    with_se: bool = False

    @model_validator(mode="after")
    def exactly_one_source(self) -> "SimulationRequest":
        if (self.table_id is None) == (self.scenario is None):
            raise ValueError("give exactly one of table_id and scenario")
        return self


class SimulationRecord(BaseModel):
    """A persisted simulation run."""

    simulation_id: str
    report: SimReport
    timestamp: datetime


class TableInfo(BaseModel):
    table_id: int
    title: str


class HealthCheckResponse(BaseModel):
    """Health check endpoint response."""

    status: str
    timestamp: datetime
    version: str = APP_VERSION


# ===
# CLI
# ===


class CliConfig(BaseModel):
    """Parsed command line, validated before any work starts."""

    command: Literal["fit", "table", "simulate", "serve"]
    # fit
    data: Path | None = None
    outcome: str | None = None
    regressors: list[str] = []
    interactions: list[tuple[str, str]] = []
    full_interactions_with: str | None = None
    estimators: list[EstimatorKind] = Field(default=list(DEFAULT_ESTIMATORS), min_length=1)
    ape_variables: list[str] | None = None
    bootstrap: int = Field(default=0, ge=0)
    # table / simulate
    table_id: int | None = None
    scenario: SimScenario | None = None
    reps: int | None = Field(default=None, ge=1, le=MAX_REPLICATIONS)
    n_obs: int | None = Field(default=None, ge=10)
    jobs: int | None = None
    with_se: bool = False
    # output
    seed: int = Field(default=20240601, ge=0, lt=2**64)
    format: Literal["csv", "markdown"] = "markdown"
    precision: int = Field(default=4, ge=0, le=17)
    out: Path | None = None
    # serve
    host: str = "127.0.0.1"
    port: int = Field(default=8000, ge=1, le=65535)

    @model_validator(mode="after")
    def required_per_command(self) -> "CliConfig":
        if self.command == "fit":
            if self.data is None or self.outcome is None or not self.regressors:
                raise ValueError("fit needs --data, --y and --x")
            if self.bootstrap == 1:
                raise ValueError("--bootstrap needs at least 2 replications")
        if self.command == "table" and self.table_id is None:
            raise ValueError("table needs an id")
        if self.command == "simulate" and self.scenario is None:
            raise ValueError("simulate needs a scenario")
        return self
