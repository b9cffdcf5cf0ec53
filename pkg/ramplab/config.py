"""Application configuration."""

from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Paths
BASE_DIR = Path(__file__).resolve().parent.parent
DATA_DIR = BASE_DIR / "data"
RESULTS_FILE = DATA_DIR / "results.json"

# Application settings
APP_NAME = "ramplab"
APP_VERSION = "1.0.0"
APP_DESCRIPTION = """
**ramplab** - binary-response estimation and average partial effects.

## Features
* OLS on the linear probability model, ramp-model NLS, probit and logit QMLE
* Robust sandwich covariances and delta-method APE standard errors
* Seeded Monte Carlo studies of how well each estimator recovers APEs
* JSON-based persistence of simulation runs

Built with FastAPI, Pydantic, NumPy, SciPy and pandas.
"""

# Monte Carlo defaults
DEFAULT_OBSERVATIONS = 1_000
DEFAULT_REPLICATIONS = 1_000
MAX_REPLICATIONS = 100_000


class Settings(BaseSettings):
    """Tunable defaults, overridable through ``RAMPLAB_*`` environment variables."""

    model_config = SettingsConfigDict(env_prefix="RAMPLAB_", extra="ignore")

    seed: int = Field(default=20240601, ge=0, lt=2**64)
    jobs: int | None = Field(default=None, description="Worker processes, None = all cores")
    precision: int = Field(default=4, ge=0, le=17)
    log_level: str = "WARNING"

    results_file: Path = RESULTS_FILE

    # Design checks
    rank_tol: float = 1e-10

    # Ramp NLS
    nls_tol: float = 1e-10
    nls_max_iter: int = 500
    simplex_xatol: float = 1e-8
    simplex_max_iter: int = 20_000
    simplex_restarts: int = 3
    # Local check of a trimmed fixed point: simplex edge and minimal relative gain
    nls_kink_step: float = 1e-2
    nls_kink_gain: float = 1e-9
    nls_kink_rounds: int = 20

    # Probit / logit QMLE
    qmle_tol: float = 1e-10
    qmle_max_iter: int = 100
    separation_index: float = 30.0
    prob_clip: float = 1e-12

    # Tolerated share of failed replications
    mc_failure_rate: float = 0.05
    bootstrap_failure_rate: float = 0.10


@lru_cache
def get_settings() -> Settings:
    """Return the process-wide settings instance."""
    return Settings()


def resolve_jobs(jobs: int | None) -> int:
    """joblib worker count: None means every core."""
    return -1 if jobs is None else jobs
