"""
Monte Carlo studies of APE recovery.

A scenario fixes the covariate design, the latent error law and the true
coefficients; each replication draws a fresh sample, computes the APEs at
the true parameters (the simulated truth) and fits every estimator on it.

Replication r draws from Philox(SeedSequence(seed, spawn_key=(r,))), so the
aggregate report depends only on the scenario and never on worker count.
Normal variates come from the inverse CDF of uniforms.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy import special

from ramplab.config import get_settings, resolve_jobs
from ramplab.dataset import DesignMatrix, design_from_arrays
from ramplab.estimators import DEFAULT_ESTIMATORS, EstimatorKind, SolverPath, fit, normal_pdf, ramp_a
from ramplab.exceptions import RampLabError, TooManyFailures, UnknownTable
from ramplab.inference import average_effect, estimate_ape, sandwich
from ramplab.models import CovariateDesign, ErrorLaw, EstimatorSummary, SimReport, SimScenario

logger = logging.getLogger(__name__)

TRUTH = "truth"
CONTINUOUS = "x1"
BINARY = "x2"

_U_LOW = 2.0**-54
_U_HIGH = 1.0 - 2.0**-53


# ======
# DRAWS
# ======


def replication_rng(seed: int, rep_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(rep_index,))))


def standard_normal(rng: np.random.Generator, size: int) -> np.ndarray:
    """N(0, 1) draws by inverting the normal CDF at uniforms kept off {0, 1}."""
    return special.ndtri(np.clip(rng.random(size), _U_LOW, _U_HIGH))


@dataclass(frozen=True, eq=False)
class TruthDraw:
    """One simulated sample together with its APEs at the true coefficients."""

    dataset: DesignMatrix
    true_index: np.ndarray
    true_ape1: float
    true_ape2: float
    p_y1: float
    p_band: float | None


def _true_cdf(scenario: SimScenario, index: np.ndarray) -> np.ndarray:
    if scenario.error_law is ErrorLaw.UNIFORM:
        return ramp_a(index, scenario.a)
    return special.ndtr(index)


def _true_density(scenario: SimScenario, index: np.ndarray) -> np.ndarray:
    if scenario.error_law is ErrorLaw.UNIFORM:
        a = scenario.a
        return ((index >= -a) & (index <= a)) / (2.0 * a)
    return normal_pdf(index)


def gen_draw(scenario: SimScenario, rep_index: int) -> TruthDraw:
    """
    Draw one sample of ``scenario.n_obs`` observations.

    v, e, r are independent standard normals drawn in that order, then the
    Uniform(-10, 10) regressor when the design needs it, then the error u.
    y = 1[b0 + b1 x1 + b2 x2 (+ b3 x1 x2) + u > 0].
    """
    n = scenario.n_obs
    rng = replication_rng(scenario.seed, rep_index)
    v = standard_normal(rng, n)
    e = standard_normal(rng, n)
    r = standard_normal(rng, n)

    if scenario.design is CovariateDesign.SYM_NORMAL:
        x1 = v / np.sqrt(2.0) + e / np.sqrt(2.0)
        x2 = (v / 2.0 + r > 0.0).astype(float)
    elif scenario.design is CovariateDesign.ASYM_LOGNORMAL:
        x1 = np.exp(0.5 + v / 2.0 + e / 2.0)
        x2 = (-0.5 + v / 2.0 + r > 0.0).astype(float)
    else:
        x1 = 20.0 * rng.random(n) - 10.0
        x2 = (v / 2.0 + r > 0.0).astype(float)

    if scenario.error_law is ErrorLaw.UNIFORM:
        u = scenario.a * (2.0 * rng.random(n) - 1.0)
    else:
        u = standard_normal(rng, n)

    beta = scenario.true_beta
    b3 = beta[3] if scenario.interaction else 0.0
    index = beta[0] + beta[1] * x1 + beta[2] * x2 + b3 * x1 * x2
    y = (index + u > 0.0).astype(float)

    # Simulated truth, interaction recomputed at both values of x2
    slope = beta[1] + b3 * x2
    ape1 = average_effect(slope * _true_density(scenario, index))
    index1 = beta[0] + beta[1] * x1 + beta[2] + b3 * x1
    index0 = beta[0] + beta[1] * x1
    ape2 = average_effect(_true_cdf(scenario, index1) - _true_cdf(scenario, index0))

    p_band = None
    if scenario.error_law is ErrorLaw.UNIFORM:
        p_band = float(np.mean((index >= -scenario.a) & (index <= scenario.a)))

    interactions = [(CONTINUOUS, BINARY)] if scenario.interaction else []
    design = design_from_arrays(y, {CONTINUOUS: x1, BINARY: x2}, interactions)
    return TruthDraw(
        dataset=design,
        true_index=index,
        true_ape1=ape1,
        true_ape2=ape2,
        p_y1=float(np.mean(y)),
        p_band=p_band,
    )


# =============
# REPLICATIONS
# =============


class EstimatorDraw(NamedTuple):
    ape1: float
    ape2: float
    unit_interval: float
    ape1_se: float | None
    ape2_se: float | None
    fallback: bool


@dataclass
class ReplicationRecord:
    rep_index: int
    truth_ape1: float
    truth_ape2: float
    p_y1: float
    p_band: float | None
    estimates: dict[str, EstimatorDraw] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)


def run_replication(
    draw: TruthDraw,
    estimators: Sequence[EstimatorKind] = DEFAULT_ESTIMATORS,
    with_se: bool = False,
    rep_index: int = 0,
) -> ReplicationRecord:
    """Fit every estimator on one draw; a failing estimator is recorded, not raised."""
    record = ReplicationRecord(
        rep_index=rep_index,
        truth_ape1=draw.true_ape1,
        truth_ape2=draw.true_ape2,
        p_y1=draw.p_y1,
        p_band=draw.p_band,
    )
    design = draw.dataset
    for kind in estimators:
        try:
            result = fit(design, kind)
            want_se = with_se and kind is not EstimatorKind.TRIMMED_OLS
            parts = sandwich(design, result) if want_se else None
            ape1 = estimate_ape(design, result, CONTINUOUS, parts, with_se=want_se)
            ape2 = estimate_ape(design, result, BINARY, parts, with_se=want_se)
        except RampLabError as exc:
            record.failures[kind.value] = type(exc).__name__
            logger.debug("Replication %d: %s failed: %s", rep_index, kind.value, exc)
            continue
        record.estimates[kind.value] = EstimatorDraw(
            ape1=ape1.estimate,
            ape2=ape2.estimate,
            unit_interval=result.frac_unit_interval,
            ape1_se=ape1.se,
            ape2_se=ape2.se,
            fallback=result.solver_path is SolverPath.FALLBACK_SIMPLEX,
        )
    return record


def _replicate(
    scenario: SimScenario,
    rep_index: int,
    estimators: Sequence[EstimatorKind],
    with_se: bool,
) -> ReplicationRecord | None:
    try:
        draw = gen_draw(scenario, rep_index)
    except RampLabError as exc:
        logger.debug("Replication %d: unusable draw: %s", rep_index, exc)
        return None
    return run_replication(draw, estimators, with_se, rep_index)


# ===========
# AGGREGATION
# ===========


def _mean(values: Sequence[float]) -> float | None:
    if not values:
        return None
    return math.fsum(values) / len(values)


def _sd(values: Sequence[float]) -> float | None:
    """Sample standard deviation; undefined (None) below two values."""
    if len(values) < 2:
        return None
    m = math.fsum(values) / len(values)
    return math.sqrt(math.fsum((x - m) ** 2 for x in values) / (len(values) - 1))


def _summarize(
    name: str, draws: list[EstimatorDraw], n_failed: int
) -> EstimatorSummary:
    ape1 = [d.ape1 for d in draws]
    ape2 = [d.ape2 for d in draws]
    se1 = [d.ape1_se for d in draws if d.ape1_se is not None]
    se2 = [d.ape2_se for d in draws if d.ape2_se is not None]
    return EstimatorSummary(
        estimator=name,
        ape1_mean=_mean(ape1),
        ape1_sd=_sd(ape1),
        ape2_mean=_mean(ape2),
        ape2_sd=_sd(ape2),
        unit_interval=_mean([d.unit_interval for d in draws]),
        ape1_se_mean=_mean(se1),
        ape2_se_mean=_mean(se2),
        n_ok=len(draws),
        n_failed=n_failed,
        n_fallback=sum(d.fallback for d in draws),
    )


def describe(scenario: SimScenario) -> str:
    """Short caption, e.g. 'x1 normal, x2 sym. binary, u ~ U(-0.5, 0.5)'."""
    x1 = {
        CovariateDesign.SYM_NORMAL: "x1 normal, x2 sym. binary",
        CovariateDesign.ASYM_LOGNORMAL: "x1 lognormal, x2 asym. binary",
        CovariateDesign.UNIFORM_WIDE: "x1 ~ U(-10, 10), x2 sym. binary",
    }[scenario.design]
    u = f"u ~ U(-{scenario.a:g}, {scenario.a:g})" if scenario.error_law is ErrorLaw.UNIFORM else "u ~ N(0, 1)"
    prefix = "Interaction" if scenario.interaction else "No interaction"
    return f"{prefix}, {x1}, {u}"


def run_mc(
    scenario: SimScenario,
    estimators: Sequence[EstimatorKind] = DEFAULT_ESTIMATORS,
    *,
    with_se: bool = False,
    n_jobs: int | None = None,
    table_id: int | None = None,
    title: str | None = None,
) -> SimReport:
    """
    Run ``scenario.reps`` replications and aggregate them into a SimReport.

    Truth and P-statistics average over replications with a usable draw;
    each estimator averages over the replications it fitted.

    Raises:
        TooManyFailures: an estimator failed on more than ``mc_failure_rate``
            of replications; ``.report`` still holds the aggregates
    """
    settings = get_settings()
    n_jobs = settings.jobs if n_jobs is None else n_jobs
    logger.info(
        "Running %d replications of N=%d (%s)", scenario.reps, scenario.n_obs, describe(scenario)
    )

    records = Parallel(n_jobs=resolve_jobs(n_jobs))(
        delayed(_replicate)(scenario, rep, tuple(estimators), with_se)
        for rep in range(scenario.reps)
    )
    usable = [rec for rec in records if rec is not None]
    if not usable:
        raise TooManyFailures(f"all {scenario.reps} draws were unusable")

    truth = [
        EstimatorDraw(rec.truth_ape1, rec.truth_ape2, math.nan, None, None, False) for rec in usable
    ]
    truth_summary = _summarize(TRUTH, truth, scenario.reps - len(usable))
    summaries = [truth_summary.model_copy(update={"unit_interval": None})]

    too_many: list[str] = []
    for kind in estimators:
        draws = [rec.estimates[kind.value] for rec in usable if kind.value in rec.estimates]
        n_failed = scenario.reps - len(draws)
        summaries.append(_summarize(kind.value, draws, n_failed))
        if n_failed:
            logger.warning("%s failed on %d of %d replications", kind.value, n_failed, scenario.reps)
        if n_failed > settings.mc_failure_rate * scenario.reps:
            too_many.append(kind.value)

    band = [rec.p_band for rec in usable if rec.p_band is not None]
    report = SimReport(
        table_id=table_id,
        title=title or describe(scenario),
        scenario=scenario,
        reps_completed=len(usable),
        p_y1=_mean([rec.p_y1 for rec in usable]),
        p_band=_mean(band),
        summaries=summaries,
    )
    if too_many:
        raise TooManyFailures(
            f"too many failed replications for {', '.join(too_many)}", report=report
        )
    return report


# ======
# TABLES
# ======

BASE_BETAS = (0.1, 0.2, -0.3)
INTERACTION_BETAS = (0.1, 0.2, -0.3, -0.3)


def _scenario(
    design: CovariateDesign, error_law: ErrorLaw, a: float | None = None, interaction: bool = False
) -> SimScenario:
    return SimScenario(
        design=design,
        error_law=error_law,
        a=a,
        betas=INTERACTION_BETAS if interaction else BASE_BETAS,
        interaction=interaction,
    )


_SYM, _ASYM, _WIDE = CovariateDesign.SYM_NORMAL, CovariateDesign.ASYM_LOGNORMAL, CovariateDesign.UNIFORM_WIDE
_UNIF, _NORM = ErrorLaw.UNIFORM, ErrorLaw.STD_NORMAL

TABLES: dict[int, SimScenario] = {
    1: _scenario(_SYM, _UNIF, 0.5),
    2: _scenario(_SYM, _UNIF, 0.25),
    3: _scenario(_SYM, _UNIF, 1.0),
    4: _scenario(_SYM, _UNIF, 0.5, interaction=True),
    5: _scenario(_SYM, _UNIF, 0.25, interaction=True),
    6: _scenario(_ASYM, _UNIF, 0.25),
    7: _scenario(_ASYM, _UNIF, 1.0),
    8: _scenario(_WIDE, _UNIF, 1.0),
    11: _scenario(_SYM, _NORM),
    12: _scenario(_SYM, _NORM, interaction=True),
    13: _scenario(_ASYM, _NORM),
}


def table_scenario(
    table_id: int,
    seed: int | None = None,
    reps: int | None = None,
    n_obs: int | None = None,
) -> SimScenario:
    if table_id not in TABLES:
        known = ", ".join(str(k) for k in TABLES)
        raise UnknownTable(f"no table {table_id}; known tables: {known}")
    update = {
        key: value
        for key, value in (("seed", seed), ("reps", reps), ("n_obs", n_obs))
        if value is not None
    }
    # model_copy skips validation, so rebuild
    return SimScenario.model_validate({**TABLES[table_id].model_dump(), **update})


def reproduce_table(
    table_id: int,
    seed: int | None = None,
    *,
    reps: int | None = None,
    n_obs: int | None = None,
    estimators: Sequence[EstimatorKind] = DEFAULT_ESTIMATORS,
    with_se: bool = False,
    n_jobs: int | None = None,
) -> SimReport:
    """Run the fixed scenario behind a table id."""
    seed = get_settings().seed if seed is None else seed
    scenario = table_scenario(table_id, seed, reps, n_obs)
    return run_mc(
        scenario,
        estimators,
        with_se=with_se,
        n_jobs=n_jobs,
        table_id=table_id,
        title=describe(scenario),
    )


# ===========================
# SYNTHETIC LOAN APPLICATIONS
# ===========================

LOAN_BINARY = {
    "suffolk": 0.15,
    "married": 0.66,
    "self": 0.13,
    "pubrec": 0.07,
    "cosign": 0.03,
    "sch": 0.77,
    "mortno": 0.33,
    "mortlat1": 0.02,
    "mortlat2": 0.01,
    "chist": 0.84,
}

LOAN_COVARIATES = (
    "loanamt", "suffolk", "appinc", "unit", "married", "dep", "emp", "yjob", "atotinc",
    "self", "other", "rep", "pubrec", "hrat", "obrat", "cosign", "sch", "mortno",
    "mortlat1", "mortlat2", "chist", "loanprc",
)


def simulate_loan_applications(seed: int, n_obs: int = 1989, n_missing: int = 13) -> pd.DataFrame:
    """
    Synthetic mortgage-application data: outcome ``approve``, race dummy
    ``white`` and 22 skewed or binary covariates, with one missing cell in
    each of ``n_missing`` rows.

    Approval follows a ramp-shaped probability in which being white raises
    the approval index by 0.07.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    n = n_obs

    cols: dict[str, np.ndarray] = {"white": (rng.random(n) < 0.85).astype(float)}
    for name, p in LOAN_BINARY.items():
        cols[name] = (rng.random(n) < p).astype(float)

    cols["loanamt"] = np.round(rng.lognormal(4.85, 0.5, n))
    cols["appinc"] = np.round(rng.lognormal(4.2, 0.7, n))
    cols["atotinc"] = np.round(cols["appinc"] * 1000 / 12 * rng.lognormal(-0.2, 0.3, n))
    cols["unit"] = 1.0 + rng.poisson(0.1, n)
    cols["dep"] = rng.poisson(0.77, n).astype(float)
    cols["emp"] = np.round(rng.exponential(0.21, n), 1)
    cols["yjob"] = np.round(rng.exponential(0.45, n), 1)
    cols["other"] = np.where(rng.random(n) < 0.06, np.round(rng.exponential(35.0, n)), 0.0)
    cols["rep"] = 1.0 + rng.poisson(0.5, n)
    cols["hrat"] = np.clip(rng.normal(24.8, 7.1, n), 0.5, None)
    cols["obrat"] = np.clip(rng.normal(32.4, 8.3, n), 0.5, None)
    cols["loanprc"] = np.clip(rng.normal(0.77, 0.19, n), 0.05, 2.5)

    index = (
        0.68
        + 0.07 * cols["white"]
        + 0.22 * cols["chist"]
        - 0.35 * cols["pubrec"]
        - 0.10 * cols["mortlat1"]
        - 0.15 * cols["mortlat2"]
        + 0.06 * cols["cosign"]
        + 0.03 * cols["married"]
        - 0.005 * (cols["obrat"] - 32.4)
        - 0.004 * (cols["hrat"] - 24.8)
        - 0.25 * (cols["loanprc"] - 0.77)
        - 0.03 * cols["self"]
    )
    approve = (rng.random(n) < np.clip(index, 0.0, 1.0)).astype(float)

    frame = pd.DataFrame({"approve": approve, "white": cols["white"]})
    for name in LOAN_COVARIATES:
        frame[name] = cols[name]

    rows = rng.choice(n, size=n_missing, replace=False)
    targets = rng.choice(len(LOAN_COVARIATES), size=n_missing)
    for row, target in zip(rows, targets):
        frame.loc[row, LOAN_COVARIATES[target]] = np.nan
    return frame
