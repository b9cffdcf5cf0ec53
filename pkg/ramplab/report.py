"""
Fit and simulation reports: assembly and CSV / markdown rendering.

Both renderings format every number with the same ``.{precision}f`` rule,
so a CSV and a markdown table of one report agree digit for digit.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from typing import Literal

import numpy as np
import pandas as pd

from ramplab.dataset import ColumnKind, Dataset, DesignMatrix, DesignSpec, build_design
from ramplab.estimators import DEFAULT_ESTIMATORS, EstimatorKind, fit
from ramplab.exceptions import RampLabError, TooManyFailures
from ramplab.inference import bootstrap_ape_se, estimate_ape, sandwich
from ramplab.models import ApeRow, CoefficientRow, EstimatorFit, FitReport, SimReport

logger = logging.getLogger(__name__)

Format = Literal["csv", "markdown"]

ESTIMATOR_LABELS = {
    "truth": "Simulated Truth",
    "ols": "OLS/LPM",
    "ramp": "Ramp NLS",
    "probit": "Probit",
    "logit": "Logit",
    "trimmed": "Trimmed OLS",
}

SIM_STATISTICS = {
    "ape1_mean": "APE1 mean",
    "ape1_sd": "APE1 sd",
    "ape1_se_mean": "APE1 mean SE",
    "ape2_mean": "APE2 mean",
    "ape2_sd": "APE2 sd",
    "ape2_se_mean": "APE2 mean SE",
    "unit_interval": "P(0<=yhat<=1)",
}


# ===========
# FIT REPORTS
# ===========


def _fit_one(
    dataset: Dataset,
    spec: DesignSpec,
    design: DesignMatrix,
    kind: EstimatorKind,
    ape_variables: Sequence[str],
    bootstrap_reps: int,
    seed: int,
    n_jobs: int | None,
) -> EstimatorFit:
    result = fit(design, kind)
    parts = None if kind is EstimatorKind.TRIMMED_OLS else sandwich(design, result)
    se = parts.se if parts is not None else [None] * design.n_params

    apes = []
    for variable in ape_variables:
        ape = estimate_ape(design, result, variable, parts, with_se=parts is not None)
        boot_se = None
        if bootstrap_reps:
            try:
                boot_se = bootstrap_ape_se(
                    dataset, spec, kind, variable, bootstrap_reps, seed, n_jobs=n_jobs
                ).se
            except TooManyFailures as exc:
                logger.warning("%s bootstrap for %s abandoned: %s", kind.value, variable, exc)
        apes.append(
            ApeRow(
                variable=variable,
                kind=ape.kind.value,
                estimate=ape.estimate,
                se=ape.se,
                bootstrap_se=boot_se,
                p_hat=ape.p_hat,
            )
        )

    return EstimatorFit(
        estimator=kind,
        converged=result.converged,
        solver_path=result.solver_path.value,
        fallback_reason=result.fallback_reason,
        iterations=result.iterations,
        objective=result.objective,
        coefficients=[
            CoefficientRow(name=name, estimate=float(b), se=None if s is None else float(s))
            for name, b, s in zip(design.names, result.beta, se)
        ],
        apes=apes,
        frac_unit_interval=result.frac_unit_interval,
        mse=float(np.mean(np.square(design.y - result.prob))),
    )


def build_fit_report(
    dataset: Dataset,
    spec: DesignSpec,
    estimators: Sequence[EstimatorKind] = DEFAULT_ESTIMATORS,
    ape_variables: Sequence[str] | None = None,
    bootstrap_reps: int = 0,
    seed: int = 0,
    n_jobs: int | None = None,
) -> FitReport:
    """
    Fit each estimator and collect coefficients, robust SEs, APEs and fit
    statistics. Design errors raise; an estimator that fails is reported
    with its error and the others still run.
    """
    design = build_design(dataset, spec)
    if ape_variables is None:
        ape_variables = [
            col.name
            for col in design.columns
            if col.kind in (ColumnKind.CONTINUOUS, ColumnKind.BINARY)
        ]
    for variable in ape_variables:
        design.index_of(variable)

    fits = []
    for kind in estimators:
        kind = EstimatorKind(kind)
        try:
            fits.append(
                _fit_one(dataset, spec, design, kind, ape_variables, bootstrap_reps, seed, n_jobs)
            )
        except RampLabError as exc:
            logger.warning("%s failed: %s", kind.value, exc)
            fits.append(EstimatorFit(estimator=kind, error=f"{type(exc).__name__}: {exc}"))

    return FitReport(
        outcome=dataset.outcome,
        n_obs=design.n_obs,
        n_dropped=dataset.n_dropped,
        columns=list(design.names),
        fits=fits,
    )


def fit_frame(report: FitReport) -> pd.DataFrame:
    """Long table: estimator, term, statistic, value."""
    rows = []
    for f in report.fits:
        est = f.estimator.value
        for c in f.coefficients:
            rows.append((est, c.name, "coef", c.estimate))
            rows.append((est, c.name, "se", c.se))
        for a in f.apes:
            rows.append((est, f"APE {a.variable}", "estimate", a.estimate))
            rows.append((est, f"APE {a.variable}", "se", a.se))
            if a.bootstrap_se is not None:
                rows.append((est, f"APE {a.variable}", "bootstrap_se", a.bootstrap_se))
        rows.append((est, "fit", "mse", f.mse))
        rows.append((est, "fit", "unit_interval", f.frac_unit_interval))
    return pd.DataFrame(rows, columns=["estimator", "term", "statistic", "value"])


def _summary_table(report: FitReport) -> pd.DataFrame:
    table: dict[str, dict[str, float | str | None]] = {}
    for f in report.fits:
        col: dict[str, float | str | None] = {}
        if f.error is not None:
            col["Error"] = f.error
        for a in f.apes:
            col[f"APE {a.variable}"] = a.estimate
            col[f"APE {a.variable} robust SE"] = a.se
            if a.bootstrap_se is not None:
                col[f"APE {a.variable} bootstrap SE"] = a.bootstrap_se
        col["Mean Squared Error"] = f.mse
        col["P(0<=yhat<=1)"] = f.frac_unit_interval
        table[ESTIMATOR_LABELS[f.estimator.value]] = col
    return pd.DataFrame(table)


def _coefficient_table(report: FitReport) -> pd.DataFrame:
    table = {}
    for f in report.fits:
        label = ESTIMATOR_LABELS[f.estimator.value]
        table[label] = {c.name: c.estimate for c in f.coefficients}
        table[f"{label} SE"] = {c.name: c.se for c in f.coefficients}
    return pd.DataFrame(table, index=report.columns)


# ==================
# SIMULATION REPORTS
# ==================


def simulation_frame(report: SimReport) -> pd.DataFrame:
    """Long table, one row per estimator x statistic, plus the sample shares."""
    rows = []
    for s in report.summaries:
        for key in SIM_STATISTICS:
            value = getattr(s, key)
            if value is not None:
                rows.append((s.estimator, key, value))
    rows.append(("sample", "p_y1", report.p_y1))
    if report.p_band is not None:
        rows.append(("sample", "p_band", report.p_band))
    frame = pd.DataFrame(rows, columns=["estimator", "statistic", "value"])
    frame.insert(0, "table_id", report.table_id)
    return frame


def _simulation_table(report: SimReport) -> pd.DataFrame:
    table = {}
    for s in report.summaries:
        table[ESTIMATOR_LABELS.get(s.estimator, s.estimator)] = {
            label: getattr(s, key) for key, label in SIM_STATISTICS.items()
        }
    frame = pd.DataFrame(table, index=list(SIM_STATISTICS.values()))
    return frame.dropna(how="all")


def _markdown(frame: pd.DataFrame, precision: int) -> str:
    # None instead of NaN so tabulate leaves the cell blank
    cells = frame.astype(object).where(frame.notna(), None)
    return cells.to_markdown(floatfmt=f".{precision}f", missingval="")


def _number(value: float | None, precision: int) -> str:
    return "" if value is None else f"{value:.{precision}f}"


def render_simulation(report: SimReport, fmt: Format = "markdown", precision: int = 4) -> str:
    if fmt == "csv":
        return simulation_frame(report).to_csv(
            index=False, float_format=f"%.{precision}f", na_rep=""
        )

    heading = report.title if report.table_id is None else f"Table {report.table_id}. {report.title}"
    scenario = report.scenario
    lines = [
        heading,
        "",
        _markdown(_simulation_table(report), precision),
        "",
        f"P(y=1) = {_number(report.p_y1, precision)}",
    ]
    if report.p_band is not None:
        lines.append(f"P(-a<=xb<=a) = {_number(report.p_band, precision)}")
    lines.append(f"N = {scenario.n_obs}, replications = {report.reps_completed}, seed = {scenario.seed}")
    failed = [f"{s.estimator}: {s.n_failed}" for s in report.summaries[1:] if s.n_failed]
    if failed:
        lines.append(f"Failed replications: {', '.join(failed)}")
    return "\n".join(lines) + "\n"


def render_fit(report: FitReport, fmt: Format = "markdown", precision: int = 4) -> str:
    if fmt == "csv":
        return fit_frame(report).to_csv(index=False, float_format=f"%.{precision}f", na_rep="")

    lines = [
        f"Outcome: {report.outcome}, N = {report.n_obs}"
        + (f" ({report.n_dropped} incomplete rows dropped)" if report.n_dropped else ""),
        "",
        _markdown(_summary_table(report), precision),
        "",
        "Coefficients (robust SE)",
        "",
        _markdown(_coefficient_table(report), precision),
    ]
    return "\n".join(lines) + "\n"

