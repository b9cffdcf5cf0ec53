"""
Robust covariances, average partial effects and their standard errors.

Every estimator is an M-estimator, so every covariance is a sandwich
A^-1 Omega A^-1 built from an N x K score matrix and a Hessian analogue.
Scores use the sign of the minimisation gradient: for OLS s_i = -x_i'u_i.

APE standard errors use the delta method on the per-observation influence

    h_i = pe_i - mean(pe) - G A^-1 s_i

with G the sample-mean gradient of pe_i with respect to beta.
"""

from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Callable
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg

from ramplab.config import get_settings, resolve_jobs
from ramplab.dataset import ColumnKind, Dataset, DesignMatrix, DesignSpec, build_design, counterfactual
from ramplab.estimators import (
    RAMP_LINKED,
    EstimatorKind,
    FitResult,
    fit,
    interior,
    link_derivative,
    link_probability,
    link_second_derivative,
    ramp,
)
from ramplab.exceptions import (
    DataError,
    EstimationError,
    NotContinuous,
    ProbabilityClampWarning,
    RampLabError,
    RankDeficient,
    SingularA,
    TooManyFailures,
    VariableInInteraction,
)

logger = logging.getLogger(__name__)


# =========
# SANDWICH
# =========


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """Row i is s_i(beta_hat)'."""

    S: np.ndarray

    @property
    def column_means(self) -> np.ndarray:
        return self.S.mean(axis=0)


@dataclass(frozen=True, eq=False)
class SandwichParts:
    a_n: np.ndarray
    omega_n: np.ndarray
    v_hat: np.ndarray
    n_obs: int
    n_clamped: int = 0

    @property
    def vcov(self) -> np.ndarray:
        """Covariance of beta_hat itself: V_hat / N."""
        return self.v_hat / self.n_obs

    @property
    def se(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.v_hat), 0.0, None) / self.n_obs)


def _assemble(
    a_n: np.ndarray,
    omega_n: np.ndarray,
    n_obs: int,
    singular: type[RampLabError] = SingularA,
    n_clamped: int = 0,
) -> SandwichParts:
    s = linalg.svdvals(a_n)
    if s[0] == 0.0 or s[-1] <= get_settings().rank_tol * s[0]:
        raise singular("Hessian analogue A_N is singular")
    a_inv = linalg.inv(a_n)
    v_hat = a_inv @ omega_n @ a_inv
    return SandwichParts(
        a_n=a_n,
        omega_n=omega_n,
        v_hat=0.5 * (v_hat + v_hat.T),
        n_obs=n_obs,
        n_clamped=n_clamped,
    )


def _outer(X: np.ndarray, weights: np.ndarray, n_obs: int) -> np.ndarray:
    """N^-1 sum w_i x_i'x_i."""
    return (X * weights[:, None]).T @ X / n_obs


def _clamped_probability(prob: np.ndarray) -> tuple[np.ndarray, int]:
    clip = get_settings().prob_clip
    clamped = np.clip(prob, clip, 1.0 - clip)
    n_clamped = int(np.count_nonzero(clamped != prob))
    if n_clamped:
        logger.warning("Clamped %d fitted probabilities to [%g, 1 - %g]", n_clamped, clip, clip)
        warnings.warn(
            f"{n_clamped} fitted probabilities clamped away from 0 and 1",
            ProbabilityClampWarning,
            stacklevel=3,
        )
    return clamped, n_clamped


def _no_analytic_covariance(fit_result: FitResult) -> EstimationError:
    return EstimationError(
        f"{fit_result.kind.value} has no analytic covariance; use the bootstrap"
    )


def score_matrix(design: DesignMatrix, fit_result: FitResult) -> ScoreMatrix:
    X, y = design.X, design.y
    kind = fit_result.kind
    if kind is EstimatorKind.OLS_LPM:
        resid = y - fit_result.index
    elif kind is EstimatorKind.RAMP_NLS:
        resid = (y - ramp(fit_result.index)) * interior(fit_result.index)
    elif kind is EstimatorKind.TRIMMED_OLS:
        raise _no_analytic_covariance(fit_result)
    else:
        prob, _ = _clamped_probability(fit_result.prob)
        g = link_derivative(kind, fit_result.index)
        resid = (y - prob) * g / (prob * (1.0 - prob))
    return ScoreMatrix(S=-X * resid[:, None])


def vcov_ols_robust(design: DesignMatrix, fit_result: FitResult) -> SandwichParts:
    """HC0: A_N = X'X/N, Omega_N = N^-1 sum u_i^2 x_i'x_i."""
    n = design.n_obs
    resid = design.y - fit_result.index
    a_n = design.X.T @ design.X / n
    omega_n = _outer(design.X, np.square(resid), n)
    return _assemble(a_n, omega_n, n, singular=RankDeficient)


def vcov_ramp_sandwich(design: DesignMatrix, fit_result: FitResult) -> SandwichParts:
    """The OLS sandwich restricted to observations with an index in (0, 1)."""
    n = design.n_obs
    mask = interior(fit_result.index)
    if int(mask.sum()) < design.n_params:
        raise SingularA(f"only {int(mask.sum())} observations inside (0, 1)")
    resid = design.y - ramp(fit_result.index)
    a_n = _outer(design.X, mask.astype(float), n)
    omega_n = _outer(design.X, np.square(resid) * mask, n)
    return _assemble(a_n, omega_n, n)


def vcov_qmle_sandwich(design: DesignMatrix, fit_result: FitResult) -> SandwichParts:
    """
    Robust QMLE covariance with the expected Hessian
    A_N = N^-1 sum g_i^2 / (G_i (1 - G_i)) x_i'x_i.
    """
    n = design.n_obs
    prob, n_clamped = _clamped_probability(fit_result.prob)
    g = link_derivative(fit_result.kind, fit_result.index)
    bernoulli_var = prob * (1.0 - prob)
    a_n = _outer(design.X, np.square(g) / bernoulli_var, n)
    weights = np.square((design.y - prob) * g / bernoulli_var)
    omega_n = _outer(design.X, weights, n)
    return _assemble(a_n, omega_n, n, n_clamped=n_clamped)


def sandwich(design: DesignMatrix, fit_result: FitResult) -> SandwichParts:
    kind = fit_result.kind
    if kind is EstimatorKind.OLS_LPM:
        return vcov_ols_robust(design, fit_result)
    if kind is EstimatorKind.RAMP_NLS:
        return vcov_ramp_sandwich(design, fit_result)
    if kind is EstimatorKind.TRIMMED_OLS:
        raise _no_analytic_covariance(fit_result)
    return vcov_qmle_sandwich(design, fit_result)


def attach_vcov(design: DesignMatrix, fit_result: FitResult) -> FitResult:
    """Copy of ``fit_result`` with the robust covariance of beta_hat filled in."""
    return replace(fit_result, vcov=sandwich(design, fit_result).vcov)


# =====
# APEs
# =====


class ApeKind(str, Enum):
    DERIVATIVE = "derivative"
    DISCRETE_DIFF = "discrete_diff"


@dataclass(frozen=True, eq=False)
class ApeEstimate:
    """
    Average partial effect of one regressor.

    ``pe_i`` are the per-observation effects and ``grad_i`` their gradients
    with respect to beta (N x K); ``se`` is None until ``ape_se`` runs.
    """

    variable: str
    kind: ApeKind
    estimate: float
    pe_i: np.ndarray
    grad_i: np.ndarray
    se: float | None = None
    p_hat: float | None = None

    @property
    def gradient(self) -> np.ndarray:
        return self.grad_i.mean(axis=0)


def average_effect(pe: np.ndarray) -> float:
    # constant effects (OLS, all-interior ramp) average to themselves exactly
    if np.ptp(pe) == 0.0:
        return float(pe[0])
    return math.fsum(pe) / pe.shape[0]


def _derivative_ape(
    design: DesignMatrix, fit_result: FitResult, variable: str, k: int, chain: list[int]
) -> ApeEstimate:
    X, beta = design.X, fit_result.beta
    n_params = design.n_params

    # d_i = d(x_i b)/dx_k and its gradient c_i with respect to b
    slope = np.full(design.n_obs, beta[k])
    slope_grad = np.zeros((design.n_obs, n_params))
    slope_grad[:, k] = 1.0
    for j in chain:
        a, b = design.columns[j].parents
        other = X[:, design.index_of(b if a == variable else a)]
        slope = slope + beta[j] * other
        slope_grad[:, j] = other

    g = link_derivative(fit_result.kind, fit_result.index)
    dg = link_second_derivative(fit_result.kind, fit_result.index)
    pe = slope * g
    grad = slope_grad * g[:, None] + (slope * dg)[:, None] * X

    p_hat = None
    if fit_result.kind in RAMP_LINKED:
        p_hat = float(np.mean(interior(fit_result.index)))
    return ApeEstimate(
        variable=variable,
        kind=ApeKind.DERIVATIVE,
        estimate=average_effect(pe),
        pe_i=pe,
        grad_i=grad,
        p_hat=p_hat,
    )


def _continuous_column(design: DesignMatrix, variable: str) -> int:
    k = design.index_of(variable)
    if design.columns[k].kind is not ColumnKind.CONTINUOUS:
        raise NotContinuous(f"'{variable}' is {design.columns[k].kind.value}, not continuous")
    return k


def ape_continuous(design: DesignMatrix, fit_result: FitResult, variable: str) -> ApeEstimate:
    """
    Derivative APE of a continuous regressor that enters no interaction:
    mean of beta_k g(x_i b). For the ramp this is beta_k times the share of
    indices inside (0, 1).
    """
    k = _continuous_column(design, variable)
    if design.interactions_of(variable):
        raise VariableInInteraction(f"'{variable}' enters an interaction; use ape_chain")
    return _derivative_ape(design, fit_result, variable, k, [])


def ape_chain(design: DesignMatrix, fit_result: FitResult, variable: str) -> ApeEstimate:
    """Derivative APE through the chain rule when ``variable`` enters interactions."""
    k = _continuous_column(design, variable)
    return _derivative_ape(design, fit_result, variable, k, design.interactions_of(variable))


def ape_discrete(design: DesignMatrix, fit_result: FitResult, variable: str) -> ApeEstimate:
    """Mean of G(x_i(1) b) - G(x_i(0) b), interactions recomputed at both values."""
    beta, kind = fit_result.beta, fit_result.kind
    X1 = counterfactual(design, variable, 1.0)
    X0 = counterfactual(design, variable, 0.0)
    if kind is EstimatorKind.OLS_LPM:
        pe = (X1 - X0) @ beta
        grad = X1 - X0
    else:
        index1, index0 = X1 @ beta, X0 @ beta
        pe = link_probability(kind, index1) - link_probability(kind, index0)
        grad = (
            link_derivative(kind, index1)[:, None] * X1
            - link_derivative(kind, index0)[:, None] * X0
        )
    return ApeEstimate(
        variable=variable,
        kind=ApeKind.DISCRETE_DIFF,
        estimate=average_effect(pe),
        pe_i=pe,
        grad_i=grad,
    )


def ape_se(
    design: DesignMatrix,
    fit_result: FitResult,
    ape: ApeEstimate,
    parts: SandwichParts,
) -> float:
    """Delta-method standard error: sqrt(var(h_i) / N)."""
    scores = score_matrix(design, fit_result).S
    try:
        direction = linalg.solve(parts.a_n, ape.gradient, assume_a="sym")
    except linalg.LinAlgError as exc:
        raise SingularA("Hessian analogue A_N is singular") from exc
    influence = ape.pe_i - ape.estimate - scores @ direction
    return float(np.sqrt(np.var(influence) / design.n_obs))


def estimate_ape(
    design: DesignMatrix,
    fit_result: FitResult,
    variable: str,
    parts: SandwichParts | None = None,
    with_se: bool = True,
) -> ApeEstimate:
    """APE of ``variable`` by column type: discrete difference, derivative or chain rule."""
    column = design.columns[design.index_of(variable)]
    if column.kind is ColumnKind.BINARY:
        ape = ape_discrete(design, fit_result, variable)
    elif column.kind is ColumnKind.CONTINUOUS:
        ape = ape_chain(design, fit_result, variable)
    else:
        raise DataError(f"'{variable}' is an {column.kind.value} column, not a regressor")

    if not with_se or fit_result.kind is EstimatorKind.TRIMMED_OLS:
        return ape
    parts = sandwich(design, fit_result) if parts is None else parts
    return replace(ape, se=ape_se(design, fit_result, ape, parts))


# ==========
# BOOTSTRAP
# ==========

Sampler = Callable[[np.random.Generator, int], np.ndarray]


def _with_replacement(rng: np.random.Generator, n_obs: int) -> np.ndarray:
    return rng.integers(0, n_obs, size=n_obs)


@dataclass(frozen=True, eq=False)
class BootstrapEstimate:
    se: float
    estimates: np.ndarray
    n_failed: int

    @property
    def reps(self) -> int:
        return int(self.estimates.shape[0]) + self.n_failed


def _bootstrap_replication(
    data: Dataset,
    spec: DesignSpec,
    kind: EstimatorKind,
    variable: str,
    seed: int,
    rep: int,
    sampler: Sampler,
) -> float | None:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(rep,))))
    try:
        design = build_design(data.take(sampler(rng, data.n_obs)), spec)
        result = fit(design, kind)
        return estimate_ape(design, result, variable, with_se=False).estimate
    except RampLabError as exc:
        logger.debug("Bootstrap replication %d failed: %s", rep, exc)
        return None


def bootstrap_ape_se(
    data: Dataset,
    spec: DesignSpec,
    estimator: EstimatorKind | str,
    variable: str,
    reps: int,
    seed: int,
    *,
    sampler: Sampler | None = None,
    n_jobs: int | None = None,
) -> BootstrapEstimate:
    """
    Nonparametric bootstrap SE of an APE: resample rows, refit, re-estimate.

    Replication ``r`` draws from its own Philox stream keyed by (seed, r),
    so the result does not depend on ``n_jobs``.

    Raises:
        TooManyFailures: more than ``bootstrap_failure_rate`` of replications failed
    """
    if reps < 2:
        raise DataError(f"bootstrap needs at least 2 replications, got {reps}")
    settings = get_settings()
    kind = EstimatorKind(estimator)
    sampler = _with_replacement if sampler is None else sampler
    n_jobs = settings.jobs if n_jobs is None else n_jobs

    results = Parallel(n_jobs=resolve_jobs(n_jobs))(
        delayed(_bootstrap_replication)(data, spec, kind, variable, seed, rep, sampler)
        for rep in range(reps)
    )
    estimates = np.array([r for r in results if r is not None], dtype=float)
    n_failed = reps - estimates.shape[0]

    if n_failed > settings.bootstrap_failure_rate * reps or estimates.shape[0] < 2:
        raise TooManyFailures(f"{n_failed} of {reps} bootstrap replications failed")
    if n_failed:
        logger.warning("%d of %d bootstrap replications failed and were dropped", n_failed, reps)
    return BootstrapEstimate(
        se=float(np.std(estimates, ddof=1)),
        estimates=estimates,
        n_failed=n_failed,
    )
