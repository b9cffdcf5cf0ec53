"""
Binary-response estimators.

Four ways to fit P(y=1|x) on a DesignMatrix:
- OLS on the linear probability model (closed form, QR)
- NLS on the ramp model R(xb) = min(max(xb, 0), 1), by iterative trimmed
  OLS with a Nelder-Mead fallback
- Probit and logit quasi-MLE, Newton-Raphson with step-halving

Plus single-round trimmed OLS, the one-shot version of the ramp iteration.

Every fit is a pure function of its inputs.
"""

from __future__ import annotations

import logging
import warnings
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy import linalg, optimize, special

from ramplab.config import get_settings
from ramplab.dataset import DesignMatrix
from ramplab.exceptions import (
    ConvergenceWarning,
    DidNotConverge,
    DimensionMismatch,
    EmptyTrimSet,
    NonPositiveA,
    PerfectSeparation,
    RankDeficient,
    RankDeficientTrimSet,
)

logger = logging.getLogger(__name__)

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


class EstimatorKind(str, Enum):
    OLS_LPM = "ols"
    RAMP_NLS = "ramp"
    PROBIT = "probit"
    LOGIT = "logit"
    TRIMMED_OLS = "trimmed"


DEFAULT_ESTIMATORS = (
    EstimatorKind.OLS_LPM,
    EstimatorKind.RAMP_NLS,
    EstimatorKind.PROBIT,
    EstimatorKind.LOGIT,
)

RAMP_LINKED = (EstimatorKind.RAMP_NLS, EstimatorKind.TRIMMED_OLS)


class SolverPath(str, Enum):
    CLOSED_FORM = "closed_form"
    NEWTON_TRIM = "newton_trim"
    FALLBACK_SIMPLEX = "fallback_simplex"
    NEWTON_RAPHSON = "newton_raphson"


@dataclass(frozen=True, eq=False)
class FitResult:
    """
    Outcome of one estimator on one design.

    ``objective`` is the sum of squared residuals for OLS and ramp NLS and the
    log-likelihood for probit/logit. ``vcov`` is left empty by the estimators
    and filled by ``ramplab.inference.attach_vcov``.
    """

    kind: EstimatorKind
    beta: np.ndarray
    index: np.ndarray
    prob: np.ndarray
    objective: float
    iterations: int
    converged: bool
    solver_path: SolverPath
    frac_unit_interval: float
    names: tuple[str, ...] = ()
    vcov: np.ndarray | None = None
    fallback_reason: str | None = None
    score_norm: float | None = None

    @property
    def se(self) -> np.ndarray | None:
        if self.vcov is None:
            return None
        return np.sqrt(np.clip(np.diag(self.vcov), 0.0, None))

    def coefficients(self) -> dict[str, float]:
        return {name: float(b) for name, b in zip(self.names, self.beta)}


class Prediction(NamedTuple):
    index: np.ndarray
    prob: np.ndarray


# ======
# LINKS
# ======


def ramp(z: float | np.ndarray) -> float | np.ndarray:
    """0 for z <= 0, z on (0, 1), 1 for z >= 1."""
    return np.clip(z, 0.0, 1.0)


def ramp_a(z: float | np.ndarray, a: float) -> float | np.ndarray:
    """
    CDF of Uniform(-a, a): 0 below -a, (z + a) / 2a on [-a, a], 1 above a.

    ``ramp_a(z, 0.5)`` equals ``ramp(z + 0.5)``.
    """
    if not a > 0:
        raise NonPositiveA(f"a must be positive, got {a}")
    return np.clip((np.asarray(z, dtype=float) + a) / (2.0 * a), 0.0, 1.0)


def interior(index: np.ndarray) -> np.ndarray:
    """Observations whose index lies strictly inside (0, 1)."""
    return (index > 0.0) & (index < 1.0)


def normal_pdf(z: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * np.square(z) - _LOG_SQRT_2PI)


def logistic_pdf(z: np.ndarray) -> np.ndarray:
    return special.expit(z) * special.expit(-z)


def link_probability(kind: EstimatorKind, index: np.ndarray) -> np.ndarray:
    """Fitted response probability G(index); OLS is left unclamped."""
    if kind is EstimatorKind.OLS_LPM:
        return np.array(index, dtype=float)
    if kind in RAMP_LINKED:
        return ramp(index)
    if kind is EstimatorKind.PROBIT:
        return special.ndtr(index)
    return special.expit(index)


def link_derivative(kind: EstimatorKind, index: np.ndarray) -> np.ndarray:
    """a.e. derivative g = G' (the ramp's kinks get 0)."""
    if kind is EstimatorKind.OLS_LPM:
        return np.ones_like(index, dtype=float)
    if kind in RAMP_LINKED:
        return interior(index).astype(float)
    if kind is EstimatorKind.PROBIT:
        return normal_pdf(index)
    return logistic_pdf(index)


def link_second_derivative(kind: EstimatorKind, index: np.ndarray) -> np.ndarray:
    """a.e. derivative of g; zero for the piecewise-linear links."""
    if kind is EstimatorKind.PROBIT:
        return -index * normal_pdf(index)
    if kind is EstimatorKind.LOGIT:
        p = special.expit(index)
        return p * (1.0 - p) * (1.0 - 2.0 * p)
    return np.zeros_like(index, dtype=float)


# ==============
# LEAST SQUARES
# ==============


def _qr_solve(X: np.ndarray, y: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Least squares through an economic QR; refuses numerically singular X."""
    tol = get_settings().rank_tol if tol is None else tol
    q, r = linalg.qr(X, mode="economic")
    s = linalg.svdvals(r)
    if s[0] == 0.0 or s[-1] <= tol * s[0]:
        raise RankDeficient(f"regressor matrix is singular (sigma ratio {s[-1] / max(s[0], 1e-300):.3g})")
    return linalg.solve_triangular(r, q.T @ y)


def _unit_share(index: np.ndarray) -> float:
    return float(np.mean((index >= 0.0) & (index <= 1.0)))


def fit_ols(design: DesignMatrix) -> FitResult:
    """OLS of y on X: the linear projection / LPM estimate."""
    beta = _qr_solve(design.X, design.y)
    index = design.X @ beta
    resid = design.y - index
    return FitResult(
        kind=EstimatorKind.OLS_LPM,
        beta=beta,
        index=index,
        prob=index.copy(),
        objective=float(resid @ resid),
        iterations=0,
        converged=True,
        solver_path=SolverPath.CLOSED_FORM,
        frac_unit_interval=_unit_share(index),
        names=design.names,
    )


# =========
# RAMP NLS
# =========


def nls_objective(design: DesignMatrix, beta: np.ndarray) -> float:
    """
    Q_N(b) = N^-1 sum (y_i - R(x_i b))^2, summed region by region:
    y^2 where x_i b <= 0, (y - x_i b)^2 on (0, 1), (y - 1)^2 where x_i b >= 1.
    """
    index = design.X @ np.asarray(beta, dtype=float)
    y = design.y
    low = index <= 0.0
    high = index >= 1.0
    mid = ~(low | high)
    total = (
        np.sum(np.square(y[low]))
        + np.sum(np.square(y[mid] - index[mid]))
        + np.sum(np.square(y[high] - 1.0))
    )
    return float(total / design.n_obs)


def nls_gradient(design: DesignMatrix, beta: np.ndarray) -> np.ndarray:
    """a.e. gradient of Q_N: -2 N^-1 sum x_i'(y_i - x_i b) 1{x_i b in (0, 1)}."""
    index = design.X @ np.asarray(beta, dtype=float)
    mask = interior(index)
    resid = design.y[mask] - index[mask]
    return -2.0 * (design.X[mask].T @ resid) / design.n_obs


def _trimmed_ols(design: DesignMatrix, mask: np.ndarray) -> np.ndarray:
    n_active = int(mask.sum())
    if n_active == 0:
        raise EmptyTrimSet("no observation has an index inside the trimming window")
    if n_active == design.n_obs:
        return _qr_solve(design.X, design.y)
    if n_active < design.n_params:
        raise RankDeficientTrimSet(
            f"{n_active} observations left for {design.n_params} coefficients"
        )
    try:
        return _qr_solve(design.X[mask], design.y[mask])
    except RankDeficient as exc:
        raise RankDeficientTrimSet(f"trimmed design is singular ({n_active} rows)") from exc


def ito_step(design: DesignMatrix, beta: np.ndarray) -> np.ndarray:
    """One Newton-Raphson step on Q_N: OLS on the rows with x_i b in (0, 1)."""
    return _trimmed_ols(design, interior(design.X @ np.asarray(beta, dtype=float)))


def _ramp_result(
    design: DesignMatrix,
    beta: np.ndarray,
    *,
    kind: EstimatorKind = EstimatorKind.RAMP_NLS,
    iterations: int,
    converged: bool,
    solver_path: SolverPath,
    fallback_reason: str | None = None,
) -> FitResult:
    index = design.X @ beta
    return FitResult(
        kind=kind,
        beta=beta,
        index=index,
        prob=ramp(index),
        objective=design.n_obs * nls_objective(design, beta),
        iterations=iterations,
        converged=converged,
        solver_path=solver_path,
        frac_unit_interval=float(np.mean(interior(index))),
        names=design.names,
        fallback_reason=fallback_reason,
    )


class SimplexResult(NamedTuple):
    beta: np.ndarray
    objective: float
    converged: bool
    iterations: int


def minimize_nls_simplex(
    design: DesignMatrix,
    start: np.ndarray,
    xatol: float | None = None,
    max_iter: int | None = None,
    initial_step: float | None = None,
    restarts: int = 0,
) -> SimplexResult:
    """
    Nelder-Mead on Q_N, stopping once the simplex diameter is below ``xatol``.

    Q_N is piecewise quadratic with kinks, so no gradient is used. With
    ``initial_step`` the first simplex is ``start`` plus that step along each
    axis; otherwise scipy's default 5% simplex. Each restart begins a fresh
    simplex at the previous solution and stops as soon as one gains nothing.
    """
    settings = get_settings()
    xatol = settings.simplex_xatol if xatol is None else xatol
    max_iter = settings.simplex_max_iter if max_iter is None else max_iter

    beta = np.asarray(start, dtype=float)
    objective = nls_objective(design, beta)
    converged = False
    iterations = 0
    for attempt in range(restarts + 1):
        options = {
            "xatol": xatol,
            "fatol": np.inf,
            "maxiter": max_iter,
            "maxfev": 2 * max_iter,
            "adaptive": design.n_params > 3,
        }
        if initial_step is not None:
            options["initial_simplex"] = np.vstack([beta, beta + initial_step * np.eye(design.n_params)])
        res = optimize.minimize(
            lambda b: nls_objective(design, b), beta, method="Nelder-Mead", options=options
        )
        iterations += int(res.nit)
        gain = objective - float(res.fun)
        beta, objective, converged = np.asarray(res.x, dtype=float), float(res.fun), bool(res.success)
        if not converged or (attempt > 0 and gain <= 0.0):
            break

    return SimplexResult(beta=beta, objective=objective, converged=converged, iterations=iterations)


class _TrimmedRun(NamedTuple):
    beta: np.ndarray
    iterations: int
    reason: str | None  # None at a fixed point


def _iterate_trimmed(design: DesignMatrix, beta: np.ndarray, tol: float, max_iter: int) -> _TrimmedRun:
    mask = interior(design.X @ beta)
    seen = {np.packbits(mask).tobytes()}
    iterations = 0

    for iterations in range(1, max_iter + 1):
        try:
            new_beta = _trimmed_ols(design, mask)
        except EmptyTrimSet:
            return _TrimmedRun(beta, iterations, "empty_trim_set")
        except RankDeficientTrimSet:
            return _TrimmedRun(beta, iterations, "rank_deficient_trim_set")

        new_mask = interior(design.X @ new_beta)
        step = float(np.max(np.abs(new_beta - beta)))
        beta = new_beta

        if np.array_equal(new_mask, mask):
            if step < tol:
                return _TrimmedRun(beta, iterations, None)
        else:
            key = np.packbits(new_mask).tobytes()
            if key in seen:
                return _TrimmedRun(beta, iterations, "cycle")
            seen.add(key)
        mask = new_mask

    return _TrimmedRun(beta, iterations, "max_iter")


class _Descent(NamedTuple):
    beta: np.ndarray
    iterations: int
    on_kink: bool
    converged: bool


def _leave_kinks(design: DesignMatrix, run: _TrimmedRun, tol: float, max_iter: int) -> _Descent:
    """
    Check a trimmed fixed point with a small Nelder-Mead simplex.

    Q_N has concave kinks where an index crosses 0 with y = 1 or 1 with y = 0,
    and the a.e. gradient vanishes at a fixed point sitting on one. A lower
    point found nearby restarts the trimmed iteration. ``on_kink`` marks a
    result that is the simplex point because the restart did not get below it.
    """
    settings = get_settings()
    beta = run.beta
    iterations = run.iterations

    for _ in range(settings.nls_kink_rounds):
        objective = nls_objective(design, beta)
        local = minimize_nls_simplex(design, beta, initial_step=settings.nls_kink_step)
        if local.objective >= objective * (1.0 - settings.nls_kink_gain):
            return _Descent(beta, iterations, on_kink=False, converged=True)

        restart = _iterate_trimmed(design, local.beta, tol, max_iter)
        iterations += local.iterations + restart.iterations
        if restart.reason is not None or nls_objective(design, restart.beta) > local.objective:
            return _Descent(local.beta, iterations, on_kink=True, converged=local.converged)
        logger.debug(
            "Trimmed fixed point at Q_N %.10g was on a kink; restarted to %.10g",
            objective, nls_objective(design, restart.beta),
        )
        beta = restart.beta

    logger.debug("Kink check stopped after %d rounds", settings.nls_kink_rounds)
    return _Descent(beta, iterations, on_kink=False, converged=True)


def fallback_simplex(
    design: DesignMatrix,
    start: np.ndarray,
    tol: float | None = None,
    max_iter: int | None = None,
) -> SimplexResult:
    """
    Restarted Nelder-Mead from ``start``, then the trimmed iteration from its
    solution. The trimmed fixed point replaces the simplex point when lower.
    """
    settings = get_settings()
    tol = settings.nls_tol if tol is None else tol
    max_iter = settings.nls_max_iter if max_iter is None else max_iter

    simplex = minimize_nls_simplex(design, start, restarts=settings.simplex_restarts)
    if not simplex.converged:
        return simplex
    run = _iterate_trimmed(design, simplex.beta, tol, max_iter)
    if run.reason is not None:
        return simplex

    descent = _leave_kinks(design, run, tol, max_iter)
    objective = nls_objective(design, descent.beta)
    if descent.converged and objective < simplex.objective:
        return SimplexResult(
            beta=descent.beta,
            objective=objective,
            converged=True,
            iterations=simplex.iterations + descent.iterations,
        )
    return simplex


def fit_ramp_nls(
    design: DesignMatrix,
    tol: float | None = None,
    max_iter: int | None = None,
    start: np.ndarray | None = None,
) -> FitResult:
    """
    Ramp-model NLS by iterative trimmed OLS.

    Starting from OLS, each step refits OLS on the observations whose current
    index lies in (0, 1). Stops when that set is unchanged and the coefficient
    sup-norm change is below ``tol``; the fixed point is then checked against
    a small simplex around it (see ``_leave_kinks``). A revisited set (cycle),
    an empty or singular trimmed design, or ``max_iter`` switch to
    ``fallback_simplex`` from the OLS start.

    Raises:
        DidNotConverge: both paths failed; ``.result`` is the best point found
    """
    settings = get_settings()
    tol = settings.nls_tol if tol is None else tol
    max_iter = settings.nls_max_iter if max_iter is None else max_iter

    ols_beta = fit_ols(design).beta
    beta = ols_beta if start is None else np.asarray(start, dtype=float)
    if beta.shape != (design.n_params,):
        raise DimensionMismatch(f"start has shape {beta.shape}, expected ({design.n_params},)")

    run = _iterate_trimmed(design, beta, tol, max_iter)
    beta, iterations, reason = run.beta, run.iterations, run.reason

    if reason is None:
        descent = _leave_kinks(design, run, tol, max_iter)
        if not descent.on_kink:
            logger.debug(
                "ITO converged in %d iterations, %d of %d observations active",
                descent.iterations, int(interior(design.X @ descent.beta).sum()), design.n_obs,
            )
            return _ramp_result(
                design,
                descent.beta,
                iterations=descent.iterations,
                converged=True,
                solver_path=SolverPath.NEWTON_TRIM,
            )
        if descent.converged:
            logger.info("ITO fixed point sits on a kink of Q_N; keeping the lower simplex point")
            return _ramp_result(
                design,
                descent.beta,
                iterations=descent.iterations,
                converged=True,
                solver_path=SolverPath.FALLBACK_SIMPLEX,
                fallback_reason="kink",
            )
        beta, iterations, reason = descent.beta, descent.iterations, "kink"

    logger.info("ITO stopped after %d iterations (%s); switching to Nelder-Mead", iterations, reason)
    simplex = fallback_simplex(design, ols_beta, tol, max_iter)
    if simplex.converged:
        return _ramp_result(
            design,
            simplex.beta,
            iterations=simplex.iterations,
            converged=True,
            solver_path=SolverPath.FALLBACK_SIMPLEX,
            fallback_reason=reason,
        )

    best = simplex.beta
    if nls_objective(design, beta) < simplex.objective:
        best = beta
    result = _ramp_result(
        design,
        best,
        iterations=iterations + simplex.iterations,
        converged=False,
        solver_path=SolverPath.FALLBACK_SIMPLEX,
        fallback_reason=reason,
    )
    raise DidNotConverge("ramp NLS: trimmed iteration and simplex both failed", result=result)


def fit_trimmed_once(design: DesignMatrix) -> FitResult:
    """OLS, drop rows with fitted values outside [0, 1], refit once."""
    ols_index = fit_ols(design).index
    mask = (ols_index >= 0.0) & (ols_index <= 1.0)
    try:
        beta = _trimmed_ols(design, mask)
    except RankDeficientTrimSet as exc:
        raise RankDeficient(str(exc)) from exc
    return _ramp_result(
        design,
        beta,
        kind=EstimatorKind.TRIMMED_OLS,
        iterations=1,
        converged=True,
        solver_path=SolverPath.CLOSED_FORM,
    )


@dataclass(frozen=True, eq=False)
class SolverComparison:
    newton: FitResult
    simplex_beta: np.ndarray
    simplex_objective: float
    max_abs_diff: float
    agree: bool


def compare_nls_solvers(design: DesignMatrix, tol: float = 1e-6) -> SolverComparison:
    """Fit by trimmed iteration and by ``fallback_simplex`` from OLS; flag disagreement."""
    newton = fit_ramp_nls(design)
    simplex = fallback_simplex(design, fit_ols(design).beta)
    diff = float(np.max(np.abs(newton.beta - simplex.beta)))
    agree = diff <= tol
    if not agree:
        logger.warning(
            "Ramp NLS solvers disagree by %.3g (Q_N %.10g via %s vs %.10g via simplex)",
            diff, newton.objective / design.n_obs, newton.solver_path.value, simplex.objective,
        )
        warnings.warn(f"ramp NLS solvers disagree by {diff:.3g}", ConvergenceWarning, stacklevel=2)
    return SolverComparison(
        newton=newton,
        simplex_beta=simplex.beta,
        simplex_objective=simplex.objective,
        max_abs_diff=diff,
        agree=agree,
    )


# ===========
# QUASI-MLE
# ===========


def _bernoulli_terms(
    kind: EstimatorKind, y: np.ndarray, index: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-observation log-likelihood and its first two derivatives in the index."""
    if kind is EstimatorKind.LOGIT:
        p = special.expit(index)
        loglik = y * index - np.logaddexp(0.0, index)
        return loglik, y - p, -p * (1.0 - p)

    log_cdf = special.log_ndtr(index)
    log_sf = special.log_ndtr(-index)
    log_pdf = -0.5 * np.square(index) - _LOG_SQRT_2PI
    mills_1 = np.exp(log_pdf - log_cdf)  # phi / Phi
    mills_0 = np.exp(log_pdf - log_sf)  # phi / (1 - Phi)
    loglik = y * log_cdf + (1.0 - y) * log_sf
    d1 = y * mills_1 - (1.0 - y) * mills_0
    d2 = -y * mills_1 * (mills_1 + index) - (1.0 - y) * mills_0 * (mills_0 - index)
    return loglik, d1, d2


def _fit_qmle(
    design: DesignMatrix,
    kind: EstimatorKind,
    tol: float | None,
    max_iter: int | None,
) -> FitResult:
    settings = get_settings()
    tol = settings.qmle_tol if tol is None else tol
    max_iter = settings.qmle_max_iter if max_iter is None else max_iter

    X, y = design.X, design.y
    n = design.n_obs
    if np.all(y == y[0]):
        raise PerfectSeparation(f"{kind.value}: outcome has no variation")

    beta = np.zeros(design.n_params)
    index = X @ beta
    ll, d1, d2 = _bernoulli_terms(kind, y, index)
    loglik = float(ll.sum())
    score = X.T @ d1 / n
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        hessian = (X * d2[:, None]).T @ X / n
        try:
            direction = linalg.solve(-hessian, score, assume_a="pos")
        except (linalg.LinAlgError, ValueError):
            break

        # Step-halving until the log-likelihood does not fall
        t = 1.0
        accepted = False
        for _ in range(40):
            cand = beta + t * direction
            cand_index = X @ cand
            cand_ll, cand_d1, cand_d2 = _bernoulli_terms(kind, y, cand_index)
            cand_loglik = float(cand_ll.sum())
            if np.isfinite(cand_loglik) and cand_loglik >= loglik - 1e-12 * max(1.0, abs(loglik)):
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break

        change = float(np.max(np.abs(cand - beta)))
        beta, index, loglik, d1, d2 = cand, cand_index, cand_loglik, cand_d1, cand_d2
        score = X.T @ d1 / n
        if np.max(np.abs(score)) < tol and change < np.sqrt(tol):
            converged = True
            break

    score_norm = float(np.max(np.abs(score)))
    prob = link_probability(kind, index)
    result = FitResult(
        kind=kind,
        beta=beta,
        index=index,
        prob=prob,
        objective=loglik,
        iterations=iterations,
        converged=converged,
        solver_path=SolverPath.NEWTON_RAPHSON,
        frac_unit_interval=_unit_share(prob),
        names=design.names,
        score_norm=score_norm,
    )
    if converged:
        return result
    if np.max(np.abs(index)) > settings.separation_index:
        raise PerfectSeparation(
            f"{kind.value}: index diverges (max |xb| = {np.max(np.abs(index)):.1f}), "
            "the outcome is perfectly predicted"
        )
    raise DidNotConverge(
        f"{kind.value}: score sup-norm {score_norm:.3g} after {iterations} iterations",
        result=result,
    )


def fit_probit(design: DesignMatrix, tol: float | None = None, max_iter: int | None = None) -> FitResult:
    """Probit QMLE: maximize sum y log Phi(xb) + (1 - y) log(1 - Phi(xb))."""
    return _fit_qmle(design, EstimatorKind.PROBIT, tol, max_iter)


def fit_logit(design: DesignMatrix, tol: float | None = None, max_iter: int | None = None) -> FitResult:
    """Logit QMLE with the logistic CDF as link."""
    return _fit_qmle(design, EstimatorKind.LOGIT, tol, max_iter)


# ========
# DISPATCH
# ========

ESTIMATORS: dict[EstimatorKind, Callable[[DesignMatrix], FitResult]] = {
    EstimatorKind.OLS_LPM: fit_ols,
    EstimatorKind.RAMP_NLS: fit_ramp_nls,
    EstimatorKind.PROBIT: fit_probit,
    EstimatorKind.LOGIT: fit_logit,
    EstimatorKind.TRIMMED_OLS: fit_trimmed_once,
}


def fit(design: DesignMatrix, kind: EstimatorKind | str) -> FitResult:
    return ESTIMATORS[EstimatorKind(kind)](design)


def predict(fit_result: FitResult, design: DesignMatrix) -> Prediction:
    """Index and fitted probability of ``fit_result`` on (possibly new) rows."""
    if design.n_params != fit_result.beta.shape[0]:
        raise DimensionMismatch(
            f"design has {design.n_params} columns, fit has {fit_result.beta.shape[0]} coefficients"
        )
    index = design.X @ fit_result.beta
    return Prediction(index=index, prob=link_probability(fit_result.kind, index))
