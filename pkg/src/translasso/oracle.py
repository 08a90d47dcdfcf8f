"""Oracle Trans-Lasso for a known informative set, with l1 or l0 contrasts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np

from .core import FitResult, Moments, TaskData, pool
from .lasso import (DEFAULT_TOL, LassoConfig, cv_lambda, fit_lasso_moments,
                    fit_lasso_quadratic)

Rule = Union[float, Literal["auto", "cv", "cv_scaled"]]


@dataclass(frozen=True)
class OracleConfig:
    """Penalty rules for the two-step estimators.

    ``lambda_w``: ``"auto"`` is ``sqrt(2 log p / (n0 + nA))``, ``"cv"`` picks it
    by ``cv_folds``-fold cross-validation on the pooled rows.
    ``lambda_delta``: ``"auto"`` is ``sqrt(2 log p / n0)``; ``"cv_scaled"`` is
    ``lambda_w * sqrt((n0 + nA) / n0)``.
    ``scale_by_response`` multiplies the auto rules by the plug-in root second
    moment of the responses, ``max_k ||y_k|| / sqrt(n_k)``.
    """

    lambda_w: Rule = "auto"
    lambda_delta: Rule = "auto"
    contrast_mode: Literal["l1", "l0"] = "l1"
    per_contrast_lambdas: Sequence[float] | None = None
    lambda_beta: Rule = "auto"
    scale_by_response: bool = False
    cv_folds: int = 8
    seed: int = 0
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        for name in ("lambda_w", "lambda_delta", "lambda_beta"):
            v = getattr(self, name)
            if isinstance(v, str):
                if v not in ("auto", "cv", "cv_scaled"):
                    raise ValueError(f"{name}: unknown rule {v!r}")
            elif not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")
        if self.contrast_mode not in ("l1", "l0"):
            raise ValueError(f"unknown contrast mode {self.contrast_mode!r}")


@dataclass(frozen=True)
class OracleResult:
    beta: FitResult
    w: FitResult
    delta: FitResult


@dataclass(frozen=True)
class OracleL0Result:
    beta: FitResult
    deltas: tuple[FitResult, ...]


def study_moments(task: TaskData) -> list[Moments]:
    """Moments of the primary (position 0) and every auxiliary (1..K)."""
    return [Moments.of(s.X, s.y) for s in (task.primary, *task.auxiliaries)]


def _root_moment(m: Moments) -> float:
    return float(np.sqrt(m.yty / m.n))


def _stack_rows(task: TaskData, A):
    studies = [task.primary] + [task.auxiliaries[k - 1] for k in A]
    return np.vstack([s.X for s in studies]), np.concatenate([s.y for s in studies])


def resolve_lambdas(task: TaskData, A, cfg: OracleConfig, moments=None) -> tuple[float, float]:
    """Concrete ``(lambda_w, lambda_delta)`` for informative set ``A``."""
    moments = study_moments(task) if moments is None else moments
    p, n0 = task.p, moments[0].n
    n_pool = n0 + sum(moments[k].n for k in A)
    log_p = np.log(p)
    if cfg.lambda_w == "auto":
        lam_w = np.sqrt(2 * log_p / n_pool)
        if cfg.scale_by_response:
            lam_w *= max(_root_moment(moments[k]) for k in (0, *A))
    elif cfg.lambda_w == "cv":
        X, y = _stack_rows(task, A)
        lam_w = cv_lambda(X, y, folds=cfg.cv_folds, seed=cfg.seed)
    elif cfg.lambda_w == "cv_scaled":
        raise ValueError("cv_scaled applies to lambda_delta only")
    else:
        lam_w = float(cfg.lambda_w)
    if cfg.lambda_delta == "auto":
        lam_d = np.sqrt(2 * log_p / n0)
        if cfg.scale_by_response:
            lam_d *= _root_moment(moments[0])
    elif cfg.lambda_delta == "cv_scaled":
        lam_d = lam_w * np.sqrt(n_pool / n0)
    elif cfg.lambda_delta == "cv":
        lam_d = cv_lambda(task.primary.X, task.primary.y, folds=cfg.cv_folds, seed=cfg.seed)
    else:
        lam_d = float(cfg.lambda_delta)
    return float(lam_w), float(lam_d)


def oracle_trans_lasso(task: TaskData, informative, cfg: OracleConfig = OracleConfig(),
                       moments=None) -> OracleResult:
    """Pooled Lasso over the primary and informative studies, then a
    bias-correction Lasso on the primary residuals.

    ``informative`` holds 1-based auxiliary indices. ``moments`` optionally
    supplies precomputed ``study_moments(task)``.
    """
    A = task.check_informative(informative)
    if cfg.contrast_mode != "l1":
        raise ValueError("oracle_trans_lasso needs contrast_mode='l1'; use oracle_trans_lasso_l0")
    moments = study_moments(task) if moments is None else moments
    lam_w, lam_d = resolve_lambdas(task, A, cfg, moments)
    m0 = moments[0]
    p = task.p
    if not A:
        w = fit_lasso_moments(m0, LassoConfig(lam_w, tol=cfg.tol))
        delta = FitResult(coef=np.zeros(p), objective=w.objective, iterations=0,
                          lam=lam_d)
        return OracleResult(beta=w, w=w, delta=delta)
    pooled = pool([m0] + [moments[k] for k in A])
    w = fit_lasso_moments(pooled, LassoConfig(lam_w, tol=cfg.tol))
    # primary sample with response y0 - X0 w
    gw = m0.xtx @ w.coef
    offset = Moments(m0.xtx, m0.xty - gw,
                     m0.yty - 2 * w.coef @ m0.xty + w.coef @ gw, m0.n)
    delta = fit_lasso_moments(offset, LassoConfig(lam_d, tol=cfg.tol))
    beta = FitResult(coef=w.coef + delta.coef, objective=delta.objective,
                     iterations=w.iterations + delta.iterations, lam=lam_d,
                     converged=w.converged and delta.converged)
    return OracleResult(beta=beta, w=w, delta=delta)


def default_contrast_lambda(mk: Moments, m0: Moments, p: int) -> float:
    return float((np.sqrt(mk.yty) / mk.n + np.sqrt(m0.yty) / m0.n) * np.sqrt(2 * np.log(p)))


def oracle_trans_lasso_l0(task: TaskData, informative, cfg: OracleConfig = OracleConfig(contrast_mode="l0"),
                          moments=None) -> OracleL0Result:
    """Per-study contrasts from the moment equation, then a Lasso on the
    contrast-corrected pooled sample."""
    A0 = task.check_informative(informative)
    if not A0:
        raise ValueError("the l0 oracle needs a non-empty informative set")
    moments = study_moments(task) if moments is None else moments
    m0, p = moments[0], task.p
    pooled = pool([m0] + [moments[k] for k in A0])
    sigma = pooled.gram
    if cfg.per_contrast_lambdas is not None:
        lams = [float(v) for v in cfg.per_contrast_lambdas]
        if len(lams) != len(A0):
            raise ValueError(f"need {len(A0)} contrast penalties, got {len(lams)}")
    else:
        lams = [default_contrast_lambda(moments[k], m0, p) for k in A0]
    deltas = []
    corrected = [m0]
    for k, lam_k in zip(A0, lams):
        mk = moments[k]
        d = fit_lasso_quadratic(sigma, mk.xty / mk.n - m0.xty / m0.n,
                                LassoConfig(lam_k, tol=cfg.tol))
        deltas.append(d)
        gd = mk.xtx @ d.coef
        corrected.append(Moments(mk.xtx, mk.xty - gd,
                                 mk.yty - 2 * d.coef @ mk.xty + d.coef @ gd, mk.n))
    step2 = pool(corrected)
    if cfg.lambda_beta == "auto":
        lam_b = np.sqrt(2 * np.log(p) / step2.n)
    elif isinstance(cfg.lambda_beta, str):
        raise ValueError(f"lambda_beta rule {cfg.lambda_beta!r} is not supported")
    else:
        lam_b = float(cfg.lambda_beta)
    beta = fit_lasso_moments(step2, LassoConfig(lam_b, tol=cfg.tol))
    return OracleL0Result(beta=beta, deltas=tuple(deltas))


def naive_trans_lasso(task: TaskData, cfg: OracleConfig = OracleConfig(), moments=None) -> FitResult:
    """Oracle Trans-Lasso treating every auxiliary study as informative."""
    return oracle_trans_lasso(task, range(1, task.K + 1), cfg, moments).beta


def plain_lasso(task: TaskData, cfg: OracleConfig = OracleConfig(), moments=None) -> FitResult:
    """Primary-only Lasso under the same penalty rule as an empty informative set."""
    return oracle_trans_lasso(task, (), cfg, moments).beta
