"""Trans-Lasso: sample splitting, candidate construction, aggregation, cross-fitting."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .aggregate import AggregationResult, estimate_noise_variance, q_aggregate
from .core import FitResult, Moments, TaskData
from .detect import CandidateSets, SparsityReport, default_t_star, detect
from .oracle import (OracleConfig, naive_trans_lasso, oracle_trans_lasso,
                     oracle_trans_lasso_l0, study_moments)


@dataclass(frozen=True)
class TransLassoConfig:
    seed: int = 0
    t_star_exponent: float = 0.75
    # explicit screening size(s); overrides the exponent rule
    t_star: Union[int, Sequence[int], None] = None
    oracle: OracleConfig = field(default_factory=OracleConfig)
    lambda_theta: Union[float, str] = "auto"
    cross_fit: bool = True

    def t_star_values(self, n0: int) -> list[int]:
        if self.t_star is None:
            return [default_t_star(n0, self.t_star_exponent)]
        if np.isscalar(self.t_star):
            return [int(self.t_star)]
        return [int(t) for t in self.t_star]


@dataclass(frozen=True)
class HalfFit:
    """Diagnostics of one dictionary/aggregation split of the primary rows."""

    dictionary_rows: np.ndarray
    holdout_rows: np.ndarray
    reports: list[SparsityReport]
    candidate_sets: CandidateSets
    candidates: np.ndarray
    aggregation: AggregationResult
    lambda_theta: float


@dataclass(frozen=True)
class TransLassoResult:
    beta: FitResult
    halves: list[HalfFit]


def split_rows(n0: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded split into a first part of size ``ceil(n0/2)`` and the rest."""
    perm = np.random.default_rng(seed).permutation(n0)
    m = -(-n0 // 2)
    return np.sort(perm[:m]), np.sort(perm[m:])


def candidate_estimate(task: TaskData, G, cfg: OracleConfig, moments) -> np.ndarray:
    if cfg.contrast_mode == "l0" and G:
        return oracle_trans_lasso_l0(task, G, cfg, moments).beta.coef
    l1 = cfg if cfg.contrast_mode == "l1" else _as_l1(cfg)
    return oracle_trans_lasso(task, G, l1, moments).beta.coef


def _as_l1(cfg: OracleConfig) -> OracleConfig:
    return replace(cfg, contrast_mode="l1")


def fit_half(task: TaskData, rows, holdout, cfg: TransLassoConfig,
             aux_moments: list[Moments] | None = None) -> HalfFit:
    """Build the dictionary on ``rows`` of the primary sample and aggregate on ``holdout``."""
    if aux_moments is None:
        aux_moments = study_moments(task)[1:]
    half = task.with_primary(task.primary.rows(rows))
    moments = [Moments.of(half.primary.X, half.primary.y)] + list(aux_moments)
    reports, sets = detect(task, rows, cfg.t_star_values(task.n0))
    cands = np.array([candidate_estimate(half, G, cfg.oracle, moments) for G in sets])
    if cfg.lambda_theta == "auto":
        lam_theta = 4.0 * estimate_noise_variance(half.primary.X, half.primary.y)
    else:
        lam_theta = float(cfg.lambda_theta)
    Xh, yh = task.primary.X[holdout], task.primary.y[holdout]
    agg = q_aggregate(cands, Xh, yh, lam_theta, n0=task.n0)
    return HalfFit(np.asarray(rows), np.asarray(holdout), reports, sets, cands, agg, lam_theta)


def trans_lasso(task: TaskData, cfg: TransLassoConfig = TransLassoConfig()) -> TransLassoResult:
    """Adaptive Trans-Lasso estimate of the primary coefficient vector."""
    if task.n0 < 4:
        raise ValueError(f"Trans-Lasso needs at least 4 primary rows, got {task.n0}")
    I, Ic = split_rows(task.n0, cfg.seed)
    aux_m = study_moments(task)[1:]
    halves = [fit_half(task, I, Ic, cfg, aux_m)]
    if cfg.cross_fit:
        halves.append(fit_half(task, Ic, I, cfg, aux_m))
    coef = np.mean([h.aggregation.beta for h in halves], axis=0)
    beta = FitResult(coef=coef,
                     objective=float(np.mean([h.aggregation.objective for h in halves])),
                     iterations=sum(h.aggregation.iterations for h in halves),
                     lam=float(np.mean([h.lambda_theta for h in halves])))
    return TransLassoResult(beta=beta, halves=halves)


def robustness_slack(half: HalfFit, tol: float = 1e-8) -> float:
    """``min_l Q(b_l) + penalty + tol - Q(aggregate)`` on the holdout rows.

    Non-negative whenever the aggregate is within the log-cardinality penalty
    of the best single candidate, which minimizing the objective guarantees.
    """
    agg = half.aggregation
    return float(agg.holdout_errors.min() + agg.penalty + tol - agg.aggregate_error)


__all__ = ["TransLassoConfig", "TransLassoResult", "HalfFit", "trans_lasso",
           "naive_trans_lasso", "split_rows", "fit_half", "robustness_slack"]
