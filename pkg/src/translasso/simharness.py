"""Synthetic transfer-learning regimes and Monte Carlo replication."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, fields, replace
from functools import lru_cache
from typing import Iterable, Literal, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.linalg import toeplitz

from .core import Study, TaskData
from .detect import detect, rank_consistent
from .oracle import OracleConfig, oracle_trans_lasso, oracle_trans_lasso_l0, study_moments
from .pipeline import TransLassoConfig, robustness_slack, split_rows, trans_lasso

METHODS = ("lasso", "naive", "oracle", "trans_lasso", "oracle_l0")


@dataclass(frozen=True)
class SimScenario:
    p: int = 500
    n0: int = 150
    nk: int = 100
    K: int = 20
    s: int = 16
    beta_value: float = 0.3
    h: int = 2
    n_informative: int = 4
    coef_config: Literal["i", "ii"] = "i"
    cov_regime: Literal["identity", "homogeneous_toeplitz", "heterogeneous"] = "identity"
    noise_sd: float = 1.0
    seed: int = 0
    # size of H_k for non-informative studies under config (i)
    h_noninformative: int = 50
    # Laplace dispersion numerator for non-informative studies under config (ii)
    laplace_noninformative: float = 100.0
    # coefficient shift on H_k under config (i)
    contrast_value: float = 0.3

    def __post_init__(self):
        if self.s > self.p:
            raise ValueError("s must not exceed p")
        if not 0 <= self.n_informative <= self.K:
            raise ValueError("informative count must lie in 0..K")
        if self.h > self.p or self.h < 0:
            raise ValueError("h must lie in 0..p")
        if self.coef_config not in ("i", "ii"):
            raise ValueError(f"unknown coefficient config {self.coef_config!r}")
        if self.cov_regime not in ("identity", "homogeneous_toeplitz", "heterogeneous"):
            raise ValueError(f"unknown covariance regime {self.cov_regime!r}")

    @property
    def informative(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_informative + 1))


@dataclass(frozen=True)
class GroundTruth:
    beta: np.ndarray
    W: np.ndarray  # (K, p)
    informative: tuple[int, ...]


def _geometric_row(p: int, K: int) -> np.ndarray:
    r = np.zeros(p)
    m = min(K + 1, p)
    r[:m] = 0.8 ** np.arange(m)
    return r


def _banded_row(p: int, k: int) -> np.ndarray:
    if 2 * k > p:
        raise ValueError(f"banded covariance for study {k} needs p >= {2 * k}, got {p}")
    r = np.zeros(p)
    r[0] = 1.0
    r[1:2 * k] = 1.0 / (k + 1)
    return r


def covariance_row(regime: str, k: int, p: int, K: int, informative: bool = True) -> np.ndarray:
    """First row of the Toeplitz covariance of study ``k`` (0 is the primary)."""
    if regime == "identity":
        r = np.zeros(p)
        r[0] = 1.0
        return r
    if regime == "homogeneous_toeplitz":
        if k == 0 or informative:
            return _geometric_row(p, K)
        return _banded_row(p, k)
    if regime == "heterogeneous":
        if k == 0:
            return covariance_row("identity", 0, p, K)
        return _banded_row(p, k)
    raise ValueError(f"unknown covariance regime {regime!r}")


@lru_cache(maxsize=64)
def _cholesky(row: tuple) -> np.ndarray:
    S = toeplitz(np.array(row))
    try:
        return np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        raise ValueError("covariance is not positive definite") from None


def gen_covariance(regime: str, k: int, p: int, K: int, informative: bool = True) -> np.ndarray:
    """Symmetric Toeplitz covariance, validated by a Cholesky factorization."""
    row = covariance_row(regime, k, p, K, informative)
    _cholesky(tuple(row))
    return toeplitz(row)


def gen_coefficients(sc: SimScenario, rng) -> GroundTruth:
    p = sc.p
    beta = np.zeros(p)
    beta[:sc.s] = sc.beta_value
    A = sc.informative
    W = np.tile(beta, (sc.K, 1))
    for k in range(1, sc.K + 1):
        inf = k in A
        if sc.coef_config == "i":
            size = sc.h if inf else sc.h_noninformative
            H = rng.choice(p, size=size, replace=False)
            W[k - 1, H] -= sc.contrast_value
        else:
            H = rng.choice(p, size=p // 2, replace=False)
            scale = 2 * sc.h / p if inf else sc.laplace_noninformative / p
            W[k - 1, H] += rng.laplace(0.0, scale, size=H.size)
    return GroundTruth(beta, W, A)


def _draw_design(sc: SimScenario, k: int, n: int, rng) -> np.ndarray:
    Z = rng.standard_normal((n, sc.p))
    if sc.cov_regime == "identity":
        return Z
    row = covariance_row(sc.cov_regime, k, sc.p, sc.K, k in sc.informative)
    return Z @ _cholesky(tuple(row)).T


def gen_task(sc: SimScenario, seed: int | None = None) -> tuple[TaskData, GroundTruth]:
    """Draw one task from independent per-study random streams.

    Stream 0 draws the contrasts and stream ``k + 1`` draws study ``k``, so
    scenarios that differ only in the informative count share the same
    primary sample for a given seed.
    """
    seed = sc.seed if seed is None else seed
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(sc.K + 2)]
    truth = gen_coefficients(sc, streams[0])
    studies = []
    for k in range(sc.K + 1):
        rng = streams[k + 1]
        n = sc.n0 if k == 0 else sc.nk
        X = _draw_design(sc, k, n, rng)
        coef = truth.beta if k == 0 else truth.W[k - 1]
        y = X @ coef
        if sc.noise_sd:
            y = y + sc.noise_sd * rng.standard_normal(n)
        studies.append(Study(f"study{k}", X, y, "primary" if k == 0 else "auxiliary"))
    return TaskData(studies[0], tuple(studies[1:])), truth


@dataclass
class MetricTable:
    scenario: SimScenario
    methods: tuple[str, ...]
    sse: dict  # method -> array over reps
    rank_hits: np.ndarray
    reps: int
    # per-rep minimum over halves of the aggregation robustness slack (NaN without trans_lasso)
    robustness: np.ndarray = None

    @property
    def c_hat(self) -> float:
        return float(self.rank_hits.mean())

    def mean(self, method: str) -> float:
        return float(np.mean(self.sse[method]))

    def se(self, method: str) -> float:
        x = self.sse[method]
        return float(np.std(x, ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0

    def summary(self) -> dict:
        return {
            "scenario": asdict(self.scenario),
            "reps": self.reps,
            "c_hat": self.c_hat,
            "methods": {m: {"mean_sse": self.mean(m), "se_sse": self.se(m)} for m in self.methods},
        }

    def rows(self) -> Iterable[dict]:
        sc = asdict(self.scenario)
        for m in self.methods:
            for rep, v in enumerate(self.sse[m]):
                yield {**sc, "method": m, "rep": rep, "sse": repr(float(v))}

    def write_csv(self, path) -> None:
        write_tables_csv([self], path)

    def write_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.summary(), f, indent=2, sort_keys=True)
            f.write("\n")


def write_tables_csv(tables: Sequence[MetricTable], path) -> None:
    cols = [f.name for f in fields(SimScenario)] + ["method", "rep", "sse"]
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for t in tables:
            w.writerows(t.rows())


class ReplicationError(RuntimeError):
    pass


def run_one(sc: SimScenario, methods: Sequence[str], rep: int,
            trans_cfg: TransLassoConfig | None = None,
            oracle_cfg: OracleConfig = OracleConfig()) -> tuple[dict, bool, float]:
    """One replication: per-method SSE, rank-consistency flag, robustness slack."""
    seed = sc.seed + rep
    task, truth = gen_task(sc, seed)
    A = truth.informative
    moments = study_moments(task)
    out = {}
    index = None
    slack = float("nan")
    for m in methods:
        if m == "lasso":
            b = oracle_trans_lasso(task, (), oracle_cfg, moments).beta.coef
        elif m == "naive":
            b = oracle_trans_lasso(task, range(1, task.K + 1), oracle_cfg, moments).beta.coef
        elif m == "oracle":
            b = oracle_trans_lasso(task, A, oracle_cfg, moments).beta.coef
        elif m == "oracle_l0":
            if A:
                b = oracle_trans_lasso_l0(task, A, replace(oracle_cfg, contrast_mode="l0"),
                                          moments).beta.coef
            else:
                b = oracle_trans_lasso(task, (), oracle_cfg, moments).beta.coef
        elif m == "trans_lasso":
            cfg = replace(trans_cfg or TransLassoConfig(oracle=oracle_cfg), seed=seed)
            res = trans_lasso(task, cfg)
            b = res.beta.coef
            index = res.halves[0].reports[0].index
            slack = min(robustness_slack(h) for h in res.halves)
        else:
            raise ValueError(f"unknown method {m!r}")
        out[m] = float(np.sum((b - truth.beta) ** 2))
    if index is None:
        cfg = trans_cfg or TransLassoConfig()
        I, _ = split_rows(task.n0, seed)
        index = detect(task, I, cfg.t_star_values(task.n0)[0])[0][0].index
    return out, rank_consistent(index, A), slack


def run_replications(sc: SimScenario, methods: Sequence[str] = ("lasso", "naive", "oracle", "trans_lasso"),
                     reps: int = 100, n_jobs: int = 1,
                     trans_cfg: TransLassoConfig | None = None,
                     oracle_cfg: OracleConfig = OracleConfig()) -> MetricTable:
    """Replicate ``sc`` with seeds ``sc.seed + rep``; results ordered by rep."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    methods = tuple(methods)
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")

    def job(rep):
        try:
            return run_one(sc, methods, rep, trans_cfg, oracle_cfg)
        except Exception as e:
            raise ReplicationError(f"replication {rep} (seed {sc.seed + rep}) failed: {e}") from e

    if n_jobs == 1:
        results = [job(r) for r in range(reps)]
    else:
        results = Parallel(n_jobs=n_jobs)(delayed(job)(r) for r in range(reps))
    sse = {m: np.array([r[0][m] for r in results]) for m in methods}
    hits = np.array([r[1] for r in results], dtype=float)
    slack = np.array([r[2] for r in results])
    return MetricTable(sc, methods, sse, hits, reps, slack)


def run_rank_only(sc: SimScenario, reps: int = 100, t_star_exponent: float = 0.75) -> float:
    """Rank-consistency frequency without fitting any estimator."""
    cfg = TransLassoConfig(t_star_exponent=t_star_exponent)
    hits = 0
    for rep in range(reps):
        seed = sc.seed + rep
        task, truth = gen_task(sc, seed)
        I, _ = split_rows(task.n0, seed)
        index = detect(task, I, cfg.t_star_values(task.n0)[0])[0][0].index
        hits += rank_consistent(index, truth.informative)
    return hits / reps
