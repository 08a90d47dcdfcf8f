"""Cyclic coordinate descent for the Lasso, in covariance (Gram) form.

Both the least-squares objective ``(1/2n)||y - Xb||^2 + lam ||b||_1`` and the
quadratic objective ``1/2 b'Gb - b'c + lam ||b||_1`` are solved by the same
kernel; the former is the latter with ``G = X'X/n`` and ``c = X'y/n`` plus the
constant ``y'y/(2n)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .core import FitResult, Moments

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True)
class LassoConfig:
    lam: float
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL
    warm_start: np.ndarray | None = None

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


def _as_config(cfg) -> LassoConfig:
    return cfg if isinstance(cfg, LassoConfig) else LassoConfig(float(cfg))


def soft_threshold(z, t):
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be non-negative")
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


@numba.njit(cache=True)
def _cd_kernel(G, c, lam, b, max_iter, tol, hist):
    p = c.shape[0]
    g = c - G @ b
    it = 0
    converged = False
    while it < max_iter:
        max_delta = 0.0
        for j in range(p):
            gjj = G[j, j]
            if gjj <= 0.0:
                continue
            bj = b[j]
            z = g[j] + gjj * bj
            if z > lam:
                new = (z - lam) / gjj
            elif z < -lam:
                new = (z + lam) / gjj
            else:
                new = 0.0
            d = new - bj
            if d != 0.0:
                b[j] = new
                for i in range(p):
                    g[i] -= G[j, i] * d
                ad = abs(d)
                if ad > max_delta:
                    max_delta = ad
        # quadratic part: 1/2 b'Gb - b'c = -1/2 b'(c + g)
        obj = 0.0
        for i in range(p):
            obj += -0.5 * b[i] * (c[i] + g[i]) + lam * abs(b[i])
        hist[it] = obj
        it += 1
        if max_delta < tol:
            converged = True
            break
    return it, converged


def _solve(G, c, lam, max_iter, tol, warm_start, const=0.0) -> FitResult:
    G = np.ascontiguousarray(G, dtype=float)
    c = np.ascontiguousarray(c, dtype=float)
    p = c.shape[0]
    b = np.zeros(p) if warm_start is None else np.array(warm_start, dtype=float)
    if b.shape != (p,):
        raise ValueError(f"warm start has shape {b.shape}, expected ({p},)")
    b[np.diag(G) <= 0.0] = 0.0
    hist = np.empty(max_iter)
    it, converged = _cd_kernel(G, c, float(lam), b, int(max_iter), float(tol), hist)
    b[b == 0.0] = 0.0  # drop negative zeros
    obj = 0.5 * b @ G @ b - b @ c + lam * np.abs(b).sum() + const
    return FitResult(coef=b, objective=float(obj), iterations=int(it), lam=float(lam),
                     converged=bool(converged), history=hist[:it] + const)


def fit_lasso_quadratic(Sigma_hat, c_hat, cfg) -> FitResult:
    """Minimize ``1/2 d'Sigma d - d'c + lam ||d||_1``."""
    cfg = _as_config(cfg)
    Sigma_hat = np.asarray(Sigma_hat, dtype=float)
    zero = np.flatnonzero(np.diag(Sigma_hat) <= 0.0)
    if zero.size:
        raise ValueError(f"Sigma_hat has non-positive diagonal at coordinate {int(zero[0])}")
    return _solve(Sigma_hat, c_hat, cfg.lam, cfg.max_iter, cfg.tol, cfg.warm_start)


def fit_lasso_moments(m: Moments, cfg) -> FitResult:
    """Least-squares Lasso from pooled moments. Zero columns get zero coefficients."""
    cfg = _as_config(cfg)
    return _solve(m.gram, m.cross, cfg.lam, cfg.max_iter, cfg.tol, cfg.warm_start,
                  const=0.5 * m.yty / m.n)


def fit_lasso(X, y, cfg) -> FitResult:
    """Minimize ``(1/2n)||y - Xb||^2 + lam ||b||_1`` (no intercept)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows, y has {y.shape[0]}")
    return fit_lasso_moments(Moments.of(X, y), cfg)


def kkt_violation(G, c, coef, lam) -> float:
    """Largest violation of the Lasso subgradient conditions.

    For ``b_j = 0`` the gradient magnitude ``|c_j - (Gb)_j|`` must not exceed
    ``lam``; otherwise it must equal ``lam * sign(b_j)``.
    """
    r = c - G @ coef
    nz = coef != 0
    v_zero = np.maximum(np.abs(r[~nz]) - lam, 0.0)
    v_act = np.abs(r[nz] - lam * np.sign(coef[nz]))
    return float(max(v_zero.max(initial=0.0), v_act.max(initial=0.0)))


def lambda_max(X, y) -> float:
    return float(np.max(np.abs(X.T @ y)) / X.shape[0])


def lambda_grid(X, y, n_lambda: int = 50, ratio: float = 1e-3) -> np.ndarray:
    lmax = lambda_max(X, y)
    if lmax <= 0:
        return np.array([0.0])
    return np.geomspace(lmax, ratio * lmax, n_lambda)


def fold_ids(n: int, folds: int, rng) -> np.ndarray:
    """Balanced random fold labels ``0..folds-1``."""
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if n < folds:
        raise ValueError(f"cannot make {folds} folds from {n} rows")
    labels = np.arange(n) % folds
    return labels[rng.permutation(n)]


def cv_path_errors(X, y, grid, folds: int = 8, seed: int = 0,
                   tol: float = DEFAULT_TOL) -> np.ndarray:
    """Mean held-out squared error per grid value, warm-started down the grid."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    grid = np.asarray(grid, dtype=float)
    ids = fold_ids(X.shape[0], folds, np.random.default_rng(seed))
    total = Moments.of(X, y)
    err = np.zeros(grid.size)
    for f in range(folds):
        test = ids == f
        train_m = total - Moments.of(X[test], y[test])
        b = None
        for i, lam in enumerate(grid):
            fit = fit_lasso_moments(train_m, LassoConfig(lam, tol=tol, warm_start=b))
            b = fit.coef
            r = y[test] - X[test] @ b
            err[i] += r @ r
    return err / X.shape[0]


def cv_lambda(X, y, folds: int = 8, grid=None, seed: int = 0) -> float:
    """Grid penalty with the smallest k-fold prediction error (first on ties)."""
    grid = lambda_grid(X, y) if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty lambda grid")
    if np.any(np.diff(grid) > 0):
        raise ValueError("lambda grid must be sorted in decreasing order")
    if X.shape[0] < folds:
        raise ValueError(f"cannot make {folds} folds from {X.shape[0]} rows")
    if grid.size == 1:
        return float(grid[0])
    err = cv_path_errors(X, y, grid, folds, seed)
    return float(grid[int(np.argmin(err))])
