"""Q-aggregation of candidate coefficient vectors over the simplex."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lasso import LassoConfig, fit_lasso

TOL_AGG = 1e-8
VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class AggregationResult:
    theta: np.ndarray
    beta: np.ndarray
    objective: float
    holdout_errors: np.ndarray
    iterations: int
    gap: float
    penalty: float
    aggregate_error: float


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = 1}``."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


class QObjective:
    """``F(t) = Q(B t) + sum_l t_l Q(b_l) + penalty * ||t||_1`` with ``Q`` the
    holdout residual sum of squares."""

    def __init__(self, candidates, X, y, penalty):
        self.B = np.asarray(candidates, dtype=float)
        self.P = np.asarray(X, dtype=float) @ self.B.T
        self.y = np.asarray(y, dtype=float)
        R = self.y[:, None] - self.P
        self.q = np.einsum("ij,ij->j", R, R)
        self.H = 2.0 * self.P.T @ self.P
        self.lin = -2.0 * self.P.T @ self.y + self.q
        self.yty = float(self.y @ self.y)
        self.penalty = float(penalty)

    def __call__(self, theta) -> float:
        r = self.y - self.P @ theta
        return float(r @ r + theta @ self.q + self.penalty * np.abs(theta).sum())

    def grad(self, theta) -> np.ndarray:
        # the l1 term is constant on the simplex
        return self.H @ theta + self.lin

    def gap(self, theta) -> float:
        """``max_l grad'(theta - e_l)``; zero at the simplex minimizer."""
        g = self.grad(theta)
        return float(g @ theta - g.min())


def _polish(obj: QObjective, theta):
    """Solve the KKT system on the current support exactly."""
    S = np.flatnonzero(theta > 1e-12)
    m = S.size
    A = np.zeros((m + 1, m + 1))
    A[:m, :m] = obj.H[np.ix_(S, S)]
    A[:m, m] = 1.0
    A[m, :m] = 1.0
    rhs = np.concatenate([-obj.lin[S], [1.0]])
    sol = np.linalg.lstsq(A, rhs, rcond=None)[0]
    if np.any(sol[:m] < 0):
        return None
    out = np.zeros_like(theta)
    out[S] = sol[:m]
    return out / out.sum()


def q_aggregate(candidates, X_holdout, y_holdout, lambda_theta: float, n0: int | None = None,
                tol: float = TOL_AGG, max_iter: int = 50_000) -> AggregationResult:
    """Simplex weights minimizing the Q-aggregation objective on a holdout sample.

    ``candidates`` is an ``(L+1, p)`` array. The log-cardinality penalty is
    ``2 lambda_theta log(L+1) / n0``; ``n0`` defaults to the holdout size.
    """
    B = np.atleast_2d(np.asarray(candidates, dtype=float))
    if not np.all(np.isfinite(B)):
        raise ValueError("candidate coefficients contain non-finite entries")
    y_holdout = np.asarray(y_holdout, dtype=float)
    if y_holdout.size == 0:
        raise ValueError("holdout sample is empty")
    L1 = B.shape[0]
    n0 = y_holdout.size if n0 is None else n0
    penalty = 2.0 * lambda_theta * np.log(L1) / n0
    obj = QObjective(B, X_holdout, y_holdout, penalty)

    theta = np.full(L1, 1.0 / L1)
    it = 0
    if L1 > 1:
        lip = max(float(np.linalg.eigvalsh(obj.H)[-1]), 1e-300)
        step = 1.0 / lip
        z, t_acc = theta.copy(), 1.0
        f_prev = obj(theta)
        while it < max_iter:
            it += 1
            new = project_simplex(z - step * obj.grad(z))
            f_new = obj(new)
            if f_new > f_prev:
                # adaptive restart keeps the accelerated iterates monotone
                z, t_acc = theta.copy(), 1.0
                new = project_simplex(theta - step * obj.grad(theta))
                f_new = obj(new)
            t_next = 0.5 * (1 + np.sqrt(1 + 4 * t_acc ** 2))
            z = new + (t_acc - 1) / t_next * (new - theta)
            theta, t_acc, f_prev = new, t_next, f_new
            if obj.gap(theta) < tol:
                break
            if it % 25 == 0:
                cand = _polish(obj, theta)
                if cand is not None and obj.gap(cand) < tol and obj(cand) <= f_prev + tol:
                    theta = cand
                    break
    r = obj.y - obj.P @ theta
    return AggregationResult(theta=theta, beta=theta @ B, objective=obj(theta),
                             holdout_errors=obj.q.copy(), iterations=it,
                             gap=obj.gap(theta), penalty=penalty,
                             aggregate_error=float(r @ r))


def estimate_noise_variance(X, y) -> float:
    """Residual variance after a primary Lasso at ``sqrt(2 log p / n)``.

    The residual comes from a least-squares refit on the Lasso's active set,
    so shrinkage bias does not inflate the estimate; the divisor is
    ``max(n - |active|, 1)``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    fit = fit_lasso(X, y, LassoConfig(np.sqrt(2 * np.log(p) / n)))
    S = fit.active_set
    if S.size:
        b = np.linalg.lstsq(X[:, S], y, rcond=None)[0]
        r = y - X[:, S] @ b
    else:
        r = y
    return max(float(r @ r) / max(n - S.size, 1), VARIANCE_FLOOR)
