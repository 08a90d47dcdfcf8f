"""Data containers, standardization and pooled second moments."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np


@dataclass(frozen=True)
class Study:
    """One regression sample ``(X, y)``."""

    id: str
    X: np.ndarray
    y: np.ndarray
    kind: Literal["primary", "auxiliary"] = "auxiliary"

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float).ravel()
        if X.ndim != 2:
            raise ValueError(f"study {self.id!r}: X must be 2-d, got shape {X.shape}")
        n, p = X.shape
        if n < 1 or p < 1:
            raise ValueError(f"study {self.id!r}: empty design of shape {X.shape}")
        if y.shape[0] != n:
            raise ValueError(f"study {self.id!r}: X has {n} rows but y has {y.shape[0]}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError(f"study {self.id!r}: non-finite entries")
        if self.kind not in ("primary", "auxiliary"):
            raise ValueError(f"study {self.id!r}: unknown kind {self.kind!r}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def rows(self, idx) -> "Study":
        return replace(self, X=self.X[idx], y=self.y[idx])


@dataclass(frozen=True)
class TaskData:
    primary: Study
    auxiliaries: tuple[Study, ...] = ()

    def __post_init__(self):
        aux = tuple(self.auxiliaries)
        object.__setattr__(self, "auxiliaries", aux)
        p = self.primary.p
        for s in aux:
            if s.p != p:
                raise ValueError(f"study {s.id!r} has p={s.p}, primary has p={p}")

    @property
    def K(self) -> int:
        return len(self.auxiliaries)

    @property
    def p(self) -> int:
        return self.primary.p

    @property
    def n0(self) -> int:
        return self.primary.n

    def with_primary(self, primary: Study) -> "TaskData":
        return TaskData(primary, self.auxiliaries)

    def check_informative(self, informative) -> tuple[int, ...]:
        """Validate a 1-based auxiliary index set and return it sorted."""
        A = tuple(sorted(set(int(k) for k in informative)))
        bad = [k for k in A if k < 1 or k > self.K]
        if bad:
            raise IndexError(f"auxiliary indices {bad} out of range 1..{self.K}")
        return A


@dataclass(frozen=True)
class FitResult:
    coef: np.ndarray
    objective: float
    iterations: int
    lam: float
    converged: bool = True
    history: np.ndarray = field(default=None, repr=False)

    @property
    def active_set(self) -> np.ndarray:
        return np.flatnonzero(self.coef)


@dataclass(frozen=True)
class StandardizationRecord:
    """Per-study column means/scales; ``x_scale`` is 1 where scaling was off."""

    x_mean: dict
    x_scale: dict
    y_mean: dict
    y_scale: dict

    def to_raw(self, coef, study_id: str):
        """Map a standardized-scale coefficient vector to raw units.

        Returns ``(intercept, coef_raw)`` such that
        ``intercept + X_raw @ coef_raw`` equals the de-standardized prediction.
        """
        coef = np.asarray(coef, dtype=float)
        b = coef * self.y_scale[study_id] / self.x_scale[study_id]
        intercept = self.y_mean[study_id] - self.x_mean[study_id] @ b
        return intercept, b


def _standardize_study(s: Study, center: bool, scale: bool, scale_y: bool):
    X, y = s.X, s.y
    n, p = X.shape
    xm = X.mean(axis=0) if center else np.zeros(p)
    Xc = X - xm
    if scale:
        sq = np.einsum("ij,ij->j", Xc, Xc)
        zero = np.flatnonzero(sq <= 1e-300)
        if zero.size:
            raise ValueError(f"study {s.id!r}: column {int(zero[0])} is constant, cannot scale")
        xs = np.sqrt(sq / n)
        # already-normalized columns keep scale exactly 1 so the map is idempotent
        xs[np.abs(xs - 1.0) < 1e-12] = 1.0
    else:
        xs = np.ones(p)
    ym = y.mean() if center else 0.0
    yc = y - ym
    ys = 1.0
    if scale_y:
        sy = np.sqrt(yc @ yc / n)
        if sy > 0 and abs(sy - 1.0) >= 1e-12:
            ys = sy
    return replace(s, X=Xc / xs, y=yc / ys), xm, xs, ym, ys


def standardize(task: TaskData, center: bool = True, scale: bool = True,
                scale_y: bool = False) -> tuple[TaskData, StandardizationRecord]:
    """Center and scale every study separately so that ``||X_j||^2 = n``.

    With ``scale_y`` the response is also rescaled to ``||y||^2 = n``.
    """
    xm, xs, ym, ys = {}, {}, {}, {}
    out = []
    for s in (task.primary, *task.auxiliaries):
        s2, xm[s.id], xs[s.id], ym[s.id], ys[s.id] = _standardize_study(s, center, scale, scale_y)
        out.append(s2)
    return TaskData(out[0], tuple(out[1:])), StandardizationRecord(xm, xs, ym, ys)


@dataclass(frozen=True)
class Moments:
    """Raw sufficient statistics ``X'X``, ``X'y``, ``y'y`` and row count."""

    xtx: np.ndarray
    xty: np.ndarray
    yty: float
    n: int

    @classmethod
    def of(cls, X, y) -> "Moments":
        return cls(X.T @ X, X.T @ y, float(y @ y), X.shape[0])

    def __add__(self, other: "Moments") -> "Moments":
        return Moments(self.xtx + other.xtx, self.xty + other.xty,
                       self.yty + other.yty, self.n + other.n)

    def __sub__(self, other: "Moments") -> "Moments":
        return Moments(self.xtx - other.xtx, self.xty - other.xty,
                       self.yty - other.yty, self.n - other.n)

    @property
    def gram(self) -> np.ndarray:
        return self.xtx / self.n

    @property
    def cross(self) -> np.ndarray:
        return self.xty / self.n


def pool(moments: Sequence[Moments]) -> Moments:
    """Sum moments in the given order (callers fix the order for bit-stability)."""
    it = iter(moments)
    try:
        acc = next(it)
    except StopIteration:
        raise ValueError("need at least one study to pool") from None
    for m in it:
        acc = acc + m
    return acc


def stacked_gram(studies: Sequence[Study]) -> tuple[np.ndarray, np.ndarray]:
    """Pooled ``(X'X / N, X'y / N)`` over all rows of all studies."""
    if not studies:
        raise ValueError("stacked_gram needs at least one study")
    p = studies[0].p
    for s in studies:
        if s.p != p:
            raise ValueError(f"study {s.id!r} has p={s.p}, expected {p}")
    m = pool([Moments.of(s.X, s.y) for s in studies])
    return m.gram, m.cross
