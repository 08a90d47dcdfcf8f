"""Ranking auxiliary studies by the sparsity of their estimated contrasts."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Study, TaskData


@dataclass(frozen=True)
class SparsityReport:
    delta_hat: np.ndarray  # (K, p)
    screened: tuple[np.ndarray, ...]
    index: np.ndarray  # (K,)
    t_star: int
    alpha: float | None = None


@dataclass(frozen=True)
class CandidateSets:
    sets: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def __getitem__(self, l):
        return self.sets[l]


def marginal_stats(primary_half: Study, aux: Study) -> np.ndarray:
    """Difference of empirical cross-moments ``X_k'y_k/n_k - X_0'y_0/n_0``."""
    if primary_half.p != aux.p:
        raise ValueError(f"dimension mismatch: {primary_half.p} vs {aux.p}")
    return aux.X.T @ aux.y / aux.n - primary_half.X.T @ primary_half.y / primary_half.n


def sure_screen(delta_hat, t_star: int) -> np.ndarray:
    """Indices of the ``t_star`` largest ``|delta_hat|``, lowest index first on ties.

    Returned sorted ascending.
    """
    if t_star < 1:
        raise ValueError("t_star must be >= 1")
    a = np.abs(np.asarray(delta_hat, dtype=float))
    if t_star >= a.size:
        return np.arange(a.size)
    order = np.argsort(-a, kind="stable")
    return np.sort(order[:t_star])


def sparsity_index(delta_hat, screened) -> float:
    d = np.asarray(delta_hat, dtype=float)[np.asarray(screened, dtype=int)]
    return float(d @ d)


def default_t_star(n: int, alpha: float = 0.75) -> int:
    if not 0 <= alpha < 1:
        raise ValueError("screening exponent must lie in [0, 1)")
    return max(1, int(np.floor(n ** alpha)))


def sparsity_report(primary_half: Study, auxiliaries, t_star: int,
                    alpha: float | None = None) -> SparsityReport:
    aux = list(auxiliaries)
    p = primary_half.p
    delta = np.array([marginal_stats(primary_half, s) for s in aux]).reshape(len(aux), p)
    screened = tuple(sure_screen(d, t_star) for d in delta)
    index = np.array([sparsity_index(d, t) for d, t in zip(delta, screened)])
    return SparsityReport(delta, screened, index, int(min(t_star, p)), alpha)


def build_candidate_sets(index) -> CandidateSets:
    """Nested sets of the ``l`` smallest indices (1-based), ``l = 0..K``."""
    index = np.asarray(index, dtype=float)
    order = np.argsort(index, kind="stable") + 1
    return CandidateSets(tuple(tuple(sorted(int(k) for k in order[:l]))
                               for l in range(index.size + 1)))


def merge_candidate_sets(families) -> CandidateSets:
    """Concatenate families from several screening sizes, dropping repeats."""
    seen, out = set(), []
    for fam in families:
        for G in fam:
            if G not in seen:
                seen.add(G)
                out.append(G)
    return CandidateSets(tuple(out))


def detect(task: TaskData, half_rows, t_star) -> tuple[list[SparsityReport], CandidateSets]:
    """Reports and candidate sets for one or several screening sizes."""
    half = task.primary.rows(half_rows)
    t_values = [t_star] if np.isscalar(t_star) else list(t_star)
    reports = [sparsity_report(half, task.auxiliaries, int(t)) for t in t_values]
    return reports, merge_candidate_sets(build_candidate_sets(r.index) for r in reports)


def rank_consistent(index, informative) -> bool:
    """True when every informative study ranks no higher than every other one."""
    index = np.asarray(index, dtype=float)
    A = np.zeros(index.size, dtype=bool)
    A[[k - 1 for k in informative]] = True
    if A.all() or not A.any():
        return True
    return bool(index[A].max() <= index[~A].min())
