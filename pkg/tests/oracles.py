"""Independent reference solvers used only by the tests."""
import itertools

import numpy as np


def lasso_by_sign_patterns(G, c, lam, tol=1e-10):
    """Exact minimizer of 1/2 b'Gb - b'c + lam|b|_1 for small p by enumeration.

    For every support S and sign vector s the stationarity equations
    G_SS b_S = c_S - lam s are solved; the candidate is kept when the signs
    agree and the off-support subgradient bound holds. Among valid candidates
    the one with the smallest objective is returned.
    """
    p = c.size
    best, best_obj = np.zeros(p), np.inf
    for r in range(p + 1):
        for S in itertools.combinations(range(p), r):
            S = list(S)
            for signs in itertools.product((-1.0, 1.0), repeat=r):
                b = np.zeros(p)
                if r:
                    s = np.array(signs)
                    try:
                        bS = np.linalg.solve(G[np.ix_(S, S)], c[S] - lam * s)
                    except np.linalg.LinAlgError:
                        continue
                    if np.any(bS * s <= 0):
                        continue
                    b[S] = bS
                grad = c - G @ b
                off = np.setdiff1d(np.arange(p), S)
                if off.size and np.max(np.abs(grad[off])) > lam + tol:
                    continue
                obj = 0.5 * b @ G @ b - b @ c + lam * np.abs(b).sum()
                if obj < best_obj:
                    best, best_obj = b, obj
    return best


def dirichlet_search(objective, dim, n_points, rng):
    pts = rng.dirichlet(np.ones(dim), size=n_points)
    vals = np.array([objective(t) for t in pts])
    i = int(np.argmin(vals))
    return pts[i], vals[i]
