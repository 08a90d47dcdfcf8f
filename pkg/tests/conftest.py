import numpy as np
import pytest

from translasso.core import Study, TaskData


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def make_task(rng, p=10, n0=40, nk=(30, 30), beta=None, contrasts=None, noise=0.5):
    """Small Gaussian task; ``contrasts[k]`` is added to beta for auxiliary k+1."""
    beta = np.r_[1.0, -0.5, np.zeros(p - 2)] if beta is None else beta
    contrasts = contrasts or [np.zeros(p) for _ in nk]
    X0 = rng.standard_normal((n0, p))
    primary = Study("p", X0, X0 @ beta + noise * rng.standard_normal(n0), "primary")
    aux = []
    for k, (n, d) in enumerate(zip(nk, contrasts), start=1):
        X = rng.standard_normal((n, p))
        aux.append(Study(f"a{k}", X, X @ (beta + d) + noise * rng.standard_normal(n)))
    return TaskData(primary, tuple(aux))


@pytest.fixture
def small_task(rng):
    return make_task(rng)
