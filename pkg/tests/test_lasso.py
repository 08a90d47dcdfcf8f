import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from translasso.core import Moments
from translasso.lasso import (LassoConfig, cv_lambda, fit_lasso, fit_lasso_quadratic, kkt_violation,
                              lambda_grid, lambda_max, soft_threshold)

from .oracles import lasso_by_sign_patterns


@pytest.mark.parametrize("z, t, expected", [(0.3, 0.5, 0.0), (1.0, 0.4, 0.6), (-1.0, 0.4, -0.6)])
def test_soft_threshold(z, t, expected):
    assert soft_threshold(z, t) == pytest.approx(expected, abs=1e-15)


def test_soft_threshold_rejects_negative():
    with pytest.raises(ValueError):
        soft_threshold(1.0, -0.1)


def test_config_validation():
    with pytest.raises(ValueError):
        LassoConfig(-1.0)
    with pytest.raises(ValueError):
        LassoConfig(1.0, tol=0)
    with pytest.raises(ValueError):
        LassoConfig(1.0, max_iter=0)


def test_null_model_above_lambda_max(rng):
    X, y = rng.standard_normal((30, 6)), rng.standard_normal(30)
    fit = fit_lasso(X, y, lambda_max(X, y) * 1.0001)
    assert fit.active_set.size == 0
    np.testing.assert_array_equal(fit.coef, np.zeros(6))


def test_orthonormal_design_is_soft_threshold(rng):
    n = 20
    Q, _ = np.linalg.qr(rng.standard_normal((n, 2)))
    X = np.sqrt(n) * Q
    y = X @ np.array([1.0, 0.2])
    np.testing.assert_allclose(X.T @ X / n, np.eye(2), atol=1e-12)
    fit = fit_lasso(X, y, 0.5)
    np.testing.assert_allclose(fit.coef, [0.5, 0.0], atol=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_matches_sign_pattern_oracle(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((40, 5))
    y = X @ np.array([1.0, 0.0, -0.5, 0.0, 0.1]) + rng.standard_normal(40)
    fit = fit_lasso(X, y, 0.1)
    m = Moments.of(X, y)
    ref = lasso_by_sign_patterns(m.gram, m.cross, 0.1)
    np.testing.assert_allclose(fit.coef, ref, atol=1e-6)
    assert kkt_violation(m.gram, m.cross, fit.coef, 0.1) < 1e-6


def test_quadratic_zero_linear_term(rng):
    A = rng.standard_normal((6, 4))
    fit = fit_lasso_quadratic(A.T @ A / 6, np.zeros(4), 0.2)
    np.testing.assert_array_equal(fit.coef, np.zeros(4))


def test_quadratic_diagonal_case():
    fit = fit_lasso_quadratic(np.eye(2), np.array([0.9, 0.1]), 0.3)
    np.testing.assert_allclose(fit.coef, [0.6, 0.0], atol=1e-12)


def test_quadratic_equals_least_squares_form(rng):
    X, y = rng.standard_normal((50, 8)), rng.standard_normal(50)
    a = fit_lasso(X, y, LassoConfig(0.05, tol=1e-12))
    b = fit_lasso_quadratic(X.T @ X / 50, X.T @ y / 50, LassoConfig(0.05, tol=1e-12))
    np.testing.assert_allclose(a.coef, b.coef, atol=1e-8)
    # objectives differ by the constant y'y/2n
    assert a.objective - b.objective == pytest.approx(y @ y / 100, rel=1e-10)


def test_quadratic_zero_diagonal_raises():
    with pytest.raises(ValueError, match="coordinate 1"):
        fit_lasso_quadratic(np.diag([1.0, 0.0]), np.ones(2), 0.1)


def test_zero_column_gets_zero_coefficient(rng):
    X = rng.standard_normal((20, 3))
    X[:, 1] = 0
    fit = fit_lasso(X, X[:, 0] + 0.1 * rng.standard_normal(20), 0.01)
    assert fit.coef[1] == 0


def test_nonconvergence_is_flagged(rng):
    X, y = rng.standard_normal((10, 30)), rng.standard_normal(10)
    fit = fit_lasso(X, y, LassoConfig(1e-4, max_iter=3))
    assert not fit.converged
    assert fit.iterations == 3


def test_objective_reported_matches_direct(rng):
    X, y = rng.standard_normal((25, 6)), rng.standard_normal(25)
    fit = fit_lasso(X, y, 0.1)
    r = y - X @ fit.coef
    assert fit.objective == pytest.approx(r @ r / 50 + 0.1 * np.abs(fit.coef).sum(), rel=1e-12)


def test_warm_start_reaches_same_solution(rng):
    X, y = rng.standard_normal((40, 10)), rng.standard_normal(40)
    cold = fit_lasso(X, y, LassoConfig(0.05, tol=1e-12))
    warm = fit_lasso(X, y, LassoConfig(0.05, tol=1e-12, warm_start=rng.standard_normal(10)))
    np.testing.assert_allclose(cold.coef, warm.coef, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(5, 40), st.integers(1, 12), st.floats(0.001, 1.0))
def test_objective_monotone_and_kkt(seed, n, p, lam):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = X[:, 0] + rng.standard_normal(n)
    cfg = LassoConfig(lam)
    fit = fit_lasso(X, y, cfg)
    h = fit.history
    assert np.all(np.diff(h) <= 1e-12 * (1 + np.abs(h[:-1])))
    if fit.converged:
        m = Moments.of(X, y)
        assert kkt_violation(m.gram, m.cross, fit.coef, lam) <= 10 * cfg.tol * max(1.0, np.diag(m.gram).max())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 10.0))
def test_scaling_equivariance(seed, c):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((30, 6))
    y = X @ rng.standard_normal(6) + rng.standard_normal(30)
    a = fit_lasso(X, y, LassoConfig(0.1, tol=1e-14))
    b = fit_lasso(X, c * y, LassoConfig(0.1 * c, tol=1e-14))
    np.testing.assert_allclose(b.coef, c * a.coef, rtol=1e-9, atol=1e-9 * c)


def test_cv_single_grid_point(rng):
    X, y = rng.standard_normal((20, 3)), rng.standard_normal(20)
    assert cv_lambda(X, y, folds=4, grid=[0.3]) == 0.3


def test_cv_rejects_bad_inputs(rng):
    X, y = rng.standard_normal((5, 3)), rng.standard_normal(5)
    with pytest.raises(ValueError):
        cv_lambda(X, y, folds=8, grid=[0.2, 0.1])
    with pytest.raises(ValueError):
        cv_lambda(X, y, folds=2, grid=[0.1, 0.2])


def test_cv_noise_free_picks_smallest(rng):
    X = rng.standard_normal((60, 5))
    y = X @ np.array([1.0, -1.0, 0.5, 0.0, 2.0])
    grid = lambda_grid(X, y, n_lambda=10)
    assert cv_lambda(X, y, folds=5, grid=grid) == grid[-1]


@pytest.mark.slow
def test_cv_pure_noise_prefers_heavy_penalty():
    hits = 0
    for rep in range(100):
        rng = np.random.default_rng(1000 + rep)
        X, y = rng.standard_normal((50, 20)), rng.standard_normal(50)
        grid = lambda_grid(X, y, n_lambda=10, ratio=0.01)
        lam = cv_lambda(X, y, folds=5, grid=grid, seed=rep)
        hits += lam >= grid[4]
    assert hits >= 80


def test_cv_deterministic(rng):
    X, y = rng.standard_normal((40, 8)), rng.standard_normal(40)
    assert cv_lambda(X, y, folds=4, seed=3) == cv_lambda(X, y, folds=4, seed=3)
