import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from translasso.core import Study
from translasso.detect import (build_candidate_sets, default_t_star, marginal_stats, merge_candidate_sets,
                               rank_consistent, sparsity_index, sure_screen)
from translasso.pipeline import split_rows
from translasso.simharness import SimScenario, gen_task, run_rank_only


def test_marginal_stats_copy_is_zero(rng):
    s = Study("a", rng.standard_normal((12, 5)), rng.standard_normal(12))
    np.testing.assert_array_equal(marginal_stats(s, Study("b", s.X.copy(), s.y.copy())), np.zeros(5))


def test_marginal_stats_formula(rng):
    a = Study("a", rng.standard_normal((12, 5)), rng.standard_normal(12))
    b = Study("b", rng.standard_normal((7, 5)), rng.standard_normal(7))
    expected = sum(b.X[i] * b.y[i] for i in range(7)) / 7 - sum(a.X[i] * a.y[i] for i in range(12)) / 12
    np.testing.assert_allclose(marginal_stats(a, b), expected, atol=1e-14)


def test_marginal_stats_single_row(rng):
    a = Study("a", rng.standard_normal((12, 3)), rng.standard_normal(12))
    b = Study("b", rng.standard_normal((1, 3)), rng.standard_normal(1))
    d = marginal_stats(a, b)
    np.testing.assert_allclose(d, b.X[0] * b.y[0] - a.X.T @ a.y / 12)
    assert np.all(np.isfinite(d))


def test_marginal_stats_dimension_mismatch(rng):
    with pytest.raises(ValueError):
        marginal_stats(Study("a", np.ones((2, 2)), np.ones(2)), Study("b", np.ones((2, 3)), np.ones(2)))


def test_marginal_stats_expectation_fixed_support():
    sc = SimScenario(p=60, n0=100, nk=100, K=1, s=5, h=4, n_informative=1, coef_config="i")
    from translasso.simharness import gen_coefficients
    truth = gen_coefficients(sc, np.random.default_rng(3))
    H = np.flatnonzero(truth.W[0] != truth.beta)
    rng = np.random.default_rng(4)
    acc = np.zeros(sc.p)
    for _ in range(500):
        X0 = rng.standard_normal((sc.n0, sc.p))
        X1 = rng.standard_normal((sc.nk, sc.p))
        p0 = Study("p", X0, X0 @ truth.beta + rng.standard_normal(sc.n0))
        a1 = Study("a", X1, X1 @ truth.W[0] + rng.standard_normal(sc.nk))
        acc += marginal_stats(p0, a1)
    mean = acc / 500
    expected = np.zeros(sc.p)
    expected[H] = -0.3
    assert np.max(np.abs(mean - expected)) < 0.02


def test_sure_screen_examples():
    np.testing.assert_array_equal(sure_screen([3, 1, 2], 2), [0, 2])
    np.testing.assert_array_equal(sure_screen([3, 1, 2], 5), [0, 1, 2])
    np.testing.assert_array_equal(sure_screen([2, 2, 1], 1), [0])
    np.testing.assert_array_equal(sure_screen([-5, 1, 2], 1), [0])


def test_sure_screen_rejects_zero():
    with pytest.raises(ValueError):
        sure_screen([1.0], 0)


def test_sparsity_index_examples():
    assert sparsity_index(np.zeros(4), [0, 1]) == 0
    assert sparsity_index([3, -1, 2], [0, 2]) == 13


def test_candidate_sets_example():
    sets = build_candidate_sets([5, 1, 3])
    assert sets.sets == ((), (2,), (2, 3), (1, 2, 3))


def test_candidate_sets_empty():
    assert build_candidate_sets([]).sets == ((),)


def test_candidate_ties_lowest_index_first():
    assert build_candidate_sets([1.0, 1.0, 0.5])[2] == (1, 3)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(0, 15), elements=st.floats(0, 1e6)))
def test_candidate_sets_nested(index):
    sets = build_candidate_sets(index)
    K = index.size
    assert len(sets) == K + 1
    assert sets[0] == ()
    assert sets[K] == tuple(range(1, K + 1))
    for l in range(K):
        assert len(sets[l]) == l
        assert set(sets[l]) < set(sets[l + 1])


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(3, 20)), elements=st.floats(-10, 10)),
       st.floats(0.01, 100), st.integers(1, 5))
def test_rank_invariant_to_common_scaling(delta, c, t):
    # powers of two keep the scaled values exactly proportional
    c = 2.0 ** np.round(np.log2(c))
    idx = [sparsity_index(d, sure_screen(d, t)) for d in delta]
    idx_c = [sparsity_index(c * d, sure_screen(c * d, t)) for d in delta]
    assert build_candidate_sets(idx) == build_candidate_sets(idx_c)


def test_merge_candidate_sets_drops_repeats():
    merged = merge_candidate_sets([build_candidate_sets([2, 1]), build_candidate_sets([1, 2])])
    assert merged.sets == ((), (2,), (1, 2), (1,))


def test_default_t_star():
    assert default_t_star(150) == int(np.floor(150 ** 0.75)) == 42
    with pytest.raises(ValueError):
        default_t_star(150, 1.0)


def test_rank_consistent():
    assert rank_consistent([0.1, 0.2, 5.0], (1, 2))
    assert not rank_consistent([0.1, 6.0, 5.0], (1, 2))
    assert rank_consistent([3.0, 1.0], ())
    assert rank_consistent([3.0, 1.0], (1, 2))


@pytest.mark.slow
def test_rank_identity_config_ii_h2():
    sc = SimScenario(coef_config="ii", h=2, n_informative=4, seed=9000)
    assert run_rank_only(sc, reps=100) >= 0.95


@pytest.mark.slow
def test_screening_contains_strong_contrast_support():
    # a 0.3 shift is about 1.25 noise sd of the marginal statistic at these
    # sample sizes; a shift of 1.0 is a strong signal that screening keeps
    sc = SimScenario(coef_config="i", h=2, n_informative=1, K=1, contrast_value=1.0, seed=300)
    hits = 0
    for rep in range(100):
        task, truth = gen_task(sc, sc.seed + rep)
        I, _ = split_rows(task.n0, rep)
        d = marginal_stats(task.primary.rows(I), task.auxiliaries[0])
        H = set(np.flatnonzero(truth.W[0] != truth.beta))
        hits += H <= set(sure_screen(d, default_t_star(task.n0)).tolist())
    assert hits >= 90
