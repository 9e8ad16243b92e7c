import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from gmotelab.errors import EmptyData, TooManyComponents
from gmotelab.gmm import (
    EmConfig,
    GmmModel,
    bic,
    default_c_range,
    em_fit,
    gmm_loglik,
    gmm_sample,
    param_count,
    select_by_bic,
)
from gmotelab.numcore import RngStream


def two_blobs(seed, n=400, sep=10.0):
    r = np.random.default_rng(seed)
    return np.vstack([r.standard_normal((n // 2, 2)), sep + r.standard_normal((n - n // 2, 2))])


def test_param_count():
    assert param_count(1, 1) == 2
    assert param_count(2, 3) == 1 + 6 + 12
    assert default_c_range(500, 2) == range(1, 10)
    assert default_c_range(10, 5) == range(1, 2)
    assert default_c_range(2, 7) == range(1, 2)


def test_single_component_closed_form(rng):
    X = rng.standard_normal((80, 3)) @ np.array([[2, 0, 0], [0.5, 1, 0], [0, 0.3, 0.2]])
    m = em_fit(X, 1, rng=0)
    mu = X.mean(axis=0)
    S = np.cov(X, rowvar=False, bias=True)
    np.testing.assert_allclose(m.means[0], mu, atol=1e-10)
    np.testing.assert_allclose(m.covariances[0], S, atol=1e-10)
    ll = stats.multivariate_normal(mu, S).logpdf(X).sum()
    assert m.log_likelihood == pytest.approx(ll, abs=1e-8)
    assert m.weights[0] == 1.0


def test_recovers_two_centers():
    m = em_fit(two_blobs(0), 2, rng=1)
    centers = sorted(m.means.tolist())
    assert np.linalg.norm(np.array(centers[0]) - [0, 0]) < 0.3
    assert np.linalg.norm(np.array(centers[1]) - [10, 10]) < 0.3


def test_degenerate_input_completes():
    X = np.array([[0.0, 1.0], [1.0, 0.0], [2.0, 2.0]])
    m = em_fit(X, 2, rng=0)
    assert m.n_components == 2
    assert np.isfinite(m.log_likelihood)


def test_errors():
    with pytest.raises(EmptyData):
        em_fit(np.empty((0, 2)), 1)
    with pytest.raises(TooManyComponents):
        em_fit(np.zeros((3, 2)), 4)


@given(st.integers(0, 2**31), st.integers(1, 3), st.integers(1, 4))
def test_em_trace_monotone_and_simplex(seed, C, M):
    r = np.random.default_rng(seed)
    N = int(r.integers(max(C, 5), 120))
    X = r.standard_normal((N, M)) + r.integers(0, 3, size=(N, 1)) * 4
    m = em_fit(X, C, EmConfig(n_restarts=2), rng=seed)
    assert np.all(np.diff(m.trace) >= -1e-8)
    assert abs(m.weights.sum() - 1.0) < 1e-12
    assert m.dim == M


def test_loglik_examples(rng):
    m = GmmModel.from_parameters([1.0], [[0.0, 0.0]], [np.eye(2)])
    assert gmm_loglik(m, np.zeros((1, 2))) == pytest.approx(-math.log(2 * math.pi))
    X = rng.standard_normal((30, 2))
    fit = em_fit(X, 2, rng=3)
    direct = sum(math.log(sum(c.weight * stats.multivariate_normal(c.mean, c.covariance).pdf(x)
                              for c in fit.components)) for x in X)
    assert gmm_loglik(fit, X) == pytest.approx(direct, abs=1e-9)
    assert gmm_loglik(fit, np.vstack([X, X])) == pytest.approx(2 * gmm_loglik(fit, X), rel=1e-12)
    assert gmm_loglik(fit, X) == pytest.approx(fit.log_likelihood, abs=1e-8)


def test_loglik_permutation_invariance(rng):
    X = rng.standard_normal((40, 2))
    fit = em_fit(X, 3, rng=2)
    flipped = GmmModel(fit.components[::-1], fit.dim)
    assert gmm_loglik(flipped, X) == pytest.approx(gmm_loglik(fit, X), rel=1e-14)
    assert gmm_loglik(fit, X[::-1]) == pytest.approx(gmm_loglik(fit, X), rel=1e-14)


def test_bic_formula():
    m = em_fit(np.random.default_rng(0).standard_normal((100, 1)), 1)
    assert bic(m, 100) == pytest.approx(-2 * m.log_likelihood + 2 * math.log(100))
    assert m.bic == pytest.approx(bic(m, 100))
    bigger = GmmModel(m.components * 2, 1, m.log_likelihood)
    assert bic(bigger, 100) > bic(m, 100)


def test_select_singleton_range():
    X = two_blobs(1, 100)
    assert select_by_bic(X, [3], rng=0).n_components == 3


def test_select_minimizes_bic():
    X = two_blobs(2, 200)
    best, cands = select_by_bic(X, range(1, 5), rng=0, return_candidates=True)
    assert all(best.bic <= c.bic for c in cands.values())
    assert best.n_components == 2


def test_bic_prefers_one_gaussian_usually():
    wins = 0
    for seed in range(20):
        X = np.random.default_rng(100 + seed).standard_normal((500, 2))
        a = em_fit(X, 1, rng=seed)
        b = em_fit(X, 3, rng=seed)
        wins += a.bic < b.bic
    assert wins >= 18


def test_sample_shapes_and_frequencies():
    m = GmmModel.from_parameters([0.3, 0.7], [[0.0, 0.0], [50.0, 50.0]], [np.eye(2), np.eye(2)])
    assert gmm_sample(m, 0, RngStream(0)).shape == (0, 2)
    X = gmm_sample(m, 100_000, RngStream(1, "freq"))
    assert abs((X[:, 0] < 25).mean() - 0.3) < 0.01


def test_sample_single_component_matches_mvn():
    from gmotelab.numcore import mvn_sample
    m = GmmModel.from_parameters([1.0], [[1.0, 2.0]], [np.diag([2.0, 0.5])])
    a = gmm_sample(m, 7, RngStream(4, "s"))
    r = RngStream(4, "s")
    r.choice(1, size=7, p=[1.0])
    b = mvn_sample(m.means[0], m.components[0].cholesky, r, 7)
    np.testing.assert_allclose(a, b)
