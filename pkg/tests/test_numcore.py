import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from gmotelab.errors import DimensionMismatch, InvalidArgument, NotPositiveDefinite
from gmotelab.numcore import (
    RIDGE_SCHEDULE,
    RngStream,
    betainc_reg,
    chi_sq_sf,
    cholesky,
    f_sf,
    gamma_q,
    mahalanobis_sq,
    mvn_from_standard,
    mvn_logpdf,
    mvn_sample,
)


def random_spd(rng, m, cond=10.0):
    q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    eig = np.exp(rng.uniform(0, math.log(cond), m))
    return (q * eig) @ q.T


# cholesky ------------------------------------------------------------------


def test_cholesky_identity():
    f = cholesky(np.eye(2))
    assert np.array_equal(f.lower, np.eye(2))
    assert f.log_determinant == 0.0
    assert f.ridge_applied == 0.0


def test_cholesky_diagonal():
    f = cholesky(np.diag([4.0, 9.0]))
    np.testing.assert_allclose(f.lower, np.diag([2.0, 3.0]))
    assert f.log_determinant == pytest.approx(math.log(36.0), abs=1e-14)


def test_cholesky_reconstructs():
    S = np.array([[2.0, 1.0], [1.0, 2.0]])
    np.testing.assert_allclose(cholesky(S).reconstruct(), S, atol=1e-12)


def test_cholesky_singular_gets_smallest_ridge():
    S = np.array([[1.0, 1.0], [1.0, 1.0]])
    f = cholesky(S)
    unit = np.trace(S) / 2
    assert f.ridge_applied == pytest.approx(RIDGE_SCHEDULE[1] * unit)
    assert np.all(np.diag(f.lower) > 0)
    np.testing.assert_allclose(f.reconstruct(), S + f.ridge_applied * np.eye(2), rtol=1e-8)


def test_cholesky_zero_matrix_is_ridged():
    f = cholesky(np.zeros((3, 3)))
    assert f.ridge_applied > 0


def test_cholesky_rejects_asymmetric():
    with pytest.raises(InvalidArgument):
        cholesky(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_cholesky_fails_beyond_max_ridge():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.diag([1.0, -5.0]))


@given(st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_cholesky_roundtrip(m, seed):
    rng = np.random.default_rng(seed)
    S = random_spd(rng, m, cond=1e3)
    f = cholesky(S)
    err = np.linalg.norm(f.reconstruct() - S - f.ridge_applied * np.eye(m)) / np.linalg.norm(S)
    assert err < 1e-8
    assert np.all(np.diag(f.lower) > 0)


# Mahalanobis / densities ----------------------------------------------------


def test_mahalanobis_examples():
    eye = cholesky(np.eye(2))
    assert mahalanobis_sq(np.array([1.0, 2.0]), np.array([1.0, 2.0]), eye) == 0.0
    assert mahalanobis_sq(np.array([3.0, 4.0]), np.zeros(2), eye) == pytest.approx(25.0)
    two = cholesky(2.0 * np.eye(2))
    assert mahalanobis_sq(np.array([2.0, 0.0]), np.zeros(2), two) == pytest.approx(2.0)


def test_mahalanobis_rows_and_dims():
    f = cholesky(np.eye(3))
    X = np.arange(12.0).reshape(4, 3)
    np.testing.assert_allclose(mahalanobis_sq(X, np.zeros(3), f), (X ** 2).sum(axis=1))
    with pytest.raises(DimensionMismatch):
        mahalanobis_sq(np.zeros(2), np.zeros(3), f)


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_mahalanobis_affine_equivariance(m, seed):
    rng = np.random.default_rng(seed)
    S = random_spd(rng, m)
    A = rng.standard_normal((m, m)) + 3 * np.eye(m)
    mu, x = rng.standard_normal(m), rng.standard_normal(m)
    d = mahalanobis_sq(x, mu, cholesky(S))
    d_t = mahalanobis_sq(A @ x, A @ mu, cholesky(A @ S @ A.T))
    assert d_t == pytest.approx(d, rel=1e-8, abs=1e-8)


def test_mvn_logpdf_examples():
    assert mvn_logpdf(np.zeros(1), np.zeros(1), cholesky(np.eye(1))) == pytest.approx(
        -0.5 * math.log(2 * math.pi))
    assert mvn_logpdf(np.ones(2), np.ones(2), cholesky(np.eye(2))) == pytest.approx(
        -math.log(2 * math.pi))


def test_mvn_logpdf_matches_scipy(rng):
    S = random_spd(rng, 3)
    mu = rng.standard_normal(3)
    X = rng.standard_normal((10, 3))
    np.testing.assert_allclose(mvn_logpdf(X, mu, cholesky(S)),
                               stats.multivariate_normal(mu, S).logpdf(X), rtol=1e-10)


def test_mvn_density_integrates_to_one():
    S = np.array([[1.0, 0.6], [0.6, 2.0]])
    f = cholesky(S)
    g = np.linspace(-9, 9, 361)
    xx, yy = np.meshgrid(g, g)
    pts = np.c_[xx.ravel(), yy.ravel()]
    dens = np.exp(mvn_logpdf(pts, np.zeros(2), f)).reshape(xx.shape)
    total = integrate.trapezoid(integrate.trapezoid(dens, g, axis=1), g)
    assert total == pytest.approx(1.0, abs=1e-3)
    one_d = np.exp(mvn_logpdf(g[:, None], np.zeros(1), cholesky(np.eye(1))))
    assert integrate.trapezoid(one_d, g) == pytest.approx(1.0, abs=1e-3)


# sampling -------------------------------------------------------------------


def test_mvn_zero_draw_returns_mean():
    mu = np.array([1.0, -2.0])
    np.testing.assert_array_equal(mvn_from_standard(mu, cholesky(np.eye(2) * 3), np.zeros(2)), mu)


def test_rng_stream_determinism():
    a = mvn_sample(np.zeros(2), cholesky(np.eye(2)), RngStream(7, "x"), 5)
    b = mvn_sample(np.zeros(2), cholesky(np.eye(2)), RngStream(7, "x"), 5)
    c = mvn_sample(np.zeros(2), cholesky(np.eye(2)), RngStream(7, "y"), 5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_rng_child_is_order_independent():
    root = RngStream(3, "root")
    first = root.child("a").random(4)
    root.random(100)
    np.testing.assert_array_equal(root.child("a").random(4), first)
    np.testing.assert_array_equal(RngStream(3, "root/a").random(4), first)


def test_mvn_sample_moments():
    S = np.array([[1.0, 0.3], [0.3, 0.5]])
    mu = np.array([2.0, -1.0])
    X = mvn_sample(mu, cholesky(S), RngStream(11, "moments"), 100_000)
    assert np.abs(X.mean(axis=0) - mu).max() < 0.02
    assert np.linalg.norm(np.cov(X, rowvar=False) - S) < 0.05


# tails ----------------------------------------------------------------------


def test_chi_sq_examples():
    assert chi_sq_sf(0.0, 3) == 1.0
    assert chi_sq_sf(5.991, 2) == pytest.approx(math.exp(-5.991 / 2), abs=1e-12)
    assert chi_sq_sf(5.991, 2) == pytest.approx(0.05, abs=1e-4)
    assert chi_sq_sf(3.841, 1) == pytest.approx(math.erfc(math.sqrt(3.841 / 2)), abs=1e-12)
    assert chi_sq_sf(3.841, 1) == pytest.approx(0.05, abs=1e-4)


def test_chi_sq_rejects_negative():
    with pytest.raises(InvalidArgument):
        chi_sq_sf(-1.0, 2)


@pytest.mark.parametrize("dof", [1, 2, 3, 5, 10, 19, 50])
def test_chi_sq_matches_reference(dof):
    x = np.linspace(0, 120, 500)
    np.testing.assert_allclose(chi_sq_sf(x, dof), stats.chi2.sf(x, dof), rtol=1e-9, atol=1e-14)


def test_f_examples():
    assert f_sf(0.0, 3, 4) == 1.0
    for d in (1, 2, 5, 7, 30):
        assert f_sf(1.0, d, d) == pytest.approx(0.5, abs=1e-10)


def test_f_matches_quadrature():
    for x in (0.3, 1.0, 2.5, 6.0):
        val, _ = integrate.quad(lambda t: stats.f.pdf(t, 3, 10), x, np.inf, epsabs=1e-12)
        assert f_sf(x, 3, 10) == pytest.approx(val, abs=1e-6)


@pytest.mark.parametrize("d1,d2", [(1, 1), (2, 9), (5, 3), (19, 200), (8, 50)])
def test_f_matches_reference(d1, d2):
    x = np.linspace(0, 40, 400)
    np.testing.assert_allclose(f_sf(x, d1, d2), stats.f.sf(x, d1, d2), rtol=1e-8, atol=1e-14)


def test_f_rejects_bad_arguments():
    with pytest.raises(InvalidArgument):
        f_sf(-0.5, 2, 3)
    with pytest.raises(InvalidArgument):
        f_sf(1.0, 0, 3)


@given(st.floats(0.1, 40), st.floats(0.0, 80))
def test_gamma_q_matches_scipy(a, x):
    from scipy.special import gammaincc
    assert float(gamma_q(a, x)) == pytest.approx(gammaincc(a, x), rel=1e-9, abs=1e-13)


@given(st.floats(0.2, 30), st.floats(0.2, 30), st.floats(0, 1))
def test_betainc_matches_scipy(a, b, x):
    from scipy.special import betainc
    assert float(betainc_reg(a, b, x)) == pytest.approx(betainc(a, b, x), rel=1e-8, abs=1e-12)


@given(st.integers(1, 30))
def test_tails_monotone_and_bounded(dof):
    x = np.linspace(0, 100, 1000)
    for p in (chi_sq_sf(x, dof), f_sf(x, dof, dof + 3)):
        assert np.all((p >= 0) & (p <= 1))
        assert np.all(np.diff(p) <= 0)
