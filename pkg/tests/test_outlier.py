import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from gmotelab.errors import DimensionMismatch, InsufficientSampleSize, InvalidArgument
from gmotelab.gmm import GaussianComponent, GmmModel
from gmotelab.outlier import (
    OutlierPolicy,
    component_tail_prob,
    detect_outliers,
    is_inlier,
    tail_probabilities,
)


def unit_model(m=2):
    return GmmModel.from_parameters([1.0], [np.zeros(m)], [np.eye(m)])


def far_pair():
    return GmmModel.from_parameters([0.5, 0.5], [[0.0, 0.0], [100.0, 0.0]], [np.eye(2), np.eye(2)])


def test_policy_validation():
    with pytest.raises(InvalidArgument):
        OutlierPolicy(alpha=1.0)
    with pytest.raises(InvalidArgument):
        OutlierPolicy(aggregate="mean")
    with pytest.raises(InvalidArgument):
        OutlierPolicy(statistic="t")


def test_component_tail_examples():
    comp = GaussianComponent.from_moments(1.0, np.zeros(2), np.eye(2))
    assert component_tail_prob(np.zeros(2), comp) == 1.0
    x = np.array([np.sqrt(5.991), 0.0])
    assert component_tail_prob(x, comp) == pytest.approx(0.05, abs=1e-4)
    f = component_tail_prob(x, comp, "hotelling_f", 10**6)
    assert f == pytest.approx(component_tail_prob(x, comp), abs=1e-3)


def test_hotelling_matches_scaled_f():
    comp = GaussianComponent.from_moments(1.0, np.zeros(3), np.eye(3))
    x = np.array([1.0, 2.0, 0.5])
    d2, n, m = 5.25, 30, 3
    expect = stats.f.sf(d2 * (n - m) / (m * (n - 1)), m, n - m)
    assert component_tail_prob(x, comp, "hotelling_f", n) == pytest.approx(expect, rel=1e-9)
    with pytest.raises(InsufficientSampleSize):
        component_tail_prob(x, comp, "hotelling_f", 4)


def test_alpha_zero_flags_nothing(rng):
    X = 50 * rng.standard_normal((200, 2))
    assert detect_outliers(X, unit_model(), OutlierPolicy(alpha=0.0)).n_flagged == 0
    assert is_inlier(np.array([1e6, 1e6]), unit_model(), OutlierPolicy(alpha=0.0))


def test_calibration_with_true_parameters():
    X = np.random.default_rng(5).standard_normal((20_000, 2))
    frac = detect_outliers(X, unit_model()).flags.mean()
    assert 0.04 <= frac <= 0.06


def test_max_aggregation_is_local():
    m = far_pair()
    rep = detect_outliers(np.array([[0.0, 0.0]]), m)
    assert rep.per_component[0, 1] < 1e-100
    assert not rep.flags[0]
    strict = detect_outliers(np.array([[0.0, 0.0]]), m, OutlierPolicy(aggregate="min_over_components"))
    assert strict.flags[0]


def test_is_inlier_examples():
    m = far_pair()
    assert is_inlier(np.array([100.0, 0.0]), m)
    assert not is_inlier(np.array([50.0, 10.0]), m)
    with pytest.raises(DimensionMismatch):
        is_inlier(np.zeros(3), m)
    with pytest.raises(DimensionMismatch):
        detect_outliers(np.zeros((2, 3)), m)


def test_report_consistency(rng):
    X = 3 * rng.standard_normal((300, 2))
    rep = detect_outliers(X, far_pair(), OutlierPolicy(alpha=0.1))
    assert rep.per_component.shape == (300, 2)
    np.testing.assert_array_equal(rep.flags, rep.aggregate < 0.1)
    assert np.all((rep.per_component >= 0) & (rep.per_component <= 1))


def test_flags_match_quantile_oracle():
    r = np.random.default_rng(9)
    model = GmmModel.from_parameters([0.4, 0.6], [[0.0, 0.0], [3.0, 1.0]],
                                     [np.array([[1.0, 0.3], [0.3, 0.5]]), np.diag([2.0, 0.7])])
    X = r.uniform(-6, 9, size=(1000, 2))
    q = stats.chi2.ppf(0.95, 2)
    d2 = np.column_stack([
        np.einsum("ij,jk,ik->i", X - c.mean, np.linalg.inv(c.covariance), X - c.mean)
        for c in model.components])
    oracle = (d2 > q).all(axis=1)
    np.testing.assert_array_equal(detect_outliers(X, model).flags, oracle)


@given(st.integers(0, 2**31), st.floats(0.1, 5.0))
def test_radial_monotone(seed, scale):
    r = np.random.default_rng(seed)
    A = r.standard_normal((3, 3)) + 2 * np.eye(3)
    comp = GaussianComponent.from_moments(1.0, r.standard_normal(3), A @ A.T)
    u = r.standard_normal(3)
    ts = np.linspace(0, 10, 50) * scale
    p = component_tail_prob(comp.mean + ts[:, None] * u, comp)
    assert np.all(np.diff(p) <= 1e-15)


@given(st.integers(0, 2**31))
def test_affine_invariance_of_flags(seed):
    r = np.random.default_rng(seed)
    X = 2.5 * r.standard_normal((60, 2))
    model = GmmModel.from_parameters([0.5, 0.5], [[0.0, 0.0], [2.0, 2.0]], [np.eye(2), np.diag([2.0, 0.5])])
    A = r.standard_normal((2, 2)) + 2 * np.eye(2)
    b = r.standard_normal(2)
    moved = GmmModel.from_parameters(model.weights, model.means @ A.T + b,
                                     [A @ S @ A.T for S in model.covariances])
    p0 = tail_probabilities(X, model)
    p1 = tail_probabilities(X @ A.T + b, moved)
    np.testing.assert_allclose(p0, p1, atol=1e-8)
    safe = np.abs(p0.max(axis=1) - 0.05) > 1e-6
    f0 = detect_outliers(X, model).flags
    f1 = detect_outliers(X @ A.T + b, moved).flags
    np.testing.assert_array_equal(f0[safe], f1[safe])
