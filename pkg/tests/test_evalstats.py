import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from gmotelab.errors import ClassTooSmall, EmptyCounts, EmptyData, InvalidArgument, LengthMismatch, SingleClass
from gmotelab.evalstats import (
    ConfusionCounts,
    _exact_upper_tail,
    _normal_tail,
    apply,
    auc,
    confusion,
    evaluate,
    metrics_from_counts,
    normalize_01,
    rank_methods,
    significance_stars,
    stratified_kfold,
    wilcoxon_signed_rank,
)

# metrics ------------------------------------------------------------------------


def test_confusion_examples():
    y = np.array([1, 1, 1, 0, 0, 0, 0])
    c = confusion(y, y)
    assert c.fp == 0 and c.fn == 0 and c.tp == 3 and c.tn == 4
    c = confusion(y, np.zeros(7, int))
    assert (c.tp, c.fn, c.total) == (0, 3, 7)
    with pytest.raises(LengthMismatch):
        confusion(y, y[:3])


def test_confusion_matches_recount():
    r = np.random.default_rng(0)
    for _ in range(1000):
        n = int(r.integers(1, 40))
        t, p = r.integers(0, 2, n), r.integers(0, 2, n)
        c = confusion(t, p)
        assert c.tp == sum(1 for a, b in zip(t, p) if a == 1 and b == 1)
        assert c.fp == sum(1 for a, b in zip(t, p) if a == 0 and b == 1)
        assert c.fn == sum(1 for a, b in zip(t, p) if a == 1 and b == 0)
        assert c.total == n


def test_metric_examples():
    m = metrics_from_counts(ConfusionCounts(tp=5, fp=0, fn=0, tn=5))
    assert (m.accuracy, m.recall, m.precision, m.f1, m.gmean) == (1, 1, 1, 1, 1)
    m = metrics_from_counts(ConfusionCounts(tp=0, fp=0, fn=3, tn=7))
    assert m.precision is None and m.f1 is None
    assert m.accuracy == pytest.approx(0.7) and m.recall == 0 and m.gmean == 0
    m = metrics_from_counts(ConfusionCounts(tp=1, fp=1, fn=1, tn=1))
    for v in (m.accuracy, m.precision, m.recall, m.f1, m.gmean):
        assert v == pytest.approx(0.5, abs=1e-15)


def test_metric_errors():
    with pytest.raises(EmptyCounts):
        metrics_from_counts(ConfusionCounts(0, 0, 0, 0))
    with pytest.raises(InvalidArgument):
        metrics_from_counts(ConfusionCounts(0, 2, 0, 3))


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_metric_ranges_and_formulae(tp, fp, fn, tn):
    if tp + fn == 0:
        return
    c = ConfusionCounts(tp, fp, fn, tn)
    m = metrics_from_counts(c)
    for v in m.as_dict().values():
        assert v is None or 0 <= v <= 1
    assert (m.precision is None) == (tp + fp == 0)
    assert (m.f1 is None) == (tp + fp == 0)
    spec = tn / (tn + fp) if tn + fp else 0.0
    assert m.gmean == pytest.approx(math.sqrt(m.recall * spec))
    if m.f1 is not None and m.precision + m.recall > 0:
        assert m.f1 == pytest.approx(2 * m.precision * m.recall / (m.precision + m.recall))


# AUC ----------------------------------------------------------------------------


def test_auc_examples():
    lab = np.array([0, 0, 1, 1])
    assert auc([0.1, 0.2, 0.8, 0.9], lab) == 1.0
    assert auc([0.9, 0.8, 0.2, 0.1], lab) == 0.0
    assert auc([0.5] * 4, lab) == 0.5
    with pytest.raises(SingleClass):
        auc([0.1, 0.2], [1, 1])
    with pytest.raises(LengthMismatch):
        auc([0.1, 0.2, 0.3], [0, 1])


@given(st.integers(0, 2**31))
def test_auc_matches_pairwise_count(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(2, 40))
    lab = r.integers(0, 2, n)
    lab[:2] = (0, 1)
    s = r.integers(0, 6, n).astype(float)  # plenty of ties
    pos, neg = s[lab == 1], s[lab == 0]
    brute = ((pos[:, None] > neg[None]).sum() + 0.5 * (pos[:, None] == neg[None]).sum()) / (pos.size * neg.size)
    assert auc(s, lab) == pytest.approx(brute, abs=1e-12)


@given(st.integers(0, 2**31))
def test_auc_reflection(seed):
    r = np.random.default_rng(seed)
    lab = np.r_[0, 1, r.integers(0, 2, 30)]
    s = r.permutation(lab.size).astype(float)
    assert auc(s, lab) + auc(-s, lab) == 1.0


def test_evaluate_bundles_auc():
    y = np.array([0, 0, 1, 1])
    m = evaluate(y, np.array([0, 1, 1, 1]), np.array([0.1, 0.6, 0.7, 0.9]))
    assert m.auc == 1.0 and m.precision == pytest.approx(2 / 3)
    assert evaluate(y, y).auc is None


# normalization and folds ---------------------------------------------------------


def test_normalize_examples():
    sc = normalize_01(np.array([[0.0, 3.0], [10.0, 3.0]]))
    out = apply(sc, np.array([[5.0, 3.0], [12.0, -1.0]]))
    np.testing.assert_allclose(out, [[0.5, 0.5], [1.2, 0.5]])
    with pytest.raises(EmptyData):
        normalize_01(np.empty((0, 2)))


@given(st.integers(0, 2**31))
def test_normalize_maps_train_to_unit_box(seed):
    X = np.random.default_rng(seed).normal(size=(20, 4)) * [1, 10, 1e-3, 5]
    Z = apply(normalize_01(X), X)
    np.testing.assert_allclose(Z.min(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(Z.max(axis=0), 1.0, atol=1e-12)


def test_fold_sizes_and_stratification():
    lab = np.r_[np.ones(77, int), np.zeros(143, int)]
    plan = stratified_kfold(lab, 5, seed=3)
    sizes = np.bincount(plan.assignments, minlength=5)
    assert np.all(sizes == 44)
    per_class = [np.bincount(plan.assignments[lab == c], minlength=5) for c in (0, 1)]
    assert all(p.max() - p.min() <= 1 for p in per_class)
    seen = np.zeros(220, int)
    for train, test in plan:
        assert np.intersect1d(train, test).size == 0
        assert train.size + test.size == 220
        seen[test] += 1
    assert np.all(seen == 1)


def test_fold_determinism_and_errors():
    lab = np.r_[np.ones(30, int), np.zeros(70, int)]
    a = stratified_kfold(lab, 5, seed=11).assignments
    np.testing.assert_array_equal(a, stratified_kfold(lab, 5, seed=11).assignments)
    assert not np.array_equal(a, stratified_kfold(lab, 5, seed=12).assignments)
    with pytest.raises(ClassTooSmall):
        stratified_kfold(np.r_[np.ones(3, int), np.zeros(20, int)], 5)
    with pytest.raises(InvalidArgument):
        stratified_kfold(lab, 1)


# Wilcoxon -------------------------------------------------------------------------


def test_wilcoxon_examples():
    res = wilcoxon_signed_rank(np.arange(1, 6) + 1.0, np.ones(5))
    assert res.p_one_sided == 1 / 32 and res.method == "exact"
    res = wilcoxon_signed_rank([0.3, 0.5], [0.3, 0.5])
    assert res.p_one_sided == 1.0 and res.n_effective == 0
    with pytest.raises(InvalidArgument):
        wilcoxon_signed_rank([1.0], [0.0], "two-sided")
    with pytest.raises(LengthMismatch):
        wilcoxon_signed_rank([1.0, 2.0], [0.0])


def test_wilcoxon_exact_by_enumeration():
    r = np.random.default_rng(5)
    d = np.round(r.normal(0.2, 1, 10), 1)  # rounding creates tied magnitudes
    d[d == 0] = 0.1
    ranks = stats.rankdata(np.abs(d))
    w = ranks[d > 0].sum()
    hits = sum(np.dot(s, ranks) >= w - 1e-9 for s in itertools.product((0, 1), repeat=10))
    res = wilcoxon_signed_rank(d, np.zeros(10))
    assert res.p_one_sided == pytest.approx(hits / 2**10, abs=1e-12)
    assert res.statistic == w


@given(st.integers(0, 2**31))
def test_wilcoxon_matches_scipy_without_ties(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(3, 20))
    x, y = r.normal(0.3, 1, n), r.normal(0, 1, n)
    ours = wilcoxon_signed_rank(x, y, "greater").p_one_sided
    ref = stats.wilcoxon(x, y, alternative="greater", method="exact").pvalue
    assert ours == pytest.approx(ref, abs=1e-12)
    less = wilcoxon_signed_rank(x, y, "less").p_one_sided
    assert less == pytest.approx(stats.wilcoxon(x, y, alternative="less", method="exact").pvalue, abs=1e-12)


def test_exact_and_normal_agree_at_limit():
    r = np.random.default_rng(6)
    for _ in range(50):
        d = r.normal(r.uniform(-0.5, 0.5), 1, 25)
        ranks = stats.rankdata(np.abs(d))
        w = ranks[d > 0].sum()
        assert abs(_exact_upper_tail(ranks, w) - _normal_tail(ranks, w, "greater")) < 0.01
    big = wilcoxon_signed_rank(r.normal(0.5, 1, 40), np.zeros(40))
    assert big.method == "normal_approx"


@given(st.integers(0, 2**31), st.floats(0.01, 100))
def test_wilcoxon_scale_invariance(seed, c):
    r = np.random.default_rng(seed)
    x, y = r.normal(size=12), r.normal(size=12)
    a = wilcoxon_signed_rank(x, y).p_one_sided
    b = wilcoxon_signed_rank(c * x, c * y).p_one_sided
    assert a == pytest.approx(b, abs=1e-12)


def test_stars():
    assert [significance_stars(p) for p in (0.2, 0.04, 0.009, 0.0005)] == [0, 1, 2, 3]


# ranks ---------------------------------------------------------------------------


def test_rank_examples():
    np.testing.assert_array_equal(rank_methods([0.9, 0.8, 0.7]), [1, 2, 3])
    np.testing.assert_array_equal(rank_methods([0.9, 0.9, 0.7]), [1.5, 1.5, 3])
    np.testing.assert_array_equal(rank_methods([0.9, None, 0.7]), [1, 3, 2])
    np.testing.assert_array_equal(rank_methods([None, 0.5, None]), [2.5, 1, 2.5])
    with pytest.raises(InvalidArgument):
        rank_methods([0.5])


@given(st.lists(st.one_of(st.none(), st.floats(0, 1)), min_size=2, max_size=9))
def test_rank_sum(scores):
    r = rank_methods(scores)
    n = len(scores)
    assert r.sum() == pytest.approx(n * (n + 1) / 2)
