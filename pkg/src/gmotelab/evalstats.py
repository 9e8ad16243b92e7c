"""Classification metrics, fold plans, paired Wilcoxon tests and ranks."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import ClassTooSmall, EmptyCounts, EmptyData, InvalidArgument, LengthMismatch, SingleClass
from .numcore import as_stream

METRICS = ("accuracy", "precision", "recall", "f1", "gmean", "auc")
EXACT_LIMIT = 25


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricSet:
    """``None`` marks an undefined value (NA)."""

    accuracy: float
    recall: float
    precision: float | None
    f1: float | None
    gmean: float
    auc: float | None = None

    def as_dict(self) -> dict:
        return {m: getattr(self, m) for m in METRICS}


def confusion(y_true, y_pred) -> ConfusionCounts:
    """Counts with label 1 as the positive (minority) class."""
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    if t.shape != p.shape:
        raise LengthMismatch(f"{t.shape} vs {p.shape}")
    t = t == 1
    p = p == 1
    return ConfusionCounts(
        int(np.sum(t & p)), int(np.sum(~t & p)), int(np.sum(t & ~p)), int(np.sum(~t & ~p))
    )


def metrics_from_counts(c: ConfusionCounts, auc: float | None = None) -> MetricSet:
    if c.total == 0:
        raise EmptyCounts("no instances were evaluated")
    if c.tp + c.fn == 0:
        raise InvalidArgument("recall is undefined without positive instances")
    accuracy = (c.tp + c.tn) / c.total
    recall = c.tp / (c.tp + c.fn)
    if c.tp + c.fp == 0:
        precision = f1 = None
    else:
        precision = c.tp / (c.tp + c.fp)
        f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    specificity = c.tn / (c.tn + c.fp) if c.tn + c.fp else 0.0
    return MetricSet(accuracy, recall, precision, f1, math.sqrt(recall * specificity), auc)


def auc(scores, labels) -> float:
    """ROC area via the Mann-Whitney statistic; tied scores count one half."""
    s = np.asarray(scores, dtype=float)
    lab = np.asarray(labels) == 1
    n_pos = int(lab.sum())
    n_neg = lab.size - n_pos
    if s.shape != lab.shape:
        raise LengthMismatch(f"{s.shape} vs {lab.shape}")
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUC needs both classes")
    ranks = rankdata(s)
    u = ranks[lab].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def evaluate(y_true, y_pred, scores=None) -> MetricSet:
    a = auc(scores, y_true) if scores is not None else None
    return metrics_from_counts(confusion(y_true, y_pred), a)


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitScaler:
    """Per-feature map to (0, 1) using training minima and maxima."""

    low: np.ndarray
    span: np.ndarray

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty_like(X)
        const = self.span == 0
        out[:, ~const] = (X[:, ~const] - self.low[~const]) / self.span[~const]
        out[:, const] = 0.5
        return out


def normalize_01(train) -> UnitScaler:
    train = np.asarray(train, dtype=float)
    if train.ndim != 2 or train.shape[0] == 0:
        raise EmptyData("cannot fit a scaler on no rows")
    low = train.min(axis=0)
    return UnitScaler(low, train.max(axis=0) - low)


def apply(scaler: UnitScaler, X) -> np.ndarray:
    return scaler.apply(X)


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: np.ndarray
    seed: int

    def split(self, fold: int):
        test = self.assignments == fold
        return np.flatnonzero(~test), np.flatnonzero(test)

    def __iter__(self):
        return (self.split(f) for f in range(self.k))


def stratified_kfold(labels, k: int, seed=0) -> FoldPlan:
    """Stratified fold ids.

    Each class is shuffled separately, the classes are concatenated, and
    fold ids are dealt round robin over the concatenation. Per-class fold
    counts therefore differ by at most one, and so do the fold sizes.
    """
    lab = np.asarray(labels)
    if k < 2:
        raise InvalidArgument("k must be >= 2")
    rng = as_stream(seed, "kfold")
    classes, counts = np.unique(lab, return_counts=True)
    if np.any(counts < k):
        raise ClassTooSmall(f"every class needs >= {k} members, got {dict(zip(classes.tolist(), counts.tolist()))}")
    order = np.concatenate([rng.permutation(np.flatnonzero(lab == c)) for c in classes])
    folds = np.empty(lab.size, dtype=int)
    folds[order] = np.arange(lab.size) % k
    return FoldPlan(k, folds, rng.seed)


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float
    n_effective: int
    p_one_sided: float
    alternative: str
    method: str


def _exact_upper_tail(ranks: np.ndarray, w: float) -> float:
    """``P(W+ >= w)`` under the sign-flip null, for (possibly tied) ranks.

    Ranks are doubled to integers and the distribution of the positive-rank
    sum is built by convolution, which counts all ``2^n`` sign patterns.
    """
    r2 = np.rint(2 * ranks).astype(int)
    dist = np.zeros(r2.sum() + 1)
    dist[0] = 1.0
    for r in r2:
        shifted = np.zeros_like(dist)
        shifted[r:] = dist[: dist.size - r]
        dist = dist + shifted
    dist /= 2.0 ** ranks.size
    cut = int(np.rint(2 * w))
    return float(min(1.0, dist[cut:].sum()))


def wilcoxon_signed_rank(x, y, alternative: str = "greater") -> WilcoxonResult:
    """Paired one-sided signed-rank test of ``x - y``.

    Zero differences are dropped and tied magnitudes get average ranks.
    ``W`` is the sum of ranks of positive differences. Up to 25 non-zero
    pairs the null distribution is exact; beyond that a normal
    approximation with tie-corrected variance and continuity correction is
    used. ``alternative='greater'`` tests whether ``x`` tends to exceed
    ``y``.
    """
    if alternative not in ("greater", "less"):
        raise InvalidArgument("alternative must be 'greater' or 'less'")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatch(f"{x.shape} vs {y.shape}")
    d = x - y
    d = d[d != 0]
    n = d.size
    if n == 0:
        return WilcoxonResult(0.0, 0, 1.0, alternative, "exact")
    ranks = rankdata(np.abs(d))
    w = float(ranks[d > 0].sum())
    total = float(ranks.sum())
    if n <= EXACT_LIMIT:
        if alternative == "greater":
            p = _exact_upper_tail(ranks, w)
        else:
            # W- = total - W+ has the same null law as W+
            p = _exact_upper_tail(ranks, total - w)
        return WilcoxonResult(w, n, p, alternative, "exact")
    return WilcoxonResult(w, n, _normal_tail(ranks, w, alternative), alternative, "normal_approx")


def _normal_tail(ranks: np.ndarray, w: float, alternative: str) -> float:
    n = ranks.size
    mean = n * (n + 1) / 4.0
    _, ties = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(ties ** 3 - ties) / 48.0
    if var <= 0:
        return 1.0
    sd = math.sqrt(var)
    if alternative == "greater":
        z = (w - mean - 0.5) / sd
        return 0.5 * math.erfc(z / math.sqrt(2.0))
    z = (w - mean + 0.5) / sd
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def significance_stars(p: float) -> int:
    """Number of marks for p below 0.05, 0.01 and 0.001."""
    return sum(p < t for t in (0.05, 0.01, 0.001))


def rank_methods(scores) -> np.ndarray:
    """Rank 1 for the highest score, averages for ties, NA (None/NaN) last."""
    vals = np.array([np.nan if s is None else float(s) for s in scores])
    if vals.size < 2:
        raise InvalidArgument("ranking needs at least two methods")
    na = np.isnan(vals)
    ranks = np.empty(vals.size)
    ranks[~na] = rankdata(-vals[~na])
    n_ok = int((~na).sum())
    if na.any():
        ranks[na] = n_ok + (na.sum() + 1) / 2.0
    return ranks
