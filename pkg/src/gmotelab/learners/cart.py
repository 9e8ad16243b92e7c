"""Binary CART with Gini splits and growth-time complexity pruning."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, EmptyData


@dataclass
class CartConfig:
    min_split: int = 20
    min_bucket: int = 7
    complexity: float = 0.01
    max_depth: int = 30


@dataclass(frozen=True)
class CartModel:
    """Flat array tree. Node ``t`` is a leaf when ``feature[t] == -1``;
    otherwise rows with ``x[feature[t]] <= threshold[t]`` go to ``left[t]``."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    n_samples: np.ndarray
    n_positive: np.ndarray
    depth: np.ndarray
    n_features: int

    @property
    def proportion(self) -> np.ndarray:
        return self.n_positive / self.n_samples

    @property
    def is_leaf(self) -> np.ndarray:
        return self.feature < 0

    @property
    def n_leaves(self) -> int:
        return int(self.is_leaf.sum())


def _best_split(X, y, min_bucket):
    """Largest Gini decrease over all features; ties keep the lowest feature
    index and then the lowest threshold."""
    n = y.size
    pos = y.sum()
    parent = 2.0 * pos * (n - pos) / n
    best = (0.0, -1, 0.0)
    nl = np.arange(1, n)
    nr = n - nl
    ok_size = (nl >= min_bucket) & (nr >= min_bucket)
    if not ok_size.any():
        return best
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cl = np.cumsum(y[order])[:-1]
        cr = pos - cl
        ok = ok_size & (xs[:-1] < xs[1:])
        if not ok.any():
            continue
        child = 2.0 * cl * (nl - cl) / nl + 2.0 * cr * (nr - cr) / nr
        gain = np.where(ok, parent - child, -np.inf)
        i = int(np.argmax(gain))
        if gain[i] > best[0]:
            best = (float(gain[i]), f, float(xs[i]))
    return best


def cart_fit(X, y, cfg: CartConfig | None = None) -> CartModel:
    """Grow a classification tree.

    A node is split only if it holds at least ``min_split`` rows, is
    shallower than ``max_depth``, both children keep ``min_bucket`` rows,
    and the Gini decrease relative to the root's total impurity is at least
    ``complexity``.
    """
    cfg = cfg or CartConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyData("CART needs at least one training row")
    n = y.size
    root_risk = 2.0 * y.sum() * (n - y.sum()) / n

    feature, threshold, left, right, ns, npos, depth = [], [], [], [], [], [], []

    def new_node(rows, d):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        ns.append(rows.size)
        npos.append(float(y[rows].sum()))
        depth.append(d)
        return len(feature) - 1

    stack = [(new_node(np.arange(n), 0), np.arange(n))]
    while stack:
        node, rows = stack.pop()
        d = depth[node]
        m, p = rows.size, npos[node]
        if m < cfg.min_split or d >= cfg.max_depth or p == 0 or p == m or root_risk == 0:
            continue
        gain, f, thr = _best_split(X[rows], y[rows], cfg.min_bucket)
        if f < 0 or gain / root_risk < cfg.complexity:
            continue
        go_left = X[rows, f] <= thr
        feature[node], threshold[node] = f, thr
        li = new_node(rows[go_left], d + 1)
        ri = new_node(rows[~go_left], d + 1)
        left[node], right[node] = li, ri
        stack.append((ri, rows[~go_left]))
        stack.append((li, rows[go_left]))

    return CartModel(
        np.asarray(feature), np.asarray(threshold), np.asarray(left), np.asarray(right),
        np.asarray(ns, dtype=float), np.asarray(npos), np.asarray(depth), X.shape[1],
    )


def cart_apply(model: CartModel, X) -> np.ndarray:
    """Leaf index reached by every row."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(f"X has {X.shape[1]} features, tree expects {model.n_features}")
    node = np.zeros(X.shape[0], dtype=int)
    while True:
        f = model.feature[node]
        inner = f >= 0
        if not inner.any():
            return node
        idx = np.flatnonzero(inner)
        go_left = X[idx, f[inner]] <= model.threshold[node[inner]]
        node[idx] = np.where(go_left, model.left[node[inner]], model.right[node[inner]])


def cart_score(model: CartModel, X) -> np.ndarray:
    """Positive-class proportion of the leaf each row falls into."""
    return model.proportion[cart_apply(model, X)]
