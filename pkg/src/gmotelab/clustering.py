"""Neighbour search, k-means and DBSCAN on small dense point sets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidArgument
from .numcore import RngStream


@dataclass(frozen=True)
class NeighborIndex:
    """k nearest reference rows for each query row, sorted by distance."""

    indices: np.ndarray
    distances: np.ndarray
    k: int


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray
    centers: np.ndarray | None = None

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0


def knn_index(query, reference, k: int, exclude_self: bool = False) -> NeighborIndex:
    """Brute-force Euclidean k-nearest-neighbour table.

    With ``exclude_self`` the query set must be the reference set and each
    row's own index is removed from its neighbour list. Ties are broken by
    reference index.
    """
    query = np.asarray(query, dtype=float)
    reference = np.asarray(reference, dtype=float)
    n_ref = reference.shape[0] - (1 if exclude_self else 0)
    if k < 1 or k > n_ref:
        raise InvalidArgument(f"k={k} outside [1, {n_ref}]")
    dist = cdist(query, reference)
    if exclude_self:
        if query.shape[0] != reference.shape[0]:
            raise InvalidArgument("exclude_self requires query == reference")
        np.fill_diagonal(dist, np.inf)
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    return NeighborIndex(order, np.take_along_axis(dist, order, axis=1), k)


def kmeans_plusplus(X, k: int, rng: RngStream) -> np.ndarray:
    """Indices of ``k`` k-means++ seed rows."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if k < 1 or k > n:
        raise InvalidArgument(f"k={k} outside [1, {n}]")
    chosen = [int(rng.integers(n))]
    d2 = np.sum((X - X[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            # duplicate points only: pick uniformly among the unchosen rows
            rest = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rest[rng.integers(rest.size)])
        chosen.append(nxt)
        d2 = np.minimum(d2, np.sum((X - X[nxt]) ** 2, axis=1))
    return np.asarray(chosen)


def kmeans(X, k: int, rng: RngStream, max_iter: int = 10, tol: float = 1e-8) -> ClusterAssignment:
    """Lloyd's algorithm from k-means++ seeds.

    Stops after ``max_iter`` iterations or when no centre moves more than
    ``tol``. Empty clusters keep their previous centre; labels are then
    compacted so they run contiguously from 0.
    """
    X = np.asarray(X, dtype=float)
    centers = X[kmeans_plusplus(X, k, rng)].copy()
    labels = np.zeros(X.shape[0], dtype=int)
    for _ in range(max_iter):
        labels = np.argmin(cdist(X, centers, "sqeuclidean"), axis=1)
        new = centers.copy()
        for c in range(k):
            members = labels == c
            if members.any():
                new[c] = X[members].mean(axis=0)
        shift = np.max(np.linalg.norm(new - centers, axis=1))
        centers = new
        if shift < tol:
            break
    labels = np.argmin(cdist(X, centers, "sqeuclidean"), axis=1)
    used = np.unique(labels)
    remap = np.full(k, -1)
    remap[used] = np.arange(used.size)
    return ClusterAssignment(remap[labels], centers[used])


def dbscan(X, eps: float, min_pts: int) -> ClusterAssignment:
    """Classical DBSCAN; label -1 marks noise.

    A core point has at least ``min_pts`` points (itself included) within
    distance ``eps``. Clusters are numbered in order of their first core
    point.
    """
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    within = cdist(X, X) <= eps
    core = within.sum(axis=1) >= min_pts
    labels = np.full(n, -1)
    cluster = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = cluster
        stack = [i]
        while stack:
            p = stack.pop()
            if not core[p]:
                continue
            for q in np.flatnonzero(within[p]):
                if labels[q] == -1:
                    labels[q] = cluster
                    stack.append(q)
        cluster += 1
    return ClusterAssignment(labels)
