"""Random oversampling and the SMOTE interpolation family.

All interpolating methods build rows ``x_s + u * (x_n - x_s)`` with
``x_s``, ``x_n`` minority rows, and record ``seed``, ``neighbor`` and
``gap`` arrays in the provenance so every row can be audited against its
segment.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial.distance import cdist

from ..clustering import dbscan, kmeans, knn_index
from ..errors import TooFewMinority
from ..numcore import RngStream
from ..synthetic import SyntheticSet


def _as_rows(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected a two-dimensional array")
    return X


def _empty(X_min, method: str) -> SyntheticSet:
    return SyntheticSet(np.empty((0, X_min.shape[1])), method)


def _need(X_min, n: int, method: str) -> None:
    if X_min.shape[0] < n:
        raise TooFewMinority(f"{method} needs at least {n} minority rows, got {X_min.shape[0]}")


def allocate(n_points: int, n_synth: int, rng: RngStream) -> np.ndarray:
    """Seed indices: every point ``n_synth // n_points`` times, the remainder
    drawn without replacement. Returned sorted."""
    base, extra = divmod(n_synth, n_points)
    seeds = np.repeat(np.arange(n_points), base)
    if extra:
        seeds = np.concatenate([seeds, rng.choice(n_points, size=extra, replace=False)])
    return np.sort(seeds)


def apportion(sizes, total: int) -> np.ndarray:
    """Largest-remainder split of ``total`` proportional to ``sizes``."""
    sizes = np.asarray(sizes, dtype=float)
    exact = total * sizes / sizes.sum()
    quota = np.floor(exact).astype(int)
    short = total - quota.sum()
    if short:
        order = np.lexsort((np.arange(sizes.size), -(exact - quota)))
        quota[order[:short]] += 1
    return quota


def interpolate(X, seeds, neighbors, gaps) -> np.ndarray:
    return X[seeds] + gaps[:, None] * (X[neighbors] - X[seeds])


def _finish(X, seeds, neighbors, gaps, method, **extra) -> SyntheticSet:
    seeds = np.asarray(seeds, dtype=int)
    neighbors = np.asarray(neighbors, dtype=int)
    gaps = np.asarray(gaps, dtype=float)
    prov = {"seed": seeds, "neighbor": neighbors, "gap": gaps}
    prov.update(extra)
    return SyntheticSet(interpolate(X, seeds, neighbors, gaps), method,
                        attempts=len(seeds), provenance=prov)


# --------------------------------------------------------------------------


def ros(X_min, n_synth: int, rng: RngStream) -> SyntheticSet:
    """Exact copies of uniformly drawn minority rows."""
    X_min = _as_rows(X_min)
    if n_synth == 0:
        return _empty(X_min, "ROS")
    _need(X_min, 1, "ROS")
    idx = rng.integers(X_min.shape[0], size=n_synth)
    return SyntheticSet(X_min[idx].copy(), "ROS", attempts=n_synth, provenance={"seed": idx})


def smote(X_min, K: int, n_synth: int, rng: RngStream, method: str = "SMOTE") -> SyntheticSet:
    """Interpolate each seed toward one of its ``K`` nearest minority rows."""
    X_min = _as_rows(X_min)
    if n_synth == 0:
        return _empty(X_min, method)
    _need(X_min, 2, method)
    k = min(K, X_min.shape[0] - 1)
    nn = knn_index(X_min, X_min, k, exclude_self=True)
    seeds = allocate(X_min.shape[0], n_synth, rng)
    pick = rng.integers(k, size=n_synth)
    gaps = rng.random(n_synth)
    return _finish(X_min, seeds, nn.indices[seeds, pick], gaps, method)


def _full_neighbors(X_min, X_maj, C: int):
    """For each minority row, its ``C`` nearest rows of the pooled data
    (self excluded) and whether each is a minority row."""
    X_all = np.vstack([X_min, X_maj]) if X_maj.size else X_min
    n_min = X_min.shape[0]
    c = min(C, X_all.shape[0] - 1)
    dist = cdist(X_min, X_all)
    dist[np.arange(n_min), np.arange(n_min)] = np.inf
    order = np.argsort(dist, axis=1, kind="stable")[:, :c]
    return order < n_min, c


def borderline_smote(X_min, X_maj, K: int, C: int, n_synth: int, rng: RngStream) -> SyntheticSet:
    """SMOTE seeded only from minority rows in danger.

    A minority row with ``m`` majority rows among its ``C`` nearest
    neighbours is noise if ``m == C``, in danger if ``C/2 <= m < C`` and
    safe otherwise. With no danger rows the call degrades to plain SMOTE
    and records ``fallback='NoDangerPoints'``.
    """
    X_min, X_maj = _as_rows(X_min), _as_rows(X_maj)
    if n_synth == 0:
        return _empty(X_min, "BLSMOTE")
    _need(X_min, 2, "BLSMOTE")
    is_min, c = _full_neighbors(X_min, X_maj, C)
    m = c - is_min.sum(axis=1)
    labels = np.where(m == c, "noise", np.where(2 * m >= c, "danger", "safe"))
    danger = np.flatnonzero(labels == "danger")
    if danger.size == 0:
        out = smote(X_min, K, n_synth, rng, method="BLSMOTE")
        out.provenance.update(labels=labels, fallback="NoDangerPoints")
        return out
    k = min(K, X_min.shape[0] - 1)
    nn = knn_index(X_min, X_min, k, exclude_self=True)
    seeds = danger[allocate(danger.size, n_synth, rng)]
    pick = rng.integers(k, size=n_synth)
    gaps = rng.random(n_synth)
    return _finish(X_min, seeds, nn.indices[seeds, pick], gaps, "BLSMOTE", labels=labels)


def _safe_level_gaps(sl_p, sl_n, rng: RngStream) -> np.ndarray:
    u = rng.random(sl_p.size)
    gaps = np.empty(sl_p.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(sl_n > 0, sl_p / np.where(sl_n > 0, sl_n, 1), np.inf)
    toward_seed = sl_n == 0
    gaps[toward_seed] = 0.0
    eq = ~toward_seed & (ratio == 1)
    gaps[eq] = u[eq]
    gt = ~toward_seed & (ratio > 1)
    gaps[gt] = u[gt] / ratio[gt]
    lt = ~toward_seed & (ratio < 1)
    gaps[lt] = (1.0 - ratio[lt]) + u[lt] * ratio[lt]
    return gaps


def safe_level_smote(X_min, X_maj, K: int, C: int, n_synth: int, rng: RngStream) -> SyntheticSet:
    """Interpolation biased toward whichever endpoint has the higher safe level.

    The safe level of a minority row is the number of minority rows among
    its ``C`` nearest neighbours in the pooled data. Pairs where both
    endpoints have safe level zero are redrawn.
    """
    X_min, X_maj = _as_rows(X_min), _as_rows(X_maj)
    if n_synth == 0:
        return _empty(X_min, "SLSMOTE")
    _need(X_min, 2, "SLSMOTE")
    is_min, _ = _full_neighbors(X_min, X_maj, C)
    sl = is_min.sum(axis=1)
    k = min(K, X_min.shape[0] - 1)
    nn = knn_index(X_min, X_min, k, exclude_self=True).indices
    if not np.any((sl[:, None] > 0) | (sl[nn] > 0)):
        out = smote(X_min, K, n_synth, rng, method="SLSMOTE")
        out.provenance.update(safe_level=sl, fallback="NoSafePairs")
        return out

    n = X_min.shape[0]
    seeds = allocate(n, n_synth, rng)
    nbrs = nn[seeds, rng.integers(k, size=n_synth)]
    redrawn = 0
    bad = (sl[seeds] == 0) & (sl[nbrs] == 0)
    while bad.any():
        nb = int(bad.sum())
        redrawn += nb
        seeds[bad] = rng.integers(n, size=nb)
        nbrs[bad] = nn[seeds[bad], rng.integers(k, size=nb)]
        bad = (sl[seeds] == 0) & (sl[nbrs] == 0)
    gaps = _safe_level_gaps(sl[seeds], sl[nbrs], rng)
    out = _finish(X_min, seeds, nbrs, gaps, "SLSMOTE", safe_level=sl)
    out.attempts += redrawn
    out.rejected = redrawn
    return out


def dbsmote_eps(X_min, k: int = 5, q: float = 0.75) -> float:
    """Upper quartile of every point's ``k``-th nearest-neighbour distance."""
    k = min(k, X_min.shape[0] - 1)
    d = knn_index(X_min, X_min, k, exclude_self=True).distances[:, -1]
    return float(np.quantile(d, q))


def dbsmote(X_min, min_pts: int, n_synth: int, rng: RngStream, eps: float | None = None) -> SyntheticSet:
    """Generate along shortest paths from each DBSCAN cluster's pseudo-centroid.

    Per cluster the pseudo-centroid is the member nearest the cluster mean.
    Members are joined by Euclidean edges of length at most ``eps`` and
    Dijkstra gives the path from the pseudo-centroid to every member. A
    synthetic row picks a member, a uniformly random edge of its path, and
    a uniform point on that edge. If DBSCAN finds only noise the call
    degrades to SMOTE with ``K = 3`` (``fallback='NoClusters'``).
    """
    X_min = _as_rows(X_min)
    if n_synth == 0:
        return _empty(X_min, "DBSMOTE")
    _need(X_min, max(min_pts, 2), "DBSMOTE")
    if eps is None:
        eps = dbsmote_eps(X_min)
    eps = max(eps, np.finfo(float).tiny)
    clusters = dbscan(X_min, eps, min_pts)
    if clusters.n_clusters == 0:
        out = smote(X_min, 3, n_synth, rng, method="DBSMOTE")
        out.provenance.update(labels=clusters.labels, eps=eps, fallback="NoClusters")
        return out

    dist = cdist(X_min, X_min)
    paths = {}
    centroids = []
    for c in range(clusters.n_clusters):
        members = np.flatnonzero(clusters.labels == c)
        centre = X_min[members].mean(axis=0)
        pc_local = int(np.argmin(np.linalg.norm(X_min[members] - centre, axis=1)))
        sub = dist[np.ix_(members, members)]
        w = np.where(sub <= eps, np.maximum(sub, 1e-300), 0.0)
        np.fill_diagonal(w, 0.0)
        _, pred = dijkstra(csr_matrix(w), directed=False, indices=pc_local,
                           return_predecessors=True)
        centroids.append(int(members[pc_local]))
        for j, member in enumerate(members):
            path = [j]
            while path[-1] != pc_local and pred[path[-1]] >= 0:
                path.append(int(pred[path[-1]]))
            paths[int(member)] = [int(members[v]) for v in reversed(path)]

    clustered = np.flatnonzero(clusters.labels >= 0)
    targets = clustered[allocate(clustered.size, n_synth, rng)]
    edge_u = rng.random(n_synth)
    gaps = rng.random(n_synth)
    seeds = np.empty(n_synth, dtype=int)
    nbrs = np.empty(n_synth, dtype=int)
    for i, t in enumerate(targets):
        path = paths[int(t)]
        if len(path) == 1:
            seeds[i] = nbrs[i] = path[0]
            gaps[i] = 0.0
            continue
        e = min(int(edge_u[i] * (len(path) - 1)), len(path) - 2)
        seeds[i], nbrs[i] = path[e], path[e + 1]
    return _finish(X_min, seeds, nbrs, gaps, "DBSMOTE", labels=clusters.labels,
                   eps=eps, pseudo_centroids=np.asarray(centroids), target=targets)


def cluster_smote(X_min, clusters: int, K: int, n_synth: int, rng: RngStream) -> SyntheticSet:
    """k-means on the minority rows, then SMOTE inside each cluster.

    Cluster quotas are proportional to cluster size (largest remainder);
    singleton clusters contribute copies of their member.
    """
    X_min = _as_rows(X_min)
    if n_synth == 0:
        return _empty(X_min, "C-SMOTE")
    _need(X_min, 2, "C-SMOTE")
    assign = kmeans(X_min, min(clusters, X_min.shape[0]), rng.child("kmeans"))
    sizes = np.bincount(assign.labels, minlength=assign.n_clusters)
    quotas = apportion(sizes, n_synth)
    seeds, nbrs, gaps = [], [], []
    for c, q in enumerate(quotas):
        if q == 0:
            continue
        members = np.flatnonzero(assign.labels == c)
        if members.size == 1:
            seeds.append(np.repeat(members, q))
            nbrs.append(np.repeat(members, q))
            gaps.append(np.zeros(q))
            continue
        k = min(K, members.size - 1)
        nn = knn_index(X_min[members], X_min[members], k, exclude_self=True).indices
        local = allocate(members.size, int(q), rng)
        seeds.append(members[local])
        nbrs.append(members[nn[local, rng.integers(k, size=q)]])
        gaps.append(rng.random(q))
    return _finish(X_min, np.concatenate(seeds), np.concatenate(nbrs), np.concatenate(gaps),
                   "C-SMOTE", labels=assign.labels, quotas=quotas)
