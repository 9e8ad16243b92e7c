"""Baseline oversamplers behind one calling convention.

Every method is reachable through :func:`oversample`::

    oversample(method, X_min, X_maj, n_synth, params, rng) -> SyntheticSet

with defaults taken from the benchmark parameter table.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..clustering import ClusterAssignment, NeighborIndex, dbscan, kmeans, knn_index
from ..errors import InvalidArgument
from ..gmote import GmoteConfig, gmote_fit, sample_inliers
from ..numcore import as_stream
from ..synthetic import SyntheticSet
from .interpolation import (
    allocate,
    apportion,
    borderline_smote,
    cluster_smote,
    dbsmote,
    dbsmote_eps,
    ros,
    safe_level_smote,
    smote,
)
from .rbo import mutual_potential, potential, rbo


@dataclass(frozen=True)
class RosParams:
    pass


@dataclass(frozen=True)
class SmoteParams:
    k: int = 3


@dataclass(frozen=True)
class BorderlineParams:
    k: int = 3
    c: int = 5


@dataclass(frozen=True)
class SafeLevelParams:
    k: int = 5
    c: int = 5


@dataclass(frozen=True)
class DbsmoteParams:
    min_pts: int = 4
    eps: float | None = None  # None: Q3 of 5th-nearest-neighbour distances


@dataclass(frozen=True)
class ClusterSmoteParams:
    clusters: int = 3
    k: int = 3


@dataclass(frozen=True)
class RboParams:
    gamma: float = 1.0
    iterations: int = 50
    step: float = 0.05
    p: float = 0.05


PARAMS = {
    "ROS": RosParams,
    "SMOTE": SmoteParams,
    "BLSMOTE": BorderlineParams,
    "SLSMOTE": SafeLevelParams,
    "DBSMOTE": DbsmoteParams,
    "C-SMOTE": ClusterSmoteParams,
    "RBO": RboParams,
    "GMOTE": GmoteConfig,
}

METHODS = tuple(PARAMS)


def default_params(method: str):
    try:
        return PARAMS[method]()
    except KeyError:
        raise InvalidArgument(f"unknown oversampler {method!r}") from None


def _gmote(X_min, n_synth, cfg: GmoteConfig, rng) -> SyntheticSet:
    if n_synth == 0:
        return SyntheticSet(np.empty((0, X_min.shape[1])), "GMOTE")
    model = gmote_fit(X_min, cfg, rng.child("fit"))
    out = sample_inliers(model.cleaned_gmm, n_synth, cfg.policy, rng.child("generate"),
                         cfg.max_attempts_factor)
    out.provenance.update(n_components=model.cleaned_gmm.n_components,
                          n_outliers=model.outlier_report.n_flagged,
                          all_flagged=model.all_flagged)
    if model.all_flagged:
        out.provenance["fallback"] = "AllInstancesFlagged"
    return out


def oversample(method: str, X_min, X_maj, n_synth: int, params=None, rng=None) -> SyntheticSet:
    """Generate ``n_synth`` synthetic minority rows with ``method``."""
    X_min = np.asarray(X_min, dtype=float)
    X_maj = np.asarray(X_maj, dtype=float).reshape(-1, X_min.shape[1])
    p = params if params is not None else default_params(method)
    rng = as_stream(rng, method)
    n_synth = int(n_synth)
    if method == "ROS":
        return ros(X_min, n_synth, rng)
    if method == "SMOTE":
        return smote(X_min, p.k, n_synth, rng)
    if method == "BLSMOTE":
        return borderline_smote(X_min, X_maj, p.k, p.c, n_synth, rng)
    if method == "SLSMOTE":
        return safe_level_smote(X_min, X_maj, p.k, p.c, n_synth, rng)
    if method == "DBSMOTE":
        return dbsmote(X_min, p.min_pts, n_synth, rng, eps=p.eps)
    if method == "C-SMOTE":
        return cluster_smote(X_min, p.clusters, p.k, n_synth, rng)
    if method == "RBO":
        return rbo(X_min, X_maj, p.gamma, p.iterations, p.step, n_synth, rng, p=p.p)
    if method == "GMOTE":
        return _gmote(X_min, n_synth, p, rng)
    raise InvalidArgument(f"unknown oversampler {method!r}")


__all__ = [
    "METHODS", "PARAMS", "BorderlineParams", "ClusterAssignment", "ClusterSmoteParams",
    "DbsmoteParams", "NeighborIndex", "RboParams", "RosParams", "SafeLevelParams",
    "SmoteParams", "SyntheticSet", "allocate", "apportion", "borderline_smote",
    "cluster_smote", "dbscan", "dbsmote", "dbsmote_eps", "default_params", "kmeans",
    "knn_index", "mutual_potential", "oversample", "potential", "rbo", "ros",
    "safe_level_smote", "smote",
]
