"""Radial-based oversampling: random walks down the mutual class potential."""
from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from ..numcore import RngStream
from ..synthetic import SyntheticSet
from .interpolation import _as_rows, _empty, _need, allocate


def potential(points, reference, gamma: float) -> np.ndarray:
    """``sum_s exp(-gamma^2 ||x - s||^2)`` for each row ``x`` of ``points``."""
    if reference.shape[0] == 0:
        return np.zeros(points.shape[0])
    return np.exp(-(gamma ** 2) * cdist(points, reference, "sqeuclidean")).sum(axis=1)


def mutual_potential(points, X_min, X_maj, gamma: float) -> np.ndarray:
    return potential(points, X_maj, gamma) - potential(points, X_min, gamma)


def rbo(X_min, X_maj, gamma: float, iterations: int, step: float, n_synth: int,
        rng: RngStream, p: float = 0.05) -> SyntheticSet:
    """Each row starts at a minority point and takes ``iterations`` random
    steps of length ``step``, keeping a step only when it lowers
    ``potential(maj) - potential(min)``.

    ``p`` is accepted for parameter-table compatibility and not used.
    """
    X_min, X_maj = _as_rows(X_min), _as_rows(X_maj)
    if n_synth == 0:
        return _empty(X_min, "RBO")
    _need(X_min, 1, "RBO")
    seeds = allocate(X_min.shape[0], n_synth, rng)
    pos = X_min[seeds].copy()
    score = mutual_potential(pos, X_min, X_maj, gamma)
    start = score.copy()
    accepted = 0
    for _ in range(iterations):
        direction = rng.standard_normal(pos.shape)
        norms = np.linalg.norm(direction, axis=1, keepdims=True)
        direction /= np.where(norms > 0, norms, 1.0)
        prop = pos + step * direction
        new = mutual_potential(prop, X_min, X_maj, gamma)
        take = new < score
        pos[take] = prop[take]
        score[take] = new[take]
        accepted += int(take.sum())
    return SyntheticSet(pos, "RBO", attempts=n_synth * iterations,
                        rejected=n_synth * iterations - accepted,
                        provenance={"seed": seeds, "start_potential": start,
                                    "end_potential": score, "p": p})
