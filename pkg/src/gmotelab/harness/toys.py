"""Two-dimensional toy problems for eyeballing oversamplers.

``toy_example1``: the minority class is two Gaussian blobs (60 points each,
centres (-2, 0) and (2, 0), sd 0.6) and the majority class is 400 points
uniform over the box [-5, 5] x [-4, 4] with the blob cores (radius 1.2,
two standard deviations) cut out, so the majority surrounds the minority.

``toy_example2``: two interlocking half-moons. The minority follows the
upper arc (120 points, radius 1.5) and the majority the lower, shifted arc
(400 points); isotropic noise of sd 0.25 makes the arcs overlap slightly.
"""
from __future__ import annotations

import numpy as np

from ..numcore import RngStream
from .datasets import DatasetRecord

BLOB_CENTERS = np.array([[-2.0, 0.0], [2.0, 0.0]])
BLOB_SD = 0.6
BLOB_SIZE = 60
CORE_RADIUS = 1.2
BOX = (-5.0, 5.0, -4.0, 4.0)
N_MAJORITY = 400

ARC_RADIUS = 1.5
ARC_NOISE = 0.25
ARC_MINORITY = 120


def _record(name, X_min, X_maj) -> DatasetRecord:
    X = np.vstack([X_min, X_maj])
    y = np.r_[np.ones(len(X_min), dtype=int), np.zeros(len(X_maj), dtype=int)]
    return DatasetRecord(name, X, y, "minority", len(X_maj) / len(X_min), ("x1", "x2"))


def toy_example1(seed: int = 0) -> DatasetRecord:
    rng = RngStream(seed, "toy1")
    X_min = np.vstack([c + BLOB_SD * rng.standard_normal((BLOB_SIZE, 2)) for c in BLOB_CENTERS])
    maj = []
    have = 0
    while have < N_MAJORITY:
        cand = rng.uniform((BOX[0], BOX[2]), (BOX[1], BOX[3]), size=(256, 2))
        d = np.linalg.norm(cand[:, None, :] - BLOB_CENTERS[None], axis=2)
        cand = cand[(d > CORE_RADIUS).all(axis=1)][: N_MAJORITY - have]
        maj.append(cand)
        have += len(cand)
    return _record("toy1", X_min, np.vstack(maj))


def toy_example2(seed: int = 0) -> DatasetRecord:
    rng = RngStream(seed, "toy2")
    t_min = rng.uniform(0.0, np.pi, ARC_MINORITY)
    X_min = ARC_RADIUS * np.c_[np.cos(t_min), np.sin(t_min)]
    t_maj = rng.uniform(0.0, np.pi, N_MAJORITY)
    X_maj = ARC_RADIUS * np.c_[1.0 - np.cos(t_maj), 0.5 - np.sin(t_maj)]
    X_min = X_min + ARC_NOISE * rng.standard_normal(X_min.shape)
    X_maj = X_maj + ARC_NOISE * rng.standard_normal(X_maj.shape)
    return _record("toy2", X_min, X_maj)


def toy_table(record: DatasetRecord, synthetic=None, method: str = "") -> list[tuple]:
    """Plot-ready rows ``(x1, x2, role, method)`` with role majority/minority/synthetic."""
    rows = [(float(a), float(b), "minority" if lab else "majority", method)
            for (a, b), lab in zip(record.X, record.y)]
    if synthetic is not None:
        rows += [(float(a), float(b), "synthetic", method) for a, b in np.asarray(synthetic)]
    return rows
