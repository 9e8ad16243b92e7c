"""Local outliers of a Gaussian mixture via Mahalanobis tail probabilities.

For each instance and component the squared Mahalanobis distance is turned
into an upper-tail probability, either against chi-square with ``M``
degrees of freedom or against the scaled F law of Hotelling's T^2. The
per-component probabilities are then aggregated into one score per
instance; an instance whose score falls below ``alpha`` is flagged.

The default aggregation is the maximum over components: a point is a local
outlier only when it lies outside the ``alpha`` contour of *every*
component. The minimum is available for the stricter reading.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InsufficientSampleSize, InvalidArgument
from .gmm import GaussianComponent, GmmModel
from .numcore import chi_sq_sf, f_sf, mahalanobis_sq

AGGREGATES = ("max_over_components", "min_over_components")
STATISTICS = ("chi_square", "hotelling_f")


@dataclass(frozen=True)
class OutlierPolicy:
    alpha: float = 0.05
    aggregate: str = "max_over_components"
    statistic: str = "chi_square"

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise InvalidArgument(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.aggregate not in AGGREGATES:
            raise InvalidArgument(f"unknown aggregate {self.aggregate!r}")
        if self.statistic not in STATISTICS:
            raise InvalidArgument(f"unknown statistic {self.statistic!r}")


@dataclass(frozen=True)
class TailProbabilityReport:
    per_component: np.ndarray
    aggregate: np.ndarray
    flags: np.ndarray
    policy: OutlierPolicy

    @property
    def n_flagged(self) -> int:
        return int(self.flags.sum())


def _tail_from_d2(d2, dim: int, statistic: str, effective_n) -> np.ndarray:
    if statistic == "chi_square":
        return chi_sq_sf(d2, dim)
    if effective_n is None or effective_n <= dim + 1:
        raise InsufficientSampleSize(
            f"Hotelling F needs more than {dim + 1} observations, got {effective_n}"
        )
    n = float(effective_n)
    scaled = np.asarray(d2) * (n - dim) / (dim * (n - 1.0))
    return f_sf(scaled, dim, int(round(n)) - dim)


def component_tail_prob(x, comp: GaussianComponent, statistic: str = "chi_square",
                        effective_n: int | None = None):
    """``P(D^2 > d^2(x))`` for one component; ``x`` may be a vector or rows."""
    if statistic not in STATISTICS:
        raise InvalidArgument(f"unknown statistic {statistic!r}")
    d2 = mahalanobis_sq(x, comp.mean, comp.cholesky)
    return _tail_from_d2(d2, comp.mean.size, statistic, effective_n)


def _effective_sizes(model: GmmModel) -> list:
    return [int(round(c.weight * model.n_obs)) for c in model.components]


def tail_probabilities(X, model: GmmModel, statistic: str = "chi_square") -> np.ndarray:
    """``(N, C)`` matrix of per-component upper-tail probabilities."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.dim:
        raise DimensionMismatch(f"X has {X.shape[1]} features, model has {model.dim}")
    sizes = _effective_sizes(model) if statistic == "hotelling_f" else [None] * model.n_components
    out = np.empty((X.shape[0], model.n_components))
    for c, comp in enumerate(model.components):
        out[:, c] = component_tail_prob(X, comp, statistic, sizes[c])
    return out


def detect_outliers(X, model: GmmModel, policy: OutlierPolicy | None = None) -> TailProbabilityReport:
    """Flag rows of ``X`` whose aggregated tail probability is below ``alpha``."""
    policy = policy or OutlierPolicy()
    per = tail_probabilities(X, model, policy.statistic)
    if policy.aggregate == "max_over_components":
        agg = per.max(axis=1)
    else:
        agg = per.min(axis=1)
    return TailProbabilityReport(per, agg, agg < policy.alpha, policy)


def is_inlier(x, model: GmmModel, policy: OutlierPolicy | None = None) -> bool:
    """Single-instance form of :func:`detect_outliers`."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch("is_inlier takes a single instance")
    return not bool(detect_outliers(x[None, :], model, policy).flags[0])
