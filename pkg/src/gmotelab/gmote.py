"""GMOTE: mixture-model oversampling with tail-probability outlier removal.

The procedure has three stages:

1. fit a BIC-selected Gaussian mixture to the minority set ``P``;
2. flag local outliers of that mixture and refit (again BIC-selected) on
   the remaining rows;
3. draw candidates from the refitted mixture, discard any that the
   refitted mixture itself flags as outliers, and repeat until
   ``ceil(gamma * |P|)`` rows have been accepted.

Only synthetic rows are returned; callers append them to ``P``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AcceptanceStarvation, InvalidArgument, TooFewInstances
from .gmm import EmConfig, GmmModel, default_c_range, gmm_sample, select_by_bic
from .numcore import RngStream
from .outlier import OutlierPolicy, TailProbabilityReport, detect_outliers
from .synthetic import SyntheticSet


@dataclass
class GmoteConfig:
    alpha: float = 0.05
    gamma: float = 1.0
    em: EmConfig = field(default_factory=EmConfig)
    c_range: tuple | None = None
    aggregate: str = "max_over_components"
    statistic: str = "chi_square"
    max_attempts_factor: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.gamma < 0:
            raise InvalidArgument("gamma must be >= 0")
        if self.max_attempts_factor < 1:
            raise InvalidArgument("max_attempts_factor must be >= 1")
        self.policy  # validates alpha / aggregate / statistic

    @property
    def policy(self) -> OutlierPolicy:
        return OutlierPolicy(self.alpha, self.aggregate, self.statistic)


@dataclass(frozen=True)
class GmoteModel:
    initial_gmm: GmmModel
    outlier_report: TailProbabilityReport
    cleaned_gmm: GmmModel
    retained_count: int
    retained: np.ndarray
    all_flagged: bool = False


def synthetic_count(gamma: float, minority_count: int) -> int:
    """``ceil(gamma * minority_count)``, robust to float noise in ``gamma``."""
    return int(math.ceil(round(gamma * minority_count, 9)))


def _c_range(cfg: GmoteConfig, n: int, dim: int):
    if cfg.c_range is None:
        return default_c_range(n, dim)
    allowed = [c for c in cfg.c_range if 1 <= c <= n]
    return allowed or [1]


def gmote_fit(P, cfg: GmoteConfig | None = None, rng: RngStream | None = None) -> GmoteModel:
    """Fit the initial mixture, strip its local outliers, refit on the rest.

    If every row is flagged the refit uses all rows, ``all_flagged`` is set
    and a ``RuntimeWarning`` is issued.
    """
    cfg = cfg or GmoteConfig()
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] < 2:
        raise TooFewInstances("GMOTE needs at least two minority instances")
    rng = rng or RngStream(cfg.seed, "gmote")
    n, dim = P.shape

    initial = select_by_bic(P, _c_range(cfg, n, dim), cfg.em, rng.child("initial"))
    report = detect_outliers(P, initial, cfg.policy)
    retained = ~report.flags
    all_flagged = not retained.any()
    if all_flagged:
        warnings.warn("every minority instance was flagged; refitting on all of them",
                      RuntimeWarning, stacklevel=2)
        retained = np.ones(n, dtype=bool)
    kept = P[retained]
    cleaned = select_by_bic(kept, _c_range(cfg, kept.shape[0], dim), cfg.em, rng.child("cleaned"))
    return GmoteModel(initial, report, cleaned, int(retained.sum()), retained, all_flagged)


def sample_inliers(model: GmmModel, n: int, policy: OutlierPolicy, rng: RngStream,
                   max_attempts_factor: int = 1000) -> SyntheticSet:
    """Rejection-sample ``n`` rows of ``model`` that it does not flag.

    Candidates are drawn in batches of ``max(64, remaining)``; the last
    accepted batch is truncated to hit ``n`` exactly.
    """
    accepted = []
    have = attempts = rejected = 0
    budget = max_attempts_factor * n
    while have < n:
        if attempts >= budget:
            raise AcceptanceStarvation(
                f"{attempts} draws yielded only {have} of {n} inliers"
            )
        batch = max(64, n - have)
        cand = gmm_sample(model, batch, rng)
        ok = ~detect_outliers(cand, model, policy).flags
        attempts += batch
        rejected += int((~ok).sum())
        good = cand[ok][: n - have]
        accepted.append(good)
        have += good.shape[0]
    rows = np.vstack(accepted) if accepted else np.empty((0, model.dim))
    return SyntheticSet(rows, "GMOTE", attempts=attempts, rejected=rejected)


def gmote_generate(model: GmoteModel, minority_count: int, cfg: GmoteConfig | None = None,
                   rng: RngStream | None = None) -> SyntheticSet:
    """Generate ``ceil(gamma * minority_count)`` inliers of the cleaned mixture."""
    cfg = cfg or GmoteConfig()
    rng = rng or RngStream(cfg.seed, "gmote/generate")
    target = synthetic_count(cfg.gamma, minority_count)
    out = sample_inliers(model.cleaned_gmm, target, cfg.policy, rng, cfg.max_attempts_factor)
    out.seed = cfg.seed
    out.provenance.update(
        n_components=model.cleaned_gmm.n_components,
        n_outliers=model.outlier_report.n_flagged,
        all_flagged=model.all_flagged,
    )
    return out


def gmote_oversample(P, cfg: GmoteConfig | None = None) -> SyntheticSet:
    """Fit then generate with ``minority_count = |P|``."""
    cfg = cfg or GmoteConfig()
    model = gmote_fit(P, cfg)
    return gmote_generate(model, np.asarray(P).shape[0], cfg)
