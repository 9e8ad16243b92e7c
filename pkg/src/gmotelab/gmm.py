"""Gaussian mixture models fitted by EM, with BIC model selection.

The fitter runs several k-means++ initialised restarts and keeps the one
with the highest final log-likelihood. Covariances always go through
:func:`gmotelab.numcore.cholesky`, so singular minority clusters (fewer
points than dimensions, constant features) are handled by ridge
escalation instead of failing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .clustering import kmeans_plusplus
from .errors import DimensionMismatch, EmptyData, InvalidArgument, TooManyComponents
from .numcore import PIVOT_FLOOR, CholeskyFactor, RngStream, as_stream, cholesky, mahalanobis_sq, mvn_from_standard

_LOG_2PI = math.log(2.0 * math.pi)
_WEIGHT_FLOOR = 1e-6
_COLLAPSE_RIDGE = 1e-4


@dataclass(frozen=True)
class GaussianComponent:
    weight: float
    mean: np.ndarray
    covariance: np.ndarray
    cholesky: CholeskyFactor

    @classmethod
    def from_moments(cls, weight, mean, covariance) -> "GaussianComponent":
        cov = np.asarray(covariance, dtype=float)
        return cls(float(weight), np.asarray(mean, dtype=float), cov, cholesky(cov))

    def logpdf(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        d2 = mahalanobis_sq(X, self.mean, self.cholesky)
        return -0.5 * (self.mean.size * _LOG_2PI + self.cholesky.log_determinant + d2)


@dataclass(frozen=True)
class GmmModel:
    """A fitted (or hand-built) Gaussian mixture.

    ``trace`` holds the log-likelihood after every accepted EM iteration of
    the winning restart; ``n_obs`` is the number of rows it was fitted on.
    """

    components: tuple
    dim: int
    log_likelihood: float = float("nan")
    n_iterations: int = 0
    bic: float = float("nan")
    n_obs: int = 0
    trace: tuple = ()
    converged: bool = True

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def param_count(self) -> int:
        return param_count(self.n_components, self.dim)

    @property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @property
    def means(self) -> np.ndarray:
        return np.array([c.mean for c in self.components])

    @property
    def covariances(self) -> np.ndarray:
        return np.array([c.covariance for c in self.components])

    @classmethod
    def from_parameters(cls, weights, means, covariances) -> "GmmModel":
        """Build a model directly from mixture parameters (no fitting)."""
        weights = np.asarray(weights, dtype=float)
        weights = weights / weights.sum()
        comps = tuple(
            GaussianComponent.from_moments(w, m, S)
            for w, m, S in zip(weights, np.atleast_2d(means), covariances)
        )
        return cls(comps, comps[0].mean.size)


@dataclass
class EmConfig:
    """EM settings. ``min_effective_count`` defaults to ``M + 1``."""

    max_iterations: int = 200
    rel_tolerance: float = 1e-6
    n_restarts: int = 5
    min_effective_count: float | None = None

    def __post_init__(self):
        if self.max_iterations < 1 or self.n_restarts < 1 or not self.rel_tolerance > 0:
            raise InvalidArgument("EM settings must be positive")
        if self.min_effective_count is not None and not self.min_effective_count > 0:
            raise InvalidArgument("min_effective_count must be positive")


def param_count(n_components: int, dim: int) -> int:
    """Free parameters of a full-covariance mixture."""
    C, M = n_components, dim
    return (C - 1) + C * M + C * M * (M + 1) // 2


def default_c_range(n: int, dim: int) -> range:
    """Candidate component counts ``1 .. min(9, n // (dim + 2))``, at least ``{1}``."""
    return range(1, max(1, min(9, n // (dim + 2))) + 1)


# --------------------------------------------------------------------------


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatch("X must be two-dimensional")
    return X


def _factor_all(covs: np.ndarray, ridges: np.ndarray) -> list:
    """Cholesky factors of ``covs[c] + ridges[c] * I`` for a stack of covariances.

    All matrices go through one batched LAPACK call; any that fail there,
    or whose pivots fall below the floor, are redone by the
    ridge-escalating :func:`cholesky`.
    """
    M = covs.shape[1]
    unit = np.trace(covs, axis1=1, axis2=2) / M
    unit = np.where(unit > 0.0, unit, 1.0)
    ok = np.zeros(len(covs), dtype=bool)
    try:
        L = np.linalg.cholesky(covs + ridges[:, None, None] * np.eye(M) if ridges.any() else covs)
    except np.linalg.LinAlgError:
        L = None
    if L is not None:
        diag = np.diagonal(L, axis1=1, axis2=2)
        with np.errstate(invalid="ignore"):
            ok = np.all(np.isfinite(L), axis=(1, 2)) & np.all(diag * diag > PIVOT_FLOOR * unit[:, None], axis=1)
    out = []
    for c in range(len(covs)):
        if ok[c]:
            d = np.diagonal(L[c])
            out.append(CholeskyFactor(L[c], 2.0 * float(np.log(d).sum()), float(ridges[c])))
        else:
            out.append(cholesky(covs[c], ridges[c]))
    return out


def _log_joint(X: np.ndarray, weights, means, chols) -> np.ndarray:
    M = X.shape[1]
    L = np.array([ch.lower for ch in chols])
    logdet = np.array([ch.log_determinant for ch in chols])
    Linv = np.linalg.inv(L)
    diff = X[None, :, :] - np.asarray(means)[:, None, :]
    z = np.matmul(diff, Linv.transpose(0, 2, 1))
    d2 = np.square(z).sum(axis=2).T
    with np.errstate(divide="ignore"):
        logw = np.log(weights)
    return logw - 0.5 * (M * _LOG_2PI + logdet + d2)


def _e_step(X, weights, means, chols):
    lj = _log_joint(X, weights, means, chols)
    top = lj.max(axis=1, keepdims=True)
    top[~np.isfinite(top)] = 0.0
    ex = np.exp(lj - top)
    tot = ex.sum(axis=1, keepdims=True)
    lse = np.log(tot) + top
    return float(lse.sum()), ex / tot


def _m_step(X, resp, prev_means, prev_covs, min_eff, data_trace):
    N, M = X.shape
    nk = resp.sum(axis=0)
    alive = nk > 1e-12 * N
    means = prev_means.copy()
    covs = prev_covs.copy()
    if alive.any():
        means[alive] = (resp[:, alive].T @ X) / nk[alive, None]
        diff = X[None, :, :] - means[alive][:, None, :]
        weighted = diff * resp[:, alive].T[:, :, None]
        upd = np.matmul(weighted.transpose(0, 2, 1), diff) / nk[alive, None, None]
        covs[alive] = 0.5 * (upd + upd.transpose(0, 2, 1))
    collapsed = nk < min_eff
    ridges = np.where(collapsed, _COLLAPSE_RIDGE * data_trace / M, 0.0)
    chols = _factor_all(covs, ridges)
    weights = nk / N
    if collapsed.any():
        weights = np.maximum(weights, np.where(collapsed, _WEIGHT_FLOOR, 0.0))
    weights = weights / weights.sum()
    return weights, means, covs, chols


def _run_em(X, C, cfg: EmConfig, rng: RngStream, min_eff: float):
    N, M = X.shape
    pooled = np.cov(X, rowvar=False, bias=True).reshape(M, M)
    data_trace = float(np.trace(pooled))
    if not data_trace > 0:
        data_trace = float(M)
    base = cholesky(pooled)
    means = X[kmeans_plusplus(X, C, rng)].copy()
    covs = np.repeat(base.reconstruct()[None], C, axis=0)
    chols = [base] * C
    weights = np.full(C, 1.0 / C)

    ll, resp = _e_step(X, weights, means, chols)
    trace = [ll]
    converged = False
    for _ in range(cfg.max_iterations):
        w_new, m_new, c_new, ch_new = _m_step(X, resp, means, covs, min_eff, data_trace)
        new_ll, new_resp = _e_step(X, w_new, m_new, ch_new)
        if not np.isfinite(new_ll) or new_ll < ll:
            # regularisation made the step non-ascending: keep the last state
            converged = True
            break
        weights, means, covs, chols = w_new, m_new, c_new, ch_new
        resp = new_resp
        delta = new_ll - ll
        ll = new_ll
        trace.append(ll)
        if abs(delta) < cfg.rel_tolerance * (1.0 + abs(ll)):
            converged = True
            break
    comps = tuple(
        GaussianComponent(float(w), m.copy(), ch.reconstruct(), ch)
        for w, m, ch in zip(weights, means, chols)
    )
    return comps, trace, converged


def em_fit(X, C: int, cfg: EmConfig | None = None, rng=None) -> GmmModel:
    """Fit a ``C``-component full-covariance mixture by EM.

    Parameters
    ----------
    X : array-like, shape (N, M)
    C : int
        Number of components, ``1 <= C <= N``.
    cfg : EmConfig, optional
    rng : RngStream or int, optional
        Each restart draws from its own ``restart<r>`` substream.

    Returns
    -------
    GmmModel
        The restart with the highest final log-likelihood (ties go to the
        lowest restart index). Its ``bic`` is computed with ``n = N``.
    """
    cfg = cfg or EmConfig()
    rng = as_stream(rng, "em")
    X = _as_matrix(X)
    N, M = X.shape
    if N < 1:
        raise EmptyData("cannot fit a mixture to zero rows")
    if C < 1:
        raise InvalidArgument("C must be >= 1")
    if C > N:
        raise TooManyComponents(f"C={C} exceeds N={N}")
    min_eff = cfg.min_effective_count if cfg.min_effective_count is not None else M + 1.0
    restarts = 1 if C == 1 else cfg.n_restarts

    best = None
    for r in range(restarts):
        comps, trace, converged = _run_em(X, C, cfg, rng.child(f"restart{r}"), min_eff)
        if best is None or trace[-1] > best[1][-1]:
            best = (comps, trace, converged)
    comps, trace, converged = best
    model = GmmModel(
        components=comps,
        dim=M,
        log_likelihood=float(trace[-1]),
        n_iterations=len(trace) - 1,
        n_obs=N,
        trace=tuple(trace),
        converged=converged,
    )
    return _with_bic(model, N)


def _with_bic(model: GmmModel, n: int) -> GmmModel:
    return GmmModel(
        model.components, model.dim, model.log_likelihood, model.n_iterations,
        bic(model, n), model.n_obs, model.trace, model.converged,
    )


def gmm_loglik(model: GmmModel, X) -> float:
    """Total log-likelihood ``sum_i log sum_c pi_c N(x_i | mu_c, S_c)``."""
    X = _as_matrix(X)
    if X.shape[1] != model.dim:
        raise DimensionMismatch(f"X has {X.shape[1]} features, model has {model.dim}")
    lj = _log_joint(X, model.weights, model.means, [c.cholesky for c in model.components])
    return float(logsumexp(lj, axis=1).sum())


def bic(model: GmmModel, n: int) -> float:
    """Schwarz criterion ``-2 log L + nu log n``; lower is better."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    return -2.0 * model.log_likelihood + model.param_count * math.log(n)


def select_by_bic(X, c_range=None, cfg: EmConfig | None = None, rng=None,
                  return_candidates: bool = False):
    """Fit every ``C`` in ``c_range`` and keep the lowest-BIC model.

    Ties go to the smaller ``C``. ``c_range`` defaults to
    :func:`default_c_range`. With ``return_candidates`` a second value maps
    each ``C`` to its fitted model.
    """
    X = _as_matrix(X)
    rng = as_stream(rng, "bic")
    cands = sorted(set(int(c) for c in (c_range if c_range is not None
                                         else default_c_range(*X.shape))))
    if not cands:
        raise InvalidArgument("c_range is empty")
    fitted = {C: em_fit(X, C, cfg, rng.child(f"C{C}")) for C in cands}
    best = min(cands, key=lambda C: (fitted[C].bic, C))
    if return_candidates:
        return fitted[best], fitted
    return fitted[best]


def gmm_sample(model: GmmModel, n: int, rng) -> np.ndarray:
    """Draw ``n`` rows: component index by weight, then a Gaussian draw.

    Component indices are drawn first for the whole batch, then standard
    normals for all rows, so the output depends only on the stream state.
    """
    rng = as_stream(rng, "gmm-sample")
    n = int(n)
    if n < 0:
        raise InvalidArgument("n must be >= 0")
    out = np.empty((n, model.dim))
    if n == 0:
        return out
    w = model.weights
    labels = rng.choice(model.n_components, size=n, p=w / w.sum())
    z = rng.standard_normal((n, model.dim))
    for c, comp in enumerate(model.components):
        rows = labels == c
        if rows.any():
            out[rows] = mvn_from_standard(comp.mean, comp.cholesky, z[rows])
    return out
