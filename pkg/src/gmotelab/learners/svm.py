"""Soft-margin RBF support vector machine trained by SMO.

The solver follows the LIBSVM scheme: maximal-violating-pair selection for
the first index, second-order gain for the second, analytic two-variable
update with box clipping, and stopping once the maximal KKT violation
``m(alpha) - M(alpha)`` drops below ``tol``. Features are standardised
internally before the kernel is evaluated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import DimensionMismatch, SingleClass

_TAU = 1e-12


@dataclass
class SvmConfig:
    cost: float = 1.0
    gamma: float | None = None  # None: 1 / n_features
    tol: float = 1e-3
    max_iter: int | None = None  # None: max(10_000_000, 100 * N)
    scale: bool = True


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray
    dual_coef: np.ndarray
    bias: float
    gamma: float
    cost: float
    center: np.ndarray
    scale: np.ndarray
    support: np.ndarray
    n_iterations: int
    converged: bool
    dual_trace: tuple = ()


def rbf_kernel(A, B, gamma: float) -> np.ndarray:
    return np.exp(-gamma * cdist(A, B, "sqeuclidean"))


def _standardize(X, enabled: bool):
    if not enabled:
        return np.zeros(X.shape[1]), np.ones(X.shape[1])
    center = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd == 0] = 1.0
    return center, sd


def dual_objective(alpha, G) -> float:
    """``sum(alpha) - 0.5 alpha^T Q alpha`` from the gradient ``G = Q alpha - 1``."""
    return float(-0.5 * alpha @ (G - 1.0))


def svm_fit(X, y, cfg: SvmConfig | None = None, record_trace: bool = False) -> SvmModel:
    """Train a C-SVM with RBF kernel ``exp(-gamma ||x - z||^2)``.

    Parameters
    ----------
    X : array-like, shape (N, M)
    y : array-like of {0, 1}
        1 marks the positive (minority) class.
    cfg : SvmConfig, optional
    record_trace : bool
        Keep the dual objective after every SMO update.
    """
    cfg = cfg or SvmConfig()
    X = np.asarray(X, dtype=float)
    lab = np.asarray(y)
    if np.unique(lab).size < 2:
        raise SingleClass("SVM training needs both classes")
    yy = np.where(lab == 1, 1.0, -1.0)
    n, m = X.shape
    gamma = cfg.gamma if cfg.gamma is not None else 1.0 / m
    center, sd = _standardize(X, cfg.scale)
    Z = (X - center) / sd
    K = rbf_kernel(Z, Z, gamma)
    Kdiag = np.diag(K).copy()
    C = float(cfg.cost)
    max_iter = cfg.max_iter or max(10_000_000, 100 * n)

    alpha = np.zeros(n)
    G = -np.ones(n)
    trace = [0.0] if record_trace else None
    pos = yy > 0
    it = 0
    converged = False
    while it < max_iter:
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        minus_yG = -yy * G
        cand_i = np.where(up, minus_yG, -np.inf)
        i = int(np.argmax(cand_i))
        gmax = cand_i[i]
        low_vals = np.where(low, -minus_yG, -np.inf)
        gmax2 = low_vals.max()
        if gmax + gmax2 < cfg.tol:
            converged = True
            break
        # second-order working-set selection for j
        b = gmax + low_vals
        quad = Kdiag[i] + Kdiag - 2.0 * K[i]
        quad = np.where(quad > 0, quad, _TAU)
        obj = np.where(low & (b > 0), -(b * b) / quad, np.inf)
        j = int(np.argmin(obj))
        if not np.isfinite(obj[j]):
            converged = True
            break

        ai, aj = alpha[i], alpha[j]
        yi, yj = yy[i], yy[j]
        q = Kdiag[i] + Kdiag[j] - 2.0 * K[i, j]
        q = q if q > 0 else _TAU
        if yi != yj:
            delta = (-G[i] - G[j]) / q
            diff = ai - aj
            ni, nj = ai + delta, aj + delta
            if diff > 0:
                if nj < 0:
                    nj, ni = 0.0, diff
            elif ni < 0:
                ni, nj = 0.0, -diff
            if diff > 0:
                if ni > C:
                    ni, nj = C, C - diff
            elif nj > C:
                nj, ni = C, C + diff
        else:
            delta = (G[i] - G[j]) / q
            total = ai + aj
            ni, nj = ai - delta, aj + delta
            if total > C:
                if ni > C:
                    ni, nj = C, total - C
            elif nj < 0:
                nj, ni = 0.0, total
            if total > C:
                if nj > C:
                    nj, ni = C, total - C
            elif ni < 0:
                ni, nj = 0.0, total
        dai, daj = ni - ai, nj - aj
        alpha[i], alpha[j] = ni, nj
        G += yy * (yi * dai * K[:, i] + yj * daj * K[:, j])
        it += 1
        if record_trace:
            trace.append(dual_objective(alpha, G))

    rho = _rho(alpha, G, yy, C)
    sv = alpha > 0
    return SvmModel(
        support_vectors=Z[sv].copy(),
        dual_coef=(alpha * yy)[sv],
        bias=-rho,
        gamma=gamma,
        cost=C,
        center=center,
        scale=sd,
        support=np.flatnonzero(sv),
        n_iterations=it,
        converged=converged,
        dual_trace=tuple(trace) if record_trace else (),
    )


def _rho(alpha, G, yy, C) -> float:
    yG = yy * G
    at_upper = alpha >= C
    at_lower = alpha <= 0
    free = ~at_upper & ~at_lower
    if free.any():
        return float(yG[free].mean())
    ub_mask = (at_upper & (yy < 0)) | (at_lower & (yy > 0))
    lb_mask = (at_upper & (yy > 0)) | (at_lower & (yy < 0))
    ub = yG[ub_mask].min() if ub_mask.any() else np.inf
    lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
    return float((ub + lb) / 2.0)


def svm_score(model: SvmModel, X) -> np.ndarray:
    """Decision value ``sum_i alpha_i y_i k(x_i, x) + b``; positive means class 1."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.center.size:
        raise DimensionMismatch(f"X has {X.shape[1]} features, model has {model.center.size}")
    Z = (X - model.center) / model.scale
    if model.support_vectors.shape[0] == 0:
        return np.full(X.shape[0], model.bias)
    return rbf_kernel(Z, model.support_vectors, model.gamma) @ model.dual_coef + model.bias
