"""Binary logistic regression by damped Newton (IRLS)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, EmptyData


@dataclass
class LogregConfig:
    max_iter: int = 100
    tol: float = 1e-8
    ridge: float = 1e-8


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    intercept: float
    converged: bool
    n_iterations: int
    loss_trace: tuple = ()


def penalized_nll(beta, X1, y, ridge: float) -> float:
    """Negative log-likelihood plus ``ridge/2 * ||w||^2`` (intercept unpenalized)."""
    eta = X1 @ beta
    return float(np.sum(np.logaddexp(0.0, eta) - y * eta) + 0.5 * ridge * beta[1:] @ beta[1:])


def penalized_grad(beta, X1, y, ridge: float) -> np.ndarray:
    p = _sigmoid(X1 @ beta)
    g = X1.T @ (p - y)
    g[1:] += ridge * beta[1:]
    return g


def _sigmoid(eta):
    return np.exp(-np.logaddexp(0.0, -eta))


def logreg_fit(X, y, cfg: LogregConfig | None = None) -> LogisticModel:
    """Maximise the ridge-penalised likelihood.

    Each Newton direction is halved until the penalised loss does not
    increase. Stops when the gradient's infinity norm reaches ``tol``
    (``converged=True``) or after ``max_iter`` steps.
    """
    cfg = cfg or LogregConfig()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise EmptyData("logistic regression needs at least two rows")
    n, m = X.shape
    X1 = np.hstack([np.ones((n, 1)), X])
    beta = np.zeros(m + 1)
    pen = np.full(m + 1, cfg.ridge)
    pen[0] = 0.0
    loss = penalized_nll(beta, X1, y, cfg.ridge)
    trace = [loss]
    n_steps = 0
    for _ in range(cfg.max_iter):
        g = penalized_grad(beta, X1, y, cfg.ridge)
        if np.max(np.abs(g)) <= cfg.tol:
            break
        p = _sigmoid(X1 @ beta)
        w = p * (1.0 - p)
        H = (X1 * w[:, None]).T @ X1 + np.diag(pen)
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        t = 1.0
        for _ in range(60):
            cand = beta - t * step
            new_loss = penalized_nll(cand, X1, y, cfg.ridge)
            if new_loss <= loss:
                break
            t *= 0.5
        else:
            break  # no descent left at machine precision
        beta, loss = cand, new_loss
        trace.append(loss)
        n_steps += 1
    g = penalized_grad(beta, X1, y, cfg.ridge)
    converged = bool(np.max(np.abs(g)) <= cfg.tol)
    return LogisticModel(beta[1:].copy(), float(beta[0]), converged, n_steps, tuple(trace))


def logreg_score(model: LogisticModel, X) -> np.ndarray:
    """``sigmoid(intercept + X @ weights)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.weights.size:
        raise DimensionMismatch(f"X has {X.shape[1]} features, model has {model.weights.size}")
    return _sigmoid(model.intercept + X @ model.weights)
