"""Dense linear algebra, Gaussian primitives and distribution tails.

Everything statistical in the package goes through this module: the
ridged Cholesky factor used for every covariance, Mahalanobis distances,
multivariate normal log densities and draws, and the chi-square / F upper
tails used to turn distances into tail probabilities.

The regularized incomplete gamma and beta functions are evaluated with the
classical series / continued-fraction pair (Lentz's method), vectorized
over the argument.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, InvalidArgument, NotPositiveDefinite

RIDGE_SCHEDULE = (0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2)
# squared pivots below this fraction of trace/M count as a failed factorization
PIVOT_FLOOR = 1e-14

_EPS = 1e-15
_FPMIN = 1e-300
_MAX_TERMS = 10_000


# --------------------------------------------------------------------------
# random streams


class RngStream:
    """Deterministic random stream keyed by ``(seed, label)``.

    Substreams are derived by hashing the seed together with a label path,
    so a consumer's draws never depend on how many numbers another
    consumer pulled first. The underlying bit generator is PCG64, whose
    output is platform independent.

    Parameters
    ----------
    seed : int
        64-bit unsigned master seed.
    label : str
        Tag identifying the consumer.
    """

    def __init__(self, seed: int, label: str = ""):
        self.seed = int(seed) % 2**64
        self.label = str(label)
        digest = hashlib.blake2b(
            f"{self.seed}|{self.label}".encode("utf-8"), digest_size=16
        ).digest()
        self.generator = np.random.Generator(
            np.random.PCG64(int.from_bytes(digest, "little"))
        )

    def child(self, label: str) -> "RngStream":
        """Independent substream for ``label`` under this stream's path."""
        path = f"{self.label}/{label}" if self.label else str(label)
        return RngStream(self.seed, path)

    def __getattr__(self, name):
        # normal, uniform, integers, choice, permutation, ...
        return getattr(self.generator, name)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, label={self.label!r})"


def as_stream(rng, label: str = "") -> RngStream:
    """Accept an ``RngStream`` or an integer seed."""
    if isinstance(rng, RngStream):
        return rng
    if rng is None:
        return RngStream(0, label)
    return RngStream(int(rng), label)


# --------------------------------------------------------------------------
# Cholesky with ridge escalation


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower factor ``L`` of ``S + ridge * I`` with its log-determinant."""

    lower: np.ndarray
    log_determinant: float
    ridge_applied: float

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def reconstruct(self) -> np.ndarray:
        return self.lower @ self.lower.T


def cholesky(S, base_ridge: float = 0.0) -> CholeskyFactor:
    """Factor a symmetric matrix, adding the smallest ridge that works.

    The ridge is tried in the order ``base_ridge + m * trace(S)/M`` for
    ``m`` in ``RIDGE_SCHEDULE``; the first attempt whose squared pivots all
    exceed ``PIVOT_FLOOR * trace(S)/M`` wins, so a matrix that is singular
    up to round-off still gets a ridge.

    Raises
    ------
    NotPositiveDefinite
        If the factorization fails even at the largest ridge.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InvalidArgument("matrix has non-finite entries")
    M = S.shape[0]
    scale = max(1.0, float(np.max(np.abs(S)))) if S.size else 1.0
    if np.max(np.abs(S - S.T), initial=0.0) > 1e-10 * scale:
        raise InvalidArgument("matrix is not symmetric")
    S = 0.5 * (S + S.T)

    unit = float(np.trace(S)) / M
    if not unit > 0.0:
        unit = 1.0
    eye = np.eye(M)
    for mult in RIDGE_SCHEDULE:
        ridge = float(base_ridge) + mult * unit
        try:
            L = np.linalg.cholesky(S + ridge * eye if ridge else S)
        except np.linalg.LinAlgError:
            continue
        diag = np.diag(L)
        if np.all(diag * diag > PIVOT_FLOOR * unit) and np.all(np.isfinite(L)):
            return CholeskyFactor(L, 2.0 * float(np.sum(np.log(diag))), ridge)
    raise NotPositiveDefinite(
        f"Cholesky failed at maximum ridge {base_ridge + RIDGE_SCHEDULE[-1] * unit:g}"
    )


# --------------------------------------------------------------------------
# Gaussian primitives


def _check_dims(x: np.ndarray, mean: np.ndarray, chol: CholeskyFactor) -> None:
    if mean.shape != (chol.dim,) or x.shape[-1] != chol.dim:
        raise DimensionMismatch(
            f"x has {x.shape[-1]} features, mean {mean.shape}, factor {chol.dim}"
        )


def mahalanobis_sq(x, mean, chol: CholeskyFactor):
    """Squared Mahalanobis distance ``(x - mean)^T S^{-1} (x - mean)``.

    ``x`` may be a single vector or an ``(n, M)`` array, in which case one
    distance per row is returned.
    """
    x = np.asarray(x, dtype=float)
    mean = np.asarray(mean, dtype=float)
    _check_dims(x, mean, chol)
    diff = np.atleast_2d(x) - mean
    z = solve_triangular(chol.lower, diff.T, lower=True, check_finite=False)
    d2 = np.einsum("ij,ij->j", z, z)
    return float(d2[0]) if x.ndim == 1 else d2


def mvn_logpdf(x, mean, chol: CholeskyFactor):
    """Log density of ``N(mean, L L^T)`` at ``x`` (vector or rows)."""
    x = np.asarray(x, dtype=float)
    mean = np.asarray(mean, dtype=float)
    d2 = mahalanobis_sq(x, mean, chol)
    M = chol.dim
    return -0.5 * M * math.log(2.0 * math.pi) - 0.5 * chol.log_determinant - 0.5 * d2


def mvn_from_standard(mean, chol: CholeskyFactor, z) -> np.ndarray:
    """Map standard normal draws ``z`` (vector or rows) to ``mean + L z``."""
    z = np.asarray(z, dtype=float)
    return np.asarray(mean, dtype=float) + z @ chol.lower.T


def mvn_sample(mean, chol: CholeskyFactor, rng: RngStream, n: int | None = None):
    """Draw from ``N(mean, L L^T)``; one vector if ``n`` is None, else ``n`` rows."""
    size = (chol.dim,) if n is None else (int(n), chol.dim)
    return mvn_from_standard(mean, chol, rng.standard_normal(size))


# --------------------------------------------------------------------------
# regularized incomplete gamma


def _gamma_series(a: float, x: np.ndarray) -> np.ndarray:
    # lower regularized P(a, x), valid for x < a + 1
    ap = np.full_like(x, a)
    term = np.full_like(x, 1.0 / a)
    total = term.copy()
    for _ in range(_MAX_TERMS):
        ap += 1.0
        term *= x / ap
        total += term
        if np.all(np.abs(term) < np.abs(total) * _EPS):
            break
    with np.errstate(divide="ignore"):
        log_pref = -x + a * np.log(x) - math.lgamma(a)
    return total * np.exp(log_pref)


def _gamma_cf(a: float, x: np.ndarray) -> np.ndarray:
    # upper regularized Q(a, x), valid for x >= a + 1
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _FPMIN)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _MAX_TERMS):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = b + an / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < _EPS):
            break
    return np.exp(-x + a * np.log(x) - math.lgamma(a)) * h


def gamma_q(a: float, x):
    """Upper regularized incomplete gamma ``Q(a, x) = Gamma(a, x) / Gamma(a)``."""
    if not a > 0:
        raise InvalidArgument("shape parameter must be positive")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(np.isnan(xa)):
        raise InvalidArgument("x must be non-negative")
    flat = xa.ravel()
    out = np.empty_like(flat)
    inf = np.isinf(flat)
    out[inf] = 0.0
    low = (flat < a + 1.0) & ~inf
    high = ~low & ~inf
    if np.any(low):
        out[low] = 1.0 - _gamma_series(a, flat[low])
    if np.any(high):
        out[high] = _gamma_cf(a, flat[high])
    out = np.clip(out, 0.0, 1.0).reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def chi_sq_sf(x, dof: int):
    """Upper tail ``P(chi2_dof > x)``."""
    if dof < 1:
        raise InvalidArgument("degrees of freedom must be >= 1")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise InvalidArgument("chi-square argument must be non-negative")
    return gamma_q(0.5 * dof, 0.5 * xa)


# --------------------------------------------------------------------------
# regularized incomplete beta


def _beta_cf(a: float, b: float, x: np.ndarray) -> np.ndarray:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, _MAX_TERMS):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        h = h * d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < _EPS):
            break
    return h


def betainc_reg(a: float, b: float, x):
    """Regularized incomplete beta ``I_x(a, b)``."""
    if not (a > 0 and b > 0):
        raise InvalidArgument("beta parameters must be positive")
    xa = np.asarray(x, dtype=float)
    if np.any((xa < 0) | (xa > 1)) or np.any(np.isnan(xa)):
        raise InvalidArgument("x must lie in [0, 1]")
    flat = xa.ravel()
    out = np.empty_like(flat)
    out[flat == 0.0] = 0.0
    out[flat == 1.0] = 1.0
    inner = (flat > 0.0) & (flat < 1.0)
    if np.any(inner):
        xi = flat[inner]
        lbeta = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        front = np.exp(lbeta + a * np.log(xi) + b * np.log1p(-xi))
        direct = xi < (a + 1.0) / (a + b + 2.0)
        res = np.empty_like(xi)
        if np.any(direct):
            res[direct] = front[direct] * _beta_cf(a, b, xi[direct]) / a
        if np.any(~direct):
            res[~direct] = 1.0 - front[~direct] * _beta_cf(b, a, 1.0 - xi[~direct]) / b
        out[inner] = res
    out = np.clip(out, 0.0, 1.0).reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def f_sf(x, d1: int, d2: int):
    """Upper tail ``P(F_{d1,d2} > x)``."""
    if d1 < 1 or d2 < 1:
        raise InvalidArgument("F degrees of freedom must be >= 1")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(np.isnan(xa)):
        raise InvalidArgument("F argument must be non-negative")
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(np.isinf(xa), 0.0, d2 / (d2 + d1 * xa))
    return betainc_reg(0.5 * d2, 0.5 * d1, w)
