"""Dense small-dimension linear algebra used by the samplers.

Covariance matrices here are at most a few hundred rows (the shipped
problems use d = 8 and d = 11), so everything is dense and
cache-friendly: Cholesky factorization, rank-one factor updates, and
multivariate normal sampling / log-density evaluation.
"""

import math

import numpy as np
from numba import njit
from numpy.typing import NDArray

from .errors import NotPositiveDefinite

Vector = NDArray[np.float64]
SPDMatrix = NDArray[np.float64]
CholeskyFactor = NDArray[np.float64]

LOG_2PI = math.log(2.0 * math.pi)


def symmetrize(c: SPDMatrix) -> SPDMatrix:
    """Return (C + C^T)/2, absorbing round-off asymmetry from recursions."""
    c = np.asarray(c, dtype=np.float64)
    return 0.5 * (c + c.T)


def cholesky(c: SPDMatrix) -> CholeskyFactor:
    """Lower-triangular factor R with R R^T = C.

    The input is symmetrized before factorization. Raises
    :class:`NotPositiveDefinite` when C has a nonpositive pivot, which
    signals a degenerate covariance; callers are expected to add jitter
    and retry.
    """
    c = symmetrize(c)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise NotPositiveDefinite(f"expected a square matrix, got shape {c.shape}")
    try:
        return np.linalg.cholesky(c)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc


@njit(cache=True)
def _rank_one_update_inplace(r: np.ndarray, w: np.ndarray) -> None:
    # Classic O(d^2) sequence of plane rotations: after the loop,
    # r r^T (new) = r r^T (old) + w w^T.  w is destroyed.
    d = r.shape[0]
    for k in range(d):
        rkk = r[k, k]
        wk = w[k]
        new_rkk = math.hypot(rkk, wk)
        c = new_rkk / rkk
        s = wk / rkk
        r[k, k] = new_rkk
        for i in range(k + 1, d):
            r[i, k] = (r[i, k] + s * w[i]) / c
            w[i] = c * w[i] - s * r[i, k]


@njit(cache=True)
def _add_scaled_identity_inplace(r: np.ndarray, delta: float) -> None:
    # d successive axis-aligned rank-one updates with sqrt(delta) * e_j,
    # i.e. r r^T gains delta * I exactly.
    d = r.shape[0]
    sq = math.sqrt(delta)
    w = np.zeros(d)
    for j in range(d):
        w[j] = sq
        for i in range(j + 1, d):
            w[i] = 0.0
        for k in range(j, d):
            rkk = r[k, k]
            wk = w[k]
            new_rkk = math.hypot(rkk, wk)
            c = new_rkk / rkk
            s = wk / rkk
            r[k, k] = new_rkk
            for i in range(k + 1, d):
                r[i, k] = (r[i, k] + s * w[i]) / c
                w[i] = c * w[i] - s * r[i, k]


def rank_one_update(r: CholeskyFactor, v: Vector) -> CholeskyFactor:
    """Factor of R R^T + v v^T, computed in O(d^2) without refactorizing.

    Updates by a positive semidefinite term only (no downdates), so the
    result always exists. The inputs are not modified.
    """
    r = np.asarray(r, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (r.shape[0],):
        raise NotPositiveDefinite(
            f"update vector shape {v.shape} does not match factor dimension {r.shape[0]}"
        )
    out = r.copy()
    _rank_one_update_inplace(out, v.copy())
    return out


def add_scaled_identity(r: CholeskyFactor, delta: float) -> CholeskyFactor:
    """Factor of R R^T + delta * I for delta >= 0, via d axis-aligned rank-one updates."""
    if delta < 0:
        raise NotPositiveDefinite("identity updates must be nonnegative (no downdates)")
    out = np.asarray(r, dtype=np.float64).copy()
    if delta > 0:
        _add_scaled_identity_inplace(out, float(delta))
    return out


def mvn_sample(mean: Vector, r: CholeskyFactor, rng: np.random.Generator) -> Vector:
    """One draw mean + R z with z ~ N(0, I).

    Consumes exactly d standard normals from ``rng`` in index order, so
    callers can rely on stream alignment across kernels.
    """
    z = rng.standard_normal(mean.shape[0])
    return mean + r @ z


def log_mvn_density(x: Vector, mean: Vector, c: SPDMatrix) -> float:
    """Exact Gaussian log-density at x, normalizing constant included."""
    r = cholesky(c)
    return log_mvn_density_factor(x, mean, r)


def log_mvn_density_factor(x: Vector, mean: Vector, r: CholeskyFactor) -> float:
    """As :func:`log_mvn_density` but with the covariance factor precomputed."""
    d = mean.shape[0]
    diff = np.asarray(x, dtype=np.float64) - mean
    y = _forward_solve(r, diff)
    log_det = 2.0 * np.sum(np.log(np.diag(r)))
    return -0.5 * (d * LOG_2PI + log_det + float(y @ y))


@njit(cache=True)
def _forward_solve(r: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = r.shape[0]
    y = np.empty(d)
    for i in range(d):
        acc = b[i]
        for j in range(i):
            acc -= r[i, j] * y[j]
        y[i] = acc / r[i, i]
    return y
