"""Running mean / covariance of the chain history and the adaptive proposal factor.

The proposal covariance is the scaled empirical covariance of all
states the chain has visited, plus a small identity jitter that keeps
it positive definite:

    C_t = C0                                  while fewer than t0 states absorbed,
    C_t = s_d * cov(x_0..x_{t-1}) + s_d * eps * I   afterwards.

The mean and covariance are maintained by an exact O(d^2) recursion
(certified against batch recomputation in the tests, not trusted on
faith), and the Cholesky factor of C_t is kept in sync by rank-one
updates between refreshes, falling back to a full refactorization when
a refresh would need more than d of them.
"""

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    SPDMatrix,
    Vector,
    _add_scaled_identity_inplace,
    _rank_one_update_inplace,
    cholesky,
)
from .targets import Box


@dataclass(frozen=True)
class AdaptationConfig:
    """Tunables of the covariance adaptation.

    c0: initial proposal covariance, used until t0 states are absorbed
    t0: length of the non-adaptive initial period (in absorbed states)
    s_d: overall proposal scale, conventionally 2.4^2 / d
    epsilon: identity jitter; must be positive for the adapted proposal
        to stay positive definite on degenerate histories
    k: refresh period; covariance and factor update every k-th absorb
    """

    c0: SPDMatrix
    t0: int
    s_d: float
    epsilon: float
    k: int = 1

    def __post_init__(self):
        c0 = np.asarray(self.c0, dtype=np.float64)
        object.__setattr__(self, "c0", c0)
        if c0.ndim != 2 or c0.shape[0] != c0.shape[1]:
            raise ValueError("c0 must be a square matrix")
        if self.t0 < 1:
            raise ValueError("t0 must be positive")
        if self.s_d <= 0:
            raise ValueError("s_d must be positive")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.k < 1:
            raise ValueError("k must be a positive integer")

    @property
    def d(self) -> int:
        return self.c0.shape[0]


@dataclass(frozen=True)
class AdaptationState:
    """Snapshot of the adaptation after some number of absorbed states.

    ``t`` counts absorbed states; ``pending`` holds up to k-1 states
    waiting for the next refresh. ``m2`` is the sum of squared
    deviations from the running mean, so the empirical covariance is
    m2 / (t - 1). ``factor`` is the Cholesky factor of the current
    proposal covariance (stale by design between refreshes when k > 1).
    """

    t: int
    mean: Vector
    m2: SPDMatrix
    factor: SPDMatrix
    pending: tuple
    adapted: bool  # factor tracks the empirical covariance rather than c0

    @property
    def raw_cov(self) -> SPDMatrix:
        """Empirical covariance (divisor t-1) of the absorbed states."""
        if self.t < 2:
            return np.zeros_like(self.m2)
        return self.m2 / (self.t - 1)


def initial_state(config: AdaptationConfig) -> AdaptationState:
    d = config.d
    return AdaptationState(
        t=0,
        mean=np.zeros(d),
        m2=np.zeros((d, d)),
        factor=cholesky(config.c0),
        pending=(),
        adapted=False,
    )


def proposal_covariance(state: AdaptationState, config: AdaptationConfig) -> SPDMatrix:
    """The covariance the current factor represents, built directly."""
    if not state.adapted:
        return np.asarray(config.c0, dtype=np.float64).copy()
    return config.s_d * state.raw_cov + config.s_d * config.epsilon * np.eye(config.d)


def proposal_factor(state: AdaptationState) -> SPDMatrix:
    """Cholesky factor of the current proposal covariance."""
    return state.factor


def absorb(state: AdaptationState, x_new: Vector, config: AdaptationConfig) -> AdaptationState:
    """Queue one realized chain state; refresh covariance and factor every k-th call.

    Returns a new state; the input state is never mutated.
    """
    x_new = np.asarray(x_new, dtype=np.float64)
    if x_new.shape != (config.d,):
        raise ValueError(f"state dimension {x_new.shape} does not match config d={config.d}")
    pending = state.pending + (x_new,)
    if len(pending) < config.k:
        return AdaptationState(state.t, state.mean, state.m2, state.factor, pending, state.adapted)
    return _refresh(state, pending, config)


def _refresh(state: AdaptationState, pending, config: AdaptationConfig) -> AdaptationState:
    t_old = state.t
    t_new = t_old + len(pending)
    mean = state.mean.copy()
    m2 = state.m2.copy()
    updates = []
    n = t_old
    for x in pending:
        n += 1
        u = x - mean
        mean += u / n
        w = math.sqrt((n - 1) / n) * u
        m2 += np.outer(w, w)
        updates.append(w)

    if t_new < config.t0:
        return AdaptationState(t_new, mean, m2, state.factor, (), False)

    s_d, eps = config.s_d, config.epsilon
    incremental = state.adapted and t_old >= 2 and len(updates) <= config.d
    if incremental:
        # Scale the old factor for the new divisor, fold in the pending
        # deviations, then restore the decayed part of the eps * I term.
        factor = state.factor * math.sqrt((t_old - 1) / (t_new - 1))
        coef = math.sqrt(s_d / (t_new - 1))
        for w in updates:
            _rank_one_update_inplace(factor, coef * w)
        _add_scaled_identity_inplace(factor, s_d * eps * (t_new - t_old) / (t_new - 1))
    else:
        cov = m2 / (t_new - 1) if t_new >= 2 else np.zeros_like(m2)
        factor = cholesky(s_d * cov + s_d * eps * np.eye(config.d))
    return AdaptationState(t_new, mean, m2, factor, (), True)


def default_config(
    d: int,
    support: Box,
    c0_scale: float = 1.0,
    t0: int = 100,
    k: int = 1,
    s_d: float = None,
    epsilon: float = None,
) -> AdaptationConfig:
    """Defaults: s_d = 2.4^2/d, c0 = c0_scale * (2.4^2/d) * I (c0_scale <= 1),
    epsilon = 1e-6 * (support diameter)^2, t0 = 100, k = 1."""
    if d < 1:
        raise ValueError("d must be at least 1")
    base_scale = 2.4**2 / d
    if s_d is None:
        s_d = base_scale
    if epsilon is None:
        epsilon = 1e-6 * support.diameter**2
    c0 = c0_scale * base_scale * np.eye(d)
    return AdaptationConfig(c0=c0, t0=t0, s_d=s_d, epsilon=epsilon, k=k)
