"""Chain-efficiency diagnostics and the replicated benchmark experiments.

The central efficiency number is effective draws per minute: ESS of a
projected chain divided by the sampling wall time. Comparing two
kernels on the same problem then reduces to the ratio of their EDPMs
(REDPM), which folds mixing quality and per-step cost into one number.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateSeriesError
from .samplers import SamplerConfig, Trace, run_chain
from .targets import BananaTarget, banana_region_indicator

LOG_POSTERIOR = "log_posterior"


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Sample autocorrelation at lags 0..max_lag with biased (1/n) normalization."""
    x = np.asarray(series, dtype=np.float64)
    n = x.shape[0]
    if n <= max_lag:
        raise DegenerateSeriesError(f"series of length {n} too short for max_lag={max_lag}")
    x = x - x.mean()
    var = float(x @ x) / n
    if var == 0.0:
        raise DegenerateSeriesError("series has zero variance")
    # FFT autocovariance; pad to the next power of two to avoid wraparound
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conjugate(f), nfft)[: max_lag + 1] / n
    return acov / acov[0]


def ess(series) -> float:
    """n / (1 + 2 sum rho_k), truncated by the initial-positive-sequence rule.

    Consecutive lag pairs (rho_{2m} + rho_{2m+1}) are summed while they
    stay positive; the remainder of the (noisy) tail is dropped. Clamped
    to at most n, the nominal sample count.
    """
    x = np.asarray(series, dtype=np.float64)
    n = x.shape[0]
    if n < 4:
        raise DegenerateSeriesError("need at least 4 points for an ESS estimate")
    rho = autocorrelation(x, n - 1)
    pair_sum = 0.0
    m = 0
    while 2 * m + 1 < n:
        gamma = rho[2 * m] + rho[2 * m + 1]
        if gamma <= 0.0:
            break
        pair_sum += gamma
        m += 1
    tau = max(2.0 * pair_sum - 1.0, 1e-12)
    return min(float(n), n / tau)


def _project(trace: Trace, projection):
    if isinstance(projection, str):
        if projection != LOG_POSTERIOR:
            raise ValueError(f"unknown projection {projection!r}")
        return trace.log_pi_values
    if isinstance(projection, (int, np.integer)):
        return trace.states[:, int(projection)]
    direction = np.asarray(projection, dtype=np.float64)
    if direction.shape != (trace.d,):
        raise ValueError(f"projection vector must have shape ({trace.d},)")
    return trace.states @ direction


def edpm(trace: Trace, projection) -> float:
    """Effective draws per minute of the projected chain.

    ``projection`` is a coordinate index, a direction vector, or
    ``"log_posterior"`` for the retained log-density series.
    """
    return ess(_project(trace, projection)) / trace.wall_minutes


def redpm(trace_a: Trace, trace_b: Trace, projection) -> float:
    """EDPM ratio of sampler a over sampler b on the same projection."""
    return edpm(trace_a, projection) / edpm(trace_b, projection)


@dataclass(frozen=True)
class ReplicatedEstimate:
    """Mean and spread of m replicate chain estimates at one chain length."""

    n: int
    mean: float
    sd: float
    replicate_values: np.ndarray


def _replicate_traces(target, sampler_config: SamplerConfig, n: int, m: int, initial_x=None):
    base_seed = sampler_config.seed
    for k in range(m):
        cfg = replace(sampler_config, n_iters=n, seed=base_seed + k)
        yield run_chain(target, cfg, initial_x=initial_x)


def mc_estimate_experiment(
    target, sampler_config: SamplerConfig, f, m: int, n_list, initial_x=None
) -> list:
    """Replicated Monte Carlo averages of a bounded function f.

    For each chain length n, runs m chains (replicate k seeded with
    base seed + k), averages f over each chain's retained states, and
    reports the mean and standard deviation of the m averages.
    ``initial_x`` pins a common starting point; default is a uniform
    draw per replicate.
    """
    if m < 2:
        raise ValueError("need at least 2 replicates")
    results = []
    for n in n_list:
        means = np.empty(m)
        for k, trace in enumerate(_replicate_traces(target, sampler_config, n, m, initial_x)):
            values = np.fromiter((f(s) for s in trace.states), dtype=np.float64, count=trace.n)
            means[k] = values.mean()
        results.append(ReplicatedEstimate(n, float(means.mean()), float(means.std(ddof=1)), means))
    return results


def coverage_experiment(
    target: BananaTarget, sampler_config: SamplerConfig, p: float, m: int, n_list, initial_x=None
) -> list:
    """Replicated Monte Carlo estimates of the p-probability region coverage.

    Each replicate's estimate is the fraction of retained states inside
    the twisted ellipsoid region of nominal probability p.
    """
    if m < 2:
        raise ValueError("need at least 2 replicates")
    results = []
    for n in n_list:
        fractions = np.empty(m)
        for k, trace in enumerate(_replicate_traces(target, sampler_config, n, m, initial_x)):
            inside = np.fromiter(
                (banana_region_indicator(s, p, target) for s in trace.states),
                dtype=bool,
                count=trace.n,
            )
            fractions[k] = inside.mean()
        results.append(
            ReplicatedEstimate(n, float(fractions.mean()), float(fractions.std(ddof=1)), fractions)
        )
    return results


def principal_projection(trace_or_cov) -> tuple:
    """First principal direction of a covariance (or of a trace's states)
    plus the orthogonal direction with the next-largest variance.

    Both vectors are unit length with a deterministic sign convention
    (largest-magnitude component positive).
    """
    if isinstance(trace_or_cov, Trace):
        states = trace_or_cov.states
        if states.shape[0] < 2:
            raise DegenerateSeriesError("need at least 2 states for a covariance")
        cov = np.cov(states, rowvar=False)
    else:
        cov = np.asarray(trace_or_cov, dtype=np.float64)
    cov = np.atleast_2d(cov)
    eigvals, eigvecs = np.linalg.eigh(cov)
    if eigvals[-1] <= 0.0:
        raise DegenerateSeriesError("covariance has no positive eigenvalue")

    def _signed(v):
        i = int(np.argmax(np.abs(v)))
        return v if v[i] > 0 else -v

    return _signed(eigvecs[:, -1]), _signed(eigvecs[:, -2])
