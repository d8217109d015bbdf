"""Two-level target distributions.

Every target exposes a cheap surrogate ``log_pi_star`` and an expensive
``log_pi``, both defined on a bounded support box and returning -inf
outside it. Densities are computed in log space throughout (the heavy
tails and products involved underflow in double precision otherwise)
and need only be correct up to an additive constant.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .errors import DataShapeError, NotPositiveDefinite, SolverFailure
from .linalg import LOG_2PI, Vector, cholesky, log_mvn_density_factor, _forward_solve
from .ode import LVParams, SolverGrid, solve_lv


@dataclass(frozen=True)
class Box:
    """Axis-aligned bounded support region (componentwise lower < upper)."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise DataShapeError("box bounds must be 1-d arrays of equal length")
        if not np.all(lower < upper):
            raise DataShapeError("box requires lower < upper componentwise")

    @property
    def d(self) -> int:
        return self.lower.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def diameter(self) -> float:
        """Euclidean length of the main diagonal."""
        return float(np.linalg.norm(self.widths))

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def sample_uniform(self, rng: np.random.Generator) -> np.ndarray:
        return self.lower + self.widths * rng.random(self.d)


class TwoLevelTarget:
    """Interface: dimension, support box, and the two log-densities."""

    d: int
    support: Box

    def log_pi(self, x: Vector) -> float:
        raise NotImplementedError

    def log_pi_star(self, x: Vector) -> float:
        raise NotImplementedError


class CustomTarget(TwoLevelTarget):
    """Target assembled from two callables; handy for tests and experiments."""

    def __init__(self, support: Box, log_pi_fn, log_pi_star_fn=None):
        self.support = support
        self.d = support.d
        self._log_pi = log_pi_fn
        self._log_pi_star = log_pi_star_fn if log_pi_star_fn is not None else log_pi_fn

    def log_pi(self, x):
        if not self.support.contains(x):
            return -math.inf
        return float(self._log_pi(x))

    def log_pi_star(self, x):
        if not self.support.contains(x):
            return -math.inf
        return float(self._log_pi_star(x))


class ShiftedTTarget(TwoLevelTarget):
    """Multivariate shifted t-density truncated to a box, with a Gaussian surrogate.

    The surrogate is the normal density with the same location and shape
    matrix: right center and correlation structure, wrong tails.
    """

    def __init__(self, mu, sigma, nu, truncation_sd=5.0):
        mu = np.asarray(mu, dtype=np.float64)
        sigma = np.asarray(sigma, dtype=np.float64)
        if nu <= 0:
            raise ValueError("degrees of freedom must be positive")
        if truncation_sd <= 0:
            raise ValueError("truncation_sd must be positive")
        self.d = mu.shape[0]
        if sigma.shape != (self.d, self.d):
            raise DataShapeError(f"shape matrix must be {self.d}x{self.d}")
        self.mu = mu
        self.sigma = sigma
        self.nu = float(nu)
        self._factor = cholesky(sigma)  # raises NotPositiveDefinite for bad sigma
        marginal_sd = np.sqrt(np.diag(sigma))
        self.support = Box(mu - truncation_sd * marginal_sd, mu + truncation_sd * marginal_sd)
        log_det = 2.0 * float(np.sum(np.log(np.diag(self._factor))))
        self._t_const = (
            math.lgamma(0.5 * (self.nu + self.d))
            - math.lgamma(0.5 * self.nu)
            - 0.5 * self.d * (math.log(self.nu) + math.log(math.pi))
            - 0.5 * log_det
        )

    def _quad_form(self, x):
        y = _forward_solve(self._factor, np.asarray(x, dtype=np.float64) - self.mu)
        return float(y @ y)

    def log_pi(self, x):
        if not self.support.contains(x):
            return -math.inf
        q = self._quad_form(x)
        return self._t_const - 0.5 * (self.nu + self.d) * math.log1p(q / self.nu)

    def log_pi_star(self, x):
        if not self.support.contains(x):
            return -math.inf
        return log_mvn_density_factor(x, self.mu, self._factor)


def shifted_t_target(mu, sigma, nu, truncation_sd=5.0) -> ShiftedTTarget:
    """Shifted t-target truncated at mu +/- truncation_sd marginal SDs."""
    return ShiftedTTarget(mu, sigma, nu, truncation_sd)


class BananaTarget(TwoLevelTarget):
    """Gaussian density composed with the banana twist map.

    The twist phi(x) = (a*x1, x2/a + b*a^2*(x1^2 + 1), x3, ..., xd) has
    unit Jacobian, so log pi(x) = log N(phi(x); mu, sigma) exactly. The
    surrogate is the untwisted Gaussian evaluated at x itself.
    """

    def __init__(self, mu, sigma, a, b, truncation_sd=5.0):
        if a == 0:
            raise ValueError("twist parameter a must be nonzero")
        mu = np.asarray(mu, dtype=np.float64)
        sigma = np.asarray(sigma, dtype=np.float64)
        self.d = mu.shape[0]
        if self.d < 2:
            raise DataShapeError("banana target needs d >= 2")
        if sigma.shape != (self.d, self.d):
            raise DataShapeError(f"covariance must be {self.d}x{self.d}")
        self.mu = mu
        self.sigma = sigma
        self.a = float(a)
        self.b = float(b)
        self._factor = cholesky(sigma)
        self.support = self._preimage_box(truncation_sd)

    def _preimage_box(self, truncation_sd):
        # Bounding box of the twist preimage of the Gaussian's
        # componentwise +/- truncation_sd box; contains essentially all
        # of the twisted distribution's mass.
        sd = np.sqrt(np.diag(self.sigma))
        y_lo = self.mu - truncation_sd * sd
        y_hi = self.mu + truncation_sd * sd
        a, b = self.a, self.b
        x1_bounds = sorted((y_lo[0] / a, y_hi[0] / a))
        x1_sq_hi = max(x1_bounds[0] ** 2, x1_bounds[1] ** 2)
        x1_sq_lo = 0.0 if x1_bounds[0] <= 0.0 <= x1_bounds[1] else min(
            x1_bounds[0] ** 2, x1_bounds[1] ** 2
        )
        x2_candidates = [
            a * y2 - a**3 * b * (x1_sq + 1.0)
            for y2 in (y_lo[1], y_hi[1])
            for x1_sq in (x1_sq_lo, x1_sq_hi)
        ]
        lower = np.concatenate(([x1_bounds[0], min(x2_candidates)], y_lo[2:]))
        upper = np.concatenate(([x1_bounds[1], max(x2_candidates)], y_hi[2:]))
        return Box(lower, upper)

    def twist(self, x):
        """phi(x); changes only the first two coordinates."""
        x = np.asarray(x, dtype=np.float64)
        y = x.copy()
        y[0] = self.a * x[0]
        y[1] = x[1] / self.a + self.b * self.a**2 * (x[0] ** 2 + 1.0)
        return y

    def untwist(self, y):
        """phi^{-1}(y), the exact inverse of :meth:`twist`."""
        y = np.asarray(y, dtype=np.float64)
        x = y.copy()
        x[0] = y[0] / self.a
        x[1] = self.a * (y[1] - self.b * self.a**2 * (x[0] ** 2 + 1.0))
        return x

    def log_pi(self, x):
        if not self.support.contains(x):
            return -math.inf
        return log_mvn_density_factor(self.twist(x), self.mu, self._factor)

    def log_pi_star(self, x):
        if not self.support.contains(x):
            return -math.inf
        return log_mvn_density_factor(x, self.mu, self._factor)

    def mahalanobis_sq(self, x) -> float:
        """(phi(x) - mu)^T Sigma^{-1} (phi(x) - mu)."""
        y = _forward_solve(self._factor, self.twist(x) - self.mu)
        return float(y @ y)


def banana_target(mu, sigma, a, b, truncation_sd=5.0) -> BananaTarget:
    """Twisted-Gaussian target with a Gaussian surrogate."""
    return BananaTarget(mu, sigma, a, b, truncation_sd)


def banana_region_indicator(x, p: float, target: BananaTarget) -> bool:
    """True iff x lies in the twisted p-probability ellipsoid region.

    Under the exact twisted Gaussian, the Mahalanobis form of phi(x) is
    chi-squared with d degrees of freedom, so the region has probability
    exactly p.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    return target.mahalanobis_sq(x) <= chi2.ppf(p, df=target.d)


class LogisticTarget(TwoLevelTarget):
    """Bayesian logistic regression posterior for imbalanced tall data.

    The full log-likelihood splits into a one-response sum and a
    zero-response sum; with far more zeros than ones, the zero sum
    dominates the cost. The surrogate rescales a fixed random subsample
    of the zero rows by N0/n0, so it needs only a partial data scan.
    """

    def __init__(self, X, y, subsample_indices, sigma0=None, support_halfwidth=20.0):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.ndim != 2:
            raise DataShapeError("design matrix must be 2-d")
        n, d = X.shape
        if y.shape != (n,):
            raise DataShapeError(f"response length {y.shape} does not match {n} rows")
        if not np.all((y == 0) | (y == 1)):
            raise DataShapeError("responses must be 0/1")
        if np.linalg.matrix_rank(X) < d:
            raise DataShapeError("design matrix must have full column rank")
        subsample_indices = np.sort(np.asarray(subsample_indices, dtype=np.int64))
        zero_rows = np.flatnonzero(y == 0)
        if not np.isin(subsample_indices, zero_rows).all():
            raise DataShapeError("subsample indices must point at zero-response rows")
        if len(np.unique(subsample_indices)) != subsample_indices.shape[0]:
            raise DataShapeError("subsample indices must be unique")

        self.d = d
        self.n_rows = n
        self._X_ones = np.ascontiguousarray(X[y == 1])
        self._X_zeros = np.ascontiguousarray(X[zero_rows])
        self._X_sub = np.ascontiguousarray(X[subsample_indices])
        self.n_zero = int(zero_rows.shape[0])
        self.n_sub = int(subsample_indices.shape[0])
        if self.n_sub == 0:
            raise DataShapeError("subsample must be nonempty")
        self._zero_scale = self.n_zero / self.n_sub

        if sigma0 is None:
            sigma0 = 100.0 * np.eye(d)
        self._prior_factor = cholesky(np.asarray(sigma0, dtype=np.float64))
        self._prior_mean = np.zeros(d)
        hw = float(support_halfwidth)
        self.support = Box(np.full(d, -hw), np.full(d, hw))

    @staticmethod
    def _neg_log1p_exp_sum(xb):
        # sum_i -log(1 + exp(xb_i)), computed stably
        return -float(np.logaddexp(0.0, xb).sum())

    def log_likelihood(self, beta) -> float:
        """Full-data log-likelihood (complete scan)."""
        t1 = self._X_ones @ beta
        ones_part = float(t1.sum()) + self._neg_log1p_exp_sum(t1)
        return ones_part + self._neg_log1p_exp_sum(self._X_zeros @ beta)

    def log_likelihood_subsampled(self, beta) -> float:
        """Surrogate log-likelihood: zero-response sum scaled up from the subsample."""
        t1 = self._X_ones @ beta
        ones_part = float(t1.sum()) + self._neg_log1p_exp_sum(t1)
        return ones_part + self._zero_scale * self._neg_log1p_exp_sum(self._X_sub @ beta)

    def _log_prior(self, beta):
        return log_mvn_density_factor(beta, self._prior_mean, self._prior_factor)

    def log_pi(self, beta):
        if not self.support.contains(beta):
            return -math.inf
        return self.log_likelihood(beta) + self._log_prior(beta)

    def log_pi_star(self, beta):
        if not self.support.contains(beta):
            return -math.inf
        return self.log_likelihood_subsampled(beta) + self._log_prior(beta)


def logistic_target(X, y, subsample_indices, sigma0=None, support_halfwidth=20.0) -> LogisticTarget:
    """Logistic regression posterior with a subsampled-likelihood surrogate."""
    return LogisticTarget(X, y, subsample_indices, sigma0, support_halfwidth)


@dataclass(frozen=True)
class LVPriors:
    """Priors for the predator-prey calibration.

    Uniform priors on the rate constants; lognormal priors on the noise
    scales and initial populations, truncated at +/- ``log_halfwidth``
    log-standard-deviations to keep the support bounded.
    """

    alpha_max: float = 0.1
    beta_max: float = 0.01
    gamma_max: float = 0.1
    delta_max: float = 0.01
    sigma_log_mean: float = -1.0
    sigma_log_sd: float = 1.0
    y0_log_mean: float = math.log(10.0)
    y0_log_sd: float = 1.0
    log_halfwidth: float = 4.0

    @property
    def sigma_bounds(self):
        w = self.log_halfwidth * self.sigma_log_sd
        return math.exp(self.sigma_log_mean - w), math.exp(self.sigma_log_mean + w)

    @property
    def y0_bounds(self):
        w = self.log_halfwidth * self.y0_log_sd
        return math.exp(self.y0_log_mean - w), math.exp(self.y0_log_mean + w)


def _lognormal_logpdf(z, log_mean, sd):
    return -math.log(z * sd) - 0.5 * LOG_2PI - 0.5 * ((math.log(z) - log_mean) / sd) ** 2


class LotkaVolterraTarget(TwoLevelTarget):
    """Posterior of the 8-parameter predator-prey inverse problem.

    Parameter vector theta = (alpha, beta, gamma, delta, sigma1, sigma2,
    y1_0, y2_0). The exact posterior integrates the system on the fine
    grid; the surrogate uses the coarse grid. Observations are lognormal
    around the trajectory: log z = log y + N(0, sigma_j^2) per species.
    """

    def __init__(self, data, fine_grid: SolverGrid, coarse_grid: SolverGrid, priors=None, method="rk4"):
        self.priors = priors if priors is not None else LVPriors()
        self.data = data
        self.fine_grid = fine_grid
        self.coarse_grid = coarse_grid
        self.method = method
        self.d = 8
        for grid in (fine_grid, coarse_grid):
            grid_times = np.asarray(grid.observation_times)
            if grid_times.shape != np.shape(data.times) or not np.allclose(
                grid_times, data.times, atol=1e-9
            ):
                raise DataShapeError("grid observation times must match the data times")
        counts = np.asarray(data.counts, dtype=np.float64)
        if counts.shape != (2, len(data.times)):
            raise DataShapeError("expected counts of shape (2, n_times)")
        self._log_z = np.log(counts)
        p = self.priors
        s_lo, s_hi = p.sigma_bounds
        y_lo, y_hi = p.y0_bounds
        self.support = Box(
            np.array([0.0, 0.0, 0.0, 0.0, s_lo, s_lo, y_lo, y_lo]),
            np.array([p.alpha_max, p.beta_max, p.gamma_max, p.delta_max, s_hi, s_hi, y_hi, y_hi]),
        )
        self._uniform_const = -(
            math.log(p.alpha_max) + math.log(p.beta_max) + math.log(p.gamma_max) + math.log(p.delta_max)
        )

    def _log_prior(self, theta):
        p = self.priors
        out = self._uniform_const
        out += _lognormal_logpdf(theta[4], p.sigma_log_mean, p.sigma_log_sd)
        out += _lognormal_logpdf(theta[5], p.sigma_log_mean, p.sigma_log_sd)
        out += _lognormal_logpdf(theta[6], p.y0_log_mean, p.y0_log_sd)
        out += _lognormal_logpdf(theta[7], p.y0_log_mean, p.y0_log_sd)
        return out

    def _log_density(self, theta, grid):
        theta = np.asarray(theta, dtype=np.float64)
        if not self.support.contains(theta):
            return -math.inf
        params = LVParams(theta[0], theta[1], theta[2], theta[3])
        try:
            traj = solve_lv(params, (theta[6], theta[7]), grid, self.method)
        except SolverFailure:
            return -math.inf
        log_y = np.log(traj)
        loglik = 0.0
        n_obs = self._log_z.shape[1]
        for j in range(2):
            sigma = theta[4 + j]
            resid = self._log_z[j] - log_y[j]
            loglik += (
                -float(self._log_z[j].sum())
                - n_obs * (math.log(sigma) + 0.5 * LOG_2PI)
                - 0.5 * float(resid @ resid) / sigma**2
            )
        return self._log_prior(theta) + loglik

    def log_pi(self, theta):
        return self._log_density(theta, self.fine_grid)

    def log_pi_star(self, theta):
        return self._log_density(theta, self.coarse_grid)


def lotka_volterra_target(data, fine_grid, coarse_grid, priors=None, method="rk4") -> LotkaVolterraTarget:
    """Predator-prey calibration posterior at two solver fidelities."""
    return LotkaVolterraTarget(data, fine_grid, coarse_grid, priors, method)
