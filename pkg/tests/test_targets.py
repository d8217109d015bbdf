"""Target densities checked against independent references and closed forms."""

import math
import time

import numpy as np
import pytest
from scipy.stats import t as student_t

from tsam.data import generate_synthetic_logistic, generate_synthetic_lv
from tsam.errors import DataShapeError, NotPositiveDefinite
from tsam.ode import LVParams, standard_grids
from tsam.targets import (
    Box,
    LVPriors,
    banana_region_indicator,
    banana_target,
    logistic_target,
    lotka_volterra_target,
    shifted_t_target,
)


def paper_t_params():
    variances = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 4.0, 6.0])
    sd = np.sqrt(variances)
    idx = np.arange(8)
    sigma = np.outer(sd, sd) * 0.4 ** np.abs(idx[:, None] - idx[None, :])
    mu = np.arange(8.0)
    return mu, sigma


class TestBox:
    def test_contains_and_diameter(self):
        box = Box(np.array([0.0, -1.0]), np.array([2.0, 1.0]))
        assert box.contains([1.0, 0.0])
        assert not box.contains([3.0, 0.0])
        assert box.diameter == pytest.approx(math.sqrt(4.0 + 4.0))

    def test_rejects_inverted_bounds(self):
        with pytest.raises(DataShapeError):
            Box(np.array([1.0]), np.array([0.0]))

    def test_uniform_sample_inside(self):
        box = Box(np.array([-2.0, 3.0]), np.array([-1.0, 5.0]))
        rng = np.random.default_rng(0)
        for _ in range(100):
            assert box.contains(box.sample_uniform(rng))


class TestShiftedT:
    def test_paper_configuration_builds(self):
        mu, sigma = paper_t_params()
        target = shifted_t_target(mu, sigma, nu=10.0, truncation_sd=5.0)
        assert target.d == 8
        np.testing.assert_allclose(
            target.support.upper - mu, 5.0 * np.sqrt(np.diag(sigma)), rtol=1e-12
        )
        assert math.isfinite(target.log_pi(mu))
        assert math.isfinite(target.log_pi_star(mu))

    def test_elliptical_symmetry(self):
        mu, sigma = paper_t_params()
        target = shifted_t_target(mu, sigma, nu=10.0)
        rng = np.random.default_rng(1)
        for _ in range(20):
            v = 0.5 * rng.standard_normal(8)
            # rounding in mu +/- v keeps this from being bitwise
            assert target.log_pi(mu + v) == pytest.approx(target.log_pi(mu - v), rel=1e-12)

    def test_univariate_matches_scipy_reference(self):
        target = shifted_t_target(np.zeros(1), np.eye(1), nu=10.0)
        for x in (0.0, 0.7, -2.5):
            assert target.log_pi(np.array([x])) == pytest.approx(
                student_t.logpdf(x, df=10.0), abs=1e-12
            )

    def test_outside_box_is_minus_inf(self):
        mu, sigma = paper_t_params()
        target = shifted_t_target(mu, sigma, nu=10.0, truncation_sd=5.0)
        outside = target.support.upper + 1.0
        assert target.log_pi(outside) == -math.inf
        assert target.log_pi_star(outside) == -math.inf

    def test_bounded_above_on_support(self):
        # spot check of density boundedness: finite max over 1e5 points
        mu, sigma = paper_t_params()
        target = shifted_t_target(mu, sigma, nu=10.0)
        rng = np.random.default_rng(2)
        values = [
            target.log_pi(target.support.sample_uniform(rng)) for _ in range(100_000)
        ]
        assert math.isfinite(max(values))

    def test_rejects_non_spd_shape(self):
        with pytest.raises(NotPositiveDefinite):
            shifted_t_target(np.zeros(2), -np.eye(2), nu=10.0)


class TestBanana:
    def paper_target(self, truncation_sd=5.0):
        sigma = np.diag([10.0] + [1.0] * 7)
        return banana_target(np.zeros(8), sigma, a=1.0, b=0.05, truncation_sd=truncation_sd)

    def test_untwisted_degeneracy(self):
        sigma = np.diag([10.0] + [1.0] * 7)
        target = banana_target(np.zeros(8), sigma, a=1.0, b=0.0)
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = target.support.sample_uniform(rng)
            assert target.log_pi(x) == target.log_pi_star(x)

    def test_twist_round_trip(self):
        target = self.paper_target()
        rng = np.random.default_rng(4)
        for _ in range(50):
            x = rng.standard_normal(8) * 3.0
            np.testing.assert_allclose(target.untwist(target.twist(x)), x, atol=1e-12)

    def test_twist_changes_only_first_two_coordinates(self):
        target = self.paper_target()
        x = np.arange(8.0)
        y = target.twist(x)
        np.testing.assert_array_equal(y[2:], x[2:])
        assert y[1] == pytest.approx(x[1] + 0.05 * (x[0] ** 2 + 1.0))

    def test_region_center_inside_all_levels(self):
        target = self.paper_target()
        center = target.untwist(target.mu)
        for p in (0.01, 0.5, 0.683, 0.99):
            assert banana_region_indicator(center, p, target)

    def test_region_nesting(self):
        target = self.paper_target()
        rng = np.random.default_rng(5)
        for _ in range(50):
            x = target.support.sample_uniform(rng)
            inside = [banana_region_indicator(x, p, target) for p in (0.3, 0.6, 0.9)]
            # once inside, inside at every larger p
            assert inside == sorted(inside)

    def test_region_probability_against_simulation_oracle(self):
        # exact twisted-Gaussian draws: y ~ N(mu, sigma), x = phi^{-1}(y)
        target = self.paper_target()
        rng = np.random.default_rng(6)
        n = 1_000_000
        y = rng.standard_normal((n, 8)) * np.sqrt(np.diag(target.sigma)) + target.mu
        a, b = 1.0, 0.05
        x = y.copy()
        x[:, 0] = y[:, 0] / a
        x[:, 1] = a * (y[:, 1] - b * a**2 * ((y[:, 0] / a) ** 2 + 1.0))
        # vectorized replica of the region condition, cross-checked below
        q = np.einsum("ij,ij->i", y - target.mu, (y - target.mu) / np.diag(target.sigma))
        from scipy.stats import chi2

        inside = q <= chi2.ppf(0.683, df=8)
        assert abs(inside.mean() - 0.683) < 0.002
        for i in range(0, n, n // 500):
            assert banana_region_indicator(x[i], 0.683, target) == bool(inside[i])

    def test_support_box_covers_twisted_mass(self):
        target = self.paper_target()
        rng = np.random.default_rng(7)
        n = 200_000
        y = rng.standard_normal((n, 8)) * np.sqrt(np.diag(target.sigma)) + target.mu
        x = y.copy()
        x[:, 0] = y[:, 0]
        x[:, 1] = y[:, 1] - 0.05 * (y[:, 0] ** 2 + 1.0)
        inside = np.all((x >= target.support.lower) & (x <= target.support.upper), axis=1)
        assert inside.mean() > 0.985

    def test_rejects_zero_a(self):
        with pytest.raises(ValueError):
            banana_target(np.zeros(2), np.eye(2), a=0.0, b=0.1)


class TestLogistic:
    def small_dataset(self, n=200, seed=8):
        data = generate_synthetic_logistic(n, 0.7, np.zeros(11), seed)
        return data.X, data.y

    def test_full_subsample_makes_surrogate_exact(self):
        X, y = self.small_dataset()
        zero_rows = np.flatnonzero(y == 0)
        target = logistic_target(X, y, zero_rows)
        rng = np.random.default_rng(9)
        for _ in range(10):
            beta = 0.5 * rng.standard_normal(X.shape[1])
            assert target.log_pi_star(beta) == target.log_pi(beta)

    def test_zero_coefficients_closed_form(self):
        X, y = self.small_dataset()
        zero_rows = np.flatnonzero(y == 0)
        target = logistic_target(X, y, zero_rows[:50])
        n = X.shape[0]
        assert target.log_likelihood(np.zeros(X.shape[1])) == pytest.approx(
            -n * math.log(2.0), rel=1e-12
        )

    def test_surrogate_scales_zero_sum(self):
        X, y = self.small_dataset()
        zero_rows = np.flatnonzero(y == 0)
        sub = zero_rows[::2]
        target = logistic_target(X, y, sub)
        beta = np.full(X.shape[1], 0.1)
        # reconstruct the surrogate by hand from the likelihood pieces
        t1 = X[y == 1] @ beta
        ones_part = t1.sum() - np.logaddexp(0.0, t1).sum()
        sub_part = -np.logaddexp(0.0, X[sub] @ beta).sum()
        expected = ones_part + (len(zero_rows) / len(sub)) * sub_part
        assert target.log_likelihood_subsampled(beta) == pytest.approx(expected, rel=1e-12)

    def test_subsampled_likelihood_is_cheaper_at_scale(self):
        data = generate_synthetic_logistic(41_188, 0.887, np.zeros(11), seed=10)
        zero_rows = np.flatnonzero(data.y == 0)
        rng = np.random.default_rng(11)
        sub = np.sort(rng.choice(zero_rows, size=10_000, replace=False))
        target = logistic_target(data.X, data.y, sub)
        beta = 0.1 * rng.standard_normal(11)
        target.log_pi(beta), target.log_pi_star(beta)  # warm caches
        reps = 40
        t0 = time.perf_counter()
        for _ in range(reps):
            target.log_likelihood(beta)
        t1 = time.perf_counter()
        for _ in range(reps):
            target.log_likelihood_subsampled(beta)
        t2 = time.perf_counter()
        assert (t1 - t0) > 1.5 * (t2 - t1)  # roughly 4x in row counts

    def test_outside_support_box(self):
        X, y = self.small_dataset()
        target = logistic_target(X, y, np.flatnonzero(y == 0), support_halfwidth=20.0)
        assert target.log_pi(np.full(11, 25.0)) == -math.inf

    def test_shape_validation(self):
        X, y = self.small_dataset()
        with pytest.raises(DataShapeError):
            logistic_target(X, y[:-1], [0])
        with pytest.raises(DataShapeError):
            logistic_target(X, y, np.flatnonzero(y == 1)[:1])  # not a zero row
        bad = np.column_stack([X, X[:, -1]])  # rank deficient
        with pytest.raises(DataShapeError):
            logistic_target(bad, y, np.flatnonzero(y == 0)[:5])


class TestLotkaVolterra:
    TRUE_PARAMS = LVParams(0.06, 0.004, 0.05, 0.002)
    TRUE_THETA = np.array([0.06, 0.004, 0.05, 0.002, 0.2, 0.25, 30.0, 4.0])

    def make_target(self, sigmas=(0.2, 0.25)):
        obs = generate_synthetic_lv(self.TRUE_PARAMS, (30.0, 4.0), sigmas, 20, seed=12)
        fine, coarse = standard_grids(20)
        return lotka_volterra_target(obs, fine, coarse)

    def test_outside_prior_support(self):
        target = self.make_target()
        for i, bad in [(0, 0.2), (1, 0.02), (4, 100.0), (6, 1e4)]:
            theta = self.TRUE_THETA.copy()
            theta[i] = bad
            assert target.log_pi(theta) == -math.inf

    def test_zero_residual_likelihood_closed_form(self):
        # observations equal to the exact solution: the likelihood reduces
        # to the normalizing terms sum(-log(z * sigma * sqrt(2 pi)))
        fine, coarse = standard_grids(20)
        from tsam.data import ObservationSet
        from tsam.ode import solve_lv

        traj = solve_lv(self.TRUE_PARAMS, (30.0, 4.0), fine)
        obs = ObservationSet(times=np.arange(21.0), counts=traj)
        target = lotka_volterra_target(obs, fine, coarse)
        theta = self.TRUE_THETA
        expected_loglik = sum(
            -math.log(z * theta[4 + j] * math.sqrt(2 * math.pi))
            for j in range(2)
            for z in traj[j]
        )
        prior = target._log_prior(theta)
        assert target.log_pi(theta) == pytest.approx(prior + expected_loglik, rel=1e-12)

    def test_fine_and_coarse_agree_for_smooth_parameters(self):
        target = self.make_target()
        rng = np.random.default_rng(13)
        for _ in range(3):
            theta = self.TRUE_THETA * np.exp(0.05 * rng.standard_normal(8))
            lp, lps = target.log_pi(theta), target.log_pi_star(theta)
            assert math.isfinite(lp) and math.isfinite(lps)
            assert abs(lp - lps) < 1.0 / 12.0  # O(coarse step)

    def test_prior_support_matches_documented_bounds(self):
        priors = LVPriors()
        lo, hi = priors.sigma_bounds
        assert lo == pytest.approx(math.exp(-5.0))
        assert hi == pytest.approx(math.exp(3.0))
        lo, hi = priors.y0_bounds
        assert lo == pytest.approx(math.exp(math.log(10.0) - 4.0))
        assert hi == pytest.approx(math.exp(math.log(10.0) + 4.0))

    def test_mismatched_times_rejected(self):
        obs = generate_synthetic_lv(self.TRUE_PARAMS, (30.0, 4.0), (0.2, 0.2), 10, seed=1)
        fine, coarse = standard_grids(20)
        with pytest.raises(DataShapeError):
            lotka_volterra_target(obs, fine, coarse)
