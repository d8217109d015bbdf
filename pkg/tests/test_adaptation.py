"""Running-covariance recursion certified against batch recomputation."""

import numpy as np
import pytest

from tsam.adaptation import (
    AdaptationConfig,
    absorb,
    default_config,
    initial_state,
    proposal_covariance,
    proposal_factor,
)
from tsam.targets import Box


def make_config(d, t0=2, s_d=0.5, epsilon=1e-4, k=1, c0=None):
    if c0 is None:
        c0 = np.eye(d)
    return AdaptationConfig(c0=c0, t0=t0, s_d=s_d, epsilon=epsilon, k=k)


def absorb_all(config, points):
    state = initial_state(config)
    for x in points:
        state = absorb(state, x, config)
    return state


def unit_box(d, half=10.0):
    return Box(np.full(d, -half), np.full(d, half))


class TestRunningMoments:
    def test_matches_batch_covariance(self):
        rng = np.random.default_rng(0)
        points = rng.standard_normal((50, 8)) * np.array([1, 2, 3, 1, 1, 5, 1, 1.5])
        state = absorb_all(make_config(8), points)
        batch_mean = points.mean(axis=0)
        batch_cov = np.cov(points, rowvar=False)
        np.testing.assert_allclose(state.mean, batch_mean, rtol=1e-12, atol=1e-14)
        rel = np.linalg.norm(state.raw_cov - batch_cov) / np.linalg.norm(batch_cov)
        assert rel < 1e-10

    def test_degenerate_repeated_point(self):
        config = make_config(3, t0=1)
        x = np.array([2.0, -1.0, 0.5])
        state = absorb_all(config, [x, x])
        np.testing.assert_allclose(state.raw_cov, np.zeros((3, 3)), atol=1e-15)
        expected = config.s_d * config.epsilon * np.eye(3)
        np.testing.assert_allclose(proposal_covariance(state, config), expected, rtol=1e-12)
        recomposed = state.factor @ state.factor.T
        np.testing.assert_allclose(recomposed, expected, rtol=1e-10, atol=1e-18)

    def test_single_point_has_zero_covariance(self):
        config = make_config(2)
        state = absorb_all(config, [np.array([1.0, 2.0])])
        np.testing.assert_array_equal(state.raw_cov, np.zeros((2, 2)))


class TestProposalCovariance:
    def test_c0_before_t0_regardless_of_history(self):
        config = make_config(4, t0=100)
        rng = np.random.default_rng(1)
        state = absorb_all(config, rng.standard_normal((99, 4)) * 50.0)
        np.testing.assert_array_equal(proposal_covariance(state, config), config.c0)
        np.testing.assert_array_equal(proposal_factor(state), np.eye(4))

    def test_switches_at_t0(self):
        config = make_config(2, t0=5)
        rng = np.random.default_rng(2)
        state = absorb_all(config, rng.standard_normal((5, 2)))
        cov = proposal_covariance(state, config)
        assert not np.array_equal(cov, config.c0)
        expected = config.s_d * state.raw_cov + config.s_d * config.epsilon * np.eye(2)
        np.testing.assert_allclose(cov, expected, rtol=1e-12)

    def test_factor_recomposes_eq_definition_after_100_absorbs(self):
        config = make_config(8, t0=10)
        rng = np.random.default_rng(3)
        points = rng.standard_normal((100, 8))
        state = absorb_all(config, points)
        batch_cov = np.cov(points, rowvar=False)
        expected = config.s_d * batch_cov + config.s_d * config.epsilon * np.eye(8)
        recomposed = state.factor @ state.factor.T
        assert np.linalg.norm(recomposed - expected) / np.linalg.norm(expected) < 1e-8
        np.testing.assert_allclose(recomposed, expected, atol=1e-8)

    def test_min_eigenvalue_floor(self):
        config = make_config(5, t0=1, epsilon=1e-3)
        rng = np.random.default_rng(4)
        state = initial_state(config)
        floor = config.s_d * config.epsilon
        point = rng.standard_normal(5)
        for i in range(60):
            # long repeated-point stretches drive the empirical covariance
            # toward singular; the jitter must keep the proposal PD
            if i % 20 == 0:
                point = rng.standard_normal(5)
            state = absorb(state, point, config)
            if state.t >= config.t0:
                eigs = np.linalg.eigvalsh(state.factor @ state.factor.T)
                assert eigs.min() >= floor * (1.0 - 1e-9)


class TestKBatching:
    def test_pending_defers_refresh(self):
        config = make_config(3, t0=1, k=4)
        rng = np.random.default_rng(5)
        state = initial_state(config)
        for i in range(3):
            state = absorb(state, rng.standard_normal(3), config)
        assert state.t == 0
        assert len(state.pending) == 3
        np.testing.assert_array_equal(proposal_covariance(state, config), config.c0)
        state = absorb(state, rng.standard_normal(3), config)
        assert state.t == 4
        assert state.pending == ()

    @pytest.mark.parametrize("k", [5, 20])
    def test_matches_k1_at_refresh_boundaries(self, k):
        # k <= d exercises the rank-one path, k > d the full refactorization
        d = 8
        rng = np.random.default_rng(6)
        points = rng.standard_normal((200, d))
        config_1 = make_config(d, t0=20, k=1)
        config_k = make_config(d, t0=20, k=k)
        state_1 = initial_state(config_1)
        state_k = initial_state(config_k)
        for i, x in enumerate(points, start=1):
            state_1 = absorb(state_1, x, config_1)
            state_k = absorb(state_k, x, config_k)
            if i % k == 0 and i >= 20:
                cov_1 = state_1.factor @ state_1.factor.T
                cov_k = state_k.factor @ state_k.factor.T
                np.testing.assert_allclose(cov_k, cov_1, atol=1e-8, rtol=1e-8)
                np.testing.assert_allclose(state_k.mean, state_1.mean, rtol=1e-12)


class TestDefaultConfig:
    def test_d8_scale(self):
        config = default_config(8, unit_box(8))
        assert config.s_d == pytest.approx(0.72, abs=1e-12)
        np.testing.assert_allclose(config.c0, 0.72 * np.eye(8), rtol=1e-12)

    def test_d1_scale(self):
        assert default_config(1, unit_box(1)).s_d == pytest.approx(5.76, abs=1e-12)

    def test_d11_scale(self):
        assert default_config(11, unit_box(11)).s_d == pytest.approx(2.4**2 / 11, rel=1e-15)
        assert default_config(11, unit_box(11)).s_d == pytest.approx(0.5236, abs=1e-4)

    def test_epsilon_scales_with_diameter(self):
        box = unit_box(3, half=2.0)  # diameter = 4 * sqrt(3)
        config = default_config(3, box)
        assert config.epsilon == pytest.approx(1e-6 * 48.0, rel=1e-12)

    def test_defaults(self):
        config = default_config(4, unit_box(4))
        assert config.t0 == 100
        assert config.k == 1

    def test_c0_scale_below_one(self):
        config = default_config(4, unit_box(4), c0_scale=0.25)
        np.testing.assert_allclose(config.c0, 0.25 * (2.4**2 / 4) * np.eye(4))


class TestValidation:
    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            make_config(2, epsilon=0.0)
        with pytest.raises(ValueError):
            make_config(2, t0=0)
        with pytest.raises(ValueError):
            make_config(2, k=0)
        with pytest.raises(ValueError):
            make_config(2, s_d=-1.0)

    def test_absorb_rejects_wrong_dimension(self):
        config = make_config(3)
        with pytest.raises(ValueError):
            absorb(initial_state(config), np.zeros(4), config)

    def test_absorb_does_not_mutate_input_state(self):
        config = make_config(2, t0=1)
        state = absorb_all(config, [np.array([1.0, 0.0]), np.array([0.0, 1.0])])
        mean, m2 = state.mean.copy(), state.m2.copy()
        absorb(state, np.array([5.0, 5.0]), config)
        np.testing.assert_array_equal(state.mean, mean)
        np.testing.assert_array_equal(state.m2, m2)
