"""Shared fixtures and brute-force helpers for the test suite."""

import numpy as np
import pytest

from tsam.linalg import add_scaled_identity, cholesky, rank_one_update
from tsam.ode import LVParams, SolverGrid, solve_lv
from tsam.samplers import stage1_accept_prob, stage2_accept_prob


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    """Compile the numba kernels once so wall-time assertions are clean."""
    r = cholesky(np.eye(2))
    rank_one_update(r, np.array([0.5, 0.5]))
    add_scaled_identity(r, 1e-3)
    grid = SolverGrid(0.0, 1.0, 0.5, (0.0, 1.0))
    solve_lv(LVParams(0.05, 0.005, 0.05, 0.005), (10.0, 10.0), grid)
    solve_lv(LVParams(0.05, 0.005, 0.05, 0.005), (10.0, 10.0), grid, method="euler")


def assemble_two_stage_kernel(grid, pi, pi_star, proposal_sd):
    """Brute-force transition matrix of the frozen two-stage kernel.

    Off-diagonal: discrete symmetric Gaussian proposal times both
    acceptance stages; the diagonal absorbs all rejection mass. ``pi``
    and ``pi_star`` are unnormalized density vectors on ``grid``.
    """
    n = grid.shape[0]
    pi = np.asarray(pi, dtype=np.float64)
    pi = pi / pi.sum()
    pi_star = np.asarray(pi_star, dtype=np.float64)
    log_pi = np.log(pi)
    log_pi_star = np.log(pi_star)
    # one shared normalizer keeps q symmetric; rows then sum to <= 1
    diffs = grid[None, :] - grid[:, None]
    weights = np.exp(-0.5 * (diffs / proposal_sd) ** 2)
    q = weights / weights.sum(axis=1).max()
    Q = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            a1 = stage1_accept_prob(log_pi_star[i], log_pi_star[j])
            a2 = stage2_accept_prob(log_pi[i], log_pi[j], log_pi_star[i], log_pi_star[j])
            Q[i, j] = q[i, j] * a1 * a2
        Q[i, i] = 1.0 - Q[i].sum()
    return pi, Q
