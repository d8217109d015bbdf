"""Random-walk transition kernels and the chain driver.

Four kernels share one state layout:

* MH    -- fixed Gaussian proposal, single acceptance stage.
* TSMH  -- fixed proposal, two stages: proposals are screened against
           the cheap surrogate first; the expensive density is touched
           only for proposals that survive stage one.
* AM    -- adaptive proposal covariance (see :mod:`tsam.adaptation`),
           single stage.
* TSAM  -- adaptive proposal plus the two-stage screen.

Every chain owns three independent deterministic RNG sub-streams
(proposal normals, stage-one uniforms, stage-two uniforms) derived from
its seed. Because the stage-two stream is separate, a two-stage kernel
run with surrogate == target consumes the proposal and stage-one
streams in exactly the same order as its single-stage counterpart, so
the degeneracy is testable as bitwise trajectory equality.
"""

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .adaptation import AdaptationConfig, AdaptationState, absorb, default_config, initial_state
from .errors import TargetEvaluationError
from .linalg import CholeskyFactor, Vector, cholesky, mvn_sample
from .targets import TwoLevelTarget

KERNELS = ("MH", "TSMH", "AM", "TSAM")
TWO_STAGE_KERNELS = ("TSMH", "TSAM")
ADAPTIVE_KERNELS = ("AM", "TSAM")

MAX_INIT_DRAWS = 1000


@dataclass
class RngStreams:
    """Per-chain deterministic sub-streams, all derived from one seed."""

    proposal: np.random.Generator
    stage1: np.random.Generator
    stage2: np.random.Generator
    init: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RngStreams":
        children = np.random.SeedSequence(seed).spawn(4)
        return cls(*(np.random.Generator(np.random.PCG64(c)) for c in children))


@dataclass(frozen=True)
class ChainState:
    """Current point with cached log-density values.

    ``log_pi_star_x`` is None for single-stage kernels, which never
    touch the surrogate.
    """

    x: Vector
    log_pi_star_x: float
    log_pi_x: float
    t: int


@dataclass(frozen=True)
class StepOutcome:
    """One transition plus the bookkeeping needed for evaluation accounting.

    For single-stage kernels the two stage flags mirror the single
    accept/reject decision. ``expensive_evals`` is 1 exactly when the
    expensive density was evaluated this step.
    """

    next_state: ChainState
    stage1_accepted: bool
    stage2_accepted: bool
    expensive_evals: int
    cheap_evals: int


@dataclass(frozen=True)
class SamplerConfig:
    adaptation: AdaptationConfig
    n_iters: int
    seed: int = 0
    kernel: str = "TSAM"
    burn_in_fraction: float = 0.5
    thinning: int = 1

    def __post_init__(self):
        if self.n_iters <= 0:
            raise ValueError("n_iters must be positive")
        if not 0.0 <= self.burn_in_fraction < 1.0:
            raise ValueError("burn_in_fraction must lie in [0, 1)")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}")


@dataclass(frozen=True)
class Counters:
    """Evaluation and acceptance totals over a whole run (initial state included)."""

    n_steps: int
    stage1_accepts: int
    stage2_accepts: int
    expensive_evals: int
    cheap_evals: int


@dataclass
class Trace:
    """Retained states (post burn-in, post thinning) plus run-level bookkeeping."""

    states: np.ndarray
    log_pi_values: np.ndarray
    iters: np.ndarray
    stage1_accepted: np.ndarray
    stage2_accepted: np.ndarray
    expensive_eval: np.ndarray
    counters: Counters
    wall_minutes: float
    meta: SamplerConfig

    @property
    def n(self) -> int:
        return self.states.shape[0]

    @property
    def d(self) -> int:
        return self.states.shape[1]


def stage1_accept_prob(log_pi_star_current: float, log_pi_star_proposal: float) -> float:
    """min(1, pi*(proposal) / pi*(current)); 0 for out-of-support proposals."""
    return math.exp(min(0.0, log_pi_star_proposal - log_pi_star_current))


def stage2_accept_prob(
    log_pi_current: float,
    log_pi_proposal: float,
    log_pi_star_current: float,
    log_pi_star_proposal: float,
) -> float:
    """min(1, [pi(prop)/pi(cur)] * [pi*(cur)/pi*(prop)]).

    When surrogate and target coincide the two log-ratios cancel exactly
    in floating point, so the result is exactly 1.
    """
    delta = (log_pi_proposal - log_pi_current) + (log_pi_star_current - log_pi_star_proposal)
    return math.exp(min(0.0, delta))


def _safe_log_pi(target: TwoLevelTarget, x) -> float:
    try:
        return target.log_pi(x)
    except TargetEvaluationError:
        return -math.inf


def _safe_log_pi_star(target: TwoLevelTarget, x) -> float:
    try:
        return target.log_pi_star(x)
    except TargetEvaluationError:
        return -math.inf


def _two_stage_transition(state, factor, target, streams) -> StepOutcome:
    proposal = mvn_sample(state.x, factor, streams.proposal)
    log_ps_prop = _safe_log_pi_star(target, proposal)
    a1 = stage1_accept_prob(state.log_pi_star_x, log_ps_prop)
    if streams.stage1.random() < a1:
        log_p_prop = _safe_log_pi(target, proposal)  # the one expensive evaluation
        a2 = stage2_accept_prob(state.log_pi_x, log_p_prop, state.log_pi_star_x, log_ps_prop)
        if streams.stage2.random() < a2:
            nxt = ChainState(proposal, log_ps_prop, log_p_prop, state.t + 1)
            return StepOutcome(nxt, True, True, 1, 1)
        nxt = ChainState(state.x, state.log_pi_star_x, state.log_pi_x, state.t + 1)
        return StepOutcome(nxt, True, False, 1, 1)
    # stage-one rejection: no stage-two uniform, no expensive evaluation
    nxt = ChainState(state.x, state.log_pi_star_x, state.log_pi_x, state.t + 1)
    return StepOutcome(nxt, False, False, 0, 1)


def _single_stage_transition(state, factor, target, streams) -> StepOutcome:
    proposal = mvn_sample(state.x, factor, streams.proposal)
    log_p_prop = _safe_log_pi(target, proposal)
    a = stage1_accept_prob(state.log_pi_x, log_p_prop)  # plain Metropolis ratio
    accepted = streams.stage1.random() < a
    if accepted:
        nxt = ChainState(proposal, None, log_p_prop, state.t + 1)
    else:
        nxt = ChainState(state.x, None, state.log_pi_x, state.t + 1)
    return StepOutcome(nxt, accepted, accepted, 1, 0)


def tsam_step(
    state: ChainState,
    adapt: AdaptationState,
    target: TwoLevelTarget,
    config: SamplerConfig,
    streams: RngStreams,
):
    """One two-stage adaptive transition; absorbs the realized state into the adaptation."""
    outcome = _two_stage_transition(state, adapt.factor, target, streams)
    new_adapt = absorb(adapt, outcome.next_state.x, config.adaptation)
    return outcome, new_adapt


def tsmh_step(
    state: ChainState,
    fixed_factor: CholeskyFactor,
    target: TwoLevelTarget,
    streams: RngStreams,
) -> StepOutcome:
    """One two-stage transition with a frozen proposal covariance."""
    return _two_stage_transition(state, fixed_factor, target, streams)


def am_step(
    state: ChainState,
    adapt: AdaptationState,
    target: TwoLevelTarget,
    config: SamplerConfig,
    streams: RngStreams,
):
    """One adaptive Metropolis transition: single stage, one expensive evaluation."""
    outcome = _single_stage_transition(state, adapt.factor, target, streams)
    new_adapt = absorb(adapt, outcome.next_state.x, config.adaptation)
    return outcome, new_adapt


def mh_step(
    state: ChainState,
    fixed_factor: CholeskyFactor,
    target: TwoLevelTarget,
    streams: RngStreams,
) -> StepOutcome:
    """One classic random-walk Metropolis transition."""
    return _single_stage_transition(state, fixed_factor, target, streams)


def _draw_initial_state(target, streams, kernel, initial_x=None) -> ChainState:
    two_stage = kernel in TWO_STAGE_KERNELS
    if initial_x is not None:
        x0 = np.asarray(initial_x, dtype=np.float64)
        lp = _safe_log_pi(target, x0)
        if not math.isfinite(lp):
            raise ValueError("initial state has zero target density")
        lps = _safe_log_pi_star(target, x0) if two_stage else None
        if two_stage and not math.isfinite(lps):
            raise ValueError("initial state has zero surrogate density")
        return ChainState(x0, lps, lp, 0)
    for _ in range(MAX_INIT_DRAWS):
        x0 = target.support.sample_uniform(streams.init)
        lp = _safe_log_pi(target, x0)
        if not math.isfinite(lp):
            continue
        lps = _safe_log_pi_star(target, x0) if two_stage else None
        if two_stage and not math.isfinite(lps):
            continue
        return ChainState(x0, lps, lp, 0)
    raise RuntimeError(
        f"could not find an initial state with positive density in {MAX_INIT_DRAWS} uniform draws"
    )


def run_chain(target: TwoLevelTarget, config: SamplerConfig, initial_x=None) -> Trace:
    """Run one chain and return the retained trace.

    Deterministic given ``config.seed``. The initial state is drawn
    uniformly from the support box unless ``initial_x`` is supplied.
    Burn-in discards floor(burn_in_fraction * n_iters) leading steps,
    then every ``thinning``-th of the remainder is retained. Wall time
    covers the sampling loop only.
    """
    kernel = config.kernel
    d = target.d
    if config.adaptation.d != d:
        raise ValueError(
            f"adaptation dimension {config.adaptation.d} does not match target dimension {d}"
        )
    streams = RngStreams.from_seed(config.seed)
    n = config.n_iters

    states = np.empty((n, d))
    log_pis = np.empty(n)
    s1 = np.zeros(n, dtype=bool)
    s2 = np.zeros(n, dtype=bool)
    exp_flags = np.zeros(n, dtype=bool)

    t_start = time.perf_counter()
    state = _draw_initial_state(target, streams, kernel, initial_x)
    two_stage = kernel in TWO_STAGE_KERNELS
    expensive_total = 1  # the initial-state evaluation
    cheap_total = 1 if two_stage else 0

    adapt = None
    fixed_factor = None
    if kernel in ADAPTIVE_KERNELS:
        adapt = initial_state(config.adaptation)
        adapt = absorb(adapt, state.x, config.adaptation)  # history includes x_0
    else:
        fixed_factor = cholesky(config.adaptation.c0)

    for i in range(n):
        if kernel == "TSAM":
            outcome, adapt = tsam_step(state, adapt, target, config, streams)
        elif kernel == "AM":
            outcome, adapt = am_step(state, adapt, target, config, streams)
        elif kernel == "TSMH":
            outcome = tsmh_step(state, fixed_factor, target, streams)
        else:
            outcome = mh_step(state, fixed_factor, target, streams)
        state = outcome.next_state
        states[i] = state.x
        log_pis[i] = state.log_pi_x
        s1[i] = outcome.stage1_accepted
        s2[i] = outcome.stage2_accepted
        exp_flags[i] = outcome.expensive_evals > 0
        expensive_total += outcome.expensive_evals
        cheap_total += outcome.cheap_evals
    wall_minutes = (time.perf_counter() - t_start) / 60.0

    burn = int(math.floor(config.burn_in_fraction * n))
    keep = slice(burn, None, config.thinning)
    iters = np.arange(1, n + 1, dtype=np.int64)
    counters = Counters(
        n_steps=n,
        stage1_accepts=int(s1.sum()),
        stage2_accepts=int(s2.sum()),
        expensive_evals=expensive_total,
        cheap_evals=cheap_total,
    )
    return Trace(
        states=states[keep].copy(),
        log_pi_values=log_pis[keep].copy(),
        iters=iters[keep].copy(),
        stage1_accepted=s1[keep].copy(),
        stage2_accepted=s2[keep].copy(),
        expensive_eval=exp_flags[keep].copy(),
        counters=counters,
        wall_minutes=max(wall_minutes, 1e-12),
        meta=config,
    )


def default_sampler_config(target: TwoLevelTarget, kernel: str = "TSAM", **kwargs) -> SamplerConfig:
    """Sampler config with adaptation defaults derived from the target geometry."""
    adapt = kwargs.pop("adaptation", None)
    if adapt is None:
        adapt = default_config(target.d, target.support)
    return SamplerConfig(adaptation=adapt, kernel=kernel, **kwargs)
