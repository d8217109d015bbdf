"""Two-stage adaptive Metropolis sampling library.

Combines covariance adaptation (the proposal learns the target's scale
and orientation from the chain history) with delayed acceptance (cheap
surrogate densities screen proposals before the expensive density is
touched). Ships the four benchmark posteriors, efficiency diagnostics,
and a JSON-driven benchmark CLI.
"""

from .adaptation import AdaptationConfig, AdaptationState, absorb, default_config, proposal_factor
from .data import (
    LogisticData,
    ObservationSet,
    generate_synthetic_logistic,
    generate_synthetic_lv,
    load_csv_dataset,
    load_hare_lynx,
    stratified_zero_subsample,
    subsample_zero_indices,
)
from .diagnostics import (
    autocorrelation,
    coverage_experiment,
    edpm,
    ess,
    mc_estimate_experiment,
    principal_projection,
    redpm,
)
from .errors import (
    DataShapeError,
    DegenerateSeriesError,
    NotPositiveDefinite,
    ParseError,
    SchemaError,
    SolverFailure,
    TargetEvaluationError,
    TsamError,
    ValidationError,
)
from .linalg import cholesky, log_mvn_density, mvn_sample, rank_one_update
from .ode import LVParams, SolverGrid, solve_lv, standard_grids
from .samplers import (
    ChainState,
    RngStreams,
    SamplerConfig,
    StepOutcome,
    Trace,
    am_step,
    default_sampler_config,
    mh_step,
    run_chain,
    stage1_accept_prob,
    stage2_accept_prob,
    tsam_step,
    tsmh_step,
)
from .targets import (
    BananaTarget,
    Box,
    CustomTarget,
    LogisticTarget,
    LotkaVolterraTarget,
    LVPriors,
    ShiftedTTarget,
    TwoLevelTarget,
    banana_region_indicator,
    banana_target,
    logistic_target,
    lotka_volterra_target,
    shifted_t_target,
)

__version__ = "0.1.0"
