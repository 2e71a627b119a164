"""Wasserstein distributionally robust MMSE estimation and Kalman filtering."""

from .bisection import (
    SubproblemResult,
    bisection_bounds,
    candidate_L,
    dual_objective,
    h_value,
    solve_subproblem,
    solve_subproblem_isotropic,
)
from .errors import (
    ConvergenceError,
    DegenerateGradientError,
    DomainError,
    InvalidInputError,
    ModelDegeneracyError,
    SingularBlockError,
)
from .estimator import (
    AffineEstimator,
    NashEquilibrium,
    apply,
    bayes_estimator,
    mse_under,
    solve_robust_mmse,
)
from .frank_wolfe import (
    FWConfig,
    FWReport,
    curvature_bound,
    rate_bound,
    relative_duality_gap,
    solve,
    spectral_bounds,
    write_trace,
)
from .gaussian import (
    Gaussian,
    ball_membership,
    cov_transport_cost,
    gelbrich_distance,
    psd_sqrt,
)
from .kalman import (
    FilterState,
    GainSchedule,
    StateSpaceModel,
    apply_schedule,
    classical_kalman_step,
    gain_schedule,
    initial_state,
    noise_loadings,
    predict,
    read_observations,
    run_filter,
    run_kalman,
    step,
    update,
    write_trajectory,
)
from .objective import (
    BlockCovariance,
    estimator_gain,
    gradient_from_gain,
    mmse_gradient,
    mmse_objective,
    posterior_cov,
)

__version__ = "0.1.0"
