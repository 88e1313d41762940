"""Retraction-based manifold optimization with adaptive proximal-point
smoothing, an accelerated outer loop, and a benchmark CLI."""

from .catalyst import (
    CatalystConfig,
    OuterRecord,
    OuterTrace,
    ProxConditions,
    accelerated_minimize,
    adaptive_prox_point,
    alpha_next,
    check_prox_conditions,
    check_stationarity_bound,
)
from .completion import CompletionObjective, CompletionProblem, user_weights
from .data import generate_lowrank_data, generate_sphere_ball_data, generate_sphere_data, ingest_ratings
from .errors import (
    AdaptationError,
    ConfigError,
    DegenerateError,
    DomainError,
    McatError,
    NoDescentError,
    ParseError,
    PrecisionLimitStall,
    SingularError,
)
from .experiment import ExperimentConfig, ExperimentResult, run_experiment
from .manifolds import (
    Grassmann,
    Manifold,
    Sphere,
    check_retraction_axioms,
    retraction_distance,
    round_trip_residual,
    subspace_distance,
)
from .objectives import (
    FrechetExtrinsic,
    FrechetIntrinsic,
    Objective,
    closed_form_extrinsic_mean,
    estimate_smoothness,
    gradient_check,
)
from .solver import LineSearchConfig, ProxSurrogate, SolverTrace, armijo_step, rgd_run, solve_prox_subproblem

__version__ = "0.1.0"
