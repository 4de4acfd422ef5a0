"""
Accelerated-gradient / optimistic-gradient solvers for separable minimax
problems ``min_x max_y f(x) + I(x, y) - g(y)``.
"""

from .algorithms import (
    RunResult,
    SolverState,
    agog_direct_run,
    agog_restart_run,
    agog_run,
    bilinear_agog_restart_run,
    bilinear_agog_run,
    bilinear_sagog_run,
    nesterov_run,
    ogda_run,
    regularize_csc,
    sagog_restart_run,
    sagog_run,
    seg_run,
)
from .core import (
    CallCounter,
    OracleBundle,
    PairVector,
    ProblemConstants,
    field_W,
    gap_V,
    grad_F,
    operator_H,
    sq_dist,
)
from .errors import (
    ConfigurationError,
    DegenerateProblemError,
    DivergenceError,
    InvalidSpecError,
    NoUniqueOptimumError,
    UnsupportedDiagnosticError,
)
from .harness import ExperimentSpec, aggregate, check_bounds, run_experiment
from .problems import (
    BilinearGameSpec,
    NoiseModel,
    QuadraticGameSpec,
    exact_minimax,
    make_bilinear_game,
    make_mspbe,
    make_quadratic_game,
    make_robust_ls,
    wrap_stochastic,
)
from .trace import RecordOptions, RunTrace, TraceRow

__version__ = "0.1.0"

__all__ = [
    "BilinearGameSpec",
    "CallCounter",
    "ConfigurationError",
    "DegenerateProblemError",
    "DivergenceError",
    "ExperimentSpec",
    "InvalidSpecError",
    "NoUniqueOptimumError",
    "NoiseModel",
    "OracleBundle",
    "PairVector",
    "ProblemConstants",
    "QuadraticGameSpec",
    "RecordOptions",
    "RunResult",
    "RunTrace",
    "SolverState",
    "TraceRow",
    "UnsupportedDiagnosticError",
    "aggregate",
    "agog_direct_run",
    "agog_restart_run",
    "agog_run",
    "bilinear_agog_restart_run",
    "bilinear_agog_run",
    "bilinear_sagog_run",
    "check_bounds",
    "exact_minimax",
    "field_W",
    "gap_V",
    "grad_F",
    "make_bilinear_game",
    "make_mspbe",
    "make_quadratic_game",
    "make_robust_ls",
    "nesterov_run",
    "ogda_run",
    "operator_H",
    "regularize_csc",
    "run_experiment",
    "sagog_restart_run",
    "sagog_run",
    "seg_run",
    "sq_dist",
    "wrap_stochastic",
]
