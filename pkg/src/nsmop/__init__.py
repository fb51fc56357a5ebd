"""Common-descent solver for nonsmooth multiobjective problems.

Subderivative sampling over an inner-product space: min-norm elements of a
growing set of subderivatives give candidate directions, a bisection
sampler supplies new subderivatives where sufficient descent fails, and an
Armijo-backtracked outer loop drives the iterates to approximately
critical points.  Ships with an analytic test suite and an
obstacle-constrained optimal-control benchmark.
"""

from .space import (
    InnerProductSpace,
    PrimalVector,
    DualVector,
    euclidean_space,
    riesz_inv,
    dual_inner,
    dual_pair,
    dual_norm,
    GramMatrixError,
)
from .minnorm import MinNormResult, MinNormError, min_norm_point
from .sampling import SamplingOutcome, SamplingFailure, find_new_subderivative
from .direction import DirectionResult, DirectionStatus, compute_descent_direction
from .solver import (
    SolverConfig,
    RunRecord,
    IterationRow,
    SolveStatus,
    StepKind,
    armijo_step,
    solve,
    telescoping_bound,
)

__all__ = [
    "InnerProductSpace", "PrimalVector", "DualVector", "euclidean_space",
    "riesz_inv", "dual_inner", "dual_pair", "dual_norm", "GramMatrixError",
    "MinNormResult", "MinNormError", "min_norm_point",
    "SamplingOutcome", "SamplingFailure", "find_new_subderivative",
    "DirectionResult", "DirectionStatus", "compute_descent_direction",
    "SolverConfig", "RunRecord", "IterationRow", "SolveStatus", "StepKind",
    "armijo_step", "solve", "telescoping_bound",
]

__version__ = "0.1.0"
