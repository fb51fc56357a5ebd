"""Outer descent loop: direction finding, Armijo backtracking, stopping.

Each iteration computes a common descent direction at tolerances
(eps_j, delta_j), stops when that direction is delta_bar-small while
eps_j <= eps_bar (the computable criticality test), and otherwise takes
the backtracked step

    t = max(2^-s t0, eps_j / |v|),

where s is the first integer for which every objective drops by at least
c 2^-s t0 |v|^2.  The floor step is always admissible because the
direction module certified sufficient descent exactly there, so the
backtracking search is cut off once 2^-s t0 falls below the floor.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass

import numpy as np

from .direction import (
    DEFAULT_MAX_INNER,
    DirectionStatus,
    compute_descent_direction,
)
from .sampling import DEFAULT_MAX_BISECT
from .space import PrimalVector

DEFAULT_MAX_OUTER = 10_000


class SolveStatus(enum.Enum):
    EPS_DELTA_CRITICAL = "EpsDeltaCritical"
    MAX_ITERS = "MaxIters"
    SAMPLING_FAILED = "SamplingFailed"


class StepKind(enum.Enum):
    ARMIJO = "armijo"   # t = 2^-s t0, per-step slope c t |v|^2
    FLOOR = "floor"     # t = eps_j/|v|, slope c eps_j |v|
    NONE = "none"       # no step taken (terminal or zero direction)


@dataclass(frozen=True)
class SolverConfig:
    """Algorithm parameters; defaults follow the benchmark protocol."""

    eps_bar: float = 1e-4
    delta_bar: float = 1e-4
    c: float = 0.1
    t0: float = 1.0
    max_outer_iters: int = DEFAULT_MAX_OUTER
    max_inner_iters: int = DEFAULT_MAX_INNER
    max_bisect: int = DEFAULT_MAX_BISECT
    schedule: str = "constant"   # "constant" | "sqrt_decay"
    schedule_scale: float = 1.0  # eps_j = delta_j = scale/sqrt(j) for sqrt_decay
    record_iterates: bool = False

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise ValueError(f"c must be in (0,1), got {self.c}")
        if self.t0 <= 0.0:
            raise ValueError(f"t0 must be positive, got {self.t0}")
        if self.eps_bar < 0.0 or self.delta_bar < 0.0:
            raise ValueError("eps_bar and delta_bar must be nonnegative")
        if self.schedule == "constant":
            if self.eps_bar <= 0.0 or self.delta_bar <= 0.0:
                raise ValueError(
                    "constant schedule needs positive eps_bar and delta_bar"
                )
        elif self.schedule == "sqrt_decay":
            # eps_j delta_j = scale^2/j sums to infinity and both tend to 0,
            # the hypotheses of the accumulation-point convergence mode
            if self.schedule_scale <= 0.0:
                raise ValueError("schedule_scale must be positive")
        else:
            raise ValueError(f"unknown schedule {self.schedule!r}")

    def eps_j(self, j: int) -> float:
        if self.schedule == "constant":
            return self.eps_bar
        return self.schedule_scale / math.sqrt(j)

    def delta_j(self, j: int) -> float:
        if self.schedule == "constant":
            return self.delta_bar
        return self.schedule_scale / math.sqrt(j)


@dataclass
class IterationRow:
    j: int
    f: np.ndarray
    v_norm: float
    step: float
    step_kind: StepKind
    xi_set_size: int
    func_evals: int
    subgrad_evals: int
    eps_j: float
    delta_j: float


@dataclass
class RunRecord:
    rows: list[IterationRow]
    status: SolveStatus
    x_final: PrimalVector
    f_final: np.ndarray
    wall_time_s: float
    iterates: list[PrimalVector] | None = None

    @property
    def iterations(self) -> int:
        return len(self.rows)

    @property
    def max_xi_set(self) -> int:
        return max((r.xi_set_size for r in self.rows), default=0)


@dataclass
class ArmijoResult:
    t_bar: float
    kind: StepKind
    f_new: np.ndarray | None
    func_evals: int


class _CountingProblem:
    """Wraps a problem to count scalar objective and subgradient calls."""

    def __init__(self, problem):
        self._p = problem
        self.k = problem.k
        self.space = problem.space
        self.func_evals = 0
        self.subgrad_evals = 0

    def objective_value(self, i, x):
        self.func_evals += 1
        return self._p.objective_value(i, x)

    def objective_values(self, x):
        self.func_evals += self.k
        return self._p.objective_values(x)

    def subgradient(self, i, x):
        self.subgrad_evals += 1
        return self._p.subgradient(i, x)


def armijo_step(
    x: PrimalVector,
    v: PrimalVector,
    eps_j: float,
    c: float,
    t0: float,
    problem,
    f_x: np.ndarray | None = None,
    f_floor: np.ndarray | None = None,
) -> ArmijoResult:
    """Backtracking step with the eps_j/|v| floor.

    Halving stops as soon as 2^-s t0 drops below the floor, where the max
    in the step rule would discard it anyway; f_floor (objective values at
    the floor point) can be supplied to reuse the direction module's
    sufficient-descent evaluation.
    """
    norm_v = v.norm()
    if norm_v <= 0.0:
        raise ValueError("armijo_step needs a nonzero direction")
    if f_x is None:
        f_x = problem.objective_values(x)
    floor = eps_j / norm_v
    slope = c * norm_v * norm_v
    evals = 0

    t = t0
    while t >= floor:
        f_t = problem.objective_values(x + t * v)
        evals += problem.k
        if np.all(f_t <= f_x - slope * t):
            return ArmijoResult(t_bar=t, kind=StepKind.ARMIJO, f_new=f_t,
                                func_evals=evals)
        t *= 0.5
    return ArmijoResult(t_bar=floor, kind=StepKind.FLOOR, f_new=f_floor,
                        func_evals=evals)


def solve(x1: PrimalVector, config: SolverConfig, problem) -> RunRecord:
    """Run the descent method from x1 until criticality, cap or failure."""
    start = time.perf_counter()
    counted = _CountingProblem(problem)
    x = x1.copy()
    f_x = counted.objective_values(x)

    rows: list[IterationRow] = []
    iterates: list[PrimalVector] | None = [] if config.record_iterates else None
    status = SolveStatus.MAX_ITERS

    for j in range(1, config.max_outer_iters + 1):
        if iterates is not None:
            iterates.append(x.copy())
        eps_j = config.eps_j(j)
        delta_j = config.delta_j(j)
        fe0, se0 = counted.func_evals, counted.subgrad_evals

        dres = compute_descent_direction(
            x, eps_j, delta_j, config.c, counted,
            max_inner=config.max_inner_iters,
            max_bisect=config.max_bisect,
            f_x=f_x,
        )
        v = dres.v
        # the dual norm of xi_j; identical to |v_j| up to solver round-off,
        # and the exact quantity the direction module tested against delta_j
        norm_v = dres.dual_norm

        if dres.status is DirectionStatus.SAMPLING_FAILED:
            rows.append(IterationRow(
                j=j, f=f_x.copy(), v_norm=norm_v, step=0.0,
                step_kind=StepKind.NONE, xi_set_size=dres.xi_set_size,
                func_evals=counted.func_evals - fe0,
                subgrad_evals=counted.subgrad_evals - se0,
                eps_j=eps_j, delta_j=delta_j,
            ))
            status = SolveStatus.SAMPLING_FAILED
            break

        # stopping test; the line search would be discarded here, so it is
        # skipped rather than computed first
        if norm_v <= config.delta_bar and eps_j <= config.eps_bar:
            rows.append(IterationRow(
                j=j, f=f_x.copy(), v_norm=norm_v, step=0.0,
                step_kind=StepKind.NONE, xi_set_size=dres.xi_set_size,
                func_evals=counted.func_evals - fe0,
                subgrad_evals=counted.subgrad_evals - se0,
                eps_j=eps_j, delta_j=delta_j,
            ))
            status = SolveStatus.EPS_DELTA_CRITICAL
            break

        if dres.status is DirectionStatus.ACCEPTABLE_DESCENT:
            ar = armijo_step(x, v, eps_j, config.c, config.t0, counted,
                             f_x=f_x, f_floor=dres.f_trial)
            t_bar, kind, f_new = ar.t_bar, ar.kind, ar.f_new
            if f_new is None:
                f_new = counted.objective_values(x + t_bar * v)
        else:
            # direction is delta_j-small but the overall test has not fired
            # (decaying schedules); descent at the floor step is not
            # certified, so step only if it verifiably decreases everything
            t_bar, kind, f_new = _guarded_step(
                x, v, v.norm(), eps_j, config, counted, f_x)

        rows.append(IterationRow(
            j=j, f=f_x.copy(), v_norm=norm_v, step=t_bar,
            step_kind=kind, xi_set_size=dres.xi_set_size,
            func_evals=counted.func_evals - fe0,
            subgrad_evals=counted.subgrad_evals - se0,
            eps_j=eps_j, delta_j=delta_j,
        ))
        if t_bar > 0.0:
            x = x + t_bar * v
            f_x = f_new

    return RunRecord(
        rows=rows, status=status, x_final=x, f_final=f_x,
        wall_time_s=time.perf_counter() - start, iterates=iterates,
    )


def _guarded_step(x, v, norm_v, eps_j, config, counted, f_x):
    if norm_v <= 0.0:
        return 0.0, StepKind.NONE, f_x
    ar = armijo_step(x, v, eps_j, config.c, config.t0, counted, f_x=f_x)
    if ar.kind is StepKind.ARMIJO:
        return ar.t_bar, ar.kind, ar.f_new
    f_floor = counted.objective_values(x + ar.t_bar * v)
    if np.all(f_floor < f_x):
        return ar.t_bar, StepKind.FLOOR, f_floor
    return 0.0, StepKind.NONE, f_x


def telescoping_bound(f_start: float, f_inf: float, config: SolverConfig) -> int:
    """Iteration bound for constant schedules and an objective bounded below:
    every non-terminal step drops that objective by at least c eps delta."""
    if config.schedule != "constant":
        raise ValueError("bound applies to constant schedules only")
    drop = config.c * config.eps_bar * config.delta_bar
    return int(math.ceil(max(f_start - f_inf, 0.0) / drop)) + 1
