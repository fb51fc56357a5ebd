"""Common descent direction via iterative subdifferential enrichment.

Starting from one subderivative per objective at the current point, the
loop alternates a min-norm solve over the accumulated generators with a
sufficient-descent test at the trial step eps/|v| along the candidate
direction.  Objectives that fail the test contribute one freshly sampled
subderivative each (see sampling), which provably shrinks the min-norm
value, until either the direction is delta-small (approximately critical)
or every objective passes the test.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .minnorm import MinNormError, default_tolerance, min_norm_weights
from .sampling import DEFAULT_MAX_BISECT, SamplingFailure, find_new_subderivative
from .space import DualVector, PrimalVector

DEFAULT_MAX_INNER = 500


class DirectionStatus(enum.Enum):
    CRITICAL_WITHIN_DELTA = "CriticalWithinDelta"
    ACCEPTABLE_DESCENT = "AcceptableDescent"
    SAMPLING_FAILED = "SamplingFailed"


@dataclass
class DirectionResult:
    v: PrimalVector
    xi: DualVector
    status: DirectionStatus
    xi_set_size: int
    inner_iters: int
    func_evals: int
    subgrad_evals: int
    dual_norm: float
    dual_norm_history: list[float] = field(default_factory=list)
    f_x: np.ndarray | None = None
    # objective values at x + (eps/|v|) v for the returned v, when the
    # sufficient-descent test was evaluated there (reused by the line search)
    f_trial: np.ndarray | None = None
    trial_step: float | None = None


class _GramCache:
    """Generator set with incrementally grown dual Gram matrix."""

    def __init__(self, space):
        self.space = space
        self.xis: list[DualVector] = []
        self.reps: list[np.ndarray] = []  # Riesz representatives
        self.gram = np.zeros((0, 0))

    def add(self, xi: DualVector):
        rep = self.space.solve_gram(xi.coeffs)
        cross = np.array([xi.coeffs @ r for r in self.reps])
        m = len(self.xis)
        new = np.zeros((m + 1, m + 1))
        new[:m, :m] = self.gram
        new[m, :m] = cross
        new[:m, m] = cross
        new[m, m] = xi.coeffs @ rep
        self.gram = new
        self.xis.append(xi)
        self.reps.append(rep)

    def __len__(self):
        return len(self.xis)


def compute_descent_direction(
    x: PrimalVector,
    eps: float,
    delta: float,
    c: float,
    problem,
    max_inner: int = DEFAULT_MAX_INNER,
    max_bisect: int = DEFAULT_MAX_BISECT,
    f_x: np.ndarray | None = None,
) -> DirectionResult:
    """One direction-finding pass at the point x.

    Returns with status CRITICAL_WITHIN_DELTA when the min-norm element of
    the sampled set has dual norm <= delta, ACCEPTABLE_DESCENT when the
    candidate satisfies f_i(x + (eps/|v|) v) <= f_i(x) - c eps |v| for all
    objectives, and SAMPLING_FAILED (with the best direction so far) when
    sampling or the inner iteration cap gives out.
    """
    if eps <= 0.0 or delta <= 0.0:
        raise ValueError("eps and delta must be positive")
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must be in (0,1), got {c}")
    if max_inner < 1:
        raise ValueError("max_inner must be >= 1")
    k = problem.k
    space = problem.space

    func_evals = 0
    subgrad_evals = 0
    if f_x is None:
        f_x = problem.objective_values(x)
        func_evals += k
    f_x = np.asarray(f_x, dtype=float)

    gens = _GramCache(space)
    for i in range(k):
        gens.add(problem.subgradient(i, x))
    subgrad_evals += k

    history: list[float] = []
    result_common = dict(f_x=f_x)

    for inner in range(1, max_inner + 1):
        lam, norm_sq = _solve_min_norm(gens)
        coeffs = -(np.column_stack([xi.coeffs for xi in gens.xis]) @ lam)
        xi_l = DualVector(coeffs, space)
        v_l = PrimalVector(-(np.column_stack(gens.reps) @ lam), space)
        nrm = math.sqrt(max(norm_sq, 0.0))
        history.append(nrm)

        if nrm <= delta:
            return DirectionResult(
                v=v_l, xi=xi_l, status=DirectionStatus.CRITICAL_WITHIN_DELTA,
                xi_set_size=len(gens), inner_iters=inner,
                func_evals=func_evals, subgrad_evals=subgrad_evals,
                dual_norm=nrm, dual_norm_history=history, **result_common,
            )

        norm_v = v_l.norm()
        step = eps / norm_v
        trial = x + step * v_l
        f_trial = problem.objective_values(trial)
        func_evals += k
        required = f_x - c * eps * norm_v
        violating = [i for i in range(k) if f_trial[i] > required[i]]

        if not violating:
            return DirectionResult(
                v=v_l, xi=xi_l, status=DirectionStatus.ACCEPTABLE_DESCENT,
                xi_set_size=len(gens), inner_iters=inner,
                func_evals=func_evals, subgrad_evals=subgrad_evals,
                dual_norm=nrm, dual_norm_history=history,
                f_trial=f_trial, trial_step=step, **result_common,
            )

        slope = c * norm_v * norm_v
        for i in violating:
            h_b = f_trial[i] - f_x[i] + slope * step
            try:
                out = find_new_subderivative(
                    x, v_l, xi_l, eps, c,
                    value_fn=lambda p, i=i: problem.objective_value(i, p),
                    subgrad_fn=lambda p, i=i: problem.subgradient(i, p),
                    max_bisect=max_bisect, f_x=f_x[i], h_b=h_b,
                )
            except SamplingFailure as fail:
                func_evals += fail.func_calls
                subgrad_evals += fail.subgrad_calls
                return DirectionResult(
                    v=v_l, xi=xi_l, status=DirectionStatus.SAMPLING_FAILED,
                    xi_set_size=len(gens), inner_iters=inner,
                    func_evals=func_evals, subgrad_evals=subgrad_evals,
                    dual_norm=nrm, dual_norm_history=history, **result_common,
                )
            func_evals += out.func_calls
            subgrad_evals += out.subgrad_calls
            gens.add(out.xi_new)
            # re-check the strict inequality the sampler promised, using
            # the freshly extended Gram row (<xi_l, xi'> = -lam . G[:m,new])
            received = -float(gens.gram[-1, : len(lam)] @ lam)
            if received <= -c * norm_sq - 1e-9 * (1.0 + norm_sq):
                raise RuntimeError(
                    "sampled subderivative violates its qualification "
                    f"inequality: {received:.3e} <= {-c * norm_sq:.3e}"
                )

    return DirectionResult(
        v=v_l, xi=xi_l, status=DirectionStatus.SAMPLING_FAILED,
        xi_set_size=len(gens), inner_iters=max_inner,
        func_evals=func_evals, subgrad_evals=subgrad_evals,
        dual_norm=nrm, dual_norm_history=history, **result_common,
    )


def _solve_min_norm(gens: _GramCache) -> tuple[np.ndarray, float]:
    tol = default_tolerance(gens.gram)
    try:
        return min_norm_weights(gens.gram, tol=tol)
    except MinNormError as exc:
        # fall back to the best iterate; the minimizing sequence is still
        # monotone, only the certificate margin is degraded
        return exc.best


def verify_acceptance(problem, x, v, eps, c, f_x=None) -> bool:
    """Re-check the sufficient-descent inequality for all objectives."""
    if f_x is None:
        f_x = problem.objective_values(x)
    norm_v = v.norm()
    if norm_v == 0.0:
        return False
    f_trial = problem.objective_values(x + (eps / norm_v) * v)
    return bool(np.all(f_trial <= f_x - c * eps * norm_v))
