"""Bisection search for a subderivative that improves the hull.

When the candidate direction v_tilde fails the sufficient-descent test for
some objective, a subderivative xi' evaluated somewhere on the segment
x + (0, eps/|v_tilde|] * v_tilde must exist with

    <xi_tilde, xi'>_* > -c |xi_tilde|^2_*,

and adding it to the generator set strictly improves the next min-norm
direction.  The search bisects on the merit function

    h(t) = f(x + t v_tilde) - f(x) + c t |v_tilde|^2,

moving toward the region where h increases (for smooth f the success test
is h'(t) > 0), probing the subdifferential at each midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .space import DualVector, PrimalVector, dual_inner

DEFAULT_MAX_BISECT = 60


class SamplingFailure(RuntimeError):
    """Bisection cap hit without a qualifying subderivative.

    Carries the last probed subderivative and parameter in ``xi_last`` /
    ``t_last`` so the caller can decide what to salvage.
    """

    def __init__(self, message, xi_last=None, t_last=None,
                 func_calls=0, subgrad_calls=0):
        super().__init__(message)
        self.xi_last = xi_last
        self.t_last = t_last
        self.func_calls = func_calls
        self.subgrad_calls = subgrad_calls


@dataclass
class SamplingOutcome:
    xi_new: DualVector
    t_found: float
    oracle_calls: int
    func_calls: int
    subgrad_calls: int


def find_new_subderivative(
    x: PrimalVector,
    v_tilde: PrimalVector,
    xi_tilde: DualVector,
    eps: float,
    c: float,
    value_fn: Callable[[PrimalVector], float],
    subgrad_fn: Callable[[PrimalVector], DualVector],
    max_bisect: int = DEFAULT_MAX_BISECT,
    f_x: float | None = None,
    h_b: float | None = None,
) -> SamplingOutcome:
    """Bisect (0, eps/|v_tilde|] for xi' with <xi_tilde, xi'>_* > -c |xi_tilde|^2_*.

    value_fn/subgrad_fn evaluate the single violating objective.  f_x and
    h_b (merit value at the right endpoint, i.e. at the sufficient-descent
    trial point) can be passed in to reuse evaluations the caller already
    paid for.
    """
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must be in (0,1), got {c}")
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    norm_v = v_tilde.norm()
    if norm_v <= 0.0:
        raise ValueError("direction has zero norm")

    threshold = -c * dual_inner(xi_tilde, xi_tilde)
    descent_slope = c * norm_v * norm_v

    func_calls = 0
    subgrad_calls = 0

    def merit(t: float) -> float:
        # f(x) enters h only as a constant shift, irrelevant to the h(b) vs
        # h(t) comparison; evaluate lazily so the early-exit path stays at
        # one oracle call
        nonlocal func_calls, f_x
        if f_x is None:
            f_x = value_fn(x)
            func_calls += 1
        func_calls += 1
        return value_fn(x + t * v_tilde) - f_x + descent_slope * t

    a = 0.0
    b = eps / norm_v
    t = 0.5 * (a + b)
    xi_last = None
    for _ in range(max_bisect):
        xi = subgrad_fn(x + t * v_tilde)
        subgrad_calls += 1
        xi_last = xi
        if dual_inner(xi_tilde, xi) > threshold:
            return SamplingOutcome(
                xi_new=xi,
                t_found=t,
                oracle_calls=func_calls + subgrad_calls,
                func_calls=func_calls,
                subgrad_calls=subgrad_calls,
            )
        if h_b is None:
            h_b = merit(b)
        h_t = merit(t)
        if h_b > h_t:
            a = t
        else:
            b = t
            h_b = h_t
        t = 0.5 * (a + b)

    raise SamplingFailure(
        f"no qualifying subderivative within {max_bisect} bisections "
        f"(bracket [{a:.3e}, {b:.3e}])",
        xi_last=xi_last,
        t_last=t,
        func_calls=func_calls,
        subgrad_calls=subgrad_calls,
    )
