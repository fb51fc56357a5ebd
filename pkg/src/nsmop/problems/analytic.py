"""Closed-form nonsmooth test problems with known Pareto sets.

All problems live on Euclidean space (identity Gram) and return exact
subgradients.  Kink tie-break: the sign of 0 counts as +1, and ties in
max-type expressions resolve to the lowest index, so oracles are
deterministic and traces reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..space import DualVector, InnerProductSpace, PrimalVector, euclidean_space
from .base import MOProblem


def sign_plus(t: float) -> float:
    """sign with sign_plus(0) = +1."""
    return 1.0 if t >= 0.0 else -1.0


@dataclass
class _Objective:
    value: Callable[[np.ndarray], float]
    subgrad: Callable[[np.ndarray], np.ndarray]


class AnalyticProblem(MOProblem):
    def __init__(self, name: str, dim: int, objectives: list[_Objective],
                 pareto_distance_fn: Callable[[np.ndarray], float] | None = None,
                 space: InnerProductSpace | None = None):
        self.name = name
        self.space = space if space is not None else euclidean_space(dim)
        self.k = len(objectives)
        self._objectives = objectives
        self._pareto_distance_fn = pareto_distance_fn

    def objective_value(self, i: int, x: PrimalVector) -> float:
        return float(self._objectives[i].value(x.coeffs))

    def subgradient(self, i: int, x: PrimalVector) -> DualVector:
        return DualVector(
            np.asarray(self._objectives[i].subgrad(x.coeffs), dtype=float),
            self.space,
        )

    def pareto_distance(self, x: PrimalVector) -> float:
        """Euclidean distance from x to the known Pareto set."""
        if self._pareto_distance_fn is None:
            raise NotImplementedError(
                f"problem {self.name!r} has no Pareto-set oracle"
            )
        return float(self._pareto_distance_fn(x.coeffs))


def _segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    t = np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0)
    return float(np.linalg.norm(p - (a + t * ab)))


def _make_absdist() -> AnalyticProblem:
    # f1 = |x1| + x2^2, f2 = |x1 - 2| + x2^2; Pareto set [0,2] x {0}
    def f1(x):
        return abs(x[0]) + x[1] ** 2

    def g1(x):
        return np.array([sign_plus(x[0]), 2.0 * x[1]])

    def f2(x):
        return abs(x[0] - 2.0) + x[1] ** 2

    def g2(x):
        return np.array([sign_plus(x[0] - 2.0), 2.0 * x[1]])

    return AnalyticProblem(
        "absdist", 2,
        [_Objective(f1, g1), _Objective(f2, g2)],
        pareto_distance_fn=lambda x: _segment_distance(
            x, np.array([0.0, 0.0]), np.array([2.0, 0.0])),
    )


def _make_quadpair() -> AnalyticProblem:
    # f1 = |x - a|^2, f2 = |x + a|^2 with a = (1, 0); Pareto set [-a, a]
    a = np.array([1.0, 0.0])

    return AnalyticProblem(
        "quadpair", 2,
        [
            _Objective(lambda x: float(np.sum((x - a) ** 2)),
                       lambda x: 2.0 * (x - a)),
            _Objective(lambda x: float(np.sum((x + a) ** 2)),
                       lambda x: 2.0 * (x + a)),
        ],
        pareto_distance_fn=lambda x: _segment_distance(x, -a, a),
    )


def _make_l1(dim: int = 3) -> AnalyticProblem:
    return AnalyticProblem(
        f"l1", dim,
        [_Objective(lambda x: float(np.sum(np.abs(x))),
                    lambda x: np.array([sign_plus(t) for t in x]))],
        pareto_distance_fn=lambda x: float(np.linalg.norm(x)),
    )


_FACTORIES = {
    "absdist": _make_absdist,
    "quadpair": _make_quadpair,
    "l1": _make_l1,
}

ANALYTIC_NAMES = tuple(sorted(_FACTORIES))


def analytic_problem(name: str) -> AnalyticProblem:
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(
            f"unknown analytic problem {name!r}; available: {ANALYTIC_NAMES}"
        ) from None
    return factory()
