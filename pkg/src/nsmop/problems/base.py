"""Common interface for multiobjective problems fed to the solver."""

from __future__ import annotations

import numpy as np

from ..space import DualVector, InnerProductSpace, PrimalVector


class MOProblem:
    """k locally Lipschitz objectives over one inner-product space.

    Subclasses implement objective_value and subgradient; each subgradient
    call returns one (arbitrary but deterministic) Clarke subderivative at
    the query point.  objective_values may be overridden when evaluating
    all objectives at once is cheaper than k separate calls.
    """

    name: str = "problem"
    space: InnerProductSpace
    k: int

    def objective_value(self, i: int, x: PrimalVector) -> float:
        raise NotImplementedError

    def objective_values(self, x: PrimalVector) -> np.ndarray:
        return np.array([self.objective_value(i, x) for i in range(self.k)])

    def subgradient(self, i: int, x: PrimalVector) -> DualVector:
        raise NotImplementedError
