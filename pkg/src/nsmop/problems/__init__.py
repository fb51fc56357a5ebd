from .base import MOProblem
from .analytic import AnalyticProblem, analytic_problem, ANALYTIC_NAMES
from .obstacle import (
    Mesh,
    FEMOperators,
    ObstacleState,
    ObstacleControlProblem,
    ObstacleBicriteria,
    build_mesh,
    assemble_operators,
    solve_obstacle,
    eval_objectives,
    subgrad_J1,
    subgrad_J2,
    make_obstacle,
    make_obstacle_problem,
    field_columns,
)

__all__ = [
    "MOProblem",
    "AnalyticProblem",
    "analytic_problem",
    "ANALYTIC_NAMES",
    "Mesh",
    "FEMOperators",
    "ObstacleState",
    "ObstacleControlProblem",
    "ObstacleBicriteria",
    "build_mesh",
    "assemble_operators",
    "solve_obstacle",
    "eval_objectives",
    "subgrad_J1",
    "subgrad_J2",
    "make_obstacle",
    "make_obstacle_problem",
    "field_columns",
]
