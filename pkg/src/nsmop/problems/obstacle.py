"""Obstacle-constrained bicriteria control benchmark on (-1,1)^2.

P1 elements on a structured right-triangle grid discretize the membrane
problem: find the displacement y <= psi (nodally) minimizing the Dirichlet
energy against a distributed control u.  The two cost functionals are the
L^2 misfit of the state to a desired state and the scaled L^2 size of the
control.  The control-to-state map is evaluated with a primal active-set
iteration on the energy formulation; generalized derivatives of the first
objective come from an adjoint solve restricted to the strictly inactive
nodes, with weak-contact nodes assigned to the active side.

The control space carries the mass-matrix Gram (discrete L^2), so the
solver's dual-to-primal preconditioner is the canonical L^2 Riesz map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from ..space import DualVector, InnerProductSpace, PrimalVector
from .base import MOProblem

OMEGA_AREA = 4.0
DEFAULT_C = 1.5e-2
DEFAULT_Y_D = 2.0
_FEAS_TOL = 1e-12       # active-set update margin
_CONTACT_TOL = 1e-12    # y == psi detection
_DENSE_LIMIT = 1500     # interior size below which dense solves win


class MeshError(ValueError):
    pass


class ObstacleSolveError(RuntimeError):
    pass


@dataclass
class Mesh:
    nodes: np.ndarray          # (N, 2)
    triangles: np.ndarray      # (T, 3) CCW node indices
    boundary_mask: np.ndarray  # (N,) bool
    h_max_target: float
    n_cells: int               # cells per axis

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)


def build_mesh(h_max: float) -> Mesh:
    """Uniform grid of (-1,1)^2, each cell split along the (1,1) diagonal.

    The cell count per axis is the smallest n with hypotenuse
    2*sqrt(2)/n <= h_max, so every element edge respects the target.
    """
    if h_max <= 0.0:
        raise MeshError(f"h_max must be positive, got {h_max}")
    n = max(1, int(math.ceil(2.0 * math.sqrt(2.0) / h_max - 1e-9)))
    coords = np.linspace(-1.0, 1.0, n + 1)
    gx, gy = np.meshgrid(coords, coords, indexing="xy")
    nodes = np.column_stack([gx.ravel(), gy.ravel()])

    def nid(ix, iy):
        return iy * (n + 1) + ix

    tris = np.empty((2 * n * n, 3), dtype=np.int64)
    t = 0
    for iy in range(n):
        for ix in range(n):
            v00, v10 = nid(ix, iy), nid(ix + 1, iy)
            v01, v11 = nid(ix, iy + 1), nid(ix + 1, iy + 1)
            tris[t] = (v00, v10, v11)
            tris[t + 1] = (v00, v11, v01)
            t += 2

    boundary = (np.abs(np.abs(nodes[:, 0]) - 1.0) < 1e-12) | (
        np.abs(np.abs(nodes[:, 1]) - 1.0) < 1e-12
    )
    return Mesh(nodes=nodes, triangles=tris, boundary_mask=boundary,
                h_max_target=h_max, n_cells=n)


def p1_local_matrices(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Stiffness and mass matrix of a single P1 triangle (CCW vertices)."""
    coords = np.asarray(coords, dtype=float)
    e1 = coords[1] - coords[0]
    e2 = coords[2] - coords[0]
    det = e1[0] * e2[1] - e1[1] * e2[0]
    if det <= 0.0:
        raise MeshError(f"degenerate or misoriented triangle (2*area={det})")
    area = 0.5 * det
    # gradients of the barycentric basis
    g = np.array([
        [coords[1, 1] - coords[2, 1], coords[2, 0] - coords[1, 0]],
        [coords[2, 1] - coords[0, 1], coords[0, 0] - coords[2, 0]],
        [coords[0, 1] - coords[1, 1], coords[1, 0] - coords[0, 0]],
    ]) / det
    ke = area * (g @ g.T)
    me = (area / 12.0) * (np.ones((3, 3)) + np.eye(3))
    return ke, me


@dataclass
class FEMOperators:
    K_all: scipy.sparse.csr_matrix   # pre-BC stiffness, all nodes
    K_int: scipy.sparse.csr_matrix   # stiffness on interior nodes
    M: scipy.sparse.csr_matrix       # mass, all nodes
    interior_idx: np.ndarray
    boundary_idx: np.ndarray

    @property
    def interior_count(self) -> int:
        return len(self.interior_idx)

    @cached_property
    def K_int_dense(self) -> np.ndarray | None:
        if self.interior_count <= _DENSE_LIMIT:
            return self.K_int.toarray()
        return None


def assemble_operators(mesh: Mesh) -> FEMOperators:
    """Standard P1 assembly; Dirichlet rows/columns removed from K only."""
    pts = mesh.nodes[mesh.triangles]          # (T, 3, 2)
    e1 = pts[:, 1] - pts[:, 0]
    e2 = pts[:, 2] - pts[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    if np.any(det <= 0.0):
        bad = int(np.argmax(det <= 0.0))
        raise MeshError(f"degenerate or misoriented triangle #{bad}")
    area = 0.5 * det

    grads = np.empty((len(det), 3, 2))
    grads[:, 0, 0] = pts[:, 1, 1] - pts[:, 2, 1]
    grads[:, 0, 1] = pts[:, 2, 0] - pts[:, 1, 0]
    grads[:, 1, 0] = pts[:, 2, 1] - pts[:, 0, 1]
    grads[:, 1, 1] = pts[:, 0, 0] - pts[:, 2, 0]
    grads[:, 2, 0] = pts[:, 0, 1] - pts[:, 1, 1]
    grads[:, 2, 1] = pts[:, 1, 0] - pts[:, 0, 0]
    grads /= det[:, None, None]

    ke = area[:, None, None] * np.einsum("tid,tjd->tij", grads, grads)
    me = (area / 12.0)[:, None, None] * (np.ones((3, 3)) + np.eye(3))[None]

    n = mesh.num_nodes
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    K_all = scipy.sparse.coo_matrix(
        (ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = scipy.sparse.coo_matrix(
        (me.ravel(), (rows, cols)), shape=(n, n)).tocsr()

    interior_idx = np.flatnonzero(~mesh.boundary_mask)
    boundary_idx = np.flatnonzero(mesh.boundary_mask)
    K_int = K_all[interior_idx][:, interior_idx].tocsr()
    return FEMOperators(K_all=K_all, K_int=K_int, M=M,
                        interior_idx=interior_idx, boundary_idx=boundary_idx)


def make_obstacle(kind: str, mesh: Mesh) -> np.ndarray:
    """Nodal interpolation of the benchmark obstacles (nodal values).

    piecewise: 1/3 on the closed lower-left quadrant, 1 on the closed
    upper-right quadrant, 2/3 elsewhere, with the cases applied in that
    order (so the origin gets 1/3).
    """
    x1 = mesh.nodes[:, 0]
    x2 = mesh.nodes[:, 1]
    if kind == "constant":
        vals = np.ones(mesh.num_nodes)
    elif kind == "piecewise":
        lower_left = (x1 <= 0.0) & (x2 <= 0.0)
        upper_right = (x1 >= 0.0) & (x2 >= 0.0)
        vals = np.where(lower_left, 1.0 / 3.0,
                        np.where(upper_right, 1.0, 2.0 / 3.0))
    else:
        raise ValueError(f"unknown obstacle kind {kind!r}")
    return vals


@dataclass
class ObstacleState:
    y: PrimalVector            # nodal state, zero on the boundary
    active_mask: np.ndarray    # per node: y_i == psi_i (contact, incl. weak)
    residual: np.ndarray       # K y - M u on interior nodes, 0 on boundary
    active_interior: np.ndarray  # algorithmic active set, interior ordering
    iterations: int


@dataclass
class ObstacleControlProblem:
    mesh: Mesh
    operators: FEMOperators
    psi: PrimalVector
    y_d: PrimalVector
    u_d: PrimalVector
    C: float
    space: InnerProductSpace   # control space, Gram = mass matrix
    obstacle_kind: str = "constant"


def make_obstacle_problem(h_max: float, obstacle: str = "constant",
                          C: float = DEFAULT_C,
                          y_d_value: float = DEFAULT_Y_D) -> ObstacleControlProblem:
    mesh = build_mesh(h_max)
    ops = assemble_operators(mesh)
    space = InnerProductSpace(ops.M)
    problem = ObstacleControlProblem(
        mesh=mesh, operators=ops,
        psi=PrimalVector(make_obstacle(obstacle, mesh), space),
        y_d=PrimalVector(np.full(mesh.num_nodes, y_d_value), space),
        u_d=space.zero_primal(),
        C=C, space=space, obstacle_kind=obstacle,
    )
    # admissible set nonempty: one solve with zero control must succeed
    solve_obstacle(space.zero_primal(), problem)
    return problem


def _interior_solve(ops: FEMOperators, free: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    dense = ops.K_int_dense
    if dense is not None:
        kff = dense[np.ix_(free, free)]
        return scipy.linalg.solve(kff, rhs, assume_a="pos")
    kff = ops.K_int[free][:, free].tocsc()
    return scipy.sparse.linalg.spsolve(kff, rhs)


def solve_obstacle(u: PrimalVector, problem: ObstacleControlProblem,
                   active_init: np.ndarray | None = None,
                   max_iter: int | None = None) -> ObstacleState:
    """Discrete VI solve by a primal active-set iteration.

    Each pass clamps the guessed active nodes to the obstacle, solves the
    reduced Poisson system on the rest, then exchanges feasibility
    violators in and wrong-sign multipliers out until the set is stable or
    the state already satisfies feasibility and complementarity to
    tolerance.
    """
    ops = problem.operators
    ni = ops.interior_count
    if max_iter is None:
        max_iter = 5 * problem.mesh.num_nodes + 10
    b = (ops.M @ u.coeffs)[ops.interior_idx]
    psi_i = problem.psi.coeffs[ops.interior_idx]

    if active_init is not None and len(active_init) == ni:
        active = active_init.astype(bool).copy()
    else:
        active = np.zeros(ni, dtype=bool)

    for it in range(1, max_iter + 1):
        free = ~active
        y_i = np.empty(ni)
        y_i[active] = psi_i[active]
        if free.any():
            rhs = b[free]
            if active.any():
                rhs = rhs - ops.K_int[free][:, active] @ psi_i[active]
            y_i[free] = _interior_solve(ops, free, rhs)
        r = ops.K_int @ y_i - b

        feasible = not free.any() or np.all(y_i[free] <= psi_i[free] + 1e-10)
        comp_ok = not active.any() or np.all(r[active] <= 1e-8)
        add = free & (y_i > psi_i - _FEAS_TOL)
        keep = active & (r < -_FEAS_TOL)
        new_active = add | keep
        if np.array_equal(new_active, active) or (feasible and comp_ok):
            return _finish_state(u, problem, y_i, r, active, it)
        active = new_active

    raise ObstacleSolveError(
        f"active-set iteration did not stabilize within {max_iter} passes"
    )


def _finish_state(u, problem, y_i, r, active, iterations) -> ObstacleState:
    ops = problem.operators
    n = problem.mesh.num_nodes
    y = np.zeros(n)
    y[ops.interior_idx] = y_i
    residual = np.zeros(n)
    residual[ops.interior_idx] = r
    contact = y >= problem.psi.coeffs - _CONTACT_TOL
    return ObstacleState(
        y=PrimalVector(y, problem.space),
        active_mask=contact,
        residual=residual,
        active_interior=active.copy(),
        iterations=iterations,
    )


def eval_objectives(u: PrimalVector, problem: ObstacleControlProblem,
                    state: ObstacleState | None = None) -> tuple[float, float]:
    """(state misfit, control cost) = (1/2|y-y_d|_M^2, C/2 |u-u_d|_M^2)."""
    if state is None:
        state = solve_obstacle(u, problem)
    d = state.y.coeffs - problem.y_d.coeffs
    j1 = 0.5 * float(d @ (problem.operators.M @ d))
    du = u.coeffs - problem.u_d.coeffs
    j2 = 0.5 * problem.C * float(du @ (problem.operators.M @ du))
    return j1, j2


def _check_state(u, problem, state):
    ops = problem.operators
    y_i = state.y.coeffs[ops.interior_idx]
    r = ops.K_int @ y_i - (ops.M @ u.coeffs)[ops.interior_idx]
    if np.max(np.abs(r - state.residual[ops.interior_idx])) > 1e-6:
        raise ValueError("state does not correspond to the given control")


def subgrad_J1(u: PrimalVector, state: ObstacleState,
               problem: ObstacleControlProblem) -> DualVector:
    """Adjoint-based generalized derivative of the state misfit.

    The adjoint system lives on the strictly inactive interior nodes
    (contact nodes, including weak contact, are clamped); the returned
    functional is v -> p^T M v, whose L^2 Riesz representative is p.
    """
    _check_state(u, problem, state)
    ops = problem.operators
    n = problem.mesh.num_nodes
    inactive = ~state.active_mask[ops.interior_idx]
    p = np.zeros(n)
    if inactive.any():
        rhs_full = ops.M @ (state.y.coeffs - problem.y_d.coeffs)
        rhs = rhs_full[ops.interior_idx][inactive]
        p_i = _interior_solve(ops, inactive, rhs)
        p[ops.interior_idx[inactive]] = p_i
    return DualVector(ops.M @ p, problem.space)


def subgrad_J2(u: PrimalVector, problem: ObstacleControlProblem) -> DualVector:
    """Gradient of the control cost: functional with coefficients C M (u - u_d)."""
    du = u.coeffs - problem.u_d.coeffs
    return DualVector(problem.C * (problem.operators.M @ du), problem.space)


class ObstacleBicriteria(MOProblem):
    """Solver-facing adapter with per-point state caching and warm starts.

    VI solves are memoized on the control coefficients (small FIFO) so that
    an objective evaluation followed by a subgradient query at the same
    point costs one solve; the active set of the last solve seeds the next.
    """

    k = 2

    def __init__(self, problem: ObstacleControlProblem, cache_size: int = 4):
        self.problem = problem
        self.space = problem.space
        self.name = f"obstacle:{problem.obstacle_kind}"
        self._cache: dict[bytes, ObstacleState] = {}
        self._cache_size = cache_size
        self._warm: np.ndarray | None = None
        self.vi_solves = 0

    def state_at(self, x: PrimalVector) -> ObstacleState:
        key = x.coeffs.tobytes()
        state = self._cache.get(key)
        if state is None:
            state = solve_obstacle(x, self.problem, active_init=self._warm)
            self.vi_solves += 1
            self._warm = state.active_interior
            if len(self._cache) >= self._cache_size:
                self._cache.pop(next(iter(self._cache)))
            self._cache[key] = state
        return state

    def objective_value(self, i: int, x: PrimalVector) -> float:
        if i == 1:  # control cost needs no VI solve
            du = x.coeffs - self.problem.u_d.coeffs
            return 0.5 * self.problem.C * float(du @ (self.problem.operators.M @ du))
        j1, _ = eval_objectives(x, self.problem, state=self.state_at(x))
        return j1

    def objective_values(self, x: PrimalVector) -> np.ndarray:
        return np.array(eval_objectives(x, self.problem, state=self.state_at(x)))

    def subgradient(self, i: int, x: PrimalVector) -> DualVector:
        if i == 0:
            return subgrad_J1(x, self.state_at(x), self.problem)
        return subgrad_J2(x, self.problem)


def field_columns(problem: ObstacleControlProblem, u: PrimalVector,
                  state: ObstacleState) -> dict[str, np.ndarray]:
    """Per-node columns of the field export (node_id,x1,x2,u,y,psi,active)."""
    n = problem.mesh.num_nodes
    return {
        "node_id": np.arange(n),
        "x1": problem.mesh.nodes[:, 0],
        "x2": problem.mesh.nodes[:, 1],
        "u": u.coeffs,
        "y": state.y.coeffs,
        "psi": problem.psi.coeffs,
        "active": state.active_mask.astype(int),
    }
