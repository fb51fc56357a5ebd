import math

import numpy as np
import pytest
import scipy.sparse.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from nsmop.problems.obstacle import (
    MeshError,
    ObstacleBicriteria,
    assemble_operators,
    build_mesh,
    eval_objectives,
    field_columns,
    make_obstacle,
    make_obstacle_problem,
    p1_local_matrices,
    solve_obstacle,
    subgrad_J1,
    subgrad_J2,
)
from nsmop.space import dual_norm, dual_pair

# shared coarse problem for the property test (construction is not free)
_COARSE = make_obstacle_problem(0.8)


# ---------------------------------------------------------------- mesh

def test_mesh_coarsest():
    m = build_mesh(2.0 * math.sqrt(2.0))
    assert m.n_cells == 1
    assert m.num_nodes == 4
    assert len(m.triangles) == 2


def test_mesh_counts_formula():
    m = build_mesh(1.0)
    assert m.n_cells == 3
    assert m.num_nodes == 16
    assert len(m.triangles) == 18
    assert m.boundary_mask.sum() == 12

    m = build_mesh(0.2)
    assert m.n_cells == 15
    assert m.num_nodes == 256
    assert len(m.triangles) == 450
    assert m.boundary_mask.sum() == 60


def test_mesh_edges_respect_target():
    for h in (0.4, 0.37, 1.0):
        m = build_mesh(h)
        p = m.nodes[m.triangles]
        for a, b in ((0, 1), (1, 2), (2, 0)):
            lengths = np.linalg.norm(p[:, a] - p[:, b], axis=1)
            assert np.all(lengths <= h * (1 + 1e-12))


def test_mesh_orientation_positive():
    m = build_mesh(0.5)
    p = m.nodes[m.triangles]
    cross = ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
             - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
    assert np.all(cross > 0)


def test_mesh_boundary_on_square_edge():
    m = build_mesh(0.7)
    on_edge = np.max(np.abs(m.nodes[m.boundary_mask]), axis=1)
    assert np.allclose(on_edge, 1.0)


def test_mesh_invalid_h():
    with pytest.raises(MeshError):
        build_mesh(0.0)
    with pytest.raises(MeshError):
        build_mesh(-1.0)


# ------------------------------------------------------------ assembly

def test_local_stiffness_right_triangle():
    # right angle first; legs h: the local stiffness is h-independent
    for h in (1.0, 0.25):
        ke, _ = p1_local_matrices(np.array([[0.0, 0.0], [h, 0.0], [0.0, h]]))
        assert np.allclose(ke, 0.5 * np.array([[2, -1, -1], [-1, 1, 0], [-1, 0, 1]]))


def test_local_mass_sums_to_area():
    ke, me = p1_local_matrices(np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]]))
    assert me.sum() == pytest.approx(0.125)


def test_degenerate_triangle_rejected():
    with pytest.raises(MeshError):
        p1_local_matrices(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))


def test_total_mass_is_domain_area():
    for h in (1.0, 0.4):
        ops = assemble_operators(build_mesh(h))
        assert ops.M.sum() == pytest.approx(4.0, abs=1e-10)


def test_stiffness_row_sums_zero_pre_bc():
    ops = assemble_operators(build_mesh(0.4))
    assert np.abs(np.asarray(ops.K_all.sum(axis=1))).max() <= 1e-10


def test_operators_symmetric():
    ops = assemble_operators(build_mesh(0.5))
    assert abs(ops.K_all - ops.K_all.T).max() <= 1e-12
    assert abs(ops.M - ops.M.T).max() <= 1e-12


# ------------------------------------------------------------ VI solve

def test_no_obstacle_reduces_to_linear_solve():
    cp = make_obstacle_problem(0.4)
    cp.psi.coeffs[:] = 1e6
    rng = np.random.default_rng(0)
    u = cp.space.primal(rng.uniform(-2, 2, cp.mesh.num_nodes))
    st = solve_obstacle(u, cp)
    assert not st.active_mask.any()
    ops = cp.operators
    direct = scipy.sparse.linalg.spsolve(
        ops.K_int.tocsc(), (ops.M @ u.coeffs)[ops.interior_idx])
    assert np.max(np.abs(st.y.coeffs[ops.interior_idx] - direct)) <= 1e-10


def test_zero_obstacle_fully_active():
    cp = make_obstacle_problem(0.4)
    cp.psi.coeffs[:] = 0.0
    u = cp.space.primal(np.ones(cp.mesh.num_nodes))
    st = solve_obstacle(u, cp)
    assert np.allclose(st.y.coeffs, 0.0)
    interior = cp.operators.interior_idx
    assert st.active_mask[interior].all()
    # residual r = -Mu <= 0 certifies complementarity
    assert st.residual[interior].max() <= 1e-8
    assert np.allclose(st.residual[interior],
                       -(cp.operators.M @ u.coeffs)[interior])


def test_vi_state_invariants_mixed_contact():
    cp = make_obstacle_problem(0.2)
    u = cp.space.primal(np.full(cp.mesh.num_nodes, 8.0))
    st = solve_obstacle(u, cp)
    interior = cp.operators.interior_idx
    assert st.active_mask[interior].any()
    assert not st.active_mask[interior].all()
    # feasibility and complementarity at stated tolerances
    assert np.all(st.y.coeffs <= cp.psi.coeffs + 1e-10)
    assert st.residual[interior].max() <= 1e-8
    inactive = interior[~st.active_mask[interior]]
    assert np.max(np.abs(st.residual[inactive])) <= 1e-8


def test_vi_energy_minimality_against_perturbations():
    cp = make_obstacle_problem(0.4)
    rng = np.random.default_rng(1)
    u = cp.space.primal(np.full(cp.mesh.num_nodes, 5.0))
    st = solve_obstacle(u, cp)
    ops = cp.operators
    interior = ops.interior_idx
    b = (ops.M @ u.coeffs)[interior]
    y0 = st.y.coeffs[interior]
    psi = cp.psi.coeffs[interior]

    def energy(y):
        return 0.5 * y @ (ops.K_int @ y) - b @ y

    e0 = energy(y0)
    for _ in range(20):
        trial = np.minimum(y0 + 0.1 * rng.standard_normal(len(y0)), psi)
        assert energy(trial) >= e0 - 1e-10


def test_contact_grows_with_control():
    cp = make_obstacle_problem(0.2)
    sizes = []
    for val in (1.0, 4.0, 8.0):
        u = cp.space.primal(np.full(cp.mesh.num_nodes, val))
        sizes.append(solve_obstacle(u, cp).active_mask.sum())
    assert sizes[0] <= sizes[1] <= sizes[2]
    assert sizes[2] > 0


def test_refinement_convergence_no_contact():
    # u = 1 stays below psi = 1: pure Poisson; doubling the cell count
    # shrinks the M-norm difference at shared nodes by roughly 4 (P1 is
    # O(h^2) in L2).  h values chosen so n doubles exactly: 8, 16, 32.
    ys = []
    for n in (8, 16, 32):
        cp = make_obstacle_problem(2.0 * math.sqrt(2.0) / n)
        assert cp.mesh.n_cells == n
        u = cp.space.primal(np.ones(cp.mesh.num_nodes))
        st = solve_obstacle(u, cp)
        assert not st.active_mask.any()
        ys.append((cp, st.y.coeffs))

    def m_norm_diff(coarse, fine):
        # nested grids: coarse node (ix, iy) sits at fine node (2ix, 2iy)
        cpc, yc = coarse
        cpf, yf = fine
        nc, nf = cpc.mesh.n_cells, cpf.mesh.n_cells
        ratio, fine_side = nf // nc, nf + 1
        shared_fine = [iy * ratio * fine_side + ix * ratio
                       for iy in range(nc + 1) for ix in range(nc + 1)]
        d = yf[shared_fine] - yc
        m = cpc.operators.M
        return math.sqrt(max(d @ (m @ d), 0.0))

    d1 = m_norm_diff(ys[0], ys[1])
    d2 = m_norm_diff(ys[1], ys[2])
    assert 3.0 <= d1 / d2 <= 5.0


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1),
       st.floats(min_value=-4.0, max_value=12.0))
def test_vi_invariants_random_controls(seed, shift):
    # any control must produce a feasible, complementary state
    cp = _COARSE
    rng = np.random.default_rng(seed)
    u = cp.space.primal(shift + 3.0 * rng.standard_normal(cp.mesh.num_nodes))
    st_out = solve_obstacle(u, cp)
    interior = cp.operators.interior_idx
    assert np.all(st_out.y.coeffs <= cp.psi.coeffs + 1e-10)
    assert st_out.residual[interior].max() <= 1e-8
    inactive = interior[~st_out.active_mask[interior]]
    if len(inactive):
        assert np.max(np.abs(st_out.residual[inactive])) <= 1e-8


def test_active_set_warm_start_agrees():
    cp = make_obstacle_problem(0.2)
    u = cp.space.primal(np.full(cp.mesh.num_nodes, 6.0))
    cold = solve_obstacle(u, cp)
    warm = solve_obstacle(u, cp, active_init=cold.active_interior)
    assert np.array_equal(cold.active_mask, warm.active_mask)
    assert np.allclose(cold.y.coeffs, warm.y.coeffs, atol=1e-12)
    assert warm.iterations <= cold.iterations


# ----------------------------------------------------------- objectives

def test_objectives_zero_control():
    cp = make_obstacle_problem(0.4)
    j1, j2 = eval_objectives(cp.space.zero_primal(), cp)
    assert j1 == pytest.approx(8.0, abs=1e-10)
    assert j2 == 0.0


def test_objectives_zero_obstacle_unit_control():
    cp = make_obstacle_problem(0.4)
    cp.psi.coeffs[:] = 0.0
    u = cp.space.primal(np.ones(cp.mesh.num_nodes))
    j1, j2 = eval_objectives(u, cp)
    assert j1 == pytest.approx(8.0, abs=1e-10)
    assert j2 == pytest.approx(0.03, abs=1e-12)


def test_j2_zero_at_reference_control():
    cp = make_obstacle_problem(0.4, obstacle="piecewise")
    assert eval_objectives(cp.u_d, cp)[1] == 0.0


# ----------------------------------------------------------- obstacles

def test_obstacle_constant():
    m = build_mesh(0.4)
    assert np.all(make_obstacle("constant", m) == 1.0)


def test_obstacle_piecewise_cases():
    m = build_mesh(0.4)  # n = 8: grid contains 0 and +-0.5 exactly
    psi = make_obstacle("piecewise", m)

    def at(x1, x2):
        i = np.flatnonzero((np.abs(m.nodes[:, 0] - x1) < 1e-12)
                           & (np.abs(m.nodes[:, 1] - x2) < 1e-12))
        assert len(i) == 1
        return psi[i[0]]

    assert at(-0.5, -0.5) == pytest.approx(1.0 / 3.0)
    assert at(0.5, 0.5) == pytest.approx(1.0)
    assert at(-0.5, 0.5) == pytest.approx(2.0 / 3.0)
    assert at(0.0, 0.0) == pytest.approx(1.0 / 3.0)  # case order at origin


def test_obstacle_unknown_kind():
    with pytest.raises(ValueError):
        make_obstacle("bogus", build_mesh(1.0))


# ------------------------------------------------------------- adjoints

def test_subgrad_j1_no_contact_matches_fd():
    cp = make_obstacle_problem(0.4)
    n = cp.mesh.num_nodes
    u = cp.space.primal(np.full(n, 0.5))
    st = solve_obstacle(u, cp)
    assert not st.active_mask.any()
    xi = subgrad_J1(u, st, cp)
    rng = np.random.default_rng(7)
    h = 1e-5
    for _ in range(10):
        d = cp.space.primal(rng.standard_normal(n))
        jp = eval_objectives(u + h * d, cp)[0]
        jm = eval_objectives(u + (-h) * d, cp)[0]
        fd = (jp - jm) / (2 * h)
        assert abs(fd - dual_pair(xi, d)) <= 1e-5 * max(1.0, abs(fd))


def test_subgrad_j1_fully_active_is_zero():
    cp = make_obstacle_problem(0.4)
    cp.psi.coeffs[:] = 0.0
    u = cp.space.primal(np.ones(cp.mesh.num_nodes))
    st = solve_obstacle(u, cp)
    xi = subgrad_J1(u, st, cp)
    assert np.allclose(xi.coeffs, 0.0)


def test_subgrad_j1_riesz_rep_vanishes_on_active_and_boundary():
    cp = make_obstacle_problem(0.2)
    u = cp.space.primal(np.full(cp.mesh.num_nodes, 8.0))
    st = solve_obstacle(u, cp)
    assert st.active_mask.any()
    xi = subgrad_J1(u, st, cp)
    p = cp.space.solve_gram(xi.coeffs)
    assert np.max(np.abs(p[st.active_mask])) <= 1e-10
    assert np.max(np.abs(p[cp.mesh.boundary_mask])) <= 1e-10


def test_subgrad_j1_state_mismatch_rejected():
    cp = make_obstacle_problem(0.4)
    n = cp.mesh.num_nodes
    st = solve_obstacle(cp.space.primal(np.full(n, 2.0)), cp)
    with pytest.raises(ValueError):
        subgrad_J1(cp.space.primal(np.full(n, 3.0)), st, cp)


def test_subgrad_j2_values():
    cp = make_obstacle_problem(0.4)
    assert np.allclose(subgrad_J2(cp.u_d, cp).coeffs, 0.0)
    u = cp.space.primal(np.ones(cp.mesh.num_nodes))
    assert dual_norm(subgrad_J2(u, cp)) == pytest.approx(0.03, rel=1e-10)


def test_subgrad_j2_fd():
    cp = make_obstacle_problem(0.4)
    n = cp.mesh.num_nodes
    rng = np.random.default_rng(3)
    u = cp.space.primal(rng.uniform(0, 2, n))
    xi = subgrad_J2(u, cp)
    h = 1e-6
    for _ in range(5):
        d = cp.space.primal(rng.standard_normal(n))
        jp = eval_objectives(u + h * d, cp)[1]
        jm = eval_objectives(u + (-h) * d, cp)[1]
        fd = (jp - jm) / (2 * h)
        assert abs(fd - dual_pair(xi, d)) <= 1e-8 * max(1.0, abs(fd))


# ------------------------------------------------------------- adapter

def test_bicriteria_adapter_consistency():
    prob = ObstacleBicriteria(make_obstacle_problem(0.4))
    n = prob.problem.mesh.num_nodes
    x = prob.space.primal(np.full(n, 3.0))
    vals = prob.objective_values(x)
    assert vals[0] == pytest.approx(prob.objective_value(0, x))
    assert vals[1] == pytest.approx(prob.objective_value(1, x))
    solves_before = prob.vi_solves
    prob.subgradient(0, x)
    prob.subgradient(1, x)
    assert prob.vi_solves == solves_before  # cache reused


def test_field_columns_schema():
    cp = make_obstacle_problem(0.4)
    u = cp.space.primal(np.full(cp.mesh.num_nodes, 8.0))
    st = solve_obstacle(u, cp)
    cols = field_columns(cp, u, st)
    assert set(cols) == {"node_id", "x1", "x2", "u", "y", "psi", "active"}
    assert len(cols["node_id"]) == cp.mesh.num_nodes
    assert set(np.unique(cols["active"])) <= {0, 1}
