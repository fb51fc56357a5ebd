import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsmop.problems import analytic_problem, ANALYTIC_NAMES
from nsmop.space import dual_pair


def test_absdist_values():
    p = analytic_problem("absdist")
    assert np.allclose(p.objective_values(p.space.primal([1.0, 1.0])), [2.0, 2.0])
    assert np.allclose(p.objective_values(p.space.primal([0.0, 0.0])), [0.0, 2.0])
    assert np.allclose(p.objective_values(p.space.primal([2.0, 0.0])), [2.0, 0.0])


def test_absdist_subgradients():
    p = analytic_problem("absdist")
    assert np.allclose(p.subgradient(0, p.space.primal([1.0, 1.0])).coeffs, [1.0, 2.0])
    # tie-break sign(0) = +1 at the kink
    assert np.allclose(p.subgradient(0, p.space.primal([0.0, 1.0])).coeffs, [1.0, 2.0])
    assert np.allclose(p.subgradient(1, p.space.primal([0.0, 0.0])).coeffs, [-1.0, 0.0])


def test_absdist_pareto_distance():
    p = analytic_problem("absdist")
    assert p.pareto_distance(p.space.primal([3.0, 1.0])) == pytest.approx(np.sqrt(2.0))
    assert p.pareto_distance(p.space.primal([1.0, 0.0])) == 0.0
    assert p.pareto_distance(p.space.primal([-1.0, 0.0])) == 1.0


def test_quadpair_pareto_is_segment():
    p = analytic_problem("quadpair")
    assert p.pareto_distance(p.space.primal([0.0, 0.0])) == 0.0
    assert p.pareto_distance(p.space.primal([1.0, 0.0])) == 0.0
    assert p.pareto_distance(p.space.primal([2.0, 0.0])) == pytest.approx(1.0)
    assert p.pareto_distance(p.space.primal([0.0, 2.0])) == pytest.approx(2.0)


def test_l1_minimizer_at_origin():
    p = analytic_problem("l1")
    x = p.space.primal([1.0, -2.0, 0.0])
    assert p.objective_values(x)[0] == pytest.approx(3.0)
    assert np.allclose(p.subgradient(0, x).coeffs, [1.0, -1.0, 1.0])
    assert p.pareto_distance(p.space.primal([0.0, 0.0, 0.0])) == 0.0


def test_unknown_name():
    with pytest.raises(ValueError):
        analytic_problem("nope")


@settings(max_examples=60)
@given(st.sampled_from(ANALYTIC_NAMES),
       st.integers(min_value=0, max_value=2**32 - 1))
def test_subgradient_inequality_convex(name, seed):
    # every suite member is convex, so f(y) >= f(x) + xi(y - x) globally
    p = analytic_problem(name)
    rng = np.random.default_rng(seed)
    x = p.space.primal(rng.uniform(-5, 5, p.space.dim))
    y = p.space.primal(rng.uniform(-5, 5, p.space.dim))
    fx = p.objective_values(x)
    fy = p.objective_values(y)
    for i in range(p.k):
        xi = p.subgradient(i, x)
        assert fy[i] >= fx[i] + dual_pair(xi, y - x) - 1e-8


@settings(max_examples=40)
@given(st.sampled_from(ANALYTIC_NAMES),
       st.integers(min_value=0, max_value=2**32 - 1))
def test_subgradient_matches_directional_difference(name, seed):
    # one-sided difference quotients dominate the pairing for small t
    p = analytic_problem(name)
    rng = np.random.default_rng(seed)
    x = p.space.primal(rng.uniform(-3, 3, p.space.dim))
    d = p.space.primal(rng.standard_normal(p.space.dim))
    t = 1e-6
    fx = p.objective_values(x)
    ft = p.objective_values(x + t * d)
    for i in range(p.k):
        xi = p.subgradient(i, x)
        assert ft[i] - fx[i] >= t * dual_pair(xi, d) - 1e-8
