import numpy as np
import pytest
import scipy.sparse
from hypothesis import given, settings
from hypothesis import strategies as st

from nsmop.space import (
    GramMatrixError,
    InnerProductSpace,
    dual_inner,
    dual_norm,
    dual_pair,
    euclidean_space,
    riesz_inv,
)


def random_spd(dim, rng, lo=0.5, hi=2.0):
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q @ np.diag(rng.uniform(lo, hi, dim)) @ q.T


def test_riesz_identity_gram():
    sp = euclidean_space(2)
    r = riesz_inv(sp.dual([3.0, 4.0]))
    assert np.array_equal(r.coeffs, [3.0, 4.0])


def test_riesz_diagonal_gram():
    sp = InnerProductSpace(np.diag([2.0, 2.0]))
    r = riesz_inv(sp.dual([2.0, 0.0]))
    assert np.allclose(r.coeffs, [1.0, 0.0])


def test_riesz_zero_functional():
    sp = InnerProductSpace(random_spd(4, np.random.default_rng(0)))
    assert np.array_equal(riesz_inv(sp.zero_dual()).coeffs, np.zeros(4))


def test_dual_inner_euclidean():
    sp = euclidean_space(2)
    xi = sp.dual([3.0, 4.0])
    assert dual_inner(xi, xi) == pytest.approx(25.0)
    assert dual_norm(xi) == pytest.approx(5.0)


def test_dual_inner_diagonal():
    sp = InnerProductSpace(np.diag([2.0, 2.0]))
    xi = sp.dual([2.0, 0.0])
    assert dual_inner(xi, xi) == pytest.approx(2.0)
    assert dual_norm(xi) == pytest.approx(np.sqrt(2.0))


def test_dual_inner_orthogonal():
    sp = euclidean_space(2)
    assert dual_inner(sp.dual([1.0, 0.0]), sp.dual([0.0, 1.0])) == 0.0


def test_dual_pair_gram_free():
    for gram in (np.eye(2), np.diag([2.0, 3.0]), random_spd(2, np.random.default_rng(1))):
        sp = InnerProductSpace(gram)
        assert dual_pair(sp.dual([1.0, 2.0]), sp.primal([3.0, 4.0])) == pytest.approx(11.0)
    sp = euclidean_space(3)
    assert dual_pair(sp.zero_dual(), sp.primal([1.0, 2.0, 3.0])) == 0.0


def test_dual_pair_riesz_consistency_example():
    sp = InnerProductSpace(np.diag([2.0, 2.0]))
    xi = sp.dual([2.0, 0.0])
    v = sp.primal([1.0, 0.0])
    assert dual_pair(xi, v) == pytest.approx(2.0)
    assert riesz_inv(xi).inner(v) == pytest.approx(2.0)


def test_dimension_mismatch():
    a, b = euclidean_space(2), euclidean_space(3)
    with pytest.raises(ValueError):
        dual_pair(a.dual([1.0, 2.0]), b.primal([1.0, 2.0, 3.0]))
    with pytest.raises(ValueError):
        dual_inner(a.dual([1.0, 2.0]), b.dual([1.0, 2.0, 3.0]))


def test_not_positive_definite():
    with pytest.raises(GramMatrixError):
        InnerProductSpace(np.diag([1.0, -1.0]))
    with pytest.raises(GramMatrixError):
        InnerProductSpace(np.zeros((2, 2)))


def test_not_symmetric():
    with pytest.raises(GramMatrixError):
        InnerProductSpace(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_sparse_gram_matches_dense():
    rng = np.random.default_rng(7)
    m = random_spd(6, rng)
    sp_d = InnerProductSpace(m)
    sp_s = InnerProductSpace(scipy.sparse.csc_matrix(m))
    g = rng.standard_normal(6)
    assert np.allclose(sp_d.solve_gram(g), sp_s.solve_gram(g), rtol=1e-12, atol=1e-12)


def test_sparse_not_spd_rejected():
    m = scipy.sparse.diags([1.0, 1.0, -2.0]).tocsc()
    with pytest.raises(GramMatrixError):
        InnerProductSpace(m)


@settings(max_examples=40)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**32 - 1))
def test_riesz_and_norm_consistency(dim, seed):
    rng = np.random.default_rng(seed)
    sp = InnerProductSpace(random_spd(dim, rng))
    xi = sp.dual(rng.standard_normal(dim))
    v = sp.primal(rng.standard_normal(dim))
    pairing = dual_pair(xi, v)
    assert abs(pairing - riesz_inv(xi).inner(v)) <= 1e-9 * (1.0 + abs(pairing))
    assert abs(dual_norm(xi) - riesz_inv(xi).norm()) <= 1e-9 * (1.0 + dual_norm(xi))


def test_vector_arithmetic():
    sp = euclidean_space(2)
    x = sp.primal([1.0, 2.0])
    v = sp.primal([3.0, -1.0])
    y = x + 2.0 * v
    assert np.allclose(y.coeffs, [7.0, 0.0])
    assert np.allclose((y - x).coeffs, [6.0, -2.0])
    assert np.allclose((-v).coeffs, [-3.0, 1.0])
