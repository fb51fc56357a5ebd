"""Finite-dimensional inner-product spaces with explicit duality.

A space is a coefficient space R^n equipped with an SPD Gram matrix M, so
that <u, v> = u^T M v.  Primal vectors carry point/direction coefficients;
dual vectors carry functional coefficients g acting by the plain nodal
pairing xi(v) = g^T v (no M involved).  Mapping a functional back to its
primal representative therefore requires a Gram solve, which is cached as
a factorization per space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

_SYM_RTOL = 1e-12


class GramMatrixError(ValueError):
    """Gram matrix is not usable: not square, not symmetric or not SPD."""


def _as_float_vector(coeffs) -> np.ndarray:
    arr = np.asarray(coeffs, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"coefficient vector must be 1-D, got shape {arr.shape}")
    return arr


class InnerProductSpace:
    """Model of a Hilbert space via its Gram matrix.

    The Gram matrix may be a dense ndarray or any scipy sparse matrix.  It
    is validated (symmetric to 1e-12 relative, positive definite by
    factorization) and factorized once at construction; the factorization
    is reused by every Riesz solve.  Instances are immutable and safe to
    share between concurrent solver runs.
    """

    def __init__(self, gram):
        if scipy.sparse.issparse(gram):
            gram = gram.tocsc()
            self._sparse = True
        else:
            gram = np.asarray(gram, dtype=float)
            if gram.ndim != 2:
                raise GramMatrixError("Gram matrix must be 2-D")
            self._sparse = False
        if gram.shape[0] != gram.shape[1] or gram.shape[0] == 0:
            raise GramMatrixError(f"Gram matrix must be square, got {gram.shape}")
        self.dim = gram.shape[0]
        self.gram = gram
        self._check_symmetric()
        self._factorize()

    def _check_symmetric(self):
        if self._sparse:
            asym = abs(self.gram - self.gram.T).max()
            scale = abs(self.gram).max()
        else:
            asym = np.abs(self.gram - self.gram.T).max()
            scale = np.abs(self.gram).max()
        if asym > _SYM_RTOL * max(scale, 1.0):
            raise GramMatrixError(
                f"Gram matrix not symmetric: max asymmetry {asym:.3e} "
                f"exceeds {_SYM_RTOL:.0e} relative"
            )

    def _factorize(self):
        if self._sparse:
            # SuperLU with symmetric-mode settings acts as a Cholesky
            # surrogate: positive pivots of U certify definiteness.
            try:
                lu = scipy.sparse.linalg.splu(
                    self.gram,
                    diag_pivot_thresh=0.0,
                    permc_spec="MMD_AT_PLUS_A",
                    options=dict(SymmetricMode=True),
                )
            except RuntimeError as exc:
                raise GramMatrixError(f"Gram factorization failed: {exc}") from exc
            if not np.all(lu.U.diagonal() > 0.0):
                raise GramMatrixError("Gram matrix is not positive definite")
            self._lu = lu
        else:
            try:
                self._cho = scipy.linalg.cho_factor(self.gram, lower=True)
            except scipy.linalg.LinAlgError as exc:
                raise GramMatrixError(
                    f"Gram matrix is not positive definite: {exc}"
                ) from exc

    def solve_gram(self, rhs: np.ndarray) -> np.ndarray:
        """Solve M x = rhs; rhs may be a vector or a (dim, m) matrix."""
        rhs = np.asarray(rhs, dtype=float)
        if self._sparse:
            return self._lu.solve(rhs)
        return scipy.linalg.cho_solve(self._cho, rhs)

    def mult_gram(self, vec: np.ndarray) -> np.ndarray:
        return self.gram @ vec

    # -- factories ---------------------------------------------------------
    def primal(self, coeffs) -> "PrimalVector":
        return PrimalVector(_as_float_vector(coeffs), self)

    def dual(self, coeffs) -> "DualVector":
        return DualVector(_as_float_vector(coeffs), self)

    def zero_primal(self) -> "PrimalVector":
        return PrimalVector(np.zeros(self.dim), self)

    def zero_dual(self) -> "DualVector":
        return DualVector(np.zeros(self.dim), self)

    def __repr__(self):
        kind = "sparse" if self._sparse else "dense"
        return f"InnerProductSpace(dim={self.dim}, {kind} gram)"


def euclidean_space(dim: int) -> InnerProductSpace:
    """Space with identity Gram: all operations reduce to plain Euclidean."""
    return InnerProductSpace(np.eye(dim))


def _check_dims(a, b):
    if a.space.dim != b.space.dim:
        raise ValueError(
            f"space dimension mismatch: {a.space.dim} vs {b.space.dim}"
        )


@dataclass
class PrimalVector:
    """Point or direction in the space, as coefficients."""

    coeffs: np.ndarray
    space: InnerProductSpace

    def __post_init__(self):
        self.coeffs = _as_float_vector(self.coeffs)
        if len(self.coeffs) != self.space.dim:
            raise ValueError(
                f"coefficient length {len(self.coeffs)} != space dim {self.space.dim}"
            )

    def inner(self, other: "PrimalVector") -> float:
        _check_dims(self, other)
        return float(self.coeffs @ self.space.mult_gram(other.coeffs))

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self), 0.0))

    def __add__(self, other: "PrimalVector") -> "PrimalVector":
        _check_dims(self, other)
        return PrimalVector(self.coeffs + other.coeffs, self.space)

    def __sub__(self, other: "PrimalVector") -> "PrimalVector":
        _check_dims(self, other)
        return PrimalVector(self.coeffs - other.coeffs, self.space)

    def __mul__(self, s: float) -> "PrimalVector":
        return PrimalVector(self.coeffs * float(s), self.space)

    __rmul__ = __mul__

    def __neg__(self) -> "PrimalVector":
        return PrimalVector(-self.coeffs, self.space)

    def copy(self) -> "PrimalVector":
        return PrimalVector(self.coeffs.copy(), self.space)


@dataclass
class DualVector:
    """Functional with coefficients g; acts on primal v by g . v.coeffs."""

    coeffs: np.ndarray
    space: InnerProductSpace

    def __post_init__(self):
        self.coeffs = _as_float_vector(self.coeffs)
        if len(self.coeffs) != self.space.dim:
            raise ValueError(
                f"coefficient length {len(self.coeffs)} != space dim {self.space.dim}"
            )

    def __call__(self, v: PrimalVector) -> float:
        return dual_pair(self, v)

    def __add__(self, other: "DualVector") -> "DualVector":
        _check_dims(self, other)
        return DualVector(self.coeffs + other.coeffs, self.space)

    def __sub__(self, other: "DualVector") -> "DualVector":
        _check_dims(self, other)
        return DualVector(self.coeffs - other.coeffs, self.space)

    def __mul__(self, s: float) -> "DualVector":
        return DualVector(self.coeffs * float(s), self.space)

    __rmul__ = __mul__

    def __neg__(self) -> "DualVector":
        return DualVector(-self.coeffs, self.space)


def riesz_inv(xi: DualVector) -> PrimalVector:
    """Primal representative r of xi: solves M r = g, so <r, v> = xi(v)."""
    return PrimalVector(xi.space.solve_gram(xi.coeffs), xi.space)


def dual_pair(xi: DualVector, v: PrimalVector) -> float:
    """Action of the functional on a primal vector (Gram-free pairing)."""
    _check_dims(xi, v)
    return float(xi.coeffs @ v.coeffs)


def dual_inner(xi: DualVector, eta: DualVector) -> float:
    """Dual inner product g_xi^T M^{-1} g_eta."""
    _check_dims(xi, eta)
    return float(xi.coeffs @ xi.space.solve_gram(eta.coeffs))


def dual_norm(xi: DualVector) -> float:
    return math.sqrt(max(dual_inner(xi, xi), 0.0))
