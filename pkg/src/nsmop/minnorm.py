"""Minimum-norm point over the negated convex hull of dual generators.

Given generators xi_1..xi_m, find xi_tilde = -sum(lambda_i xi_i) with
lambda in the unit simplex minimizing the dual norm.  The quadratic
lambda^T G lambda (G the dual Gram matrix of the generators) is minimized
with a Wolfe-style min-norm-point scheme: grow an affinely independent
support, solve the equality-constrained subproblem on it, and step back to
the feasible region when a coordinate leaves the simplex.  The iteration
stops on the optimality certificate

    min_j (G lambda)_j >= lambda^T G lambda - tol,

equivalently <xi_tilde, xi_j>_* <= -|xi_tilde|^2_* + tol for every
generator, which is the discrete sufficient-descent inequality the caller
relies on.  The certificate, not the iteration count, is the contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .space import DualVector, dual_inner

_TINY = 1e-14


class MinNormError(RuntimeError):
    """QP did not reach the certificate within the iteration cap.

    Carries the best iterate found so far in ``best`` (a MinNormResult).
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


@dataclass
class MinNormResult:
    xi_tilde: DualVector
    lam: np.ndarray
    norm_sq: float


def default_tolerance(gram: np.ndarray) -> float:
    return 1e-12 * (1.0 + float(np.max(np.diag(gram))))


def dual_gram(xis: list[DualVector]) -> np.ndarray:
    """Gram matrix G_ij = <xi_i, xi_j>_* via one batched Riesz solve."""
    space = xis[0].space
    g = np.column_stack([xi.coeffs for xi in xis])
    reps = space.solve_gram(g)
    gram = g.T @ reps
    return 0.5 * (gram + gram.T)


def _affine_minimizer(gram_s: np.ndarray) -> np.ndarray:
    """Minimize b^T G b subject to sum(b) = 1 (KKT system, lstsq for rank
    deficiency from duplicate generators)."""
    s = gram_s.shape[0]
    kkt = np.zeros((s + 1, s + 1))
    kkt[:s, :s] = gram_s
    kkt[:s, s] = 1.0
    kkt[s, :s] = 1.0
    rhs = np.zeros(s + 1)
    rhs[s] = 1.0
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    return sol[:s]


def min_norm_weights(gram: np.ndarray, tol: float | None = None,
                     max_iter: int | None = None) -> tuple[np.ndarray, float]:
    """Solve min_{lam in simplex} lam^T G lam; returns (lam, value).

    Raises MinNormError (with ``best`` set to the weights) on hitting the
    iteration cap without the certificate.
    """
    m = gram.shape[0]
    if tol is None:
        tol = default_tolerance(gram)
    if max_iter is None:
        max_iter = 10 * m * m + 100
    if m == 1:
        return np.array([1.0]), float(gram[0, 0])

    start = int(np.argmin(np.diag(gram)))
    support = [start]
    alpha = np.array([1.0])

    for _ in range(max_iter):
        lam = np.zeros(m)
        lam[support] = alpha
        w = gram @ lam
        value = float(lam @ w)
        j = int(np.argmin(w))
        if w[j] >= value - tol:
            return lam, value
        if j in support:
            # numerically stalled: the certificate is as tight as the
            # arithmetic allows, accept the current point
            return lam, value
        support.append(j)
        alpha = np.append(alpha, 0.0)

        while True:
            beta = _affine_minimizer(gram[np.ix_(support, support)])
            if np.all(beta > _TINY):
                alpha = beta
                break
            shrink = beta <= _TINY
            denom = alpha - beta
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(shrink & (denom > _TINY), alpha / denom, np.inf)
            theta = min(1.0, float(np.min(ratios)))
            alpha = (1.0 - theta) * alpha + theta * beta
            alpha[alpha < _TINY] = 0.0
            keep = alpha > 0.0
            if keep.all():
                # step landed strictly inside: no support change, re-solve
                continue
            support = [s for s, k in zip(support, keep) if k]
            alpha = alpha[keep]
            if len(support) == 1:
                alpha = np.array([1.0])
                break

    lam = np.zeros(m)
    lam[support] = alpha
    value = float(lam @ gram @ lam)
    raise MinNormError(
        f"min-norm QP did not certify optimality within {max_iter} iterations",
        best=(lam, value),
    )


def min_norm_point(xis: list[DualVector], tol: float | None = None) -> MinNormResult:
    """Min-norm element of -conv(xis) with its simplex weights.

    The result satisfies dual_inner(xi_tilde, xi_i) <= -norm_sq + tol for
    every generator (checked Wolfe certificate) and xi_tilde =
    -sum(lam_i xi_i) with lam in the unit simplex.
    """
    if not xis:
        raise ValueError("min_norm_point needs at least one generator")
    space = xis[0].space
    for xi in xis[1:]:
        if xi.space.dim != space.dim:
            raise ValueError("generators live in spaces of different dimension")

    gram = dual_gram(xis)
    try:
        lam, value = min_norm_weights(gram, tol=tol)
    except MinNormError as exc:
        lam, value = exc.best
        exc.best = _build_result(xis, lam, value)
        raise
    return _build_result(xis, lam, value)


def _build_result(xis, lam, value) -> MinNormResult:
    lam = np.maximum(lam, 0.0)
    lam = lam / lam.sum()
    coeffs = -sum(l * xi.coeffs for l, xi in zip(lam, xis) if l != 0.0)
    if np.isscalar(coeffs):  # all weights zero cannot happen; guard anyway
        coeffs = np.zeros(xis[0].space.dim)
    xi_tilde = DualVector(np.asarray(coeffs, dtype=float), xis[0].space)
    return MinNormResult(xi_tilde=xi_tilde, lam=lam, norm_sq=max(value, 0.0))


def certificate_gap(result: MinNormResult, xis: list[DualVector]) -> float:
    """max_i <xi_tilde, xi_i>_* + norm_sq; <= tol at a certified optimum."""
    return max(dual_inner(result.xi_tilde, xi) for xi in xis) + result.norm_sq
