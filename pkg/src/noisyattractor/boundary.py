"""The boundary map on ``R^m x S^{m-1}`` and the series for the attractor boundary.

``b(x, n) = (M x + eps * Lperp(n), Lperp(n))`` with
``Lperp(n) = P((M^T)^{-1} n)`` leaves the outward unit normal bundle of the
attractor boundary invariant, and that bundle is the graph of

    x(n) = eps * sum_k M^k P((M^T)^k n).

All functions accept a single point (``x``, ``n`` of shape ``(m,)``) or a
batch of rows (shape ``(k, m)``).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .convexgeom import BoundaryAtlas
from .errors import InputError, SingularMatrixError
from .linalg import as_matrix, certify_tail, check_gate, matrix_powers, normalize, spectral_report

MAX_ITER = 100_000


@dataclass(frozen=True)
class NormalPoint:
    """A point ``(x, n)`` of the unit normal bundle."""

    x: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        n = np.asarray(self.n, dtype=float)
        if x.shape != n.shape or x.ndim not in (1, 2):
            raise InputError("x and n must have matching shapes (m,) or (k, m)")
        if not np.all(np.isfinite(x)):
            raise InputError("x must be finite")
        if np.any(np.abs(np.linalg.norm(n, axis=-1) - 1.0) > 1e-12):
            raise InputError("n must have unit norm")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "n", n)


@dataclass(frozen=True)
class SeriesMeta:
    truncation_order: int
    tail_bound: float
    terms_norms: np.ndarray


def _invertible(M):
    A = as_matrix(M)
    if not spectral_report(A).invertible:
        raise SingularMatrixError("boundary map needs an invertible matrix")
    return A


def l_perp(M, n):
    """Induced action on normals, ``P((M^T)^{-1} n)``."""
    A = _invertible(M)
    n = np.asarray(n, dtype=float)
    w = np.linalg.solve(A.T, n.T).T if n.ndim == 2 else np.linalg.solve(A.T, n)
    return normalize(w)


def l_perp_inv(M, n):
    """Inverse of :func:`l_perp`, ``P(M^T n)``."""
    A = _invertible(M)
    n = np.asarray(n, dtype=float)
    return normalize(n @ A)


def boundary_map(M, epsilon, p):
    """``b(x, n) = (M x + eps Lperp(n), Lperp(n))``: linear step, then eps-translation."""
    A = _invertible(M)
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    n_new = l_perp(A, p.n)
    return NormalPoint(p.x @ A.T + epsilon * n_new, n_new)


def boundary_map_inv(M, epsilon, p):
    """``b^{-1}(x, n) = (M^{-1}(x - eps n), Lperp^{-1}(n))``."""
    A = _invertible(M)
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    shifted = p.x - epsilon * p.n
    x = np.linalg.solve(A, shifted.T).T if shifted.ndim == 2 else np.linalg.solve(A, shifted)
    return NormalPoint(x, l_perp_inv(A, p.n))


class BoundarySeries:
    """Reusable evaluator of ``x(n)`` for one ``(M, eps, tol)``.

    The truncation order and the power cache ``M^k`` are computed once, before
    any evaluation, so evaluations share only read-only state.
    """

    def __init__(self, M, epsilon, tol=1e-10, max_iter=MAX_ITER):
        A = as_matrix(M)
        if not epsilon > 0:
            raise InputError("epsilon must be positive")
        if tol <= 0:
            raise InputError("tol must be positive")
        check_gate(A)
        self.matrix = A
        self.epsilon = float(epsilon)
        self.tol = float(tol)
        # half of tol for the dropped tail, half kept for rounding
        self.certificate = certify_tail(A, self.epsilon, tol / 2.0, max_iter=max_iter)
        self.powers = matrix_powers(A, self.certificate.order - 1)
        self._Mt = np.ascontiguousarray(A.T)

    @property
    def truncation_order(self):
        return self.certificate.order

    @property
    def tail_bound(self):
        return self.certificate.tail_bound

    def __call__(self, n):
        N = np.atleast_2d(np.asarray(n, dtype=float))
        if N.shape[1] != self.matrix.shape[0]:
            raise InputError("direction dimension does not match the matrix")
        X = self.epsilon * _kernels.boundary_series(self._Mt, self.powers, np.ascontiguousarray(N))
        return X[0] if np.ndim(n) == 1 else X

    def meta(self):
        return SeriesMeta(
            self.truncation_order,
            self.tail_bound,
            self.epsilon * self.certificate.power_norms,
        )


def series_boundary_point(M, epsilon, n, tol=1e-10, max_iter=MAX_ITER):
    """Boundary point ``x(n)`` with outward normal ``n``, and truncation metadata."""
    series = BoundarySeries(M, epsilon, tol, max_iter)
    return series(np.asarray(n, dtype=float)), series.meta()


def build_atlas(M, epsilon, grid, tol=1e-10, max_iter=MAX_ITER):
    """Evaluate the boundary series on every grid direction."""
    series = BoundarySeries(M, epsilon, tol, max_iter)
    N = np.atleast_2d(np.asarray(grid, dtype=float))
    X = series(N)
    h = np.einsum("ij,ij->i", X, N)
    return BoundaryAtlas(
        normals=N,
        points=X,
        support=h,
        matrix=series.matrix,
        epsilon=series.epsilon,
        truncation_order=series.truncation_order,
        tail_bound=series.tail_bound,
        meta={"tol": series.tol, "backend": _kernels.backend()},
    )


def bundle_attraction_trace(M, epsilon, p0, steps, tol=1e-10):
    """Distances ``|x_k - x(n_k)|`` along the orbit ``b^k(p0)``.

    ``n_k = Lperp^k(n_0)`` is the normal component of the orbit, so the
    reference point ``x(n_k)`` is the image of ``x(n_0)`` under ``b^k``.
    """
    if steps < 1:
        raise InputError("steps must be at least 1")
    series = BoundarySeries(M, epsilon, tol)
    p = p0
    out = []
    for _ in range(steps + 1):
        out.append(float(np.linalg.norm(p.x - series(p.n))))
        p = boundary_map(series.matrix, series.epsilon, p)
    return np.array(out)
