"""The compound one-step map ``C -> closure(B_eps(M C))`` in support form.

Since ``h_{M C}(n) = h_C(M^T n)`` and adding an eps-ball adds ``eps``, the
iterates started from ``{0}`` have the closed form

    h_i(n) = eps * sum_{k < i} |(M^T)^k n|,

so the nested iteration needs no interpolation on the sphere: each direction
is evaluated independently and exactly.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .convexgeom import SupportSample
from .errors import InputError
from .linalg import as_matrix, certify_tail, check_gate

MAX_ITER = 100_000


@dataclass(frozen=True)
class IterationTrace:
    """History of the nested iteration from ``{0}``.

    ``partial_values[i]`` is ``h_i`` on the grid (row 0 is identically zero),
    ``residuals[i]`` the sup-norm step ``d_H(h_i, h_{i+1})``.
    """

    grid: np.ndarray
    partial_values: np.ndarray
    residuals: np.ndarray
    converged_at: int | None
    tail_bound: float = 0.0

    def residual_ratios(self):
        r = self.residuals
        return r[1:] / r[:-1]


def _directions(n, m=None):
    N = np.atleast_2d(np.asarray(n, dtype=float))
    if m is not None and N.shape[1] != m:
        raise InputError(f"directions must live in R^{m}")
    return N


def _running_total(terms):
    # left-to-right accumulation keeps h_i <= h_{i+1} exactly in floating point
    if terms.shape[1] == 0:
        return np.zeros(terms.shape[0])
    return np.cumsum(terms, axis=1)[:, -1]


def _check_eps(epsilon):
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    return float(epsilon)


def support_step(M, epsilon, h, grid):
    """One application of the set map to a body given by its support function.

    ``h`` must be evaluable anywhere on the sphere: either a callable taking
    a ``(k, m)`` array of unit vectors, or a constant (a ball about 0).
    Returns the exact support of the image body on ``grid``.
    """
    A = as_matrix(M)
    eps = _check_eps(epsilon)
    N = _directions(grid, A.shape[0])
    V = N @ A  # rows are M^T n
    scale = np.linalg.norm(V, axis=1)
    rotated = V / scale[:, None]
    if callable(h):
        inner = np.asarray(h(rotated), dtype=float)
    else:
        inner = np.full(N.shape[0], float(h))
    if np.any(inner < 0):
        raise InputError("support values must be nonnegative (body must contain 0)")
    return SupportSample(N, scale * inner + eps)


def support_partial_sum(M, epsilon, n, i):
    """Support value of the i-th iterate from ``{0}`` in direction(s) ``n``."""
    A = as_matrix(M)
    eps = _check_eps(epsilon)
    if i < 0:
        raise InputError("i must be nonnegative")
    N = _directions(n, A.shape[0])
    terms = _kernels.orbit_norms(np.ascontiguousarray(A.T), np.ascontiguousarray(N), int(i))
    out = eps * _running_total(terms)
    return float(out[0]) if np.ndim(n) == 1 else out


def divergence_probe(M, epsilon, n, i):
    """Same partial sum as :func:`support_partial_sum`, with no contraction gate.

    Used to show unbounded growth when the spectral radius is at least one.
    """
    if i < 1:
        raise InputError("probe needs at least one step")
    return support_partial_sum(M, epsilon, n, i)


def fixed_point_support(M, epsilon, tol=1e-10, max_iter=MAX_ITER):
    """Closed-form support function of the attractor, evaluable anywhere.

    Returns a callable mapping a ``(k, m)`` array of unit vectors to support
    values within ``tol / 2`` of the true fixed point.
    """
    A = as_matrix(M)
    eps = _check_eps(epsilon)
    check_gate(A)
    cert = certify_tail(A, eps, tol / 2.0, max_iter=max_iter)
    At = np.ascontiguousarray(A.T)

    def h(directions):
        N = np.ascontiguousarray(_directions(directions, A.shape[0]))
        return eps * _running_total(_kernels.orbit_norms(At, N, cert.order))

    h.certificate = cert
    return h


def iterate_to_fixed_point(M, epsilon, grid, tol=1e-10, max_iter=MAX_ITER, keep_partials=True):
    """Nested iteration ``L_eps^i({0})`` until the remaining tail is below ``tol``.

    The stopping order comes from :func:`linalg.certify_tail` applied with
    ``tol / 2``, so the returned support is within ``tol`` of the fixed
    point in every direction.

    Returns
    -------
    (SupportSample, IterationTrace)

    Raises
    ------
    SpectralGateError
        If the spectral radius of ``M`` is at least one.
    NonConvergenceError
        If the tail cannot be certified within ``max_iter`` terms.
    """
    A = as_matrix(M)
    eps = _check_eps(epsilon)
    if tol <= 0:
        raise InputError("tol must be positive")
    check_gate(A)
    cert = certify_tail(A, eps, tol / 2.0, max_iter=max_iter)
    N = np.ascontiguousarray(_directions(grid, A.shape[0]))
    terms = eps * _kernels.orbit_norms(np.ascontiguousarray(A.T), N, cert.order)
    residuals = terms.max(axis=0)
    if keep_partials:
        partial = np.zeros((cert.order + 1, N.shape[0]))
        np.cumsum(terms.T, axis=0, out=partial[1:])
        values = partial[-1].copy()
    else:
        partial = np.empty((0, N.shape[0]))
        values = _running_total(terms)
    trace = IterationTrace(N, partial, residuals, cert.order, cert.tail_bound)
    return SupportSample(N, values), trace
