"""Small dense matrix primitives and direction grids on the unit sphere.

Matrices are plain ``float64`` numpy arrays of shape ``(m, m)``; unit
vectors are arrays of shape ``(m,)`` and direction grids ``(k, m)``.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InputError, NonConvergenceError, SingularMatrixError, SpectralGateError

UNIT_TOL = 1e-12
DET_RTOL = 1e-12
GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


def as_matrix(M):
    """Validate ``M`` as a finite square matrix and return a float64 copy."""
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise InputError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    A.setflags(write=False)
    return A


def unit_vector(v, dim=None):
    """Validate ``v`` as a unit vector (to within 1e-12)."""
    u = np.array(v, dtype=float)
    if u.ndim != 1 or (dim is not None and u.shape[0] != dim):
        raise InputError(f"expected a vector of length {dim}, got shape {u.shape}")
    if not np.all(np.isfinite(u)) or abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
        raise InputError("vector is not of unit norm")
    return u


def normalize(v):
    """Radial projection onto the unit sphere, row-wise for 2-D input."""
    v = np.asarray(v, dtype=float)
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norms == 0.0):
        raise InputError("cannot project the zero vector onto the sphere")
    return v / norms


@dataclass(frozen=True)
class SpectralReport:
    spectral_radius: float
    operator_norm: float
    invertible: bool
    det_magnitude: float


def spectral_report(M):
    """Spectral radius, spectral norm and invertibility of ``M``.

    ``M`` counts as singular when ``|det M| <= 1e-12 * max|M_ij|**m``.
    """
    A = as_matrix(M)
    m = A.shape[0]
    rho = float(np.max(np.abs(np.linalg.eigvals(A))))
    opnorm = float(np.linalg.norm(A, 2))
    det = float(abs(np.linalg.det(A)))
    scale = float(np.max(np.abs(A)))
    invertible = scale > 0.0 and det > DET_RTOL * scale**m
    return SpectralReport(rho, opnorm, bool(invertible), det)


def check_gate(M):
    """Raise unless ``M`` is invertible with spectral radius below one."""
    report = spectral_report(M)
    if not report.invertible:
        raise SingularMatrixError(f"matrix is singular (|det| = {report.det_magnitude:.3g})")
    if report.spectral_radius >= 1.0:
        raise SpectralGateError(report.spectral_radius)
    return report


def solve(M, v):
    """Solve ``M w = v``; raises :class:`SingularMatrixError` if ``M`` is singular."""
    A = as_matrix(M)
    if not spectral_report(A).invertible:
        raise SingularMatrixError("cannot solve with a singular matrix")
    b = np.asarray(v, dtype=float)
    # batched right-hand sides arrive as rows
    if b.ndim == 2:
        return np.linalg.solve(A, b.T).T
    return np.linalg.solve(A, b)


def inverse(M):
    A = as_matrix(M)
    if not spectral_report(A).invertible:
        raise SingularMatrixError("cannot invert a singular matrix")
    return np.linalg.inv(A)


def matrix_powers(M, K):
    """Stack ``(M^0, ..., M^K)`` built by repeated multiplication."""
    A = as_matrix(M)
    if K < 0:
        raise InputError("K must be nonnegative")
    out = np.empty((K + 1,) + A.shape)
    out[0] = np.eye(A.shape[0])
    for k in range(1, K + 1):
        out[k] = out[k - 1] @ A
    return out


def matrix_power_norms(M, K):
    """Spectral norms ``(|M^0|, ..., |M^K|)`` of accumulated products."""
    powers = matrix_powers(M, K)
    return np.linalg.svd(powers, compute_uv=False)[:, 0]


@dataclass(frozen=True)
class TailCertificate:
    """Truncation order of ``sum_k |M^k|`` and the bound on what is dropped.

    ``order`` is the number of retained terms (k = 0 .. order - 1) and
    ``tail_bound`` bounds ``eps * sum_{k >= order} |M^k|``. ``block`` is the
    power ``p`` with ``|M^p| <= 1/2`` used for the bound and ``ratio`` the
    implied geometric rate ``|M^p| ** (1 / p)``.
    """

    order: int
    tail_bound: float
    ratio: float
    block: int
    power_norms: np.ndarray


BLOCK_CONTRACTION = 0.5


def certify_tail(M, epsilon, tol, max_iter=100_000):
    """Smallest truncation order whose remaining tail is provably at most ``tol``.

    With ``p`` the first power such that ``q = |M^p| <= 1/2``,
    submultiplicativity gives, for every ``K``,

        sum_{k > K} |M^k| <= (|M^{K+1}| + ... + |M^{K+p}|) / (1 - q),

    which stays valid through the transient growth of non-normal matrices
    and through oscillating norm ratios caused by complex eigenvalues.
    """
    A = as_matrix(M)
    if tol <= 0:
        raise InputError("tol must be positive")
    chunk = 64
    norms = [1.0]
    P = np.eye(A.shape[0])
    block = None
    K = 0
    while True:
        stack = []
        for _ in range(chunk):
            P = P @ A
            stack.append(P)
        norms.extend(np.linalg.svd(np.stack(stack), compute_uv=False)[:, 0])
        if block is None:
            hits = [j for j in range(1, len(norms)) if norms[j] <= BLOCK_CONTRACTION]
            if hits:
                block = hits[0]
                q = norms[block]
                factor = epsilon / (1.0 - q)
        if block is not None:
            csum = np.concatenate([[0.0], np.cumsum(norms)])
            while K + block < len(norms):
                # sum of |M^{K+1}| .. |M^{K+block}|
                tail = factor * (csum[K + block + 1] - csum[K + 1])
                if tail <= tol:
                    ratio = q ** (1.0 / block) if q > 0 else 0.0
                    return TailCertificate(K + 1, float(tail), float(ratio), block, np.array(norms[: K + 1]))
                K += 1
                if K > max_iter:
                    raise NonConvergenceError(
                        f"tail not certified below {tol:g} within {max_iter} terms",
                        epsilon * norms[K],
                    )
        elif len(norms) > max_iter:
            raise NonConvergenceError(
                f"no power of the matrix contracts to {BLOCK_CONTRACTION} within {max_iter} terms",
                epsilon * norms[-1],
            )


def sphere_grid(m, k, seed=0):
    """Deterministic direction grid of ``k`` unit vectors in R^m.

    m = 2 gives equally spaced counterclockwise angles starting at 0,
    m = 3 a Fibonacci spiral, and m >= 4 seeded normalized Gaussians drawn
    from the package generator (``seed`` only matters for m >= 4).
    """
    if m < 1:
        raise InputError("m must be positive")
    if k < 2:
        raise InputError("grid needs at least two directions")
    if m == 1:
        if k != 2:
            raise InputError("the 0-sphere has exactly two directions")
        return np.array([[1.0], [-1.0]])
    if m == 2:
        theta = 2.0 * np.pi * np.arange(k) / k
        grid = np.column_stack([np.cos(theta), np.sin(theta)])
        # exact axis values for the quarter turns
        grid[np.abs(grid) < 1e-15] = 0.0
        return grid
    if m == 3:
        j = np.arange(k)
        z = 1.0 - (2.0 * j + 1.0) / k
        r = np.sqrt(1.0 - z * z)
        phi = GOLDEN_ANGLE * j
        grid = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
        return grid / np.linalg.norm(grid, axis=1, keepdims=True)
    state = _kernels.splitmix64_seed(seed)
    # ball samples of radius 1 projected radially are isotropic directions
    raw = _kernels.ball_samples(state, m, 1.0, k)
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)
