"""Convex bodies sampled through their support functions."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFitError, InputError

TOL_GEOM = 1e-9


@dataclass(frozen=True)
class SupportSample:
    """Support values ``h(n) = sup_{y in C} <y, n>`` over a direction grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 2 or values.shape != (grid.shape[0],):
            raise InputError("values must hold one entry per grid direction")
        if not np.all(np.isfinite(values)):
            raise InputError("support values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def dim(self):
        return self.grid.shape[1]


@dataclass(frozen=True)
class BoundaryAtlas:
    """Discretized normal bundle ``{(n, x(n), h(n))}`` of the attractor boundary.

    ``normals`` and ``points`` have shape ``(k, m)``; ``support`` holds
    ``h = <x, n>`` row-wise.
    """

    normals: np.ndarray
    points: np.ndarray
    support: np.ndarray
    matrix: np.ndarray
    epsilon: float
    truncation_order: int
    tail_bound: float
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self):
        return self.normals.shape[1]

    def __len__(self):
        return self.normals.shape[0]

    def records(self):
        """Iterate ``(n, x, h)`` tuples in grid order."""
        return zip(self.normals, self.points, self.support)

    def as_support_sample(self):
        return SupportSample(self.normals, self.support)


def _same_grid(a, b):
    return a is b or (a.shape == b.shape and np.array_equal(a, b))


def hausdorff(s1, s2):
    """Sup-norm distance of two support samples on a common grid.

    For convex bodies this equals the Hausdorff distance restricted to the
    sampled directions, a lower bound that tightens as the grid refines.
    """
    if not _same_grid(s1.grid, s2.grid):
        raise InputError("support samples are defined on different grids")
    return float(np.max(np.abs(s1.values - s2.values)))


def contains_point(sample, p, tol=TOL_GEOM):
    """True iff ``<p, n> <= h(n) + tol`` for every grid direction."""
    p = np.asarray(p, dtype=float)
    if p.shape != (sample.dim,):
        raise InputError(f"point must have shape ({sample.dim},)")
    return bool(np.all(sample.grid @ p <= sample.values + tol))


def convexity_check_2d(points, tol_geom=TOL_GEOM):
    """Whether a closed polyline, ordered by normal angle, is convex.

    Every consecutive (cyclic) triple must turn left up to
    ``-tol_geom * scale**2`` with ``scale`` the largest coordinate magnitude.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 2:
        raise InputError("expected an array of planar points")
    if P.shape[0] < 3:
        raise InputError("convexity check needs at least three points")
    return bool(np.min(turning_cross(P)) >= -tol_geom * np.max(np.abs(P)) ** 2)


def turning_cross(points):
    """Cross products of consecutive edges of a closed planar polyline."""
    P = np.asarray(points, dtype=float)
    e1 = np.roll(P, -1, axis=0) - P
    e2 = np.roll(P, -2, axis=0) - np.roll(P, -1, axis=0)
    return e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]


def ellipse_fit_residual_2d(points):
    """Normalized RMS algebraic residual of the best conic through ``points``.

    Fits ``a x^2 + b xy + c y^2 + d x + e y + f = 0`` with ``a + c = 1`` by
    least squares and divides the RMS residual by the squared mean radius
    about the centroid, so zero means the points lie on an exact conic.

    Raises
    ------
    DegenerateFitError
        Fewer than six points, or the points are (numerically) collinear.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 2:
        raise InputError("expected an array of planar points")
    if P.shape[0] < 6:
        raise DegenerateFitError("conic fit needs at least six points")
    centered = P - P.mean(axis=0)
    radius = np.mean(np.linalg.norm(centered, axis=1))
    sv = np.linalg.svd(centered, compute_uv=False)
    if radius == 0.0 or sv[-1] <= 1e-12 * sv[0]:
        raise DegenerateFitError("points are collinear")
    # work in centroid-relative, radius-scaled coordinates; a conic stays a conic
    x, y = (centered / radius).T
    # substitute c = 1 - a: a (x^2 - y^2) + b xy + d x + e y + f = -y^2
    A = np.column_stack([x * x - y * y, x * y, x, y, np.ones_like(x)])
    rhs = -y * y
    G = A.T @ A
    if np.linalg.cond(G) < 1e10:
        coef = np.linalg.solve(G, A.T @ rhs)
    else:
        coef, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    resid = A @ coef - rhs
    return float(np.sqrt(np.mean(resid * resid)))
