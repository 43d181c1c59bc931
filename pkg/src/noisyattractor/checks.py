"""Invariant suite run against a boundary atlas.

Each check recomputes what it needs from ``(M, eps)`` independently of the
atlas records, so a tampered atlas fails at least one of them.
"""

from dataclasses import dataclass

import numpy as np

from .boundary import BoundarySeries, NormalPoint, boundary_map, boundary_map_inv, build_atlas, l_perp
from .convexgeom import convexity_check_2d, ellipse_fit_residual_2d, turning_cross
from .linalg import sphere_grid, spectral_report
from .setmap import support_partial_sum

RECORD_TOL = 1e-12
ROUNDTRIP_TOL = 1e-10
BALL_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name}: value={self.value:.6g} threshold={self.threshold:.6g}"
        return f"{text} ({self.detail})" if self.detail else text

    def as_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": float(self.value),
            "threshold": float(self.threshold),
            "detail": self.detail,
        }


def min_pairwise_gap(points, chunk=1024):
    """Smallest distance between two distinct rows of ``points``."""
    P = np.asarray(points, dtype=float)
    best = np.inf
    for lo in range(0, P.shape[0], chunk):
        block = P[lo : lo + chunk]
        d2 = np.sum((block[:, None, :] - P[None, :, :]) ** 2, axis=-1)
        idx = np.arange(lo, lo + block.shape[0])
        d2[np.arange(block.shape[0]), idx] = np.inf
        best = min(best, float(d2.min()))
    return float(np.sqrt(best))


def adjacent_gaps_2d(points):
    """Distances between cyclically consecutive planar points."""
    P = np.asarray(points, dtype=float)
    return np.linalg.norm(np.roll(P, -1, axis=0) - P, axis=1)


def run_checks(atlas, tol=None):
    """Run every invariant on ``atlas``; returns a list of :class:`CheckResult`."""
    M = atlas.matrix
    eps = atlas.epsilon
    tol = float(atlas.meta.get("tol", 1e-10) if tol is None else tol)
    N, X, h = atlas.normals, atlas.points, atlas.support
    m = atlas.dim
    results = []

    report = spectral_report(M)
    results.append(
        CheckResult("spectral_gate", report.spectral_radius < 1.0, report.spectral_radius, 1.0,
                    "spectral radius strictly below one")
    )
    series = BoundarySeries(M, eps, tol)

    dev = float(np.max(np.abs(h - np.einsum("ij,ij->i", X, N))))
    results.append(CheckResult("record_consistency", dev <= RECORD_TOL, dev, RECORD_TOL, "|h - <x, n>|"))

    iterated = support_partial_sum(M, eps, N, series.truncation_order)
    dev = float(np.max(np.abs(h - iterated)))
    results.append(
        CheckResult("support_identity", dev <= 2 * tol, dev, 2 * tol, "<x(n), n> against the nested iteration")
    )

    dev = float(np.max(np.abs(X - series(N))))
    results.append(CheckResult("series_agreement", dev <= 2 * tol, dev, 2 * tol, "records against a fresh series"))

    mapped = boundary_map(M, eps, NormalPoint(X, N))
    dev = float(np.max(np.linalg.norm(mapped.x - series(mapped.n), axis=1)))
    results.append(
        CheckResult("b_invariance", dev <= 2 * tol, dev, 2 * tol, "|M x(n) + eps Lperp(n) - x(Lperp(n))|")
    )

    back = boundary_map_inv(M, eps, mapped)
    dev = float(max(np.max(np.abs(back.x - X)), np.max(np.abs(back.n - N))))
    results.append(CheckResult("boundary_invertibility", dev <= ROUNDTRIP_TOL, dev, ROUNDTRIP_TOL, "b^-1 b = id"))

    same = bool(np.array_equal(mapped.n, l_perp(M, N)))
    results.append(CheckResult("conjugacy", same, 0.0 if same else 1.0, 0.0, "normal part of b equals Lperp"))

    if m == 2:
        results.extend(_planar_checks(atlas, tol))
    else:
        results.extend(_general_convexity(atlas, tol))
    return results


def _general_convexity(atlas, tol):
    # every boundary point must lie under every sampled supporting hyperplane
    N, X, h = atlas.normals, atlas.points, atlas.support
    worst = -np.inf
    for lo in range(0, X.shape[0], 1024):
        worst = max(worst, float(np.max(X[lo : lo + 1024] @ N.T - h)))
    gap = min_pairwise_gap(X)
    return [
        CheckResult("convexity", worst <= 2 * tol, worst, 2 * tol, "max <x(n_i), n_j> - h(n_j)"),
        CheckResult("strict_convexity", gap > 0.0, gap, 0.0, "min distance between points of distinct normals"),
    ]


def _planar_checks(atlas, tol):
    N, X, h = atlas.normals, atlas.points, atlas.support
    out = []
    convex = convexity_check_2d(X)
    cross = turning_cross(X)
    out.append(CheckResult("convexity", convex, float(cross.min()), 0.0, "min turning cross product"))

    gaps = adjacent_gaps_2d(X)
    out.append(CheckResult("strict_convexity", float(gaps.min()) > 0.0, float(gaps.min()), 0.0,
                           "min gap between adjacent boundary points"))

    # C1 proxy: boundary points of a grid half as fine must stay within one gap
    k = N.shape[0]
    if k >= 6 and k % 2 == 0 and np.allclose(N, sphere_grid(2, k), atol=1e-15, rtol=0):
        coarse = build_atlas(atlas.matrix, atlas.epsilon, sphere_grid(2, k // 2), tol)
        moved = float(np.max(np.linalg.norm(coarse.points - X[::2], axis=1)))
        out.append(CheckResult("refinement_continuity", moved <= gaps.max(), moved, float(gaps.max()),
                               "displacement of matched points between k/2 and k grids"))

    spread = float(h.max() - h.min())
    residual = ellipse_fit_residual_2d(X)
    note = "constant support (ball)" if spread <= BALL_TOL else "non-constant support"
    out.append(CheckResult("ellipse_fit_residual", True, residual, 0.0, f"diagnostic only; {note}"))
    return out
