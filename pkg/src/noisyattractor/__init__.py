"""Attractors of invertible linear maps with additive spherical bounded noise.

Three independent routes to the same compact convex set:

* ``setmap``: the nested support-function iteration from ``{0}``;
* ``boundary``: the series for the boundary point with a given outward normal;
* ``oracle``: Monte-Carlo trajectories of ``x -> M x + xi``, ``|xi| <= eps``.
"""

from ._kernels import backend
from .boundary import (
    BoundarySeries,
    NormalPoint,
    SeriesMeta,
    boundary_map,
    boundary_map_inv,
    build_atlas,
    bundle_attraction_trace,
    l_perp,
    l_perp_inv,
    series_boundary_point,
)
from .convexgeom import (
    BoundaryAtlas,
    SupportSample,
    contains_point,
    convexity_check_2d,
    ellipse_fit_residual_2d,
    hausdorff,
)
from .errors import (
    AttractorError,
    DegenerateFitError,
    DivergenceError,
    InputError,
    NonConvergenceError,
    SingularMatrixError,
    SpectralGateError,
)
from .linalg import (
    SpectralReport,
    check_gate,
    matrix_power_norms,
    solve,
    spectral_report,
    sphere_grid,
)
from .oracle import CloudReport, SimConfig, Xoshiro256, cloud_vs_atlas, sample_ball, simulate
from .setmap import (
    IterationTrace,
    divergence_probe,
    fixed_point_support,
    iterate_to_fixed_point,
    support_partial_sum,
    support_step,
)

__version__ = "0.1.0"
