"""Monte-Carlo trajectories of ``x_{i+1} = M x_i + xi_i`` with noise uniform on an eps-ball.

The generator is xoshiro256** seeded through splitmix64 (stream layout in
``_kernels``); it is platform independent, so a seed pins a cloud exactly.
The uniform law inside the ball is a modelling choice: the attractor only
depends on the support of the noise.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DivergenceError, InputError
from .linalg import as_matrix, certify_tail

AUTO_BURN_IN_TARGET = 1e-9


class Xoshiro256:
    """xoshiro256** state; advanced in place by the sampling functions."""

    def __init__(self, seed):
        self.seed = int(seed)
        self.state = _kernels.splitmix64_seed(seed)

    def copy(self):
        other = Xoshiro256.__new__(Xoshiro256)
        other.seed = self.seed
        other.state = self.state.copy()
        return other


def sample_ball(rng, m, epsilon, count=None):
    """Uniform sample(s) from the closed ball of radius ``epsilon`` in R^m.

    Direction from normalized standard normals, radius ``eps * U**(1/m)``.
    Returns shape ``(m,)``, or ``(count, m)`` when ``count`` is given.
    """
    if epsilon < 0:
        raise InputError("epsilon must be nonnegative")
    if m < 1:
        raise InputError("m must be positive")
    n = 1 if count is None else int(count)
    out = _kernels.ball_samples(rng.state, int(m), float(epsilon), n)
    return out[0] if count is None else out


@dataclass(frozen=True)
class SimConfig:
    matrix: np.ndarray
    epsilon: float
    x0: np.ndarray | None = None
    burn_in: int | None = None
    samples: int = 100_000
    seed: int = 42

    def __post_init__(self):
        A = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", A)
        x0 = np.zeros(A.shape[0]) if self.x0 is None else np.asarray(self.x0, dtype=float)
        if x0.shape != (A.shape[0],) or not np.all(np.isfinite(x0)):
            raise InputError("x0 must be a finite point of matching dimension")
        object.__setattr__(self, "x0", x0)
        if not self.epsilon > 0:
            raise InputError("epsilon must be positive")
        if self.burn_in is not None and self.burn_in < 0:
            raise InputError("burn_in must be nonnegative")
        if self.samples < 1:
            raise InputError("samples must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise InputError("seed must fit in 64 bits")


def auto_burn_in(M, epsilon, x0, target=AUTO_BURN_IN_TARGET, max_iter=100_000):
    """Smallest ``B`` with ``|M^B| (|x0| + eps / (1 - r)) <= target``.

    ``r`` is the geometric rate implied by the tail certificate
    (``|M^p| ** (1/p)`` for the first power with ``|M^p| <= 1/2``).
    """
    A = as_matrix(M)
    cert = certify_tail(A, epsilon, target, max_iter=max_iter)
    radius = float(np.linalg.norm(x0)) + epsilon / (1.0 - cert.ratio)
    P = np.eye(A.shape[0])
    for B in range(max_iter + 1):
        if np.linalg.norm(P, 2) * radius <= target:
            return B
        P = P @ A
    raise InputError("burn-in target not reached within max_iter")


def simulate(cfg):
    """Run the trajectory; returns the ``(samples, m)`` cloud after burn-in.

    Raises
    ------
    DivergenceError
        When the state stops being finite.
    """
    burn_in = cfg.burn_in
    if burn_in is None:
        burn_in = auto_burn_in(cfg.matrix, cfg.epsilon, cfg.x0)
    rng = Xoshiro256(cfg.seed)
    cloud, bad = _kernels.simulate(
        np.ascontiguousarray(cfg.matrix),
        np.ascontiguousarray(cfg.x0),
        float(cfg.epsilon),
        int(burn_in),
        int(cfg.samples),
        rng.state,
    )
    if bad >= 0:
        raise DivergenceError(bad)
    return cloud


@dataclass(frozen=True)
class CloudReport:
    containment_fraction: float
    max_violation: float
    inner_hausdorff: float
    samples: int

    def as_dict(self):
        return {
            "containment_fraction": self.containment_fraction,
            "max_violation": self.max_violation,
            "inner_hausdorff": self.inner_hausdorff,
            "samples": self.samples,
        }


def cloud_vs_atlas(cloud, atlas, tol=1e-9):
    """Compare an empirical cloud with the support values of an atlas."""
    P = np.ascontiguousarray(np.atleast_2d(np.asarray(cloud, dtype=float)))
    if P.shape[0] == 0:
        raise InputError("cloud is empty")
    if P.shape[1] != atlas.dim:
        raise InputError("cloud and atlas dimensions differ")
    N = np.ascontiguousarray(atlas.normals)
    h = np.ascontiguousarray(atlas.support)
    violation, proj_max = _kernels.envelope(P, N, h)
    return CloudReport(
        containment_fraction=float(np.mean(violation <= tol)),
        max_violation=float(np.max(violation)),
        inner_hausdorff=float(max(0.0, np.max(h - proj_max))),
        samples=P.shape[0],
    )
