"""Time the numba kernels against their numpy fallbacks on identical inputs.

Run with ``python3 benchmarks/bench_kernels.py``. Both code paths are called
directly, so the environment flag does not matter here. Each row reports the
best of ``--repeat`` runs after one warm-up call (which absorbs JIT compilation).
"""

import argparse
import time

import numpy as np

from noisyattractor import _kernels
from noisyattractor.boundary import build_atlas
from noisyattractor.linalg import certify_tail, matrix_powers, sphere_grid


def best_time(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(samples):
    M = np.array([[0.5, 0.3, 0.0], [0.0, 0.4, 0.2], [0.1, 0.0, -0.6]])
    eps = 0.1
    N = np.ascontiguousarray(sphere_grid(3, 2000))
    Mt = np.ascontiguousarray(M.T)
    order = certify_tail(M, eps, 5e-11).order
    powers = np.ascontiguousarray(matrix_powers(M, order - 1))
    atlas = build_atlas(M, eps, N)
    x0 = np.zeros(3)
    seed = _kernels.splitmix64_seed(42)
    cloud, _ = _kernels.simulate_numpy(M, x0, eps, 0, samples, seed.copy())
    return {
        "orbit_norms": (
            lambda: _kernels.orbit_norms_numpy(Mt, N, order),
            lambda: _kernels.orbit_norms_numba(Mt, N, order),
        ),
        "boundary_series": (
            lambda: _kernels.boundary_series_numpy(Mt, powers, N),
            lambda: _kernels.boundary_series_numba(Mt, powers, N),
        ),
        "envelope": (
            lambda: _kernels.envelope_numpy(cloud, atlas.normals, atlas.support),
            lambda: _kernels.envelope_numba(cloud, atlas.normals, atlas.support),
        ),
        "simulate": (
            lambda: _kernels.simulate_numpy(M, x0, eps, 100, samples, seed.copy()),
            lambda: _kernels.simulate_numba(M, x0, eps, 100, samples, seed.copy()),
        ),
    }


def agree(a, b):
    if isinstance(a, tuple):
        return all(agree(x, y) for x, y in zip(a, b))
    return bool(np.allclose(a, b, rtol=1e-12, atol=1e-14))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=20_000, help="trajectory length for simulate/envelope")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy path is available")
        return 1
    print(f"{'kernel':<16} {'numpy [s]':>11} {'numba [s]':>11} {'speedup':>9}  agree")
    for name, (slow, fast) in cases(args.samples).items():
        t_np = best_time(slow, args.repeat)
        t_nb = best_time(fast, args.repeat)
        print(f"{name:<16} {t_np:11.4f} {t_nb:11.4f} {t_np / t_nb:8.1f}x  {agree(slow(), fast())}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
