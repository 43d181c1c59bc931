"""Hot numeric kernels, each with a numba path and a pure-numpy path.

The numba path is used when numba imports cleanly and the environment
variable ``NOISYATTRACTOR_DISABLE_NUMBA`` is unset (or ``0``/``false``).
Both paths are always importable so they can be compared against each
other; the public dispatchers at the bottom pick one at import time.

Random stream layout (shared by both paths, see ``oracle``):

* state: four 64-bit words of xoshiro256**, filled from the seed with
  splitmix64;
* uniform double: ``(next() >> 11) * 2**-53`` in ``[0, 1)``;
* standard normals come in Box-Muller pairs from two uniforms ``u1, u2``:
  ``sqrt(-2 log(1 - u1)) * (cos, sin)(2 pi u2)``;
* one noise vector in dimension m: ``ceil(m / 2)`` normal pairs (an odd
  trailing normal is discarded), redrawn if the vector is exactly zero,
  then one uniform ``u`` for the radius ``eps * u ** (1 / m)``.
"""

import math
import os

import numpy as np

_FLAG = "NOISYATTRACTOR_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get(_FLAG, "").strip().lower() in (
    "",
    "0",
    "false",
    "no",
)

MASK64 = 0xFFFFFFFFFFFFFFFF
TWO_PI = 2.0 * math.pi
INV_2_53 = 1.0 / 9007199254740992.0


def _njit(fn):
    if numba is None:
        return None
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# splitmix64 / xoshiro256** in plain Python integers
# ---------------------------------------------------------------------------


def splitmix64_seed(seed):
    """Expand an integer seed into a xoshiro256** state (uint64[4])."""
    x = int(seed) & MASK64
    words = []
    for _ in range(4):
        x = (x + 0x9E3779B97F4A7C15) & MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        words.append(z ^ (z >> 31))
    if not any(words):  # pragma: no cover - splitmix64 never yields 4 zeros
        words[0] = 1
    return np.array(words, dtype=np.uint64)


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class _PyStream:
    """xoshiro256** over Python ints; the reference for the numba kernel."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, state):
        self.s0, self.s1, self.s2, self.s3 = (int(w) for w in state)

    def next(self):
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def uniform(self):
        return (self.next() >> 11) * INV_2_53

    def store(self, state):
        state[0] = self.s0
        state[1] = self.s1
        state[2] = self.s2
        state[3] = self.s3


def _py_ball(stream, m, eps, out):
    while True:
        sq = 0.0
        i = 0
        while i < m:
            u1 = stream.uniform()
            u2 = stream.uniform()
            r = math.sqrt(-2.0 * math.log(1.0 - u1))
            z0 = r * math.cos(TWO_PI * u2)
            out[i] = z0
            sq += z0 * z0
            if i + 1 < m:
                z1 = r * math.sin(TWO_PI * u2)
                out[i + 1] = z1
                sq += z1 * z1
            i += 2
        if sq > 0.0:
            break
    u = stream.uniform()
    scale = eps * u ** (1.0 / m) / math.sqrt(sq)
    sq = 0.0
    for i in range(m):
        out[i] *= scale
        sq += out[i] * out[i]
    while math.sqrt(sq) > eps:  # rounding guard, keeps |v| <= eps exact
        sq = 0.0
        for i in range(m):
            out[i] *= 0.9999999999999998
            sq += out[i] * out[i]


def ball_samples_numpy(state, m, eps, count):
    """Draw ``count`` noise vectors; advances ``state`` in place."""
    stream = _PyStream(state)
    out = np.empty((count, m))
    buf = [0.0] * m
    for j in range(count):
        _py_ball(stream, m, eps, buf)
        out[j] = buf
    stream.store(state)
    return out


def simulate_numpy(M, x0, eps, burn_in, samples, state):
    """Iterate ``x <- M x + xi``; returns ``(cloud, bad_step)``.

    ``bad_step`` is -1 on success, otherwise the 1-based step index at which
    the state became non-finite (``cloud`` is then partially filled).
    """
    m = M.shape[0]
    rows = [[float(M[r, c]) for c in range(m)] for r in range(m)]
    x = [float(v) for v in x0]
    y = [0.0] * m
    xi = [0.0] * m
    cloud = np.zeros((samples, m))
    stream = _PyStream(state)
    total = burn_in + samples
    bad = -1
    for t in range(total):
        _py_ball(stream, m, eps, xi)
        finite = True
        for r in range(m):
            acc = 0.0
            row = rows[r]
            for c in range(m):
                acc += row[c] * x[c]
            acc += xi[r]
            if not math.isfinite(acc):
                finite = False
            y[r] = acc
        x, y = y, x
        if not finite:
            bad = t + 1
            break
        if t >= burn_in:
            cloud[t - burn_in] = x
    stream.store(state)
    return cloud, bad


# ---------------------------------------------------------------------------
# xoshiro256** for numba (uint64 arithmetic wraps natively)
# ---------------------------------------------------------------------------

_U5 = np.uint64(5)
_U7 = np.uint64(7)
_U9 = np.uint64(9)
_U11 = np.uint64(11)
_U17 = np.uint64(17)
_U45 = np.uint64(45)
_U57 = np.uint64(57)
_U19 = np.uint64(19)


def _nb_next(s):
    s1 = s[1]
    x = s1 * _U5
    result = ((x << _U7) | (x >> _U57)) * _U9
    t = s1 << _U17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s3 = s[3]
    s[3] = (s3 << _U45) | (s3 >> _U19)
    return result


_nb_next_c = _njit(_nb_next)


def _nb_uniform(s):
    return float(_nb_next_c(s) >> _U11) * INV_2_53


_nb_uniform_c = _njit(_nb_uniform)


def _nb_ball(s, m, eps, out):
    while True:
        sq = 0.0
        i = 0
        while i < m:
            u1 = _nb_uniform_c(s)
            u2 = _nb_uniform_c(s)
            r = math.sqrt(-2.0 * math.log(1.0 - u1))
            z0 = r * math.cos(TWO_PI * u2)
            out[i] = z0
            sq += z0 * z0
            if i + 1 < m:
                z1 = r * math.sin(TWO_PI * u2)
                out[i + 1] = z1
                sq += z1 * z1
            i += 2
        if sq > 0.0:
            break
    u = _nb_uniform_c(s)
    scale = eps * u ** (1.0 / m) / math.sqrt(sq)
    sq = 0.0
    for i in range(m):
        out[i] *= scale
        sq += out[i] * out[i]
    while math.sqrt(sq) > eps:
        sq = 0.0
        for i in range(m):
            out[i] *= 0.9999999999999998
            sq += out[i] * out[i]


_nb_ball_c = _njit(_nb_ball)


def _ball_samples_nb(state, m, eps, count):
    out = np.empty((count, m))
    buf = np.empty(m)
    for j in range(count):
        _nb_ball_c(state, m, eps, buf)
        for i in range(m):
            out[j, i] = buf[i]
    return out


ball_samples_numba = _njit(_ball_samples_nb)


def _simulate_nb(M, x0, eps, burn_in, samples, state):
    m = M.shape[0]
    x = x0.copy()
    y = np.empty(m)
    xi = np.empty(m)
    cloud = np.zeros((samples, m))
    total = burn_in + samples
    bad = -1
    for t in range(total):
        _nb_ball_c(state, m, eps, xi)
        finite = True
        for r in range(m):
            acc = 0.0
            for c in range(m):
                acc += M[r, c] * x[c]
            acc += xi[r]
            if not math.isfinite(acc):
                finite = False
            y[r] = acc
        for r in range(m):
            x[r] = y[r]
        if not finite:
            bad = t + 1
            break
        if t >= burn_in:
            for r in range(m):
                cloud[t - burn_in, r] = x[r]
    return cloud, bad


simulate_numba = _njit(_simulate_nb)


# ---------------------------------------------------------------------------
# normal orbits: u_{k+1} = P(M^T u_k), |(M^T)^k n| as a running product
# ---------------------------------------------------------------------------


def orbit_norms_numpy(Mt, N, K):
    """Return ``(d, K)`` array of ``|(M^T)^k n|`` for k < K, per row n of N."""
    d = N.shape[0]
    out = np.empty((d, K))
    if K == 0:
        return out
    U = np.array(N, dtype=float)
    scale = np.ones(d)
    out[:, 0] = 1.0
    for k in range(1, K):
        V = U @ Mt.T
        step = np.sqrt(np.einsum("ij,ij->i", V, V))
        scale = scale * step
        out[:, k] = scale
        U = V / step[:, None]
    return out


def _orbit_norms_nb(Mt, N, K):
    d, m = N.shape
    out = np.empty((d, K))
    u = np.empty(m)
    v = np.empty(m)
    for j in range(d):
        if K == 0:
            break
        for i in range(m):
            u[i] = N[j, i]
        scale = 1.0
        out[j, 0] = 1.0
        for k in range(1, K):
            sq = 0.0
            for r in range(m):
                acc = 0.0
                for c in range(m):
                    acc += Mt[r, c] * u[c]
                v[r] = acc
                sq += acc * acc
            step = math.sqrt(sq)
            scale *= step
            out[j, k] = scale
            for r in range(m):
                u[r] = v[r] / step
    return out


orbit_norms_numba = _njit(_orbit_norms_nb)


# ---------------------------------------------------------------------------
# boundary series: x(n) = sum_k M^k u_k, Neumaier-compensated per coordinate
# ---------------------------------------------------------------------------


def boundary_series_numpy(Mt, powers, N):
    """Sum ``M^k P((M^T)^k n)`` for k < len(powers); returns ``(d, m)``."""
    U = np.array(N, dtype=float)
    total = np.zeros_like(U)
    comp = np.zeros_like(U)
    K = powers.shape[0]
    for k in range(K):
        term = U @ powers[k].T
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        total = t
        if k + 1 < K:
            V = U @ Mt.T
            U = V / np.sqrt(np.einsum("ij,ij->i", V, V))[:, None]
    return total + comp


def _boundary_series_nb(Mt, powers, N):
    d, m = N.shape
    K = powers.shape[0]
    out = np.empty((d, m))
    u = np.empty(m)
    v = np.empty(m)
    total = np.empty(m)
    comp = np.empty(m)
    for j in range(d):
        for i in range(m):
            u[i] = N[j, i]
            total[i] = 0.0
            comp[i] = 0.0
        for k in range(K):
            for r in range(m):
                term = 0.0
                for c in range(m):
                    term += powers[k, r, c] * u[c]
                t = total[r] + term
                if abs(total[r]) >= abs(term):
                    comp[r] += (total[r] - t) + term
                else:
                    comp[r] += (term - t) + total[r]
                total[r] = t
            if k + 1 < K:
                sq = 0.0
                for r in range(m):
                    acc = 0.0
                    for c in range(m):
                        acc += Mt[r, c] * u[c]
                    v[r] = acc
                    sq += acc * acc
                step = math.sqrt(sq)
                for r in range(m):
                    u[r] = v[r] / step
        for i in range(m):
            out[j, i] = total[i] + comp[i]
    return out


boundary_series_numba = _njit(_boundary_series_nb)


# ---------------------------------------------------------------------------
# cloud envelope: per-point worst violation, per-direction max projection
# ---------------------------------------------------------------------------

_CHUNK = 4096


def envelope_numpy(cloud, N, h):
    """Return ``(violation, proj_max)``.

    ``violation[p] = max_n <p, n> - h(n)`` and ``proj_max[n] = max_p <p, n>``.
    """
    S = cloud.shape[0]
    violation = np.empty(S)
    proj_max = np.full(N.shape[0], -np.inf)
    for lo in range(0, S, _CHUNK):
        P = cloud[lo : lo + _CHUNK] @ N.T
        violation[lo : lo + _CHUNK] = (P - h).max(axis=1)
        np.maximum(proj_max, P.max(axis=0), out=proj_max)
    return violation, proj_max


def _envelope_nb(cloud, N, h):
    S, m = cloud.shape
    d = N.shape[0]
    violation = np.empty(S)
    proj_max = np.full(d, -np.inf)
    for p in range(S):
        worst = -np.inf
        for j in range(d):
            acc = 0.0
            for i in range(m):
                acc += cloud[p, i] * N[j, i]
            if acc > proj_max[j]:
                proj_max[j] = acc
            gap = acc - h[j]
            if gap > worst:
                worst = gap
        violation[p] = worst
    return violation, proj_max


envelope_numba = _njit(_envelope_nb)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _simulate_numba_checked(M, x0, eps, burn_in, samples, state):
    return simulate_numba(M, x0, float(eps), int(burn_in), int(samples), state)


def _ball_samples_numba_checked(state, m, eps, count):
    return ball_samples_numba(state, int(m), float(eps), int(count))


if USE_NUMBA:
    orbit_norms = orbit_norms_numba
    boundary_series = boundary_series_numba
    envelope = envelope_numba
    simulate = _simulate_numba_checked
    ball_samples = _ball_samples_numba_checked
else:
    orbit_norms = orbit_norms_numpy
    boundary_series = boundary_series_numpy
    envelope = envelope_numpy
    simulate = simulate_numpy
    ball_samples = ball_samples_numpy


def backend():
    """Name of the active kernel backend (``"numba"`` or ``"numpy"``)."""
    return "numba" if USE_NUMBA else "numpy"
