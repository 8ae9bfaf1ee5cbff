"""Hot inner loops, each with a numba kernel and a pure-numpy twin.

The public entry points dispatch on :data:`mu_metrics._jit.HAVE_NUMBA`;
the ``*_numpy`` and ``*_jit`` variants stay importable so the benchmark and
the tests can compare them directly.
"""
import numpy as np

from ._jit import HAVE_NUMBA, njit, prange

# Cumulative probabilities closer than this are treated as the same quantile
# breakpoint; outcome probabilities carry ~1e-16 rounding.
CDF_SNAP = 1e-14


def _cdf(probs):
    p = np.clip(np.asarray(probs, dtype=np.float64), 0.0, None)
    c = np.cumsum(p)
    c /= c[-1]
    c[-1] = 1.0
    return c


def _snap_numpy(F, G, tol):
    """Move every entry of G within ``tol`` of some entry of F onto it."""
    G = G.copy()
    idx = np.searchsorted(F, G)
    lo = np.clip(idx - 1, 0, len(F) - 1)
    hi = np.clip(idx, 0, len(F) - 1)
    near_lo = np.abs(F[lo] - G) <= tol
    near_hi = np.abs(F[hi] - G) <= tol
    G[near_hi] = F[hi][near_hi]
    G[near_lo & ~near_hi] = F[lo][near_lo & ~near_hi]
    return G


def w2_squared_numpy(x, p, y, q, tol=CDF_SNAP):
    """Squared order-2 Wasserstein distance of two sorted discrete laws."""
    F = _cdf(p)
    G = _snap_numpy(F, _cdf(q), tol)
    t = np.union1d(np.union1d(F, G), [0.0])
    widths = np.diff(t)
    mids = 0.5 * (t[:-1] + t[1:])
    i = np.minimum(np.searchsorted(F, mids), len(F) - 1)
    j = np.minimum(np.searchsorted(G, mids), len(G) - 1)
    return float(np.sum(widths * (np.asarray(x)[i] - np.asarray(y)[j]) ** 2))


@njit(cache=True)
def _w2_merge_jit(x, F, y, G, tol):
    n = F.shape[0]
    m = G.shape[0]
    # snap G onto F
    Gs = G.copy()
    k = 0
    for j in range(m):
        while k < n - 1 and F[k] < Gs[j] - tol:
            k += 1
        if abs(F[k] - Gs[j]) <= tol:
            Gs[j] = F[k]
        elif k > 0 and abs(F[k - 1] - Gs[j]) <= tol:
            Gs[j] = F[k - 1]
    total = 0.0
    prev = 0.0
    i = 0
    j = 0
    while i < n and j < m:
        cur = F[i] if F[i] < Gs[j] else Gs[j]
        d = x[i] - y[j]
        total += (cur - prev) * d * d
        prev = cur
        if F[i] == cur:
            i += 1
        if Gs[j] == cur:
            j += 1
    return total


def w2_squared_jit(x, p, y, q, tol=CDF_SNAP):
    return float(
        _w2_merge_jit(
            np.ascontiguousarray(x, dtype=np.float64),
            _cdf(p),
            np.ascontiguousarray(y, dtype=np.float64),
            _cdf(q),
            tol,
        )
    )


def w2_squared(x, p, y, q, tol=CDF_SNAP):
    if HAVE_NUMBA:
        return w2_squared_jit(x, p, y, q, tol)
    return w2_squared_numpy(x, p, y, q, tol)


# ---------------------------------------------------------------------------
# Brute-force grid for the qubit incompatibility minimum.
#
# Both approximator Bloch vectors live in the plane of the targets, written in
# polar form c = r1 (cos t1, sin t1), d = r2 (cos t2, sin t2).  The objective
# is Delta(a, c)^2 + Delta(b, d)^2 = 4 - 2 (a.c + b.d) under the unbiased
# joint-measurability constraint |c + d| + |c - d| <= 2.


@njit(cache=True, parallel=True)
def _qubit_grid_jit(a, b, radii, angles, tol):
    nr = radii.shape[0]
    na = angles.shape[0]
    cos = np.cos(angles)
    sin = np.sin(angles)
    best = np.full(nr, np.inf)
    arg = np.zeros((nr, 3), dtype=np.int64)
    for i1 in prange(nr):
        r1 = radii[i1]
        for k1 in range(na):
            c0 = r1 * cos[k1]
            c1 = r1 * sin[k1]
            ac = a[0] * c0 + a[1] * c1
            for i2 in range(nr):
                r2 = radii[i2]
                for k2 in range(na):
                    d0 = r2 * cos[k2]
                    d1 = r2 * sin[k2]
                    s = np.sqrt((c0 + d0) ** 2 + (c1 + d1) ** 2)
                    t = np.sqrt((c0 - d0) ** 2 + (c1 - d1) ** 2)
                    if s + t > 2.0 + tol:
                        continue
                    val = 4.0 - 2.0 * (ac + b[0] * d0 + b[1] * d1)
                    if val < best[i1]:
                        best[i1] = val
                        arg[i1, 0] = k1
                        arg[i1, 1] = i2
                        arg[i1, 2] = k2
    i1 = np.argmin(best)
    return best[i1], i1, arg[i1, 0], arg[i1, 1], arg[i1, 2]


def qubit_grid_jit(a, b, radii, angles, tol=1e-12):
    val, i1, k1, i2, k2 = _qubit_grid_jit(
        np.asarray(a, dtype=np.float64),
        np.asarray(b, dtype=np.float64),
        np.asarray(radii, dtype=np.float64),
        np.asarray(angles, dtype=np.float64),
        tol,
    )
    return float(val), (int(i1), int(k1), int(i2), int(k2))


def qubit_grid_numpy(a, b, radii, angles, tol=1e-12):
    radii = np.asarray(radii, dtype=np.float64)
    angles = np.asarray(angles, dtype=np.float64)
    cos, sin = np.cos(angles), np.sin(angles)
    d0 = (radii[:, None] * cos[None, :])[None, None]
    d1 = (radii[:, None] * sin[None, :])[None, None]
    bd = b[0] * d0 + b[1] * d1
    best, best_idx = np.inf, (0, 0, 0, 0)
    for i1, r1 in enumerate(radii):
        c0 = (r1 * cos)[:, None, None]
        c1 = (r1 * sin)[:, None, None]
        s = np.hypot(c0 + d0[0], c1 + d1[0])
        t = np.hypot(c0 - d0[0], c1 - d1[0])
        val = 4.0 - 2.0 * (a[0] * c0 + a[1] * c1 + bd[0])
        val = np.where(s + t > 2.0 + tol, np.inf, val)
        flat = int(np.argmin(val))
        if val.flat[flat] < best:
            best = float(val.flat[flat])
            k1, i2, k2 = np.unravel_index(flat, val.shape)
            best_idx = (i1, int(k1), int(i2), int(k2))
    return best, best_idx


def qubit_grid(a, b, radii, angles, tol=1e-12):
    if HAVE_NUMBA:
        return qubit_grid_jit(a, b, radii, angles, tol)
    return qubit_grid_numpy(a, b, radii, angles, tol)
