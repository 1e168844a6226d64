"""Hot inner loops, compiled with numba when available.

Set ``NCORR_DISABLE_NUMBA=1`` to force the pure-numpy implementations (used by
the test-suite to check both paths agree, and by the benchmark).
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["USING_NUMBA", "lattice_correlate", "table_pair_sum", "backend_name"]


def _numba_requested() -> bool:
    return os.environ.get("NCORR_DISABLE_NUMBA", "").strip().lower() not in ("1", "true", "yes")


try:  # pragma: no cover - exercised implicitly depending on environment
    if not _numba_requested():
        raise ImportError("numba disabled by NCORR_DISABLE_NUMBA")
    from numba import njit

    USING_NUMBA = True
except ImportError:  # pragma: no cover
    USING_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# lattice correlation  W(d) = sum_k prod_{j<n} H_j[k + d_j] * H_n[k]

def _slices(L: int, d: int):
    """Index ranges so that a[k + d] and b[k] are both in range."""
    lo = max(0, -d)
    hi = min(L, L - d)
    return lo, hi


def lattice_correlate_numpy(H: list[np.ndarray], D: int) -> np.ndarray:
    n = len(H)
    L = H[0].shape[0]
    size = 2 * D + 1
    if n == 1:
        return np.array(H[0].sum())
    if n == 2:
        out = np.zeros(size, dtype=complex)
        for i, d in enumerate(range(-D, D + 1)):
            lo, hi = _slices(L, d)
            if hi > lo:
                out[i] = np.dot(H[0][lo + d:hi + d], H[1][lo:hi])
        return out
    if n == 3:
        out = np.zeros((size, size), dtype=complex)
        for i, d1 in enumerate(range(-D, D + 1)):
            lo1, hi1 = _slices(L, d1)
            prod = np.zeros(L, dtype=complex)
            prod[lo1:hi1] = H[0][lo1 + d1:hi1 + d1] * H[2][lo1:hi1]
            for j, d2 in enumerate(range(-D, D + 1)):
                lo, hi = _slices(L, d2)
                if hi > lo:
                    out[i, j] = np.dot(H[1][lo + d2:hi + d2], prod[lo:hi])
        return out
    raise ValueError("lattice correlation implemented for n <= 3")


@njit(cache=True, fastmath=False)
def _corr2(h1, h2, D):  # pragma: no cover - compiled
    L = h1.shape[0]
    out = np.zeros(2 * D + 1, dtype=np.complex128)
    for i in range(2 * D + 1):
        d = i - D
        lo = max(0, -d)
        hi = min(L, L - d)
        if hi > lo:
            out[i] = np.dot(h1[lo + d:hi + d], h2[lo:hi])
    return out


@njit(cache=True, fastmath=False)
def _corr3(h1, h2, h3, D):  # pragma: no cover - compiled
    L = h1.shape[0]
    size = 2 * D + 1
    out = np.zeros((size, size), dtype=np.complex128)
    prod = np.zeros(L, dtype=np.complex128)
    for i in range(size):
        d1 = i - D
        lo1 = max(0, -d1)
        hi1 = min(L, L - d1)
        for k in range(L):
            prod[k] = 0j
        for k in range(lo1, hi1):
            prod[k] = h1[k + d1] * h3[k]
        for j in range(size):
            d2 = j - D
            lo = max(0, -d2)
            hi = min(L, L - d2)
            if hi > lo:
                out[i, j] = np.dot(h2[lo + d2:hi + d2], prod[lo:hi])
    return out


def lattice_correlate(H: list[np.ndarray], D: int) -> np.ndarray:
    """W(d) for d in [-D, D]^(n-1), out-of-range samples treated as zero.

    ``H`` holds n equal-length complex arrays; the last one is the anchor
    (its index is not shifted).
    """
    H = [np.ascontiguousarray(h, dtype=np.complex128) for h in H]
    if not USING_NUMBA or len(H) == 1 or len(H) > 3:
        return lattice_correlate_numpy(H, D)
    if len(H) == 2:
        return _corr2(H[0], H[1], D)
    return _corr3(H[0], H[1], H[2], D)


# ---------------------------------------------------------------------------
# windowed pair sums against a tabulated kernel
#     sum_i sum_{j : |x_i - y_j| <= U} wx_i wy_j K(x_i - y_j)
# K is sampled on u0 + m du and interpolated with 4-point Lagrange weights.

def _interp4_numpy(table, u0, du, u):
    pos = (u - u0) / du
    m = np.floor(pos).astype(np.int64)
    m = np.clip(m, 1, table.shape[0] - 3)
    t = pos - m
    c0 = -t * (t - 1.0) * (t - 2.0) / 6.0
    c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
    c2 = -(t + 1.0) * t * (t - 2.0) / 2.0
    c3 = (t + 1.0) * t * (t - 1.0) / 6.0
    return c0 * table[m - 1] + c1 * table[m] + c2 * table[m + 1] + c3 * table[m + 2]


def table_pair_sum_numpy(x, wx, y, wy, table, u0, du, U) -> float:
    total = 0.0
    lo = np.searchsorted(y, x - U, side="left")
    hi = np.searchsorted(y, x + U, side="right")
    for i in range(x.shape[0]):
        if hi[i] > lo[i]:
            diff = x[i] - y[lo[i]:hi[i]]
            total += wx[i] * np.dot(wy[lo[i]:hi[i]], _interp4_numpy(table, u0, du, diff))
    return float(total)


@njit(cache=True)
def _table_pair_sum(x, wx, y, wy, table, u0, du, U):  # pragma: no cover - compiled
    total = 0.0
    ny = y.shape[0]
    nt = table.shape[0]
    start = 0
    for i in range(x.shape[0]):
        xi = x[i]
        while start < ny and y[start] < xi - U:
            start += 1
        acc = 0.0
        j = start
        while j < ny and y[j] <= xi + U:
            pos = (xi - y[j] - u0) / du
            m = int(np.floor(pos))
            if m < 1:
                m = 1
            elif m > nt - 3:
                m = nt - 3
            t = pos - m
            c0 = -t * (t - 1.0) * (t - 2.0) / 6.0
            c1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
            c2 = -(t + 1.0) * t * (t - 2.0) / 2.0
            c3 = (t + 1.0) * t * (t - 1.0) / 6.0
            acc += wy[j] * (c0 * table[m - 1] + c1 * table[m] + c2 * table[m + 1]
                            + c3 * table[m + 2])
            j += 1
        total += wx[i] * acc
    return total


def table_pair_sum(x, wx, y, wy, table, u0: float, du: float, U: float) -> float:
    """Windowed double sum with a tabulated real kernel; ``x`` and ``y`` sorted."""
    args = [np.ascontiguousarray(a, dtype=np.float64) for a in (x, wx, y, wy, table)]
    if USING_NUMBA:
        return float(_table_pair_sum(*args, float(u0), float(du), float(U)))
    return table_pair_sum_numpy(*args, u0, du, U)
