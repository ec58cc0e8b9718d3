"""Low-level numerics shared by every module.

Reductions here use a fixed pairwise tree with Neumaier-compensated leaves, so
a result depends only on the input array, never on how work was scheduled.
"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_LEAF = 16


def worker_count():
    """Worker threads allowed by ``ZAKHRT_THREADS`` (default 1)."""
    raw = os.environ.get("ZAKHRT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Ordered map; threads only change wall time, never the result."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _neumaier_pair(a):
    # a: (K, ...) real; sequential compensated sum over axis 0 -> (sum, compensation)
    s = np.zeros(a.shape[1:], dtype=np.float64)
    c = np.zeros_like(s)
    for row in a:
        s, e = _two_sum(s, row)
        c += e
    return s, c


def _neumaier_real(a):
    s, c = _neumaier_pair(a)
    return s + c


def _pairwise_pair(a):
    k = a.shape[0]
    if k <= _LEAF:
        return _neumaier_pair(a)
    half = k // 2
    ls, lc = _pairwise_pair(a[:half])
    rs, rc = _pairwise_pair(a[half:])
    s, e = _two_sum(ls, rs)
    return s, (lc + rc) + e


def _pairwise_real(a):
    s, c = _pairwise_pair(a)
    return s + c


def pairwise_sum(a, axis=0):
    """Compensated pairwise sum of ``a`` along ``axis`` (real or complex)."""
    a = np.moveaxis(np.asarray(a), axis, 0)
    if a.shape[0] == 0:
        return np.zeros(a.shape[1:], dtype=a.dtype)
    if np.iscomplexobj(a):
        return _pairwise_real(a.real.astype(np.float64)) + 1j * _pairwise_real(
            a.imag.astype(np.float64)
        )
    return _pairwise_real(a.astype(np.float64))


def neumaier_sum(values):
    """Compensated sum of a 1-D sequence in its given order."""
    a = np.asarray(values, dtype=np.float64).reshape(-1, 1)
    if a.shape[0] == 0:
        return 0.0
    return float(_neumaier_real(a)[0])


def character(theta):
    """Return exp(-2*pi*i*theta), exact at multiples of a quarter turn.

    ``theta`` is reduced mod 1 before the trigonometric call, so integer
    offsets in ``theta`` (as arise from integer lattice shifts) cancel exactly
    whenever the reduction itself is exact.
    """
    theta = np.asarray(theta, dtype=np.float64)
    r = theta - np.floor(theta)
    q = np.rint(4.0 * r)
    frac = r - 0.25 * q
    c = np.cos(2.0 * np.pi * frac)
    s = np.sin(2.0 * np.pi * frac)
    quadrant = q.astype(np.int64) % 4
    # (-i)^q * (c - i s)
    re = np.select([quadrant == 0, quadrant == 1, quadrant == 2], [c, -s, -c], s)
    im = np.select([quadrant == 0, quadrant == 1, quadrant == 2], [-s, -c, s], c)
    return re + 1j * im


def is_power_of_two(m):
    return isinstance(m, (int, np.integer)) and m >= 1 and (m & (m - 1)) == 0


def two_product(a, b):
    """Error-free product: a*b == p + err exactly (Dekker/Veltkamp split)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    p = a * b
    split = 134217729.0
    ta = a * split
    ah = ta - (ta - a)
    al = a - ah
    tb = b * split
    bh = tb - (tb - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def wrap_unit(x):
    """Reduce to [0, 1), mapping the rounding artefact 1.0 back to 0.0."""
    r = np.mod(x, 1.0)
    return np.where(r >= 1.0, 0.0, r)
