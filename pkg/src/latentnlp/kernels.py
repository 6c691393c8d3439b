"""Hot numeric kernels with numba acceleration and a pure-numpy fallback.

Every kernel exists twice: a ``_numba`` variant compiled with ``@njit`` and a
``_numpy`` variant built from vectorized numpy. The active path is chosen once
at import time from the ``LATENTNLP_NUMBA`` environment variable (set it to
``0``/``false``/``off`` to force the numpy path). Both paths perform the same
floating-point operations in the same order, so their outputs are bitwise
identical; ``benchmarks/bench_kernels.py`` compares their speed.

Distance computations accumulate squared differences sequentially over the
coordinate axis. Keep it that way in both paths: reordering the accumulation
would silently break the bitwise-equality contract the tests pin down.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = os.environ.get("LATENTNLP_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _ENV_FLAG not in ("0", "false", "no", "off")

NUMBA_AVAILABLE = False
if NUMBA_REQUESTED:
    try:
        from numba import njit, prange

        NUMBA_AVAILABLE = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_AVAILABLE = False


# ---------------------------------------------------------------------------
# k smallest squared distances per query (brute-force exact scan)
# ---------------------------------------------------------------------------

def _knn_select_numpy(points, queries, k, exclude_rows):
    nq = queries.shape[0]
    npts = points.shape[0]
    d = points.shape[1]
    out_d2 = np.empty((nq, k))
    out_rows = np.empty((nq, k), dtype=np.int64)
    # Row-chunked so the nq x npts scratch stays small.
    chunk = max(1, min(nq, int(2_000_000 // max(npts, 1)) + 1))
    for start in range(0, nq, chunk):
        stop = min(start + chunk, nq)
        q = queries[start:stop]
        d2 = np.zeros((stop - start, npts))
        for dd in range(d):  # sequential accumulation, mirrors the njit loop
            diff = q[:, dd, np.newaxis] - points[np.newaxis, :, dd]
            d2 += diff * diff
        for i in range(stop - start):
            row = d2[i]
            ex = exclude_rows[start + i]
            if ex >= 0:
                row = row.copy()
                row[ex] = np.inf
            # stable sort on distance keeps ascending row order within ties
            order = np.argsort(row, kind="stable")[:k]
            out_rows[start + i] = order
            out_d2[start + i] = row[order]
    return out_d2, out_rows


def _knn_select_py(points, queries, k, exclude_rows):
    nq = queries.shape[0]
    npts = points.shape[0]
    d = points.shape[1]
    out_d2 = np.empty((nq, k))
    out_rows = np.empty((nq, k), dtype=np.int64)
    for qi in prange(nq):
        buf_d2 = np.empty(k)
        buf_row = np.empty(k, dtype=np.int64)
        for j in range(k):
            buf_d2[j] = np.inf
            buf_row[j] = -1
        ex = exclude_rows[qi]
        for pi in range(npts):
            if pi == ex:
                continue
            s = 0.0
            for dd in range(d):
                diff = queries[qi, dd] - points[pi, dd]
                s += diff * diff
            # strict < keeps the earlier (smaller) row on ties
            if s < buf_d2[k - 1]:
                pos = k - 1
                while pos > 0 and buf_d2[pos - 1] > s:
                    buf_d2[pos] = buf_d2[pos - 1]
                    buf_row[pos] = buf_row[pos - 1]
                    pos -= 1
                buf_d2[pos] = s
                buf_row[pos] = pi
        for j in range(k):
            out_d2[qi, j] = buf_d2[j]
            out_rows[qi, j] = buf_row[j]
    return out_d2, out_rows


# ---------------------------------------------------------------------------
# nearest-centroid assignment (Lloyd iteration inner step)
# ---------------------------------------------------------------------------

def _assign_nearest_numpy(points, centroids):
    n = points.shape[0]
    kc = centroids.shape[0]
    d = points.shape[1]
    d2 = np.zeros((n, kc))
    for dd in range(d):
        diff = points[:, dd, np.newaxis] - centroids[np.newaxis, :, dd]
        d2 += diff * diff
    labels = np.argmin(d2, axis=1).astype(np.int64)  # first minimum on ties
    best = d2[np.arange(n), labels]
    return labels, best


def _assign_nearest_py(points, centroids):
    n = points.shape[0]
    kc = centroids.shape[0]
    d = points.shape[1]
    labels = np.empty(n, dtype=np.int64)
    best = np.empty(n)
    for i in prange(n):
        bd = np.inf
        bj = -1
        for j in range(kc):
            s = 0.0
            for dd in range(d):
                diff = points[i, dd] - centroids[j, dd]
                s += diff * diff
            if s < bd:
                bd = s
                bj = j
        labels[i] = bj
        best[i] = bd
    return labels, best


# ---------------------------------------------------------------------------
# Levenshtein distance over integer code sequences
# ---------------------------------------------------------------------------

def _levenshtein_numpy(a, b):
    if a.size == 0:
        return int(b.size)
    if b.size == 0:
        return int(a.size)
    prev = np.arange(b.size + 1, dtype=np.int64)
    idx = np.arange(b.size + 1, dtype=np.int64)
    for i in range(a.size):
        sub = prev[:-1] + (b != a[i])
        cur = np.empty(b.size + 1, dtype=np.int64)
        cur[0] = i + 1
        cur[1:] = np.minimum(prev[1:] + 1, sub)
        # left-to-right insertion chain: cur[j] = min_{i<=j} cand[i] + (j - i)
        cur = np.minimum.accumulate(cur - idx) + idx
        prev = cur
    return int(prev[-1])


def _levenshtein_py(a, b):
    la = a.size
    lb = b.size
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = np.empty(lb + 1, dtype=np.int64)
    cur = np.empty(lb + 1, dtype=np.int64)
    for j in range(lb + 1):
        prev[j] = j
    for i in range(la):
        cur[0] = i + 1
        for j in range(lb):
            cost = 0 if a[i] == b[j] else 1
            best = prev[j] + cost
            if prev[j + 1] + 1 < best:
                best = prev[j + 1] + 1
            if cur[j] + 1 < best:
                best = cur[j] + 1
            cur[j + 1] = best
        prev, cur = cur, prev
    return int(prev[lb])


if NUMBA_AVAILABLE:
    _knn_select_numba = njit(cache=True, parallel=True)(_knn_select_py)
    _assign_nearest_numba = njit(cache=True, parallel=True)(_assign_nearest_py)
    _levenshtein_numba = njit(cache=True)(_levenshtein_py)

    knn_select_raw = _knn_select_numba
    assign_nearest_raw = _assign_nearest_numba
    levenshtein_raw = _levenshtein_numba
else:  # numpy fallback path
    prange = range  # keeps the _py sources importable without numba

    knn_select_raw = _knn_select_numpy
    assign_nearest_raw = _assign_nearest_numpy
    levenshtein_raw = _levenshtein_numpy


def active_backend() -> str:
    """Name of the kernel path selected at import time."""
    return "numba" if NUMBA_AVAILABLE else "numpy"


def _as_matrix(arr):
    out = np.ascontiguousarray(arr, dtype=np.float64)
    if out.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {out.shape}")
    return out


def knn_select(points, queries, k, exclude_rows=None):
    """k smallest squared Euclidean distances from each query to ``points``.

    Returns ``(d2, rows)`` of shape (nq, k), ascending by (distance, row).
    ``exclude_rows[i] >= 0`` removes that single row of ``points`` from query
    i's candidates (used for self-exclusion); pass -1 or None for no
    exclusion. Rows must leave at least ``k`` candidates per query.
    """
    points = _as_matrix(points)
    queries = _as_matrix(queries)
    if points.shape[1] != queries.shape[1]:
        raise ValueError("points and queries disagree on dimension")
    nq = queries.shape[0]
    if exclude_rows is None:
        exclude_rows = np.full(nq, -1, dtype=np.int64)
    else:
        exclude_rows = np.ascontiguousarray(exclude_rows, dtype=np.int64)
        if exclude_rows.shape != (nq,):
            raise ValueError("exclude_rows must have one entry per query")
    if k < 1:
        raise ValueError("k must be >= 1")
    avail = points.shape[0] - int((exclude_rows >= 0).any())
    if k > avail:
        raise ValueError(f"k={k} exceeds available points ({avail})")
    return knn_select_raw(points, queries, k, exclude_rows)


def assign_nearest(points, centroids):
    """Nearest-centroid labels and squared distances (ties: lowest index)."""
    points = _as_matrix(points)
    centroids = _as_matrix(centroids)
    if points.shape[1] != centroids.shape[1]:
        raise ValueError("points and centroids disagree on dimension")
    if centroids.shape[0] == 0:
        raise ValueError("need at least one centroid")
    return assign_nearest_raw(points, centroids)


def levenshtein_codes(a, b) -> int:
    """Unit-cost edit distance between two int64 code sequences."""
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    return int(levenshtein_raw(a, b))
