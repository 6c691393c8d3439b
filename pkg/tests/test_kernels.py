"""The numba and numpy kernel paths must agree bit for bit."""

import numpy as np
import pytest

from latentnlp import kernels


def _both_knn(points, queries, k, exclude):
    a = kernels._knn_select_numpy(points, queries, k, exclude)
    if kernels.NUMBA_AVAILABLE:
        b = kernels._knn_select_numba(points, queries, k, exclude)
    else:
        b = kernels._knn_select_py(points, queries, k, exclude)
    return a, b


@pytest.mark.parametrize("n,d,k", [(17, 1, 3), (64, 3, 7), (200, 30, 10), (50, 300, 5)])
def test_knn_paths_bitwise_identical(n, d, k):
    rng = np.random.default_rng(n * 1000 + d)
    points = rng.standard_normal((n, d))
    queries = rng.standard_normal((n // 2, d))
    exclude = np.full(n // 2, -1, dtype=np.int64)
    (d2a, ra), (d2b, rb) = _both_knn(points, queries, k, exclude)
    assert np.array_equal(d2a, d2b)
    assert np.array_equal(ra, rb)


def test_knn_paths_identical_with_exclusion_and_ties():
    rng = np.random.default_rng(0)
    base = rng.standard_normal((8, 4))
    points = np.vstack([base, base])  # every point duplicated: forced ties
    queries = points[:5]
    exclude = np.array([0, 1, 2, -1, -1], dtype=np.int64)
    (d2a, ra), (d2b, rb) = _both_knn(points, queries, 6, exclude)
    assert np.array_equal(d2a, d2b)
    assert np.array_equal(ra, rb)
    # ties resolved toward the lower row index in both paths
    assert d2a[3][0] == 0.0 and ra[3][0] == 3


def test_assign_paths_bitwise_identical():
    rng = np.random.default_rng(1)
    points = rng.standard_normal((301, 12))
    centroids = rng.standard_normal((9, 12))
    la, ba = kernels._assign_nearest_numpy(points, centroids)
    if kernels.NUMBA_AVAILABLE:
        lb, bb = kernels._assign_nearest_numba(points, centroids)
    else:
        lb, bb = kernels._assign_nearest_py(points, centroids)
    assert np.array_equal(la, lb)
    assert np.array_equal(ba, bb)


def test_levenshtein_paths_identical():
    rng = np.random.default_rng(2)
    for _ in range(50):
        a = rng.integers(0, 5, size=rng.integers(0, 30)).astype(np.int64)
        b = rng.integers(0, 5, size=rng.integers(0, 30)).astype(np.int64)
        x = kernels._levenshtein_numpy(a, b)
        if kernels.NUMBA_AVAILABLE:
            y = kernels._levenshtein_numba(a, b)
        else:
            y = kernels._levenshtein_py(a, b)
        assert x == y


def test_knn_select_validation():
    points = np.zeros((3, 2))
    queries = np.zeros((2, 2))
    with pytest.raises(ValueError):
        kernels.knn_select(points, queries, 0)
    with pytest.raises(ValueError):
        kernels.knn_select(points, queries, 4)
    with pytest.raises(ValueError):
        kernels.knn_select(points, np.zeros((2, 3)), 1)
    # k == n works without exclusion but not with it
    kernels.knn_select(points, queries, 3)
    with pytest.raises(ValueError):
        kernels.knn_select(points, queries, 3, np.array([0, -1]))


def test_active_backend_reports_a_path():
    assert kernels.active_backend() in ("numba", "numpy")
