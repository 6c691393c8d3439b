"""Exact nearest-neighbor queries over point sets in R^d.

The exact brute-force scan is the reference backend. Anything approximate may
be swapped in behind the same query surface, but only after it passes
:func:`check_backend` (monotonicity plus >= 99% recall@k against the exact
scan on random data).

Ties are always broken by ascending point id so that results are reproducible
across runs and implementations. Self-exclusion is by point identity, not by
zero distance: duplicate coordinates legitimately occur (repeated words embed
to the same vector) and must remain candidates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels


class NotEnoughPointsError(ValueError):
    """Raised when a query asks for more neighbors than the index holds."""


@dataclass(frozen=True, eq=False)
class PointSet:
    """Immutable id-tagged point collection; rows are sorted by id."""

    ids: np.ndarray       # (n,) int64, strictly increasing
    vectors: np.ndarray   # (n, d) float64

    def __post_init__(self):
        ids = np.ascontiguousarray(self.ids, dtype=np.int64)
        vectors = np.ascontiguousarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise ValueError("vectors must be a 2-d array")
        if ids.shape[0] != vectors.shape[0]:
            raise ValueError("ids and vectors must have matching length")
        if vectors.shape[1] < 1:
            raise ValueError("dimension must be >= 1")
        if ids.size and np.unique(ids).size != ids.size:
            raise ValueError("point ids must be unique")
        order = np.argsort(ids, kind="stable")
        object.__setattr__(self, "ids", ids[order])
        object.__setattr__(self, "vectors", vectors[order])
        self.ids.setflags(write=False)
        self.vectors.setflags(write=False)

    @classmethod
    def from_pairs(cls, pairs) -> "PointSet":
        """Build from an iterable of (id, vector) pairs."""
        pairs = list(pairs)
        if not pairs:
            raise ValueError("point set needs at least one point")
        ids = np.array([p[0] for p in pairs], dtype=np.int64)
        vectors = np.array([np.asarray(p[1], dtype=np.float64) for p in pairs])
        return cls(ids, vectors)

    @classmethod
    def from_matrix(cls, vectors) -> "PointSet":
        """Rows become points with ids 0..n-1."""
        vectors = np.asarray(vectors, dtype=np.float64)
        return cls(np.arange(vectors.shape[0], dtype=np.int64), vectors)

    def __len__(self) -> int:
        return int(self.ids.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[1])


@dataclass(frozen=True, eq=False)
class NeighborIndex:
    """Exact Euclidean k-NN index; immutable and safe for concurrent reads."""

    points: PointSet
    backend: str = "exact"

    _row_of_id: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_row_of_id",
            {int(i): r for r, i in enumerate(self.points.ids)},
        )

    def __len__(self) -> int:
        return len(self.points)

    def _exclude_rows(self, n_queries: int, exclude_ids) -> np.ndarray:
        rows = np.full(n_queries, -1, dtype=np.int64)
        if exclude_ids is None:
            return rows
        exclude_ids = np.atleast_1d(np.asarray(exclude_ids, dtype=np.int64))
        if exclude_ids.shape[0] != n_queries:
            raise ValueError("exclude_ids must have one entry per query")
        for i, eid in enumerate(exclude_ids):
            rows[i] = self._row_of_id.get(int(eid), -1)
        return rows

    def _check_k(self, k: int, any_excluded: bool):
        if k < 1:
            raise NotEnoughPointsError("k must be >= 1")
        avail = len(self.points) - (1 if any_excluded else 0)
        if k > avail:
            raise NotEnoughPointsError(
                f"k={k} but only {avail} candidate points are available"
            )

    def knn_batch(self, queries, k: int, exclude_ids=None):
        """Batched k nearest neighbors.

        Returns ``(distances, ids)`` arrays of shape (nq, k), each row
        ascending by (distance, id). ``exclude_ids[i]`` removes the point with
        that id (if present) from query i's candidates.
        """
        queries = np.ascontiguousarray(np.atleast_2d(queries), dtype=np.float64)
        rows = self._exclude_rows(queries.shape[0], exclude_ids)
        self._check_k(k, bool((rows >= 0).any()))
        d2, sel = kernels.knn_select(self.points.vectors, queries, k, rows)
        return np.sqrt(d2), self.points.ids[sel]

    def kth_distances(self, queries, k: int, exclude_ids=None) -> np.ndarray:
        """Distance from each query to its k-th nearest neighbor."""
        dists, _ = self.knn_batch(queries, k, exclude_ids)
        return dists[:, k - 1]

    def knn(self, query, k: int, exclude_id: int | None = None):
        """k nearest (id, distance) pairs for one query, nearest first."""
        ex = None if exclude_id is None else [exclude_id]
        dists, ids = self.knn_batch(np.atleast_2d(query), k, ex)
        return [(int(i), float(d)) for i, d in zip(ids[0], dists[0])]

    def kth_distance(self, query, k: int, exclude_id: int | None = None) -> float:
        """Euclidean distance from the query to its k-th nearest point."""
        return self.knn(query, k, exclude_id)[k - 1][1]


@dataclass(frozen=True)
class BackendReport:
    monotone: bool
    recall_at_k: float

    @property
    def passed(self) -> bool:
        return self.monotone and self.recall_at_k >= 0.99


def check_backend(build_index, *, n=256, d=8, n_queries=64, k=10, seed=0) -> BackendReport:
    """Qualify a substitute index backend against the exact scan.

    ``build_index(point_set)`` must return an object with the
    :class:`NeighborIndex` query surface. The candidate must show
    non-decreasing k-th distances in k and >= 99% recall@k on random data
    before it may replace the exact backend.
    """
    rng = np.random.default_rng(seed)
    pts = PointSet.from_matrix(rng.standard_normal((n, d)))
    queries = rng.standard_normal((n_queries, d))
    candidate = build_index(pts)
    exact = NeighborIndex(pts)

    monotone = True
    for q in queries:
        prev = -np.inf
        for kk in range(1, k + 1):
            cur = candidate.kth_distance(q, kk)
            if cur < prev:
                monotone = False
            prev = cur

    hits = 0
    for q in queries:
        truth = {i for i, _ in exact.knn(q, k)}
        got = {i for i, _ in candidate.knn(q, k)}
        hits += len(truth & got)
    return BackendReport(monotone=monotone, recall_at_k=hits / (n_queries * k))
