"""Heavy-tail analysis: rank-frequency fits, sentence-mean clustering, and
part-of-speech neighborhood purity.

Word counts use every token (stopwords included; classical rank-frequency
counts raw words). Log-log fits are ordinary least squares over all ranks by
default; an optional head truncation exists for fitting only the top ranks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import kernels
from .embeddings import Corpus, EmbeddingTable, PosTag
from .nnindex import NeighborIndex, PointSet


def zipf_mandelbrot(r: int, c: float, beta: float, alpha: float) -> float:
    """Generalized rank-frequency law c / (beta + r)^alpha."""
    if r < 1:
        raise ValueError("rank must be >= 1")
    if c <= 0 or beta < 0 or alpha <= 0:
        raise ValueError("requires c > 0, beta >= 0, alpha > 0")
    return c / (beta + r) ** alpha


@dataclass(frozen=True, eq=False)
class RankTable:
    """(rank, size) rows sorted by descending size; ranks are 1..n.

    Sizes are stored as floats so that exactly power-law-shaped synthetic
    tables can be fitted losslessly; corpus-derived tables hold integral
    counts.
    """

    ranks: np.ndarray   # (n,) int64, contiguous from 1
    sizes: np.ndarray   # (n,) float64, non-increasing, positive
    labels: tuple = ()  # optional per-row labels (token or cluster index)

    def __post_init__(self):
        ranks = np.ascontiguousarray(self.ranks, dtype=np.int64)
        sizes = np.ascontiguousarray(self.sizes, dtype=np.float64)
        if ranks.shape != sizes.shape or ranks.ndim != 1:
            raise ValueError("ranks and sizes must be 1-d and matched")
        if not np.array_equal(ranks, np.arange(1, ranks.size + 1)):
            raise ValueError("ranks must be contiguous from 1")
        if (sizes <= 0).any() or (np.diff(sizes) > 0).any():
            raise ValueError("sizes must be positive and non-increasing")
        if self.labels and len(self.labels) != ranks.size:
            raise ValueError("labels must match the number of rows")
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "sizes", sizes)

    def __len__(self) -> int:
        return int(self.ranks.size)


def rank_table_from_counts(counts: Mapping, tie_key=str) -> RankTable:
    """Rank items by descending count; ties by ascending ``tie_key(item)``."""
    items = sorted(counts.items(), key=lambda kv: (-kv[1], tie_key(kv[0])))
    if not items:
        raise ValueError("no counts to rank")
    sizes = np.array([c for _, c in items], dtype=np.float64)
    return RankTable(np.arange(1, len(items) + 1), sizes, tuple(k for k, _ in items))


def word_rank_table(corpus: Corpus) -> RankTable:
    """Token frequency rank table over the whole corpus (stopwords included)."""
    counts: dict[str, int] = {}
    for doc in corpus.documents:
        for tok in doc.all_tokens():
            counts[tok] = counts.get(tok, 0) + 1
    if not counts:
        raise ValueError("corpus has no tokens")
    return rank_table_from_counts(counts)


@dataclass(frozen=True)
class LogLogFit:
    slope: float
    intercept: float
    r_squared: float


def fit_loglog(table: RankTable, head: Optional[int] = None) -> LogLogFit:
    """Least-squares line through (ln rank, ln size).

    ``head`` restricts the fit to the top ``head`` ranks; default fits all.
    """
    n = len(table) if head is None else min(head, len(table))
    if n < 2:
        raise ValueError("log-log fit needs at least 2 ranks")
    x = np.log(table.ranks[:n].astype(np.float64))
    y = np.log(table.sizes[:n].astype(np.float64))
    if y.max() == y.min():  # flat data: exact zero slope, not float residue
        return LogLogFit(0.0, float(y[0]), 1.0)
    xm = x.mean()
    ym = y.mean()
    sxx = ((x - xm) ** 2).sum()
    slope = float(((x - xm) * (y - ym)).sum() / sxx)
    intercept = float(ym - slope * xm)
    ss_res = float(((y - (intercept + slope * x)) ** 2).sum())
    ss_tot = float(((y - ym) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return LogLogFit(slope, intercept, r_squared)


# ---------------------------------------------------------------------------
# k-means over sentence mean vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ClusterModel:
    k: int
    centroids: np.ndarray                 # (k, d)
    assignments: Mapping[str, int]        # point id -> cluster index
    inertia: float
    seed: int
    n_iter: int
    converged: bool
    point_ids: tuple = field(repr=False, default=())
    labels: np.ndarray = field(repr=False, default=None)  # (n,) aligned to point_ids

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


def _kmeans_pp_init(vectors: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: D^2-weighted draws after a uniform first pick."""
    n = vectors.shape[0]
    centroids = np.empty((k, vectors.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = vectors[first]
    d2 = ((vectors - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all remaining points coincide with a centroid; any pick works
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centroids[j] = vectors[idx]
        d2 = np.minimum(d2, ((vectors - centroids[j]) ** 2).sum(axis=1))
    return centroids


def kmeans_fit(
    points: Sequence,
    k: int,
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> ClusterModel:
    """Lloyd's algorithm with k-means++ seeding.

    ``points`` is a sequence of (id, vector) pairs. Iteration stops when the
    largest centroid movement drops below ``tol`` or after ``max_iter``
    rounds. Empty clusters are repaired by re-seeding with the point farthest
    from its assigned centroid. Deterministic given (points order, k, seed);
    the within-cluster inertia is checked to be non-increasing every step.
    """
    ids = tuple(str(p[0]) for p in points)
    vectors = np.ascontiguousarray([np.asarray(p[1], dtype=np.float64) for p in points])
    n = len(ids)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points ({n})")
    rng = np.random.Generator(np.random.PCG64(seed))
    centroids = _kmeans_pp_init(vectors, k, rng)

    prev_inertia = math.inf
    labels, d2 = kernels.assign_nearest(vectors, centroids)
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        # repair empty clusters before the update so every mean is defined
        counts = np.bincount(labels, minlength=k)
        for empty in np.flatnonzero(counts == 0):
            far = int(np.argmax(d2))
            counts[labels[far]] -= 1
            labels[far] = empty
            counts[empty] += 1
            d2[far] = 0.0
        new_centroids = np.empty_like(centroids)
        for j in range(k):
            new_centroids[j] = vectors[labels == j].mean(axis=0)
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        labels, d2 = kernels.assign_nearest(vectors, centroids)
        inertia = float(d2.sum())
        assert inertia <= prev_inertia * (1 + 1e-12) + 1e-12, "inertia increased"
        prev_inertia = inertia
        if shift < tol:
            converged = True
            break

    assignments = {pid: int(lab) for pid, lab in zip(ids, labels)}
    return ClusterModel(
        k=k, centroids=centroids, assignments=assignments,
        inertia=float(d2.sum()), seed=seed, n_iter=n_iter, converged=converged,
        point_ids=ids, labels=labels,
    )


def cluster_rank_table(model: ClusterModel) -> RankTable:
    """Cluster sizes ranked descending; ties by ascending cluster index."""
    sizes = model.cluster_sizes()
    counts = {int(j): int(sizes[j]) for j in range(model.k) if sizes[j] > 0}
    return rank_table_from_counts(counts, tie_key=int)


# ---------------------------------------------------------------------------
# Part-of-speech neighborhood purity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PosPurityReport:
    per_k: Mapping[int, float]   # neighbor count -> mean percentage in [0, 100]
    n_tokens: int


def pos_purity(
    table: EmbeddingTable,
    tags: Mapping[str, PosTag],
    ks: Sequence[int],
) -> PosPurityReport:
    """Mean percentage of same-tag neighbors among each word's k nearest.

    Only embedded tokens with a known tag participate, both as queries and as
    neighbor candidates. Neighbor ids are assigned in lexicographic token
    order, which fixes distance ties deterministically.
    """
    if not ks or min(ks) < 1:
        raise ValueError("ks must be positive")
    tokens = sorted(t for t in table.tokens if t in tags)
    kmax = max(ks)
    if len(tokens) < kmax + 1:
        raise ValueError(
            f"need at least max(ks)+1 = {kmax + 1} tagged embedded tokens, "
            f"got {len(tokens)}"
        )
    _, vectors = table.rows(tokens)
    tag_codes = np.array([list(PosTag).index(tags[t]) for t in tokens], dtype=np.int64)
    index = NeighborIndex(PointSet(np.arange(len(tokens), dtype=np.int64), vectors))
    _, nbr_ids = index.knn_batch(vectors, kmax, exclude_ids=np.arange(len(tokens)))
    same = tag_codes[nbr_ids] == tag_codes[:, np.newaxis]
    per_k = {
        int(k): float(same[:, :k].mean(axis=1).mean() * 100.0) for k in ks
    }
    return PosPurityReport(per_k, len(tokens))


# ---------------------------------------------------------------------------
# Sensitivity of the cluster-size fit to the choice of k
# ---------------------------------------------------------------------------

def k_sensitivity(points: Sequence, k_center: int, seed: int) -> list[tuple[int, float]]:
    """Cluster-size fit slope across k = k_center-20 .. k_center+20 step 5.

    Values are clipped to [2, n_points] and deduplicated; every clustering
    uses the same seed.
    """
    n = len(points)
    ks = sorted({min(max(k, 2), n) for k in range(k_center - 20, k_center + 21, 5)})
    out = []
    for k in ks:
        model = kmeans_fit(points, k, seed)
        out.append((k, fit_loglog(cluster_rank_table(model)).slope))
    return out
