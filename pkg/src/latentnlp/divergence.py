"""Entropy and KL divergence: categorical baselines and the k-NN estimator.

The categorical functions work on raw token lists via empirical frequencies.
The continuous estimator works on embedded samples: the integral inside the
Renyi-alpha divergence is estimated from k-th nearest-neighbor distances

    sigma_hat = B(k, alpha) * mean_i [ ((N-1) rho_k(X_i)^d) / (M nu_k(X_i)^d) ]^(1-alpha)

with rho_k the distance within the sample (self excluded by id), nu_k the
distance into the other sample, d the point dimension, and B(k, alpha) the
gamma-function bias constant. The KL estimate brackets alpha = 1 from both
sides and averages, since Renyi-alpha converges to KL as alpha -> 1.

Natural logarithms throughout. Neighbor distances are floored at
``DISTANCE_FLOOR`` before the ratio so that duplicate points (repeated words)
keep the estimate finite.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .embeddings import Document, EmbeddingTable, doc_sample_seed, sample_tokens
from .nnindex import NeighborIndex, NotEnoughPointsError, PointSet

DISTANCE_FLOOR = 1e-10


class DegenerateSampleError(ValueError):
    """All neighbor distances are zero on both sides; the samples carry no
    geometric information."""


class NoUsableCategoryError(ValueError):
    """No category retained a comparison member."""


# ---------------------------------------------------------------------------
# Categorical quantities
# ---------------------------------------------------------------------------

def empirical_entropy(tokens: Sequence[str]) -> float:
    """-sum p_i log p_i over the empirical token frequencies (nats)."""
    if not tokens:
        raise ValueError("empirical entropy needs a non-empty token list")
    counts = np.array(sorted(Counter(tokens).values()), dtype=np.float64)
    p = counts / counts.sum()
    return max(float(-(p * np.log(p)).sum()), 0.0)


def empirical_kl(
    p_tokens: Sequence[str],
    q_tokens: Sequence[str],
    smoothing: bool = False,
) -> Optional[float]:
    """Empirical KL divergence between two token samples.

    Without smoothing, a word present in p but absent from q makes the sum
    undefined and None is returned rather than a fabricated finite value.
    With ``smoothing`` every count over the union vocabulary gets +1
    (Laplace), which makes baseline classification runs total.
    """
    if not p_tokens or not q_tokens:
        raise ValueError("empirical KL needs two non-empty token lists")
    pc = Counter(p_tokens)
    qc = Counter(q_tokens)
    vocab = sorted(set(pc) | set(qc))
    if smoothing:
        n = len(p_tokens) + len(vocab)
        m = len(q_tokens) + len(vocab)
        terms = [
            (pc[w] + 1) / n * math.log(((pc[w] + 1) / n) / ((qc[w] + 1) / m))
            for w in vocab
        ]
    else:
        n = len(p_tokens)
        m = len(q_tokens)
        terms = []
        for w in vocab:
            if pc[w] == 0:
                continue
            if qc[w] == 0:
                return None
            terms.append(pc[w] / n * math.log((pc[w] / n) / (qc[w] / m)))
    return math.fsum(sorted(terms))


# ---------------------------------------------------------------------------
# k-NN Renyi / KL estimator
# ---------------------------------------------------------------------------

def b_k_alpha(k: int, alpha: float) -> float:
    """Gamma-function bias constant Gamma(k)^2 / (Gamma(k-a+1) Gamma(k+a-1)).

    Computed through log-gamma for stability. Defined for k > |alpha - 1|.
    """
    if k <= abs(alpha - 1):
        raise ValueError(f"b_k_alpha requires k > |alpha - 1|, got k={k}, alpha={alpha}")
    return math.exp(
        2 * math.lgamma(k) - math.lgamma(k - alpha + 1) - math.lgamma(k + alpha - 1)
    )


@dataclass(frozen=True)
class DivergenceEstimate:
    """A single Renyi-alpha divergence estimate: value = log(sigma_hat)/(alpha-1)."""

    value: float
    k: int
    alpha: float
    n: int
    m: int
    sigma_hat: float


@dataclass(frozen=True)
class KLEstimate:
    """KL estimate bracketing alpha = 1: the mean of the two Renyi estimates."""

    value: float
    k: int
    epsilon: float
    n: int
    m: int
    upper: DivergenceEstimate   # alpha = 1 + epsilon
    lower: DivergenceEstimate   # alpha = 1 - epsilon


def _check_sample_sizes(x: PointSet, y: PointSet, k: int):
    if k < 1:
        raise NotEnoughPointsError("k must be >= 1")
    if len(x) < k + 1:
        raise NotEnoughPointsError(f"need N >= k+1 points in x, got N={len(x)}, k={k}")
    if len(y) < k:
        raise NotEnoughPointsError(f"need M >= k points in y, got M={len(y)}, k={k}")
    if x.dimension != y.dimension:
        raise ValueError("x and y must share a dimension")


def _log_distance_ratio(x: PointSet, y: PointSet, k: int) -> np.ndarray:
    """Per-point log [ ((N-1) rho_k^d) / (M nu_k^d) ], distances floored."""
    n, m, d = len(x), len(y), x.dimension
    rho = NeighborIndex(x).kth_distances(x.vectors, k, exclude_ids=x.ids)
    nu = NeighborIndex(y).kth_distances(x.vectors, k)
    if not rho.any() and not nu.any():
        raise DegenerateSampleError(
            "all k-th neighbor distances are zero in both samples"
        )
    rho = np.maximum(rho, DISTANCE_FLOOR)
    nu = np.maximum(nu, DISTANCE_FLOOR)
    return math.log(n - 1) - math.log(m) + d * (np.log(rho) - np.log(nu))


def _sigma_from_log_ratio(log_ratio: np.ndarray, k: int, alpha: float) -> float:
    terms = np.exp((1.0 - alpha) * log_ratio)
    # id-independent summation order: sort the terms before reducing
    return b_k_alpha(k, alpha) * float(np.sort(terms).mean())


def sigma_hat(x: PointSet, y: PointSet, k: int, alpha: float) -> float:
    """Plug-in estimate of the integral inside the Renyi-alpha logarithm."""
    _check_sample_sizes(x, y, k)
    if k <= abs(alpha - 1):
        raise ValueError(f"requires k > |alpha - 1|, got k={k}, alpha={alpha}")
    return _sigma_from_log_ratio(_log_distance_ratio(x, y, k), k, alpha)


def renyi_divergence(x: PointSet, y: PointSet, k: int, alpha: float) -> DivergenceEstimate:
    """Renyi-alpha divergence estimate log(sigma_hat)/(alpha - 1)."""
    if alpha == 1.0:
        raise ValueError("alpha must differ from 1; use kl_estimate for the limit")
    sig = sigma_hat(x, y, k, alpha)
    return DivergenceEstimate(
        value=math.log(sig) / (alpha - 1.0),
        k=k, alpha=alpha, n=len(x), m=len(y), sigma_hat=sig,
    )


def kl_estimate(x: PointSet, y: PointSet, k: int, epsilon: float = 1e-5) -> KLEstimate:
    """KL divergence estimate: average of the alpha = 1 +/- epsilon brackets."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive (alpha = 1 divides by zero)")
    if k <= epsilon:
        raise ValueError(f"requires k > epsilon, got k={k}, epsilon={epsilon}")
    _check_sample_sizes(x, y, k)
    log_ratio = _log_distance_ratio(x, y, k)
    estimates = []
    for alpha in (1.0 + epsilon, 1.0 - epsilon):
        sig = _sigma_from_log_ratio(log_ratio, k, alpha)
        estimates.append(DivergenceEstimate(
            value=math.log(sig) / (alpha - 1.0),
            k=k, alpha=alpha, n=len(x), m=len(y), sigma_hat=sig,
        ))
    upper, lower = estimates
    return KLEstimate(
        value=0.5 * (upper.value + lower.value),
        k=k, epsilon=epsilon, n=len(x), m=len(y), upper=upper, lower=lower,
    )


# ---------------------------------------------------------------------------
# Category classification (equal-size samples per document)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassifyConfig:
    k: int
    n_sample: int
    seed: int
    epsilon: float = 1e-5


@dataclass(frozen=True)
class ClassificationOutcome:
    target_doc: str
    predicted_category: str
    per_category_mean: Mapping[str, float]


def _sample_points(
    doc: Document, cfg: ClassifyConfig, table: EmbeddingTable, stopwords: Iterable[str]
) -> PointSet:
    tokens = sample_tokens(doc, cfg.n_sample, doc_sample_seed(cfg.seed, doc.id), stopwords)
    kept, vectors = table.rows(tokens)
    if len(kept) < cfg.k + 1:
        raise NotEnoughPointsError(
            f"document {doc.id!r} has only {len(kept)} embeddable sampled tokens"
        )
    return PointSet(np.arange(len(kept), dtype=np.int64), vectors)


def classify_by_divergence(
    target: Document,
    categories: Mapping[str, Sequence[Document]],
    table: EmbeddingTable,
    stopwords: Iterable[str],
    cfg: ClassifyConfig,
) -> ClassificationOutcome:
    """Label the target with the category minimizing the mean KL estimate.

    Every document contributes an equal-size token sample (the N = M remedy
    for ratio-dominated estimates). The target is never compared against
    itself; ties between categories break lexicographically.
    """
    target_points = _sample_points(target, cfg, table, stopwords)
    per_category: dict[str, float] = {}
    for name in sorted(categories):
        values = []
        for member in categories[name]:
            if member.id == target.id:
                continue
            member_points = _sample_points(member, cfg, table, stopwords)
            values.append(
                kl_estimate(target_points, member_points, cfg.k, cfg.epsilon).value
            )
        if values:
            per_category[name] = float(np.mean(sorted(values)))
    if not per_category:
        raise NoUsableCategoryError("no category has a usable comparison member")
    predicted = min(per_category, key=lambda c: (per_category[c], c))
    return ClassificationOutcome(target.id, predicted, per_category)
