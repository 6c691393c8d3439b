import math

import numpy as np
import pytest

from latentnlp.embeddings import Corpus, Document, EmbeddingTable, PosTag, Sentence
from latentnlp.zipf import (
    ClusterModel,
    RankTable,
    cluster_rank_table,
    fit_loglog,
    k_sensitivity,
    kmeans_fit,
    pos_purity,
    rank_table_from_counts,
    word_rank_table,
    zipf_mandelbrot,
)


def power_law_table(c, alpha, n_ranks):
    ranks = np.arange(1, n_ranks + 1)
    return RankTable(ranks, c * ranks.astype(float) ** -alpha)


class TestZipfMandelbrot:
    def test_rank_one(self):
        assert zipf_mandelbrot(1, 1.0, 0.0, 1.0) == 1.0

    def test_rank_two(self):
        assert zipf_mandelbrot(2, 1.0, 0.0, 1.0) == 0.5

    def test_natural_language_shape(self):
        # alpha ~ 1, beta ~ 2.7: strictly decreasing, closed form
        vals = [zipf_mandelbrot(r, 1.0, 2.7, 1.0) for r in range(1, 20)]
        assert all(a > b > 0 for a, b in zip(vals, vals[1:]))
        assert vals[0] == pytest.approx(1 / 3.7, rel=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            zipf_mandelbrot(0, 1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            zipf_mandelbrot(1, 1.0, -0.1, 1.0)


def corpus_of_tokens(tokens):
    sentences = tuple(
        Sentence(f"s{i}", tuple(tokens[i * 50:(i + 1) * 50]), "")
        for i in range((len(tokens) + 49) // 50)
        if tokens[i * 50:(i + 1) * 50]
    )
    return Corpus((Document("d", {}, sentences),))


class TestWordRankTable:
    def test_basic_counts(self):
        table = word_rank_table(corpus_of_tokens(["a", "a", "a", "b", "b", "c"]))
        assert list(table.ranks) == [1, 2, 3]
        assert list(table.sizes) == [3, 2, 1]
        assert table.labels == ("a", "b", "c")

    def test_ties_break_lexicographically(self):
        table = word_rank_table(corpus_of_tokens(["z", "m", "a"]))
        assert table.labels == ("a", "m", "z")

    def test_single_type_rejected_by_fit(self):
        table = word_rank_table(corpus_of_tokens(["a", "a"]))
        assert len(table) == 1
        with pytest.raises(ValueError):
            fit_loglog(table)

    def test_zipf_sampler_recovers_exponent(self):
        # independent sampler oracle: draw 1e5 tokens from p(r) ~ r^-1.1
        rng = np.random.default_rng(1234)
        n_types = 5000
        p = np.arange(1, n_types + 1, dtype=np.float64) ** -1.1
        p /= p.sum()
        draws = rng.choice(n_types, size=100_000, p=p)
        tokens = [f"tok{i}" for i in draws]
        table = word_rank_table(corpus_of_tokens(tokens))
        fit = fit_loglog(table, head=100)
        assert fit.slope == pytest.approx(-1.1, abs=0.05)


class TestFitLogLog:
    def test_exact_minus_one(self):
        fit = fit_loglog(power_law_table(100.0, 1.0, 50))
        assert abs(fit.slope + 1.0) < 1e-9
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(100.0), abs=1e-9)

    def test_exact_minus_two(self):
        fit = fit_loglog(power_law_table(100.0, 2.0, 50))
        assert abs(fit.slope + 2.0) < 1e-9

    def test_perturbed_power_law(self):
        rng = np.random.default_rng(5)
        ranks = np.arange(1, 201)
        sizes = 1000.0 * ranks.astype(float) ** -1.3
        sizes *= 1.0 + rng.uniform(-0.05, 0.05, sizes.size)
        sizes = np.sort(sizes)[::-1]  # restore rank order after noise
        fit = fit_loglog(RankTable(ranks, sizes))
        assert fit.slope == pytest.approx(-1.3, abs=0.05)

    def test_needs_two_rows(self):
        with pytest.raises(ValueError):
            fit_loglog(RankTable(np.array([1]), np.array([5.0])))

    def test_flat_table_slope_zero(self):
        table = RankTable(np.arange(1, 6), np.full(5, 7.0))
        fit = fit_loglog(table)
        assert fit.slope == 0.0 and fit.r_squared == 1.0


def blobs(rng, centers, n_per, spread=0.05):
    points = []
    labels = []
    for ci, center in enumerate(centers):
        for j in range(n_per):
            points.append((f"c{ci}p{j}", center + rng.standard_normal(len(center)) * spread))
            labels.append(ci)
    return points, labels


class TestKMeans:
    def test_three_blobs_ari(self):
        from sklearn.metrics import adjusted_rand_score

        rng = np.random.default_rng(0)
        points, truth = blobs(rng, [np.array([0.0, 0]), np.array([5.0, 0]), np.array([0.0, 5])], 40)
        model = kmeans_fit(points, 3, seed=3)
        got = [model.assignments[pid] for pid, _ in points]
        assert adjusted_rand_score(truth, got) >= 0.99
        assert model.converged

    def test_k_equals_n(self):
        rng = np.random.default_rng(1)
        points = [(f"p{i}", rng.standard_normal(2)) for i in range(6)]
        model = kmeans_fit(points, 6, seed=0)
        assert model.inertia == pytest.approx(0.0, abs=1e-18)
        assert sorted(model.cluster_sizes()) == [1] * 6

    def test_duplicates_k1(self):
        points = [("a", [2.0, 2.0]), ("b", [2.0, 2.0]), ("c", [2.0, 2.0])]
        model = kmeans_fit(points, 1, seed=0)
        np.testing.assert_array_equal(model.centroids, [[2.0, 2.0]])
        assert model.inertia == 0.0

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(2)
        points = [(f"p{i}", rng.standard_normal(4)) for i in range(60)]
        a = kmeans_fit(points, 5, seed=11)
        b = kmeans_fit(points, 5, seed=11)
        assert a.assignments == b.assignments
        np.testing.assert_array_equal(a.centroids, b.centroids)
        assert a.inertia == b.inertia

    def test_validation(self):
        points = [("a", [0.0]), ("b", [1.0])]
        with pytest.raises(ValueError):
            kmeans_fit(points, 3, seed=0)
        with pytest.raises(ValueError):
            kmeans_fit(points, 0, seed=0)

    def test_empty_cluster_repair_keeps_k_clusters(self):
        # two far groups and k=3 forces a repair somewhere along the way
        rng = np.random.default_rng(4)
        points, _ = blobs(rng, [np.zeros(2), np.array([9.0, 0])], 25, spread=0.01)
        model = kmeans_fit(points, 3, seed=1)
        assert model.cluster_sizes().sum() == 50


class TestClusterRankTable:
    def _model_with_sizes(self, sizes):
        labels = np.repeat(np.arange(len(sizes)), sizes)
        ids = tuple(f"p{i}" for i in range(labels.size))
        return ClusterModel(
            k=len(sizes), centroids=np.zeros((len(sizes), 2)),
            assignments={pid: int(l) for pid, l in zip(ids, labels)},
            inertia=0.0, seed=0, n_iter=1, converged=True,
            point_ids=ids, labels=labels,
        )

    def test_sizes_ranked(self):
        table = cluster_rank_table(self._model_with_sizes([5, 3, 1]))
        assert list(table.sizes) == [5, 3, 1]
        assert list(table.ranks) == [1, 2, 3]

    def test_sizes_sum_to_points(self):
        model = self._model_with_sizes([4, 4, 2, 7])
        table = cluster_rank_table(model)
        assert table.sizes.sum() == 17

    def test_tie_break_by_cluster_index(self):
        table = cluster_rank_table(self._model_with_sizes([3, 3, 3]))
        assert table.labels == (0, 1, 2)

    def test_all_equal_sizes_slope_zero(self):
        table = cluster_rank_table(self._model_with_sizes([4, 4, 4, 4]))
        assert fit_loglog(table).slope == 0.0

    def test_planted_power_law_membership(self):
        # memberships sampled with probability ~ r^-1: the ranked sizes
        # should fit a slope near -1
        rng = np.random.default_rng(7)
        n_clusters = 30
        p = np.arange(1, n_clusters + 1, dtype=np.float64) ** -1.0
        p /= p.sum()
        labels = rng.choice(n_clusters, size=20_000, p=p)
        sizes = np.bincount(labels, minlength=n_clusters)
        model = self._model_with_sizes(sizes.tolist())
        fit = fit_loglog(cluster_rank_table(model))
        assert fit.slope == pytest.approx(-1.0, abs=0.15)


class TestPosPurity:
    def test_perfectly_separated_pairs(self):
        table = EmbeddingTable.from_entries({
            "na": [0.0, 0.0], "nb": [0.1, 0.0],
            "va": [50.0, 0.0], "vb": [50.1, 0.0],
        })
        tags = {"na": PosTag.NOUN, "nb": PosTag.NOUN, "va": PosTag.VERB, "vb": PosTag.VERB}
        report = pos_purity(table, tags, [1])
        assert report.per_k[1] == 100.0

    def test_random_tags_near_class_frequency_null(self):
        rng = np.random.default_rng(3)
        n = 2000
        table = EmbeddingTable.from_entries(
            {f"t{i}": rng.standard_normal(4) for i in range(n)}
        )
        tag_list = list(PosTag)
        assigned = rng.integers(0, len(tag_list), n)
        tags = {f"t{i}": tag_list[assigned[i]] for i in range(n)}
        report = pos_purity(table, tags, [5])
        counts = np.bincount(assigned, minlength=6)
        null = float((counts / n * (counts - 1) / (n - 1)).sum() * 100)
        assert report.per_k[5] == pytest.approx(null, abs=3.0)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(9)
        base = {f"t{i}": rng.standard_normal(3) for i in range(40)}
        tags = {t: list(PosTag)[i % 6] for i, t in enumerate(sorted(base))}
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        rotated = {t: q @ v for t, v in base.items()}
        r1 = pos_purity(EmbeddingTable.from_entries(base), tags, [1, 3, 5])
        r2 = pos_purity(EmbeddingTable.from_entries(rotated), tags, [1, 3, 5])
        assert r1.per_k == r2.per_k

    def test_insufficient_tokens(self):
        table = EmbeddingTable.from_entries({"a": [0.0], "b": [1.0]})
        tags = {"a": PosTag.NOUN, "b": PosTag.NOUN}
        with pytest.raises(ValueError):
            pos_purity(table, tags, [5])

    def test_untagged_and_unembedded_excluded(self):
        table = EmbeddingTable.from_entries({
            "na": [0.0], "nb": [0.2], "xx": [0.1],  # xx embedded but untagged
        })
        tags = {"na": PosTag.NOUN, "nb": PosTag.NOUN, "missing": PosTag.VERB}
        report = pos_purity(table, tags, [1])
        assert report.n_tokens == 2
        assert report.per_k[1] == 100.0  # xx never shows up as a neighbor


class TestKSensitivity:
    def test_sweep_range_and_stability(self):
        # 40 well-separated blobs whose sizes follow r^-1: cluster structure
        # is robust, so the fitted slope should move little with k
        rng = np.random.default_rng(12)
        p = np.arange(1, 41, dtype=np.float64) ** -1.0
        p /= p.sum()
        sizes = rng.multinomial(1200, p)
        centers = rng.standard_normal((40, 10)) * 30.0
        points = []
        for ci, (size, center) in enumerate(zip(sizes, centers)):
            for j in range(size):
                points.append((f"c{ci}p{j}", center + rng.standard_normal(10) * 0.05))
        result = k_sensitivity(points, k_center=40, seed=5)
        ks = [k for k, _ in result]
        assert ks == sorted(set(ks))
        assert min(ks) >= 2 and max(ks) <= len(points)
        assert ks == [20, 25, 30, 35, 40, 45, 50, 55, 60]
        slopes = [s for _, s in result]
        assert max(slopes) - min(slopes) < 0.3

    def test_clip_to_valid_range(self):
        rng = np.random.default_rng(1)
        points = [(f"p{i}", rng.standard_normal(2)) for i in range(10)]
        result = k_sensitivity(points, k_center=5, seed=0)
        assert all(2 <= k <= 10 for k, _ in result)
