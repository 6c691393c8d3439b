"""Similar-sentence search: greedy set cover over embedding neighborhoods,
plus the AVG / WMD / Jaccard / Levenshtein baselines behind one interface.

The database holds only candidate sentences (token count within
[min_tokens, max_tokens]); everything shorter or longer is excluded at build
time, which also keeps the vocabulary index compact. All ranking ties break
by ascending sentence id, and the query sentence is excluded from results by
id only: a different sentence with identical text is a legitimate match.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from . import kernels
from .embeddings import Document, EmbeddingTable, Sentence
from .nnindex import NeighborIndex, PointSet

ALGORITHMS = ("set_cover", "avg", "wmd", "jaccard", "levenshtein")


class EmptyDatabaseError(ValueError):
    """No candidate sentences survive the length filters."""


class UnembeddableQueryError(ValueError):
    """The query has no embeddable non-stopword token, required by AVG/WMD."""


@dataclass(frozen=True)
class TargetSet:
    """The words a suggestion round still wants covered (U of the greedy loop)."""

    tokens: frozenset[str]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Suggestion:
    sentence: Sentence
    score: float
    covered: frozenset[str] = frozenset()


@dataclass(frozen=True)
class SuggestionResult:
    suggestions: tuple[Suggestion, ...]
    algorithm: str
    params: Mapping[str, float]
    truncated: bool = False
    query_id: Optional[str] = None

    def sentence_ids(self) -> list[str]:
        return [s.sentence.id for s in self.suggestions]


@dataclass(eq=False)
class SentenceDatabase:
    """Candidate sentences plus the embedded-vocabulary neighbor index."""

    sentences: tuple[Sentence, ...]
    vocab: frozenset[str]
    stopwords: frozenset[str]
    table: EmbeddingTable
    min_tokens: int = 5
    max_tokens: int = 15
    doc_of: Mapping[str, str] = field(default_factory=dict)

    _vocab_tokens: tuple[str, ...] = field(init=False, repr=False)
    _vocab_row: dict = field(init=False, repr=False)
    _vocab_index: Optional[NeighborIndex] = field(init=False, repr=False)
    _by_id: dict = field(init=False, repr=False)
    _means: dict = field(init=False, repr=False)

    def __post_init__(self):
        # lexicographic token order assigns the index ids, fixing all ties
        vocab_tokens = tuple(t for t in sorted(self.vocab) if t in self.table)
        self._vocab_tokens = vocab_tokens
        self._vocab_row = {t: i for i, t in enumerate(vocab_tokens)}
        if vocab_tokens:
            _, vectors = self.table.rows(vocab_tokens)
            self._vocab_index = NeighborIndex(
                PointSet(np.arange(len(vocab_tokens), dtype=np.int64), vectors)
            )
        else:
            self._vocab_index = None
        self._by_id = {s.id: s for s in self.sentences}
        if len(self._by_id) != len(self.sentences):
            raise ValueError("sentence ids in the database must be unique")
        self._means = {}
        for s in self.sentences:
            kept, vecs = self.table.rows(
                [t for t in s.tokens if t not in self.stopwords]
            )
            if kept:
                self._means[s.id] = vecs.mean(axis=0)

    @classmethod
    def build(
        cls,
        sentences: Iterable[Sentence],
        table: EmbeddingTable,
        stopwords: Iterable[str] = (),
        min_tokens: int = 5,
        max_tokens: int = 15,
        doc_of: Optional[Mapping[str, str]] = None,
    ) -> "SentenceDatabase":
        kept = tuple(
            s for s in sentences if min_tokens <= len(s.tokens) <= max_tokens
        )
        vocab = frozenset(t for s in kept for t in s.tokens)
        return cls(
            sentences=kept, vocab=vocab, stopwords=frozenset(stopwords),
            table=table, min_tokens=min_tokens, max_tokens=max_tokens,
            doc_of=dict(doc_of or {}),
        )

    @classmethod
    def from_documents(cls, documents: Sequence[Document], table, stopwords=(),
                       min_tokens: int = 5, max_tokens: int = 15) -> "SentenceDatabase":
        doc_of = {s.id: d.id for d in documents for s in d.sentences}
        return cls.build(
            (s for d in documents for s in d.sentences),
            table, stopwords, min_tokens, max_tokens, doc_of,
        )

    def __len__(self) -> int:
        return len(self.sentences)

    def sentence(self, sentence_id: str) -> Optional[Sentence]:
        return self._by_id.get(sentence_id)

    # -- neighborhood machinery ------------------------------------------

    def ball(self, word: str, r: int) -> frozenset[str]:
        """The r nearest embedded vocabulary words to ``word`` (itself excluded).

        Empty when the word has no embedding; smaller than r only when the
        vocabulary itself is smaller.
        """
        if r < 0:
            raise ValueError("r must be >= 0")
        if r == 0 or self._vocab_index is None or word not in self.table:
            return frozenset()
        vector = self.table.get(word)
        own_row = self._vocab_row.get(word)
        n_avail = len(self._vocab_tokens) - (0 if own_row is None else 1)
        k = min(r, n_avail)
        if k == 0:
            return frozenset()
        exclude = None if own_row is None else [own_row]
        _, ids = self._vocab_index.knn_batch(vector[np.newaxis, :], k, exclude)
        return frozenset(self._vocab_tokens[i] for i in ids[0])

    def build_target_set(
        self,
        query: Sentence,
        r: int,
        include_query_words: bool = True,
    ) -> TargetSet:
        """Union of the query words' balls, optionally plus the query's own
        in-vocabulary words, minus stopwords."""
        target: set[str] = set()
        for tok in sorted(set(query.tokens)):
            target |= self.ball(tok, r)
        if include_query_words:
            target |= set(query.tokens) & self.vocab
        return TargetSet(frozenset(target - self.stopwords))


# ---------------------------------------------------------------------------
# Pairwise measures
# ---------------------------------------------------------------------------

def jaccard(a: Iterable[str], b: Iterable[str]) -> Optional[float]:
    """|a & b| / |a | b|; None when both sets are empty (undefined)."""
    a = set(a)
    b = set(b)
    union = a | b
    if not union:
        return None
    return len(a & b) / len(union)


def levenshtein(a: str, b: str) -> int:
    """Character-level edit distance with unit insert/delete/substitute."""
    codes_a = np.array([ord(c) for c in a], dtype=np.int64)
    codes_b = np.array([ord(c) for c in b], dtype=np.int64)
    return kernels.levenshtein_codes(codes_a, codes_b)


def levenshtein_tokens(a: Sequence[str], b: Sequence[str]) -> int:
    """Token-level edit distance (tokens compared as whole symbols)."""
    symbols = {t: i for i, t in enumerate(dict.fromkeys([*a, *b]))}
    codes_a = np.array([symbols[t] for t in a], dtype=np.int64)
    codes_b = np.array([symbols[t] for t in b], dtype=np.int64)
    return kernels.levenshtein_codes(codes_a, codes_b)


def _nbow(sentence: Sentence, table: EmbeddingTable, stopwords) -> tuple[np.ndarray, np.ndarray]:
    """Normalized bag-of-words weights and vectors over embeddable
    non-stopword tokens, in first-occurrence order."""
    counts: dict[str, int] = {}
    for tok in sentence.tokens:
        if tok not in stopwords and tok in table:
            counts[tok] = counts.get(tok, 0) + 1
    if not counts:
        raise UnembeddableQueryError(
            f"sentence {sentence.id!r} has no embeddable non-stopword token"
        )
    tokens = list(counts)
    _, vectors = table.rows(tokens)
    weights = np.array([counts[t] for t in tokens], dtype=np.float64)
    return weights / weights.sum(), vectors


def wmd(a: Sentence, b: Sentence, table: EmbeddingTable, stopwords=()) -> float:
    """Word mover's distance: the optimal transport cost between the two
    sentences' normalized bag-of-words masses under Euclidean ground distance.

    Solved exactly as a balanced transportation LP; sentences are short
    (the database caps them at 15 tokens), so exact solves are cheap.
    """
    wa, va = _nbow(a, table, stopwords)
    wb, vb = _nbow(b, table, stopwords)
    n, m = wa.size, wb.size
    dist = np.sqrt(((va[:, np.newaxis, :] - vb[np.newaxis, :, :]) ** 2).sum(axis=2))
    if n == 1 or m == 1:
        # all mass moves straight across; no LP needed
        return float((dist * np.outer(wa, wb)).sum())
    # flow variables f_ij >= 0; row sums = wa, column sums = wb
    a_eq = np.zeros((n + m, n * m))
    for i in range(n):
        a_eq[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        a_eq[n + j, j::m] = 1.0
    res = linprog(
        dist.ravel(), A_eq=a_eq, b_eq=np.concatenate([wa, wb]),
        bounds=(0, None), method="highs",
    )
    if not res.success:  # pragma: no cover - balanced problems are feasible
        raise RuntimeError(f"transportation solve failed: {res.message}")
    return float(res.fun)


# ---------------------------------------------------------------------------
# Suggestion algorithms
# ---------------------------------------------------------------------------

def _result(suggestions, algorithm, t, r, rho, query, truncated=False) -> SuggestionResult:
    return SuggestionResult(
        suggestions=tuple(suggestions),
        algorithm=algorithm,
        params={"t": t, "r": r, "rho": rho},
        truncated=truncated,
        query_id=query.id,
    )


def set_cover_suggest(
    db: SentenceDatabase,
    query: Sentence,
    t: int,
    r: int,
    rho: float = 0.5,
    include_query_words: bool = True,
) -> SuggestionResult:
    """Greedy set-cover suggestion rounds.

    Each round picks the sentence maximizing |U & s| / |s|^rho over the
    remaining candidates (|s| = unique-token count, ties by ascending id),
    removes its covered words from the target set U, and retires it from
    candidacy. Stops early (flagged) once no candidate covers anything.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if rho < 0:
        raise ValueError("rho must be >= 0")
    if not db.sentences:
        raise EmptyDatabaseError("no candidate sentences in the database")
    remaining = set(db.build_target_set(query, r, include_query_words).tokens)
    candidates = sorted(
        (s for s in db.sentences if s.id != query.id), key=lambda s: s.id
    )
    picked: list[Suggestion] = []
    truncated = False
    for _ in range(t):
        best: Optional[Sentence] = None
        best_score = 0.0
        best_cover: frozenset[str] = frozenset()
        for s in candidates:
            cover = remaining & s.token_set
            if not cover:
                continue
            score = len(cover) / len(s.token_set) ** rho
            if score > best_score:  # id-sorted scan: strict > keeps lowest id
                best, best_score, best_cover = s, score, frozenset(cover)
        if best is None:
            truncated = True
            break
        picked.append(Suggestion(best, best_score, best_cover))
        remaining -= best_cover
        candidates.remove(best)
    return _result(picked, "set_cover", t, r, rho, query, truncated)


def _ranked(db, query, t, key_of, algorithm, r, rho, ascending=True) -> SuggestionResult:
    """Shared ranking skeleton for the pointwise baselines."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if not db.sentences:
        raise EmptyDatabaseError("no candidate sentences in the database")
    scored = []
    for s in db.sentences:
        if s.id == query.id:
            continue
        score = key_of(s)
        if score is None:
            continue
        scored.append((score if ascending else -score, s.id, score, s))
    scored.sort(key=lambda row: (row[0], row[1]))
    picked = [Suggestion(s, float(score)) for _, _, score, s in scored[:t]]
    return _result(picked, algorithm, t, r, rho, query, truncated=len(picked) < t)


def avg_suggest(db: SentenceDatabase, query: Sentence, t: int) -> SuggestionResult:
    """Rank by Euclidean distance between stopword-filtered mean embeddings."""
    kept, vecs = db.table.rows([tok for tok in query.tokens if tok not in db.stopwords])
    if not kept:
        raise UnembeddableQueryError(
            f"query {query.id!r} has no embeddable non-stopword token"
        )
    qmean = vecs.mean(axis=0)

    def key_of(s: Sentence):
        mean = db._means.get(s.id)
        if mean is None:
            return None
        return float(math.sqrt(((qmean - mean) ** 2).sum()))

    return _ranked(db, query, t, key_of, "avg", 0, 0.0)


def wmd_suggest(db: SentenceDatabase, query: Sentence, t: int) -> SuggestionResult:
    _nbow(query, db.table, db.stopwords)  # raises if unembeddable

    def key_of(s: Sentence):
        try:
            return wmd(query, s, db.table, db.stopwords)
        except UnembeddableQueryError:
            return None

    return _ranked(db, query, t, key_of, "wmd", 0, 0.0)


def jaccard_suggest(db: SentenceDatabase, query: Sentence, t: int) -> SuggestionResult:
    qset = set(query.tokens) - db.stopwords

    def key_of(s: Sentence):
        return jaccard(qset, s.token_set - db.stopwords)

    return _ranked(db, query, t, key_of, "jaccard", 0, 0.0, ascending=False)


def levenshtein_suggest(
    db: SentenceDatabase, query: Sentence, t: int, unit: str = "char"
) -> SuggestionResult:
    """Edit-distance baseline on raw text; stopwords are kept."""
    if unit not in ("char", "token"):
        raise ValueError("unit must be 'char' or 'token'")

    def key_of(s: Sentence):
        if unit == "char":
            return float(levenshtein(query.raw_text, s.raw_text))
        return float(levenshtein_tokens(query.tokens, s.tokens))

    return _ranked(db, query, t, key_of, "levenshtein", 0, 0.0)


def suggest(
    db: SentenceDatabase,
    query: Sentence,
    algorithm: str,
    t: int = 5,
    r: int = 10,
    rho: float = 0.5,
    ld_unit: str = "char",
    include_query_words: bool = True,
) -> SuggestionResult:
    """Dispatch to one of the five suggestion algorithms.

    The query sentence itself is never returned (matched by id); WMD and
    Levenshtein rank ascending, Jaccard descending, set cover by its greedy
    rounds. An empty database yields an empty, truncated result rather than
    an error.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    try:
        if algorithm == "set_cover":
            return set_cover_suggest(db, query, t, r, rho, include_query_words)
        if algorithm == "avg":
            result = avg_suggest(db, query, t)
        elif algorithm == "wmd":
            result = wmd_suggest(db, query, t)
        elif algorithm == "jaccard":
            result = jaccard_suggest(db, query, t)
        else:
            result = levenshtein_suggest(db, query, t, ld_unit)
    except EmptyDatabaseError:
        return _result([], algorithm, t, r, rho, query, truncated=True)
    return replace(result, params={"t": t, "r": r, "rho": rho})
