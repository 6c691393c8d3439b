"""Recommendation-variety metrics across and within suggestion algorithms.

Suggestion identity is the sentence id (corpora may repeat raw text under
distinct ids). All functions are pure aggregations over immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .simsearch import SuggestionResult, jaccard


@dataclass(frozen=True)
class IntraJaccardStat:
    value: float
    queries_used: int
    queries_skipped: int


@dataclass(frozen=True)
class VarietyReport:
    unique_pct: Mapping[str, float]
    # (algorithm, stopwords_removed) -> mean pairwise jaccard
    intra_jaccard: Mapping[tuple[str, bool], IntraJaccardStat]


def _check_aligned(runs: Mapping[str, Sequence[SuggestionResult]]):
    if not runs:
        raise ValueError("no algorithm runs supplied")
    reference = None
    for name, results in runs.items():
        signature = [(res.query_id, res.params.get("t")) for res in results]
        if reference is None:
            reference = signature
        elif signature != reference:
            raise ValueError(
                f"algorithm {name!r} ran on a different query list or t"
            )


def unique_suggestion_pct(
    runs: Mapping[str, Sequence[SuggestionResult]],
) -> dict[str, float]:
    """Per algorithm: percentage of its suggestions that no other algorithm
    also returned for the same query."""
    _check_aligned(runs)
    names = sorted(runs)
    n_queries = len(runs[names[0]])
    out: dict[str, float] = {}
    for name in names:
        total = 0
        unique = 0
        for qi in range(n_queries):
            others: set[str] = set()
            for other in names:
                if other != name:
                    others.update(runs[other][qi].sentence_ids())
            for sid in runs[name][qi].sentence_ids():
                total += 1
                if sid not in others:
                    unique += 1
        out[name] = 100.0 * unique / total if total else 0.0
    return out


def intra_jaccard(
    run: Sequence[SuggestionResult],
    stopwords: Iterable[str] = (),
    remove: bool = False,
) -> IntraJaccardStat:
    """Mean over queries of the mean pairwise Jaccard among one algorithm's
    suggestions. Queries with fewer than two suggestions are skipped and
    counted rather than failing the run."""
    stop = frozenset(stopwords) if remove else frozenset()
    per_query: list[float] = []
    skipped = 0
    for res in run:
        token_sets = [s.sentence.token_set - stop for s in res.suggestions]
        pairs: list[float] = []
        for i in range(len(token_sets)):
            for j in range(i + 1, len(token_sets)):
                value = jaccard(token_sets[i], token_sets[j])
                if value is not None:
                    pairs.append(value)
        if len(res.suggestions) < 2 or not pairs:
            skipped += 1
            continue
        per_query.append(sum(pairs) / len(pairs))
    value = sum(per_query) / len(per_query) if per_query else 0.0
    return IntraJaccardStat(value, len(per_query), skipped)


def variety_report(
    runs: Mapping[str, Sequence[SuggestionResult]],
    stopwords: Iterable[str] = (),
) -> VarietyReport:
    """Uniqueness percentages plus both stopword variants of intra-jaccard."""
    pct = unique_suggestion_pct(runs)
    intra: dict[tuple[str, bool], IntraJaccardStat] = {}
    for name in sorted(runs):
        for remove in (False, True):
            intra[(name, remove)] = intra_jaccard(runs[name], stopwords, remove)
    return VarietyReport(pct, intra)
