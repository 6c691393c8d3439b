"""Word-vector ingestion, corpora, tokenization, and token sampling.

All types here are immutable after construction and safe to share across
threads. Out-of-vocabulary tokens are silently skipped by embedding-space
operations (``sentence_mean`` and everything downstream of it) but are kept
for categorical operations such as Jaccard overlap and frequency counts.
"""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional

import numpy as np

logger = logging.getLogger(__name__)


class VectorFileError(ValueError):
    """Raised for unusable word-vector files."""


class CorpusFormatError(ValueError):
    """Raised for malformed corpus / stopword / tag files."""


class InsufficientTokensError(ValueError):
    """Raised when a document cannot supply the requested sample size."""

    def __init__(self, doc_id: str, available: int, requested: int):
        self.doc_id = doc_id
        self.available = available
        self.requested = requested
        super().__init__(
            f"document {doc_id!r} has {available} usable tokens, "
            f"{requested} requested (short by {requested - available})"
        )


class PosTag(enum.Enum):
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    PRON = "PRON"
    OTHER = "OTHER"


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """token -> d-dimensional vector map backed by one contiguous matrix."""

    dimension: int
    tokens: tuple[str, ...]
    matrix: np.ndarray          # (n, dimension) float64, row i <-> tokens[i]
    skipped_lines: int = 0      # malformed input lines, informational only

    _row_of: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise VectorFileError("embedding dimension must be >= 1")
        if self.matrix.shape != (len(self.tokens), self.dimension):
            raise VectorFileError("matrix shape does not match token count")
        row_of = {}
        for i, tok in enumerate(self.tokens):
            if tok in row_of:
                raise VectorFileError(f"duplicate token {tok!r}")
            row_of[tok] = i
        object.__setattr__(self, "_row_of", row_of)
        self.matrix.setflags(write=False)

    @classmethod
    def from_entries(cls, entries: Mapping[str, Iterable[float]], skipped_lines: int = 0):
        tokens = tuple(entries)
        matrix = np.array([np.asarray(entries[t], dtype=np.float64) for t in tokens])
        if matrix.ndim != 2:
            raise VectorFileError("all vectors must have identical length")
        return cls(matrix.shape[1], tokens, matrix, skipped_lines)

    def __contains__(self, token: str) -> bool:
        return token in self._row_of

    def __len__(self) -> int:
        return len(self.tokens)

    def get(self, token: str) -> Optional[np.ndarray]:
        row = self._row_of.get(token)
        return None if row is None else self.matrix[row]

    def rows(self, tokens: Iterable[str]) -> tuple[list[str], np.ndarray]:
        """(embeddable tokens, their vectors) preserving input order."""
        kept = [t for t in tokens if t in self._row_of]
        if not kept:
            return [], np.empty((0, self.dimension))
        idx = [self._row_of[t] for t in kept]
        return kept, self.matrix[idx]


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[str, ...]
    raw_text: str

    def __post_init__(self):
        if not self.tokens:
            raise CorpusFormatError(f"sentence {self.id!r} has no tokens")

    @property
    def token_set(self) -> frozenset[str]:
        return frozenset(self.tokens)


@dataclass(frozen=True)
class Document:
    id: str
    category_labels: Mapping[str, str]
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        if not self.sentences:
            raise CorpusFormatError(f"document {self.id!r} has no sentences")

    def all_tokens(self) -> list[str]:
        out: list[str] = []
        for s in self.sentences:
            out.extend(s.tokens)
        return out


@dataclass(frozen=True, eq=False)
class Corpus:
    documents: tuple[Document, ...]
    stopwords: frozenset[str] = frozenset()
    pos_tags: Optional[Mapping[str, PosTag]] = None

    def __post_init__(self):
        seen = set()
        for doc in self.documents:
            if doc.id in seen:
                raise CorpusFormatError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)

    def all_sentences(self) -> list[Sentence]:
        return [s for d in self.documents for s in d.sentences]

    def doc_of_sentence(self) -> dict[str, str]:
        return {s.id: d.id for d in self.documents for s in d.sentences}


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Deterministic rule-based tokenizer.

    Lowercases, splits on Unicode whitespace, and detaches leading/trailing
    punctuation from each chunk as separate single-character tokens (interior
    punctuation such as apostrophes stays attached). Never emits empty
    tokens; pure function of its input.
    """
    out: list[str] = []
    for chunk in text.lower().split():
        start = 0
        end = len(chunk)
        lead: list[str] = []
        while start < end and _is_punct(chunk[start]):
            lead.append(chunk[start])
            start += 1
        trail: list[str] = []
        while end > start and _is_punct(chunk[end - 1]):
            trail.append(chunk[end - 1])
            end -= 1
        out.extend(lead)
        if end > start:
            out.append(chunk[start:end])
        out.extend(reversed(trail))
    return out


# ---------------------------------------------------------------------------
# Embedding-space helpers
# ---------------------------------------------------------------------------

def sentence_mean(sentence: Sentence, table: EmbeddingTable) -> Optional[np.ndarray]:
    """Unweighted mean vector over the sentence's embeddable tokens.

    Repeated tokens count once per occurrence. Returns None when no token is
    embeddable.
    """
    kept, vecs = table.rows(sentence.tokens)
    if not kept:
        return None
    return vecs.mean(axis=0)


def doc_sample_seed(seed: int, doc_id: str) -> int:
    """Stable 63-bit per-document seed derived from a run seed."""
    digest = hashlib.sha256(f"{seed}:{doc_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def sample_tokens(doc: Document, n: int, seed: int, stopwords: Iterable[str] = ()) -> list[str]:
    """Shuffle the document's non-stopword tokens and keep the first n.

    The shuffle is a seeded Fisher-Yates permutation (PCG64), so a fixed seed
    reproduces the sample bit for bit.
    """
    stop = set(stopwords)
    tokens = [t for t in doc.all_tokens() if t not in stop]
    if len(tokens) < n:
        raise InsufficientTokensError(doc.id, len(tokens), n)
    rng = np.random.Generator(np.random.PCG64(seed))
    order = rng.permutation(len(tokens))
    return [tokens[i] for i in order[:n]]


# ---------------------------------------------------------------------------
# File ingestion
# ---------------------------------------------------------------------------

def load_vectors(path) -> EmbeddingTable:
    """Read a word-vector text file: header "<count> <d>", then one
    "<token> <f1> ... <fd>" line per word.

    Malformed lines (wrong arity, unparseable floats, duplicate tokens) are
    skipped and counted on ``table.skipped_lines``, not fatal.
    """
    path = Path(path)
    entries: dict[str, np.ndarray] = {}
    skipped = 0
    try:
        fh = path.open("r", encoding="utf-8", errors="replace")
    except OSError as exc:
        raise VectorFileError(f"cannot read vector file {path}: {exc}") from exc
    with fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise VectorFileError(f"{path}: malformed header line")
        try:
            _count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise VectorFileError(f"{path}: malformed header line") from exc
        if dim <= 0:
            raise VectorFileError(f"{path}: header dimension must be positive")
        for line in fh:
            parts = line.split()
            if len(parts) != dim + 1 or parts[0] in entries:
                skipped += 1
                continue
            try:
                vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError:
                skipped += 1
                continue
            entries[parts[0]] = vec
    if not entries:
        raise VectorFileError(f"{path}: no valid vector entries")
    if skipped:
        logger.warning("%s: skipped %d malformed vector line(s)", path, skipped)
    tokens = tuple(entries)
    matrix = np.vstack([entries[t] for t in tokens])
    return EmbeddingTable(dim, tokens, matrix, skipped_lines=skipped)


def load_stopwords(path=None) -> frozenset[str]:
    """One token per line; blank lines ignored. None loads the bundled
    standard English list."""
    if path is None:
        text = resources.files("latentnlp").joinpath("data/stopwords_en.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


_POS_BY_NAME = {tag.value: tag for tag in PosTag}


def load_pos_tags(path) -> dict[str, PosTag]:
    """TSV "token<TAB>TAG" with TAG in NOUN/VERB/ADJ/ADV/PRON/OTHER."""
    tags: dict[str, PosTag] = {}
    for ln, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise CorpusFormatError(f"{path}:{ln}: expected 'token<TAB>tag'")
        token, tag = parts[0], parts[1].strip()
        if tag not in _POS_BY_NAME:
            raise CorpusFormatError(f"{path}:{ln}: unknown tag {tag!r}")
        tags[token] = _POS_BY_NAME[tag]
    return tags


def corpus_stats(corpus: Corpus, table: EmbeddingTable) -> dict[str, int]:
    """Descriptive counts: token totals, unique/unembedded types, and unique
    sentences (distinct raw text with at least one embeddable token)."""
    total = 0
    unique: set[str] = set()
    sentence_texts: set[str] = set()
    for doc in corpus.documents:
        for s in doc.sentences:
            total += len(s.tokens)
            unique.update(s.tokens)
            if any(t in table for t in s.tokens):
                sentence_texts.add(s.raw_text)
    unembedded = sum(1 for t in unique if t not in table)
    return {
        "total_tokens": total,
        "unique_tokens": len(unique),
        "unembedded_tokens": unembedded,
        "unique_sentences": len(sentence_texts),
    }


_LABEL_KINDS = ("author", "genre", "reading_level")


def load_corpus(path, stopwords: Iterable[str] = (), pos_tags=None) -> Corpus:
    """Read a line-delimited JSON corpus, one sentence record per line.

    Each record: {doc_id, sentence_id, text, author?, genre?, reading_level?}.
    Sentences are tokenized on ingestion; records whose text yields no tokens
    are dropped (with a log note). Sentence ids must be globally unique.
    """
    path = Path(path)
    by_doc: dict[str, list[Sentence]] = {}
    labels: dict[str, dict[str, str]] = {}
    seen_sentences: set[str] = set()
    dropped = 0
    for ln, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{path}:{ln}: invalid JSON: {exc}") from exc
        try:
            doc_id = str(rec["doc_id"])
            sent_id = str(rec["sentence_id"])
            text = str(rec["text"])
        except KeyError as exc:
            raise CorpusFormatError(f"{path}:{ln}: missing field {exc}") from exc
        if sent_id in seen_sentences:
            raise CorpusFormatError(f"{path}:{ln}: duplicate sentence_id {sent_id!r}")
        seen_sentences.add(sent_id)
        tokens = tokenize(text)
        if not tokens:
            dropped += 1
            continue
        by_doc.setdefault(doc_id, []).append(Sentence(sent_id, tuple(tokens), text))
        doc_labels = labels.setdefault(doc_id, {})
        for kind in _LABEL_KINDS:
            if kind in rec and rec[kind] is not None and kind not in doc_labels:
                doc_labels[kind] = str(rec[kind])
    if dropped:
        logger.warning("%s: dropped %d token-less sentence record(s)", path, dropped)
    documents = tuple(
        Document(doc_id, labels.get(doc_id, {}), tuple(sents))
        for doc_id, sents in by_doc.items()
    )
    if not documents:
        raise CorpusFormatError(f"{path}: corpus has no usable sentences")
    return Corpus(documents, frozenset(stopwords), pos_tags)
