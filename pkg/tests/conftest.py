import json

import numpy as np
import pytest

from latentnlp.embeddings import EmbeddingTable, Sentence, tokenize


def make_sentence(sid: str, text: str) -> Sentence:
    return Sentence(sid, tuple(tokenize(text)), text)


@pytest.fixture
def planted_table() -> EmbeddingTable:
    """Hand-placed 2-d embeddings with known geometry.

    Two tight word groups far apart: royalty near the origin and fruit near
    (10, 0), plus a lone word at (0, 10).
    """
    entries = {
        "king": [0.0, 0.0],
        "queen": [0.3, 0.0],
        "monarch": [0.0, 0.4],
        "ruler": [0.5, 0.5],
        "banana": [10.0, 0.0],
        "apple": [10.3, 0.0],
        "pear": [10.0, 0.4],
        "cloud": [0.0, 10.0],
    }
    return EmbeddingTable.from_entries(entries)


def synthetic_fixture(tmp_path, seed=7, n_tokens=60, dim=6, n_docs=3,
                      sentences_per_doc=12, genres=("fiction", "news")):
    """Write a small deterministic vector/corpus/stopword/pos fixture to disk.

    Returns a dict of file paths. Sentences are 5..12 tokens long, so most
    qualify as similarity-search candidates.
    """
    rng = np.random.default_rng(seed)
    vocab = [f"w{idx:02d}" for idx in range(n_tokens)]
    vectors = rng.standard_normal((n_tokens, dim)).round(4)

    vec_path = tmp_path / "vectors.txt"
    lines = [f"{n_tokens} {dim}"]
    for tok, vec in zip(vocab, vectors):
        lines.append(tok + " " + " ".join(f"{v:.4f}" for v in vec))
    vec_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    stop_path = tmp_path / "stopwords.txt"
    stopwords = ["w00", "w01"]
    stop_path.write_text("\n".join(stopwords) + "\n", encoding="utf-8")

    pos_path = tmp_path / "pos.tsv"
    tags = ["NOUN", "VERB", "ADJ", "ADV", "PRON", "OTHER"]
    pos_path.write_text(
        "\n".join(f"{tok}\t{tags[i % len(tags)]}" for i, tok in enumerate(vocab)) + "\n",
        encoding="utf-8",
    )

    corpus_path = tmp_path / "corpus.jsonl"
    records = []
    sid = 0
    for d in range(n_docs):
        for _ in range(sentences_per_doc):
            length = int(rng.integers(5, 13))
            toks = [vocab[int(i)] for i in rng.integers(0, n_tokens, length)]
            records.append(json.dumps({
                "doc_id": f"doc{d}",
                "sentence_id": f"s{sid:03d}",
                "text": " ".join(toks),
                "genre": genres[d % len(genres)],
                "author": f"author{d}",
                "reading_level": ("easy", "hard")[d % 2],
            }))
            sid += 1
    corpus_path.write_text("\n".join(records) + "\n", encoding="utf-8")

    return {
        "vectors": vec_path,
        "corpus": corpus_path,
        "stopwords": stop_path,
        "pos": pos_path,
    }


@pytest.fixture
def fixture_paths(tmp_path):
    return synthetic_fixture(tmp_path)
