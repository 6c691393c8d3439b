"""HTTP service wrapping the similar-sentence search.

The database is loaded once at startup; request handlers never mutate shared
state, so concurrent requests are safe. Responses for identical requests are
identical apart from the wall-clock ``timing_ms`` field. The built web client
(if present) is served from the same process under ``/``.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import simsearch
from .embeddings import Corpus, EmbeddingTable, Sentence, corpus_stats, tokenize

DEFAULTS = {"algorithm": "set_cover", "t": 5, "r": 10, "rho": 0.5}
BOUNDS = {
    "t": {"min": 1, "max": 25},
    "r": {"min": 0, "max": 100},
    "rho": {"min": 0.0, "max": 2.0},
}


class SuggestRequest(BaseModel):
    query_text: str = Field(max_length=1000)
    algorithm: str = DEFAULTS["algorithm"]
    t: int = Field(default=DEFAULTS["t"], ge=BOUNDS["t"]["min"], le=BOUNDS["t"]["max"])
    r: int = Field(default=DEFAULTS["r"], ge=BOUNDS["r"]["min"], le=BOUNDS["r"]["max"])
    rho: float = Field(default=DEFAULTS["rho"], ge=BOUNDS["rho"]["min"],
                       le=BOUNDS["rho"]["max"])


def create_app(
    db: simsearch.SentenceDatabase,
    corpus: Corpus,
    table: EmbeddingTable,
    frontend_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="latentnlp suggestion service")
    stats = corpus_stats(corpus, table)  # computed once; immutable afterwards

    @app.exception_handler(RequestValidationError)
    async def invalid_params(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.post("/api/suggest")
    def api_suggest(req: SuggestRequest):
        if req.algorithm not in simsearch.ALGORITHMS:
            return JSONResponse(
                status_code=400,
                content={"detail": f"unknown algorithm {req.algorithm!r}"},
            )
        started = time.perf_counter()
        tokens = tokenize(req.query_text)
        if not tokens:
            return JSONResponse(
                status_code=422,
                content={"detail": "query text contains no tokens"},
            )
        query = Sentence("__query__", tuple(tokens), req.query_text)
        try:
            result = simsearch.suggest(
                db, query, req.algorithm, t=req.t, r=req.r, rho=req.rho
            )
        except simsearch.UnembeddableQueryError as exc:
            return JSONResponse(
                status_code=422,
                content={"detail": f"query cannot be embedded: {exc}"},
            )
        suggestions = []
        for rank, s in enumerate(result.suggestions, 1):
            covered = sorted(s.covered) if result.algorithm == "set_cover" else []
            suggestions.append({
                "rank": rank,
                "sentence_id": s.sentence.id,
                "text": s.sentence.raw_text,
                "score": s.score,
                "covered_tokens": covered,
                "source_doc": db.doc_of.get(s.sentence.id, ""),
            })
        return {
            "suggestions": suggestions,
            "params_echo": {
                "algorithm": req.algorithm, "t": req.t, "r": req.r, "rho": req.rho,
            },
            "truncated": result.truncated,
            "timing_ms": (time.perf_counter() - started) * 1000.0,
        }

    @app.get("/api/meta")
    def api_meta():
        return {
            "corpus_stats": stats,
            "available_algorithms": list(simsearch.ALGORITHMS),
            "defaults": dict(DEFAULTS),
            "bounds": BOUNDS,
            "candidate_sentences": len(db),
        }

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="client")
    else:
        @app.get("/")
        def root():
            return {
                "service": "latentnlp",
                "endpoints": ["/api/suggest", "/api/meta"],
                "note": "web client not built; see frontend/README.md",
            }

    return app


def load_app(vectors, corpus_path, stopwords_path=None, min_tokens=5,
             max_tokens=15, frontend_dir=None) -> FastAPI:
    """Build the app from input files (one-call startup for deployments)."""
    from .embeddings import load_corpus, load_stopwords, load_vectors

    table = load_vectors(vectors)
    stopwords = load_stopwords(stopwords_path)
    corpus = load_corpus(corpus_path, stopwords)
    db = simsearch.SentenceDatabase.from_documents(
        corpus.documents, table, stopwords, min_tokens, max_tokens
    )
    return create_app(db, corpus, table, frontend_dir)
