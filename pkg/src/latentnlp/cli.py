"""Command-line entry point for every pipeline.

Every output starts with a comment header recording the subcommand, all
resolved parameters, and the seed; rerunning with the same parameters
reproduces the file byte for byte. Errors print to stderr with the
machine-parseable prefix ``latentnlp: error:`` and exit 1; usage problems
exit 2.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import divergence, simsearch, varietymetrics, zipf
from .embeddings import (
    corpus_stats,
    load_corpus,
    load_pos_tags,
    load_stopwords,
    load_vectors,
    sample_tokens,
    sentence_mean,
    tokenize,
    Sentence,
    doc_sample_seed,
)
from .nnindex import PointSet

ERROR_PREFIX = "latentnlp: error:"
DEFAULT_KL_KS = (3, 5, 10, 25, 50, 100)
DEFAULT_POS_KS = (3, 5, 10, 20, 50)


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _apply_thread_override():
    threads = os.environ.get("LATENTNLP_THREADS")
    if threads:
        try:
            import numba

            numba.set_num_threads(int(threads))
        except (ImportError, ValueError):
            pass


class Output:
    """Accumulates header comments and TSV rows, then writes once."""

    def __init__(self, command: str, params: dict):
        self.lines = [f"# latentnlp {command}"]
        for key in sorted(params):
            self.lines.append(f"# {key}\t{_fmt(params[key])}")

    def comment(self, text: str):
        self.lines.append(f"# {text}")

    def row(self, *cells):
        self.lines.append("\t".join(_fmt(c) for c in cells))

    def write(self, path):
        data = "\n".join(self.lines) + "\n"
        if path is None:
            sys.stdout.write(data)
        else:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(data)


def _load_inputs(args, need_pos=False):
    table = load_vectors(args.vectors)
    stopwords = load_stopwords(args.stopwords)
    pos = None
    if getattr(args, "pos", None):
        pos = load_pos_tags(args.pos)
    elif need_pos:
        raise ValueError("this subcommand requires --pos")
    corpus = load_corpus(args.corpus, stopwords, pos)
    return table, corpus, stopwords, pos


def _params(args, **extra):
    out = {
        "vectors": args.vectors,
        "corpus": args.corpus,
        "stopwords": args.stopwords or "<default>",
        "seed": getattr(args, "seed", 0),
    }
    if getattr(args, "pos", None):
        out["pos"] = args.pos
    out.update(extra)
    return out


def _sampled_doc_points(corpus, table, stopwords, size, seed):
    """Equal-size token samples per document, embedded; documents shorter
    than the sample size are discarded (counted by the caller)."""
    usable, discarded, points, samples = [], 0, {}, {}
    for doc in corpus.documents:
        tokens = [t for t in doc.all_tokens() if t not in stopwords]
        if len(tokens) < size:
            discarded += 1
            continue
        usable.append(doc)
        sample = sample_tokens(doc, size, doc_sample_seed(seed, doc.id), stopwords)
        samples[doc.id] = sample
        kept, vectors = table.rows(sample)
        points[doc.id] = PointSet(np.arange(len(kept), dtype=np.int64), vectors)
    return usable, discarded, points, samples


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_embed_info(args):
    table, corpus, _, _ = _load_inputs(args)
    out = Output("embed-info", _params(args))
    out.row("metric", "value")
    for key, value in corpus_stats(corpus, table).items():
        out.row(key, value)
    out.write(args.output)


def cmd_kl(args):
    table, corpus, stopwords, _ = _load_inputs(args)
    usable, discarded, points, _ = _sampled_doc_points(
        corpus, table, stopwords, args.size, args.seed
    )
    if len(usable) < 2:
        raise ValueError("need at least two documents with enough tokens")
    out = Output("kl", _params(args, size=args.size, k=args.k, epsilon=args.epsilon))
    out.comment(f"discarded_short_documents\t{discarded}")
    out.row("p_doc", "q_doc", "kl", "n", "m")
    for p_doc in usable:
        for q_doc in usable:
            if p_doc.id == q_doc.id:
                continue
            est = divergence.kl_estimate(
                points[p_doc.id], points[q_doc.id], args.k, args.epsilon
            )
            out.row(p_doc.id, q_doc.id, est.value, est.n, est.m)
    out.write(args.output)


def cmd_kl_classify(args):
    table, corpus, stopwords, _ = _load_inputs(args)
    usable, discarded, points, samples = _sampled_doc_points(
        corpus, table, stopwords, args.size, args.seed
    )
    labeled = [d for d in usable if args.label_kind in d.category_labels]
    categories: dict[str, list] = {}
    for doc in labeled:
        categories.setdefault(doc.category_labels[args.label_kind], []).append(doc)
    if not categories:
        raise ValueError(f"no document carries a {args.label_kind!r} label")

    ks = args.k_list if args.method == "knn" else ["-"]
    out = Output("kl-classify", _params(
        args, size=args.size, label_kind=args.label_kind, method=args.method,
        k_list=",".join(map(str, args.k_list)), smoothing=args.smoothing,
        epsilon=args.epsilon,
    ))
    out.comment(f"discarded_short_documents\t{discarded}")
    out.row("k", "target_id", "actual", "predicted", "correct", "per_category_means")
    accuracy: dict = {}
    for k in ks:
        correct = 0
        for target in labeled:
            actual = target.category_labels[args.label_kind]
            if args.method == "knn":
                per_cat = {}
                for name in sorted(categories):
                    values = [
                        divergence.kl_estimate(
                            points[target.id], points[m.id], k, args.epsilon
                        ).value
                        for m in categories[name] if m.id != target.id
                    ]
                    if values:
                        per_cat[name] = float(np.mean(sorted(values)))
            else:
                per_cat = {}
                for name in sorted(categories):
                    values = [
                        divergence.empirical_kl(
                            samples[target.id], samples[m.id], smoothing=args.smoothing
                        )
                        for m in categories[name] if m.id != target.id
                    ]
                    values = [v for v in values if v is not None]
                    if values:
                        per_cat[name] = float(np.mean(sorted(values)))
            if not per_cat:
                raise divergence.NoUsableCategoryError(
                    f"no usable category for target {target.id!r}"
                )
            predicted = min(per_cat, key=lambda c: (per_cat[c], c))
            correct += predicted == actual
            means = ";".join(f"{c}:{_fmt(per_cat[c])}" for c in sorted(per_cat))
            out.row(k, target.id, actual, predicted, int(predicted == actual), means)
        accuracy[k] = correct / len(labeled)
    for k in ks:
        out.comment(f"accuracy\tk={k}\t{_fmt(accuracy[k])}\tof\t{len(labeled)}")
    out.write(args.output)


def cmd_zipf_words(args):
    table, corpus, _, _ = _load_inputs(args)
    rank_table = zipf.word_rank_table(corpus)
    out = Output("zipf-words", _params(args, head=args.head or "all"))
    if len(rank_table) >= 2:
        fit = zipf.fit_loglog(rank_table, head=args.head)
        out.comment(f"fit\tslope={_fmt(fit.slope)}\tintercept={_fmt(fit.intercept)}"
                    f"\tr_squared={_fmt(fit.r_squared)}")
    else:
        out.comment("fit\tskipped (needs >= 2 ranks)")
    out.row("rank", "count", "token")
    for rank, size, token in zip(rank_table.ranks, rank_table.sizes, rank_table.labels):
        out.row(int(rank), int(size), token)
    out.write(args.output)


def _sentence_mean_points(corpus, table):
    points = []
    for s in corpus.all_sentences():
        mean = sentence_mean(s, table)
        if mean is not None:
            points.append((s.id, mean))
    return points


def cmd_zipf_clusters(args):
    table, corpus, _, _ = _load_inputs(args)
    points = _sentence_mean_points(corpus, table)
    model = zipf.kmeans_fit(points, args.k, args.seed)
    rank_table = zipf.cluster_rank_table(model)
    out = Output("zipf-clusters", _params(args, k=args.k, inspect=args.inspect))
    out.comment(f"clustered_sentences\t{len(points)}\titerations\t{model.n_iter}"
                f"\tconverged\t{model.converged}\tinertia\t{_fmt(model.inertia)}")
    if len(rank_table) >= 2:
        fit = zipf.fit_loglog(rank_table)
        out.comment(f"fit\tslope={_fmt(fit.slope)}\tintercept={_fmt(fit.intercept)}"
                    f"\tr_squared={_fmt(fit.r_squared)}")
    out.row("rank", "size", "cluster")
    for rank, size, label in zip(rank_table.ranks, rank_table.sizes, rank_table.labels):
        out.row(int(rank), int(size), label)
    if args.inspect:
        _inspect_clusters(out, corpus, points, model)
    out.write(args.output)


def _inspect_clusters(out, corpus, points, model, n_show=5):
    """Per cluster: the sentences closest to and furthest from the centroid."""
    text_of = {s.id: s.raw_text for s in corpus.all_sentences()}
    by_cluster: dict[int, list] = {}
    for sid, vec in points:
        c = model.assignments[sid]
        dist = float(np.linalg.norm(vec - model.centroids[c]))
        by_cluster.setdefault(c, []).append((dist, sid))
    out.comment("inspect\tcluster\tkind\tsentence_id\tdistance\ttext")
    for c in sorted(by_cluster):
        members = sorted(by_cluster[c])
        for dist, sid in members[:n_show]:
            out.comment(f"inspect\t{c}\tclosest\t{sid}\t{_fmt(dist)}\t{text_of[sid]}")
        for dist, sid in members[-n_show:][::-1]:
            out.comment(f"inspect\t{c}\tfurthest\t{sid}\t{_fmt(dist)}\t{text_of[sid]}")


def cmd_k_sweep(args):
    table, corpus, _, _ = _load_inputs(args)
    points = _sentence_mean_points(corpus, table)
    result = zipf.k_sensitivity(points, args.k_center, args.seed)
    out = Output("k-sweep", _params(args, k_center=args.k_center))
    out.row("k", "slope")
    for k, slope in result:
        out.row(k, slope)
    out.write(args.output)


def cmd_pos_neighbors(args):
    table, corpus, _, pos = _load_inputs(args, need_pos=True)
    report = zipf.pos_purity(table, pos, args.ks)
    out = Output("pos-neighbors", _params(args, ks=",".join(map(str, args.ks))))
    out.comment(f"tagged_embedded_tokens\t{report.n_tokens}")
    out.row("k", "same_pos_pct")
    for k in args.ks:
        out.row(k, report.per_k[k])
    out.write(args.output)


def _build_db(args, table, corpus, stopwords):
    return simsearch.SentenceDatabase.from_documents(
        corpus.documents, table, stopwords,
        min_tokens=args.min_tokens, max_tokens=args.max_tokens,
    )


def suggestion_rows(result):
    """Canonical per-suggestion cells, shared by the CLI and the service
    parity tests: rank, score, sentence_id, raw text, covered tokens."""
    rows = []
    for rank, s in enumerate(result.suggestions, 1):
        covered = ",".join(sorted(s.covered)) if result.algorithm == "set_cover" else ""
        rows.append((rank, _fmt(s.score), s.sentence.id, s.sentence.raw_text, covered))
    return rows


def cmd_suggest(args):
    table, corpus, stopwords, _ = _load_inputs(args)
    db = _build_db(args, table, corpus, stopwords)
    if args.query_id:
        query = None
        for s in corpus.all_sentences():
            if s.id == args.query_id:
                query = s
                break
        if query is None:
            raise ValueError(f"no sentence with id {args.query_id!r}")
    else:
        tokens = tokenize(args.query)
        if not tokens:
            raise ValueError("query text has no tokens")
        query = Sentence("__query__", tuple(tokens), args.query)
    result = simsearch.suggest(
        db, query, args.algorithm, t=args.t, r=args.r, rho=args.rho,
        ld_unit=args.ld_unit,
    )
    out = Output("suggest", _params(
        args, algorithm=args.algorithm, t=args.t, r=args.r, rho=args.rho,
        query=args.query or "", query_id=args.query_id or "",
        min_tokens=args.min_tokens, max_tokens=args.max_tokens,
        ld_unit=args.ld_unit,
    ))
    out.comment(f"truncated\t{result.truncated}")
    out.row("rank", "score", "sentence_id", "text", "covered")
    for row in suggestion_rows(result):
        out.row(*row)
    out.write(args.output)


def cmd_variety(args):
    table, corpus, stopwords, _ = _load_inputs(args)
    db = _build_db(args, table, corpus, stopwords)
    if len(db) < 2:
        raise ValueError("database too small for a variety run")
    rng = np.random.Generator(np.random.PCG64(args.seed))
    candidates = sorted(db.sentences, key=lambda s: s.id)
    n = min(args.n_queries, len(candidates))
    queries = [candidates[int(i)] for i in rng.permutation(len(candidates))[:n]]
    runs = {
        name: [simsearch.suggest(db, q, name, t=args.t, r=args.r, rho=args.rho)
               for q in queries]
        for name in simsearch.ALGORITHMS
    }
    report = varietymetrics.variety_report(runs, stopwords)
    out = Output("variety", _params(
        args, n_queries=n, t=args.t, r=args.r, rho=args.rho,
        min_tokens=args.min_tokens, max_tokens=args.max_tokens,
    ))
    algos = list(simsearch.ALGORITHMS)
    out.row("metric", "rm_stop", *algos)
    out.row("unique_pct", "-", *[report.unique_pct[a] for a in algos])
    for remove, tag in ((True, "yes"), (False, "no")):
        out.row("intra_jaccard", tag,
                *[report.intra_jaccard[(a, remove)].value for a in algos])
    skipped = {a: report.intra_jaccard[(a, True)].queries_skipped for a in algos}
    out.comment("intra_skipped\t" + "\t".join(f"{a}={skipped[a]}" for a in algos))
    out.write(args.output)


def cmd_serve(args):
    from . import service

    table, corpus, stopwords, _ = _load_inputs(args)
    db = _build_db(args, table, corpus, stopwords)
    app = service.create_app(db, corpus, table, frontend_dir=args.frontend_dir)
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="info",
                limit_concurrency=args.limit_concurrency)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _int_list(text: str):
    return tuple(int(part) for part in text.split(",") if part)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latentnlp",
        description="Latent-space NLP toolkit: divergence estimation, "
                    "heavy-tail analysis, and similar-sentence search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pos=False, seed=True):
        p.add_argument("--vectors", required=True, help="word-vector text file")
        p.add_argument("--corpus", required=True, help="JSONL corpus file")
        p.add_argument("--stopwords", default=None,
                       help="stopword file (default: bundled English list)")
        if pos:
            p.add_argument("--pos", default=None, help="token<TAB>TAG TSV file")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", default=None, help="output TSV (default stdout)")

    p = sub.add_parser("embed-info", help="corpus/embedding descriptive counts")
    common(p)
    p.set_defaults(func=cmd_embed_info)

    p = sub.add_parser("kl", help="pairwise document KL estimates")
    common(p)
    p.add_argument("--size", type=int, default=3000, help="tokens sampled per document")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.set_defaults(func=cmd_kl)

    p = sub.add_parser("kl-classify", help="label documents by minimum mean KL")
    common(p)
    p.add_argument("--label-kind", choices=("author", "genre", "reading_level"),
                   default="genre")
    p.add_argument("--size", type=int, default=3000)
    p.add_argument("--k-list", type=_int_list, default=DEFAULT_KL_KS,
                   help="comma-separated k values (knn method)")
    p.add_argument("--method", choices=("knn", "baseline"), default="knn")
    p.add_argument("--smoothing", action="store_true",
                   help="add-one smoothing for the categorical baseline")
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.set_defaults(func=cmd_kl_classify)

    p = sub.add_parser("zipf-words", help="word frequency rank table + fit")
    common(p, seed=False)
    p.set_defaults(seed=0)
    p.add_argument("--head", type=int, default=None, help="fit only the top N ranks")
    p.set_defaults(func=cmd_zipf_words)

    p = sub.add_parser("zipf-clusters", help="sentence-mean k-means cluster sizes + fit")
    common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--inspect", action="store_true",
                   help="dump closest/furthest sentences per cluster")
    p.set_defaults(func=cmd_zipf_clusters)

    p = sub.add_parser("k-sweep", help="cluster-size fit slope across k values")
    common(p)
    p.add_argument("--k-center", type=int, required=True)
    p.set_defaults(func=cmd_k_sweep)

    p = sub.add_parser("pos-neighbors", help="part-of-speech neighborhood purity")
    common(p, pos=True, seed=False)
    p.set_defaults(seed=0)
    p.add_argument("--ks", type=_int_list, default=DEFAULT_POS_KS)
    p.set_defaults(func=cmd_pos_neighbors)

    p = sub.add_parser("suggest", help="similar-sentence suggestions")
    common(p, seed=False)
    p.set_defaults(seed=0)
    p.add_argument("--algorithm", choices=simsearch.ALGORITHMS, default="set_cover")
    p.add_argument("--t", type=int, default=5)
    p.add_argument("--r", type=int, default=10)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--query", default=None, help="query text")
    p.add_argument("--query-id", default=None, help="use a corpus sentence as query")
    p.add_argument("--min-tokens", type=int, default=5)
    p.add_argument("--max-tokens", type=int, default=15)
    p.add_argument("--ld-unit", choices=("char", "token"), default="char")
    p.set_defaults(func=cmd_suggest)

    p = sub.add_parser("variety", help="inter/intra-algorithm variety metrics")
    common(p)
    p.add_argument("--n-queries", type=int, default=100)
    p.add_argument("--t", type=int, default=5)
    p.add_argument("--r", type=int, default=10)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--min-tokens", type=int, default=5)
    p.add_argument("--max-tokens", type=int, default=15)
    p.set_defaults(func=cmd_variety)

    p = sub.add_parser("serve", help="run the suggestion HTTP service")
    common(p, seed=False)
    p.set_defaults(seed=0)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--min-tokens", type=int, default=5)
    p.add_argument("--max-tokens", type=int, default=15)
    p.add_argument("--frontend-dir", default=None,
                   help="static web client directory to serve at /")
    p.add_argument("--limit-concurrency", type=int, default=None,
                   help="maximum concurrent requests before 503")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    _apply_thread_override()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "suggest" and not (args.query or args.query_id):
        parser.error("suggest needs --query or --query-id")
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - single CLI boundary
        print(f"{ERROR_PREFIX} {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
