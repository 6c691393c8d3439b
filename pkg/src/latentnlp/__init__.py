"""Latent-space NLP toolkit: k-NN divergence estimation between documents,
heavy-tail analysis of embedded words and sentence clusters, and set-cover
similar-sentence search with baselines, behind a library, CLI, and HTTP
service."""

from .embeddings import (
    Corpus,
    Document,
    EmbeddingTable,
    PosTag,
    Sentence,
    load_corpus,
    load_pos_tags,
    load_stopwords,
    load_vectors,
    sample_tokens,
    sentence_mean,
    tokenize,
)
from .nnindex import NeighborIndex, PointSet, check_backend
from .divergence import (
    ClassifyConfig,
    DivergenceEstimate,
    KLEstimate,
    b_k_alpha,
    classify_by_divergence,
    empirical_entropy,
    empirical_kl,
    kl_estimate,
    renyi_divergence,
    sigma_hat,
)
from .zipf import (
    ClusterModel,
    LogLogFit,
    PosPurityReport,
    RankTable,
    cluster_rank_table,
    fit_loglog,
    k_sensitivity,
    kmeans_fit,
    pos_purity,
    word_rank_table,
    zipf_mandelbrot,
)
from .simsearch import (
    ALGORITHMS,
    SentenceDatabase,
    Suggestion,
    SuggestionResult,
    TargetSet,
    jaccard,
    levenshtein,
    set_cover_suggest,
    suggest,
    wmd,
)
from .varietymetrics import (
    IntraJaccardStat,
    VarietyReport,
    intra_jaccard,
    unique_suggestion_pct,
    variety_report,
)

__version__ = "0.1.0"
