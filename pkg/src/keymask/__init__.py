"""Corpus keyword-masking toolkit.

Pipeline: extract in-domain keywords per document (embedding cosine ranking
plus MMR), remove noisy keywords by detection frequency, and emit whole-word
keyword-masked pre-training datasets, with paired-bootstrap and Cohen's-kappa
evaluation statistics on the side.
"""

from .corpus import (
    CONTINUATION_PREFIX,
    SPECIAL_TOKENS,
    Document,
    TokenizedDocument,
    Vocabulary,
    WordSpan,
    load_corpus,
    segment_words,
    tokenize_document,
    tokenize_word,
)
from .embeddings import (
    EmbeddingProvider,
    RemoteEmbeddingProvider,
    StaticTableProvider,
    cosine_similarity,
)
from .errors import (
    ConfigError,
    CorpusFormatError,
    DegenerateVectorError,
    KeymaskError,
    ProtocolError,
    RemoteServiceError,
    TableFormatError,
    UnembeddableDocumentError,
)
from .keyword_extract import (
    ExtractionParams,
    ScoredCandidate,
    candidate_unigrams,
    extract_document_keywords,
    load_default_stopwords,
    load_stopwords,
    mmr_select,
    rank_candidates,
)
from .keyword_filter import (
    KeywordHistogram,
    KeywordList,
    ThresholdCandidates,
    apply_min_count,
    build_histogram,
    freq_curve,
    knee_candidates,
    read_keyword_list,
    write_freq_curve,
    write_keyword_list,
)
from .masking import (
    IGNORE_LABEL,
    EmissionSummary,
    MaskedExample,
    MaskingConfig,
    emit_dataset,
    find_keyword_words,
    mask_example,
)
from .stats import (
    BootstrapResult,
    KappaResult,
    PredictionSet,
    accuracy,
    agreement_band,
    cohens_kappa,
    load_predictions,
    load_ratings,
    macro_f1,
    paired_bootstrap,
)

__version__ = "0.1.0"

__all__ = [
    "CONTINUATION_PREFIX",
    "SPECIAL_TOKENS",
    "IGNORE_LABEL",
    "Document",
    "WordSpan",
    "Vocabulary",
    "TokenizedDocument",
    "load_corpus",
    "segment_words",
    "tokenize_word",
    "tokenize_document",
    "EmbeddingProvider",
    "StaticTableProvider",
    "RemoteEmbeddingProvider",
    "cosine_similarity",
    "ExtractionParams",
    "ScoredCandidate",
    "candidate_unigrams",
    "rank_candidates",
    "mmr_select",
    "extract_document_keywords",
    "load_default_stopwords",
    "load_stopwords",
    "KeywordHistogram",
    "KeywordList",
    "ThresholdCandidates",
    "build_histogram",
    "apply_min_count",
    "knee_candidates",
    "freq_curve",
    "read_keyword_list",
    "write_keyword_list",
    "write_freq_curve",
    "MaskingConfig",
    "MaskedExample",
    "EmissionSummary",
    "find_keyword_words",
    "mask_example",
    "emit_dataset",
    "PredictionSet",
    "BootstrapResult",
    "KappaResult",
    "accuracy",
    "macro_f1",
    "paired_bootstrap",
    "cohens_kappa",
    "agreement_band",
    "load_predictions",
    "load_ratings",
    "KeymaskError",
    "CorpusFormatError",
    "TableFormatError",
    "UnembeddableDocumentError",
    "DegenerateVectorError",
    "RemoteServiceError",
    "ProtocolError",
    "ConfigError",
]
