"""Directional-aware scoring for generated navigation instructions.

Blends a token-level soft-matching F1 (BERTScore-style greedy matching over
pluggable embedding backends) with checks that matter specifically for
navigation: opposing directions, step counts, and action order.

Typical use::

    from navscore import score_texts

    breakdown = score_texts("turn left then walk forward",
                            "walk forward then turn left")
    print(breakdown.final_score, breakdown.critical_mismatch)
"""

from .corpus import (
    CorpusError,
    CorpusRecord,
    EvaluationReport,
    MissingIdError,
    PredictionRecord,
    SchemaError,
    emit_report,
    evaluate_corpus,
    load_corpus,
    load_predictions,
    report_to_dict,
)
from .directional import (
    ConflictPairSet,
    ConflictReport,
    FlowAnalysis,
    analyze_flow,
    detect_conflict,
    order_similarity,
    step_penalty_factor,
)
from .instructions import (
    ActionSequence,
    Direction,
    DirectionalAction,
    DirectionLexicon,
    Instruction,
    extract_actions,
    normalize,
)
from .scoring import (
    ConfigError,
    ConflictPolicy,
    MetricConfig,
    RuntimeSettings,
    ScoreBreakdown,
    build_config,
    enhanced_score,
    final_score,
    load_config_file,
    score_texts,
    special_case,
)
from .similarity import (
    BackendError,
    EmbeddingBackend,
    LexicalBackend,
    RemoteBackend,
    SimilarityResult,
    TokenEmbeddings,
    lexical_backend,
    remote_backend,
    token_match_f1,
    weighted_directional_similarity,
)

__version__ = "0.1.0"

__all__ = [
    "ActionSequence",
    "BackendError",
    "ConfigError",
    "ConflictPairSet",
    "ConflictPolicy",
    "ConflictReport",
    "CorpusError",
    "CorpusRecord",
    "Direction",
    "DirectionLexicon",
    "DirectionalAction",
    "EmbeddingBackend",
    "EvaluationReport",
    "FlowAnalysis",
    "Instruction",
    "LexicalBackend",
    "MetricConfig",
    "MissingIdError",
    "PredictionRecord",
    "RemoteBackend",
    "RuntimeSettings",
    "SchemaError",
    "ScoreBreakdown",
    "SimilarityResult",
    "TokenEmbeddings",
    "analyze_flow",
    "build_config",
    "detect_conflict",
    "emit_report",
    "enhanced_score",
    "evaluate_corpus",
    "extract_actions",
    "final_score",
    "lexical_backend",
    "load_config_file",
    "load_corpus",
    "load_predictions",
    "normalize",
    "order_similarity",
    "remote_backend",
    "report_to_dict",
    "score_texts",
    "special_case",
    "step_penalty_factor",
    "token_match_f1",
    "weighted_directional_similarity",
    "__version__",
]
