from .embeddings import (
    DegenerateRank,
    DimensionMismatch,
    MissingLanguage,
    average_word_embedding,
    centroid_drift,
    drift_analysis,
    load_embedding_set,
    pca_project,
)
from .langid import EmptyText, Unclassifiable, correct_language_rate, detect_language
from .report import DirectionReport, EmptyPairs, evaluate_direction, evaluate_predictions

__all__ = [
    "DegenerateRank",
    "DimensionMismatch",
    "DirectionReport",
    "EmptyPairs",
    "EmptyText",
    "MissingLanguage",
    "Unclassifiable",
    "average_word_embedding",
    "centroid_drift",
    "correct_language_rate",
    "detect_language",
    "drift_analysis",
    "evaluate_direction",
    "evaluate_predictions",
    "load_embedding_set",
    "pca_project",
]
