from .mapping import Keyword, Mapping, insert_index, locate, map_keywords, map_rows, resolve_span
from .similarity import EmbeddingVector, best_frame, check_tau, cosine_similarity, similarity_matrix

__all__ = [
    "Keyword",
    "Mapping",
    "insert_index",
    "locate",
    "map_keywords",
    "map_rows",
    "resolve_span",
    "EmbeddingVector",
    "best_frame",
    "check_tau",
    "cosine_similarity",
    "similarity_matrix",
]
