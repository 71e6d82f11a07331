import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from framecue.errors import EmbeddingError, MappingError


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise EmbeddingError(f"embedding must be a non-empty 1-D vector, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise EmbeddingError("embedding contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return int(self.values.size)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EmbeddingVector) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def tolist(self) -> list[float]:
        return self.values.tolist()


def _stack(vectors: Sequence[EmbeddingVector], what: str) -> np.ndarray:
    dims = {vector.dim for vector in vectors}
    if len(dims) > 1:
        raise EmbeddingError(f"{what} embeddings have mixed dimensions {sorted(dims)}")
    matrix = np.stack([vector.values for vector in vectors])
    norms = np.linalg.norm(matrix, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise EmbeddingError(f"{what} embedding {int(zero[0])} has zero norm")
    return matrix / norms[:, None]


def cosine_similarity(u: EmbeddingVector, v: EmbeddingVector) -> float:
    if u.dim != v.dim:
        raise EmbeddingError(f"dimension mismatch: {u.dim} vs {v.dim}")
    nu, nv = u.norm, v.norm
    if nu == 0 or nv == 0:
        raise EmbeddingError("cosine similarity is undefined for a zero-norm vector")
    return float(np.dot(u.values, v.values) / (nu * nv))


def similarity_matrix(frame_embs: Sequence[EmbeddingVector], keyword_embs: Sequence[EmbeddingVector]) -> np.ndarray:
    """(m, F) matrix whose entry (j, i) is the cosine between keyword j and frame i."""
    if not frame_embs:
        raise EmbeddingError("at least one frame embedding is required")
    frames = _stack(frame_embs, "frame")
    if not keyword_embs:
        return np.zeros((0, len(frame_embs)))
    keywords = _stack(keyword_embs, "keyword")
    if keywords.shape[1] != frames.shape[1]:
        raise EmbeddingError(f"dimension mismatch: keywords {keywords.shape[1]} vs frames {frames.shape[1]}")
    return keywords @ frames.T


def best_frame(row: Sequence[float] | np.ndarray) -> tuple[int, float]:
    """1-based argmax of a similarity row; ties resolve to the lowest index."""
    values = np.asarray(row, dtype=np.float64)
    if values.size == 0:
        raise MappingError("cannot pick a frame from an empty row")
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise MappingError(f"non-finite similarity at frame {bad + 1}")
    best = int(np.argmax(values))
    return best + 1, float(values[best])


def check_tau(tau: float) -> float:
    if not math.isfinite(tau) or not -1.0 <= tau <= 1.0:
        raise MappingError(f"tau must be in [-1, 1], got {tau}")
    return tau
