"""Keyword-to-frame mapping and query rewriting."""

import logging
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from framecue.errors import MappingError
from framecue.kfm.similarity import EmbeddingVector, best_frame, check_tau, similarity_matrix

logger = logging.getLogger(__name__)

Span = tuple[int, int]


class Keyword(BaseModel):
    model_config = ConfigDict(frozen=True)

    text: str = Field(min_length=1)
    span: Span | None = None

    @model_validator(mode="after")
    def _check_span(self) -> "Keyword":
        if self.span is not None:
            start, end = self.span
            if not 0 <= start < end or end - start != len(self.text):
                raise ValueError(f"span {self.span} cannot hold '{self.text}'")
        return self

    def matches(self, question: str) -> bool:
        return self.span is not None and question[self.span[0] : self.span[1]] == self.text


def locate(question: str, text: str) -> Span | None:
    """First case-sensitive occurrence of `text` in `question`."""
    start = question.find(text)
    if start < 0:
        return None
    return (start, start + len(text))


def resolve_span(question: str, text: str) -> Keyword:
    return Keyword(text=text, span=locate(question, text))


class Mapping(BaseModel):
    model_config = ConfigDict(frozen=True)

    keyword: Keyword
    frame_display_index: int | None = Field(default=None, ge=1)
    score: float
    mapped: bool

    @model_validator(mode="after")
    def _check_mapped(self) -> "Mapping":
        if self.mapped != (self.frame_display_index is not None):
            raise ValueError("mapped must hold exactly when a frame index is present")
        return self


def map_rows(keywords: Sequence[Keyword], matrix: np.ndarray, tau: float) -> list[Mapping]:
    """Map each keyword to its best frame when the best score reaches tau."""
    check_tau(tau)
    if matrix.shape[0] != len(keywords):
        raise MappingError(f"{len(keywords)} keywords but {matrix.shape[0]} similarity rows")
    mappings = []
    for keyword, row in zip(keywords, matrix):
        index, score = best_frame(row)
        mapped = score >= tau
        mappings.append(
            Mapping(keyword=keyword, frame_display_index=index if mapped else None, score=score, mapped=mapped)
        )
    return mappings


def map_keywords(
    question: str,
    keywords: Sequence[Keyword],
    frame_embs: Sequence[EmbeddingVector],
    keyword_embs: Sequence[EmbeddingVector],
    tau: float,
) -> list[Mapping]:
    if len(keyword_embs) != len(keywords):
        raise MappingError(f"{len(keywords)} keywords but {len(keyword_embs)} keyword embeddings")
    for keyword in keywords:
        if keyword.span is not None and not keyword.matches(question):
            raise MappingError(f"keyword '{keyword.text}' does not match the question at {keyword.span}")
    return map_rows(keywords, similarity_matrix(frame_embs, keyword_embs), tau)


def _overlaps(a: Span, b: Span) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def insert_index(question: str, mappings: Sequence[Mapping]) -> str:
    """Annotate mapped keywords in place with " (frame K)".

    Keywords that cannot be found in the question get a trailing note instead.
    """
    accepted: list[tuple[Span, int]] = []
    notes: list[str] = []
    for mapping in mappings:
        if not mapping.mapped:
            continue
        frame = mapping.frame_display_index
        keyword = mapping.keyword
        span = keyword.span if keyword.matches(question) else locate(question, keyword.text)
        if span is None:
            note = f" Note: '{keyword.text}' corresponds to frame {frame}."
            if note not in notes:
                notes.append(note)
            continue
        if any(span == seen for seen, _ in accepted):
            continue
        clash = next((seen for seen, _ in accepted if _overlaps(seen, span)), None)
        if clash is not None:
            logger.warning(f"Keyword '{keyword.text}' at {span} overlaps the span {clash}, not annotated")
            continue
        accepted.append((span, frame))

    out = question
    for (_, end), frame in sorted(accepted, key=lambda item: item[0][0], reverse=True):
        out = f"{out[:end]} (frame {frame}){out[end:]}"
    return out + "".join(notes)
