import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framecue.errors import EmbeddingError, MappingError
from framecue.kfm.mapping import Keyword, Mapping, insert_index, locate, map_keywords, map_rows, resolve_span
from framecue.kfm.similarity import EmbeddingVector, best_frame, cosine_similarity, similarity_matrix


def vec(*values: float) -> EmbeddingVector:
    return EmbeddingVector(np.array(values, dtype=np.float64))


def mapped(question: str, text: str, frame: int, score: float = 0.9) -> Mapping:
    return Mapping(keyword=resolve_span(question, text), frame_display_index=frame, score=score, mapped=True)


@pytest.mark.parametrize(
    "u, v, expected",
    [((1, 0), (1, 0), 1.0), ((1, 0), (0, 1), 0.0), ((1, 1), (1, 0), 0.70710678)],
)
def test_cosine_similarity(u, v, expected):
    assert cosine_similarity(vec(*u), vec(*v)) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("u, v", [((1, 0), (1, 0, 0)), ((0, 0), (1, 0))])
def test_cosine_similarity_errors(u, v):
    with pytest.raises(EmbeddingError):
        cosine_similarity(vec(*u), vec(*v))


def test_embedding_vector_validation():
    with pytest.raises(EmbeddingError):
        EmbeddingVector(np.array([]))
    with pytest.raises(EmbeddingError):
        EmbeddingVector(np.array([1.0, math.nan]))
    v = vec(3, 4)
    assert (v.dim, v.norm) == (2, 5.0)
    assert v == vec(3, 4) and hash(v) == hash(vec(3, 4))
    with pytest.raises(ValueError):
        v.values[0] = 1.0


def test_similarity_matrix_shapes():
    frames = [vec(1, 0), vec(0, 1)]
    assert similarity_matrix(frames, []).shape == (0, 2)
    assert np.array_equal(similarity_matrix(frames, [vec(2, 0), vec(0, 3)]), np.eye(2))
    with pytest.raises(EmbeddingError):
        similarity_matrix([], [vec(1, 0)])
    with pytest.raises(EmbeddingError):
        similarity_matrix(frames, [vec(1, 0, 0)])


@pytest.mark.parametrize("row, expected", [([0.1, 0.9, 0.3], (2, 0.9)), ([0.5, 0.5], (1, 0.5)), ([-1.0], (1, -1.0))])
def test_best_frame(row, expected):
    assert best_frame(row) == expected


@pytest.mark.parametrize("row", [[], [0.1, math.inf]])
def test_best_frame_errors(row):
    with pytest.raises(MappingError):
        best_frame(row)


def test_map_rows_example():
    keywords = [Keyword(text="a"), Keyword(text="b")]
    result = map_rows(keywords, np.array([[0.9, 0.2], [0.3, 0.4]]), tau=0.5)
    assert [(m.frame_display_index, m.score, m.mapped) for m in result] == [(1, 0.9, True), (None, 0.4, False)]


def test_threshold_is_inclusive():
    result = map_rows([Keyword(text="a")], np.array([[0.25, 0.5]]), tau=0.5)
    assert result[0].mapped and result[0].frame_display_index == 2


@pytest.mark.parametrize("tau", [-1.5, 1.01, math.nan])
def test_tau_range(tau):
    with pytest.raises(MappingError):
        map_rows([Keyword(text="a")], np.array([[0.1]]), tau)


def test_mapping_invariant():
    with pytest.raises(ValueError):
        Mapping(keyword=Keyword(text="a"), frame_display_index=None, score=0.9, mapped=True)
    with pytest.raises(ValueError):
        Keyword(text="abc", span=(0, 2))


def _oracle(frames: list[list[float]], keywords: list[list[float]], tau: float):
    out = []
    for kw in keywords:
        scores = []
        for frame in frames:
            dot = sum(a * b for a, b in zip(kw, frame))
            scores.append(dot / (math.sqrt(sum(a * a for a in kw)) * math.sqrt(sum(b * b for b in frame))))
        best_score = max(scores)
        # lowest index among the maxima, allowing for last-bit rounding differences
        best_index = next(i for i, score in enumerate(scores, start=1) if score >= best_score - 1e-12)
        out.append((best_index if best_score >= tau else None, best_score, best_score >= tau))
    return out


def _random_instance(rng: np.random.Generator):
    num_frames = int(rng.integers(1, 17))
    num_keywords = int(rng.integers(0, 6))
    dim = int(rng.integers(1, 9))
    frames = rng.normal(size=(num_frames, dim))
    keywords = rng.normal(size=(num_keywords, dim))
    return frames, keywords, float(rng.uniform(-1, 1))


def _map(frames: np.ndarray, keywords: np.ndarray, tau: float) -> list[Mapping]:
    question = " ".join(f"k{j}" for j in range(len(keywords)))
    kws = [resolve_span(question, f"k{j}") for j in range(len(keywords))]
    return map_keywords(question, kws, [EmbeddingVector(f) for f in frames], [EmbeddingVector(k) for k in keywords], tau)


def test_map_keywords_matches_exhaustive_oracle():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        frames, keywords, tau = _random_instance(rng)
        got = _map(frames, keywords, tau)
        expected = _oracle(frames.tolist(), keywords.tolist(), tau)
        assert len(got) == len(expected)
        for mapping, (index, score, is_mapped) in zip(got, expected):
            assert mapping.mapped == is_mapped
            assert mapping.frame_display_index == index
            assert mapping.score == pytest.approx(score, abs=1e-12)


def test_mapped_set_shrinks_as_tau_grows():
    rng = np.random.default_rng(2)
    for _ in range(500):
        frames, keywords, _ = _random_instance(rng)
        low, high = sorted(rng.uniform(-1, 1, size=2))
        at_low = {j for j, m in enumerate(_map(frames, keywords, low)) if m.mapped}
        at_high = {j for j, m in enumerate(_map(frames, keywords, high)) if m.mapped}
        assert at_high <= at_low


def test_positive_scaling_changes_no_decision():
    rng = np.random.default_rng(3)
    for _ in range(500):
        frames, keywords, tau = _random_instance(rng)
        scaled_frames = frames * rng.uniform(0.01, 100, size=(len(frames), 1))
        scaled_keywords = keywords * rng.uniform(0.01, 100, size=(len(keywords), 1))
        base = _map(frames, keywords, tau)
        scaled = _map(scaled_frames, scaled_keywords, tau)
        for a, b in zip(base, scaled):
            assert (a.frame_display_index, a.mapped) == (b.frame_display_index, b.mapped)
            assert a.score == pytest.approx(b.score, abs=1e-9)


def test_tau_one_maps_nothing_for_non_parallel_embeddings():
    rng = np.random.default_rng(4)
    frames, keywords = rng.normal(size=(8, 6)), rng.normal(size=(3, 6))
    assert not any(m.mapped for m in _map(frames, keywords, 1.0))


def test_map_keywords_checks_spans_and_counts():
    question = "What happened after the door opened?"
    keyword = Keyword(text="door", span=(0, 4))
    with pytest.raises(MappingError, match="does not match"):
        map_keywords(question, [keyword], [vec(1, 0)], [vec(1, 0)], 0.0)
    with pytest.raises(MappingError, match="keyword embeddings"):
        map_keywords(question, [resolve_span(question, "door")], [vec(1, 0)], [], 0.0)


def test_locate_is_case_sensitive():
    assert locate("The Door and the door", "door") == (17, 21)
    assert locate("abc", "x") is None


def test_insert_index_after_keyword():
    question = "What happens right before the scene where Mr. Bean picks up the broom in a room?"
    assert insert_index(question, [mapped(question, "picks up the broom", 5)]) == (
        "What happens right before the scene where Mr. Bean picks up the broom (frame 5) in a room?"
    )


def test_insert_index_keeps_reading_order():
    question = "Compare the poolside warm-up scene and the pull-up scene."
    mappings = [mapped(question, "pull-up", 4), mapped(question, "poolside warm-up", 2)]
    assert insert_index(question, mappings) == "Compare the poolside warm-up (frame 2) scene and the pull-up (frame 4) scene."


def test_insert_index_edge_cases(caplog):
    question = "Where is the red ball after the dog jumps?"
    unmapped = Mapping(keyword=resolve_span(question, "the dog jumps"), score=0.1, mapped=False)
    assert insert_index(question, []) == question
    assert insert_index(question, [unmapped]) == question

    twice = [mapped(question, "the red ball", 3), mapped(question, "the red ball", 3)]
    assert insert_index(question, twice) == "Where is the red ball (frame 3) after the dog jumps?"

    with caplog.at_level(logging.WARNING):
        clash = insert_index(question, [mapped(question, "the red ball", 3), mapped(question, "red", 7)])
    assert clash == "Where is the red ball (frame 3) after the dog jumps?"
    assert "overlaps" in caplog.text

    missing = Mapping(keyword=Keyword(text="a blue cat"), frame_display_index=6, score=0.8, mapped=True)
    assert insert_index(question, [missing]) == question + " Note: 'a blue cat' corresponds to frame 6."


@settings(max_examples=200)
@given(st.text(alphabet="abcde ", min_size=1, max_size=40), st.data())
def test_insert_index_only_grows_the_question(question, data):
    mappings = []
    for _ in range(data.draw(st.integers(0, 4))):
        start = data.draw(st.integers(0, len(question) - 1))
        end = data.draw(st.integers(start + 1, len(question)))
        frame = data.draw(st.integers(1, 64))
        is_mapped = data.draw(st.booleans())
        keyword = Keyword(text=question[start:end], span=(start, end))
        mappings.append(
            Mapping(keyword=keyword, frame_display_index=frame if is_mapped else None, score=0.5, mapped=is_mapped)
        )
    out = insert_index(question, mappings)
    assert len(out) >= len(question)
    assert (out == question) == (not any(m.mapped for m in mappings))
