"""The per-question pipeline and the bounded-parallel runner around it.

    sample -> render -> extract -> embed -> map -> prompt -> answer -> score

A failure in any stage is stored on the question's `EvalRecord` (stage name and
message) and the run moves on.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Iterator, Sequence

from pydantic import BaseModel, Field

from framecue.backends.backend import EmbedderBackend, ExtractorBackend, VideoLlmBackend
from framecue.errors import SamplingError
from framecue.frames.sampling import apply_steps
from framecue.frames.source import SampledSequence, VideoSource
from framecue.harness.config import RunConfig
from framecue.harness.questions import QuestionRecord
from framecue.harness.report import score
from framecue.kfm.mapping import Mapping, insert_index, map_keywords
from framecue.prompter.render import LabeledFrame, apply_sequence
from framecue.prompting import PromptProfile, system_prompt, timeline_block, user_prompt

logger = logging.getLogger(__name__)

STAGES = ("sample", "render", "extract", "embed", "map", "prompt", "answer", "score")

# tau at this value turns keyword mapping off
KFM_BYPASS_TAU = 1.0



class EvalRecord(BaseModel):
    question_id: str
    video_id: str
    category: str
    system_prompt: str = ""
    augmented_prompt: str = ""
    mappings: list[Mapping] = Field(default_factory=list)
    raw_answer: str = ""
    parsed_choice: str | None = None
    # None when the question has no gold answer
    correct: bool | None = None
    evaluated: bool = False
    error_stage: str | None = None
    error: str | None = None
    latency_ms: float | None = Field(default=None, ge=0)
    frames_sent: int = 0


@dataclass(frozen=True)
class Backends:
    embedder: EmbedderBackend
    extractor: ExtractorBackend
    model: VideoLlmBackend

    @classmethod
    def from_config(cls, config: RunConfig) -> "Backends":
        return cls(embedder=config.kfm.embedder.build(), extractor=config.kfm.extractor.build(), model=config.model.build())


@dataclass(frozen=True)
class PreparedQuestion:
    seq: SampledSequence
    frames: list[LabeledFrame]
    mappings: list[Mapping]
    system_prompt: str
    user_prompt: str


class StageFailure(Exception):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {type(cause).__name__}: {cause}")


@contextmanager
def stage(name: str) -> Iterator[None]:
    try:
        yield
    except StageFailure:
        raise
    except Exception as e:
        raise StageFailure(name, e) from e


class Pipeline:
    """Runs questions against one video collection with fixed backends and configuration."""

    def __init__(self, config: RunConfig, backends: Backends, sources: Sequence[VideoSource], cache_size: int = 16):
        self.config = config
        self.backends = backends
        self.sources = {source.video_id: source for source in sources}
        self.profile = PromptProfile(
            dataset_style=config.prompt_profile, position=config.vp.position, vp_enabled=config.vp_enabled
        )
        # frames depend only on (sampling, vp), so they are shared by every question on a video
        self._video_frames = lru_cache(maxsize=cache_size)(self._render_video)
        self._frame_embeddings = lru_cache(maxsize=cache_size)(self._embed_video)

    @property
    def kfm_enabled(self) -> bool:
        return self.config.kfm.tau < KFM_BYPASS_TAU

    def _render_video(self, video_id: str) -> tuple[SampledSequence, list[LabeledFrame]]:
        with stage("sample"):
            if video_id not in self.sources:
                raise SamplingError(f"unknown video '{video_id}'")
            seq = apply_steps(self.sources[video_id], self.config.sampling.steps)
        with stage("render"):
            frames = apply_sequence(seq, self.config.vp, enabled=self.config.vp_enabled)
        return seq, frames

    def _embed_video(self, video_id: str):
        _, frames = self._video_frames(video_id)
        return self.backends.embedder.embed_images([frame.pixels for frame in frames])

    def frames(self, video_id: str) -> tuple[SampledSequence, list[LabeledFrame]]:
        return self._video_frames(video_id)

    def map_question(self, question: QuestionRecord) -> list[Mapping]:
        if not self.kfm_enabled:
            return []
        with stage("extract"):
            keywords = self.backends.extractor.extract(question.question, self.config.prompt_profile)
        if not keywords:
            return []
        with stage("embed"):
            frame_embs = self._frame_embeddings(question.video_id)
            keyword_embs = self.backends.embedder.embed_texts([keyword.text for keyword in keywords])
        with stage("map"):
            return map_keywords(question.question, keywords, frame_embs, keyword_embs, self.config.kfm.tau)

    def prepare(self, question: QuestionRecord) -> PreparedQuestion:
        """Everything up to the model call; raises StageFailure."""
        seq, frames = self.frames(question.video_id)
        mappings = self.map_question(question)
        with stage("prompt"):
            text = insert_index(question.question, mappings)
            user = user_prompt(self.profile, text, question.options, question.task_type)
            if self.config.timeline:
                user = f"{timeline_block(seq)}\n{user}"
        return PreparedQuestion(seq, frames, mappings, system_prompt(self.profile), user)

    def run(self, question: QuestionRecord) -> EvalRecord:
        record = EvalRecord(question_id=question.id, video_id=question.video_id, category=question.category)
        try:
            prepared = self.prepare(question)
            record.system_prompt = prepared.system_prompt
            record.augmented_prompt = prepared.user_prompt
            record.mappings = prepared.mappings
            record.frames_sent = len(prepared.frames)
            with stage("answer"):
                started = time.perf_counter()
                record.raw_answer = self.backends.model.answer(prepared.system_prompt, prepared.user_prompt, prepared.frames)
                record.latency_ms = (time.perf_counter() - started) * 1000
            with stage("score"):
                record.parsed_choice, record.correct = score(record.raw_answer, question.options, question.answer)
            record.evaluated = True
        except StageFailure as e:
            record.error_stage = e.stage
            record.error = f"{type(e.cause).__name__}: {e.cause}"
        return record

    def run_all(self, questions: Sequence[QuestionRecord]) -> list[EvalRecord]:
        """Answer every question with at most `in_flight` in progress; results keep question order."""
        if self.config.in_flight <= 1:
            records = [self.run(question) for question in questions]
        else:
            with ThreadPoolExecutor(max_workers=self.config.in_flight) as pool:
                records = list(pool.map(self.run, questions))
        for record in records:
            if record.evaluated:
                logger.info(f"{record.question_id}: answer={record.parsed_choice or record.raw_answer!r} correct={record.correct}")
            else:
                logger.warning(f"{record.question_id}: failed in stage '{record.error_stage}': {record.error}")
        return records


def run_pipeline(question: QuestionRecord, source: VideoSource, config: RunConfig, backends: Backends) -> EvalRecord:
    return Pipeline(config, backends, [source]).run(question)


def plan_requests(questions: Sequence[QuestionRecord], sources: Sequence[VideoSource], config: RunConfig) -> dict[str, Any]:
    """Request counts an `eval` run would make, computed without contacting any backend."""
    known = {source.video_id: source for source in sources}
    videos = sorted({question.video_id for question in questions if question.video_id in known})
    frames = {video_id: len(apply_steps(known[video_id], config.sampling.steps)) for video_id in videos}
    kfm = config.kfm.tau < KFM_BYPASS_TAU
    answerable = [question for question in questions if question.video_id in known]
    return {
        "questions": len(questions),
        "unknown_videos": sorted({q.video_id for q in questions if q.video_id not in known}),
        "videos": len(videos),
        "frames_rendered": sum(frames.values()),
        "model_requests": len(answerable),
        "frames_sent": sum(frames[q.video_id] for q in answerable),
        "extractor_requests": len(answerable) if kfm else 0,
        "image_embeddings": sum(frames.values()) if kfm else 0,
        "kfm_enabled": kfm,
    }
