"""Uniform frame samplers.

All samplers pick endpoint-inclusive, linearly spaced indices so the first and
the last available frame are always reachable.
"""

import logging
import math
from abc import ABCMeta, abstractmethod
from typing import Annotated, Any, Literal

from pydantic import BaseModel, Field, PositiveFloat, PositiveInt

from framecue.errors import SamplingError
from framecue.frames.source import SampledItem, SampledSequence, VideoSource

logger = logging.getLogger(__name__)


def uniform_indices(pool_size: int, n: int) -> list[int]:
    """floor(i * (F-1) / (n-1)) for i in 0..n-1, with n clamped to the pool size."""
    if n < 1:
        raise SamplingError(f"n must be >= 1, got {n}")
    if pool_size < 1:
        raise SamplingError("cannot sample from an empty pool")
    n = min(n, pool_size)
    if n == 1:
        return [0]
    return [(i * (pool_size - 1)) // (n - 1) for i in range(n)]


def _sequence(video_id: str, pool: list[tuple[int, Any]], picks: list[int], fps: float | None) -> SampledSequence:
    items = [
        SampledItem(display_index=position, source_index=pool[pick][0], frame_ref=pool[pick][1])
        for position, pick in enumerate(picks, start=1)
    ]
    return SampledSequence(video_id=video_id, items=items, fps=fps)


def _pool(video: VideoSource) -> list[tuple[int, Any]]:
    return list(enumerate(video.frame_paths))


def sample_fixed(video: VideoSource, n: int) -> SampledSequence:
    return _sequence(video.video_id, _pool(video), uniform_indices(video.num_frames, n), video.source_fps)


def sample_fps_capped(video: VideoSource, target_fps: float = 1.0, cap: int = 64) -> SampledSequence:
    """Decimate to `target_fps` and keep at most `cap` frames, uniformly spread over the candidates."""
    if video.source_fps is None or video.duration_s is None:
        raise SamplingError(f"video '{video.video_id}' needs fps and duration_s for fps-capped sampling")
    if target_fps <= 0 or cap < 1:
        raise SamplingError(f"target_fps and cap must be positive, got {target_fps} and {cap}")

    candidates = min(math.floor(video.duration_s * target_fps), video.num_frames)
    candidates = max(candidates, 1)
    candidate_indices = uniform_indices(video.num_frames, candidates)
    if candidates <= cap:
        picks = candidate_indices
    else:
        picks = [candidate_indices[i] for i in uniform_indices(candidates, cap)]
    return _sequence(video.video_id, _pool(video), picks, video.source_fps)


def fraction_count(num_frames: int, fraction: float, min_frames: int = 3) -> int:
    if not 0 < fraction <= 1:
        raise SamplingError(f"fraction must be in (0, 1], got {fraction}")
    if min_frames < 1:
        raise SamplingError(f"min_frames must be >= 1, got {min_frames}")
    return min(max(math.floor(num_frames * fraction), min_frames), num_frames)


def sample_fraction(video: VideoSource, fraction: float, min_frames: int = 3) -> SampledSequence:
    return sample_fixed(video, fraction_count(video.num_frames, fraction, min_frames))


# ############################################################
# Composable sampling steps (configuration surface)
# ############################################################


class SamplingStep(BaseModel, metaclass=ABCMeta):
    @abstractmethod
    def count(self, pool_size: int) -> int:
        raise NotImplementedError

    def sample(self, video: VideoSource) -> SampledSequence:
        return sample_fixed(video, self.count(video.num_frames))

    def narrow(self, seq: SampledSequence) -> SampledSequence:
        """Apply this step to an already sampled sequence, keeping the original source indices."""
        pool = [(item.source_index, item.frame_ref) for item in seq.items]
        return _sequence(seq.video_id, pool, uniform_indices(len(pool), self.count(len(pool))), seq.fps)


class FixedStep(SamplingStep):
    mode: Literal["fixed"] = "fixed"
    n: PositiveInt = 8

    def count(self, pool_size: int) -> int:
        return min(self.n, pool_size)


class FpsCappedStep(SamplingStep):
    mode: Literal["fps_capped"] = "fps_capped"
    target_fps: PositiveFloat = 1.0
    cap: PositiveInt = 64

    def count(self, pool_size: int) -> int:
        return min(self.cap, pool_size)

    def sample(self, video: VideoSource) -> SampledSequence:
        return sample_fps_capped(video, self.target_fps, self.cap)

    def narrow(self, seq: SampledSequence) -> SampledSequence:
        raise SamplingError("fps_capped needs source timing and can only be the first sampling step")


class FractionStep(SamplingStep):
    mode: Literal["fraction"] = "fraction"
    fraction: float = Field(default=0.2, gt=0, le=1)
    min_frames: PositiveInt = 3

    def count(self, pool_size: int) -> int:
        return fraction_count(pool_size, self.fraction, self.min_frames)


SamplingStepUnion = Annotated[FixedStep | FpsCappedStep | FractionStep, Field(discriminator="mode")]


def apply_steps(video: VideoSource, steps: list[SamplingStep]) -> SampledSequence:
    """Run sampling steps in order: the first samples the video, later ones narrow its selection."""
    if not steps:
        raise SamplingError("at least one sampling step is required")
    seq = steps[0].sample(video)
    for step in steps[1:]:
        seq = step.narrow(seq)
    logger.debug(f"Sampled {len(seq)} of {video.num_frames} frames from '{video.video_id}'")
    return seq
