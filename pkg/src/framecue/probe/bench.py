"""Frame-referencing probe: hide a marker in one frame, then ask the model to
describe a frame by number (lookup) and to name the marker's frame (reverse lookup)."""

import logging
import sys
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
from halo import Halo
from PIL import Image

from framecue.backends.backend import VideoLlmBackend
from framecue.errors import SamplingError
from framecue.frames.sampling import sample_fixed
from framecue.frames.source import SampledSequence, VideoSource
from framecue.probe.scoring import score_lookup, score_reverse
from framecue.probe.table import NO_VP, ProbeTable
from framecue.prompter.config import Position, VpConfig
from framecue.prompter.marker import composite_marker, default_marker
from framecue.prompter.render import LabeledFrame, apply_sequence
from framecue.prompting import PromptProfile, system_prompt
from framecue.utils import load_image

logger = logging.getLogger(__name__)

Task = Literal["lookup", "reverse_lookup"]

DEFAULT_MARKER_WORD = "panda"


def lookup_question(k: int) -> str:
    if k < 1:
        raise ValueError(f"frame index must be >= 1, got {k}")
    return f"Describe the content of frame #{k}."


def reverse_question(marker_word: str) -> str:
    if not marker_word.strip():
        raise ValueError("marker word must be non-empty")
    return f"Which frame number contains the {marker_word}? Answer with the frame number only."


def choose_marker_index(num_frames: int, seed: int, video_id: str) -> int:
    """Uniform draw from 1..num_frames, fixed by (seed, num_frames, video_id) and nothing else."""
    if num_frames < 1:
        raise SamplingError(f"cannot place a marker in {num_frames} frames")
    sequence = np.random.SeedSequence([seed, num_frames, zlib.crc32(video_id.encode("utf-8"))])
    return int(np.random.default_rng(sequence).integers(1, num_frames + 1))


@dataclass(frozen=True)
class MarkedFrames:
    """Frames of a sampled sequence with the marker already composited, before any label."""

    seq: SampledSequence
    images: list[Image.Image]
    marker_display_index: int


def mark_sequence(seq: SampledSequence, marker: Image.Image, seed: int, images: Sequence[Image.Image] | None = None) -> MarkedFrames:
    frames = list(images) if images is not None else [load_image(item.frame_ref) for item in seq.items]
    index = choose_marker_index(len(seq), seed, seq.video_id)
    frames[index - 1] = composite_marker(frames[index - 1], marker)
    return MarkedFrames(seq=seq, images=frames, marker_display_index=index)


@dataclass(frozen=True)
class ProbeInstance:
    frames: list[LabeledFrame]
    marker_display_index: int
    marker_word: str
    seed: int
    # None for the unlabeled baseline
    vp_position: Position | None


def build_probe(
    seq: SampledSequence,
    marker: Image.Image,
    seed: int,
    vp_config: VpConfig,
    *,
    marker_word: str = DEFAULT_MARKER_WORD,
    vp_enabled: bool = True,
    marked: MarkedFrames | None = None,
) -> ProbeInstance:
    """Marker first, then labels on every frame. Pass `marked` to reuse one marked sequence across positions."""
    if marked is None:
        marked = mark_sequence(seq, marker, seed)
    frames = apply_sequence(seq, vp_config, marked.images, enabled=vp_enabled)
    return ProbeInstance(
        frames=frames,
        marker_display_index=marked.marker_display_index,
        marker_word=marker_word,
        seed=seed,
        vp_position=vp_config.position if vp_enabled else None,
    )


@dataclass(frozen=True)
class ProbeResult:
    task: Task
    n_frames: int
    position: str
    video_id: str
    correct: bool
    tolerance: int
    raw_answer: str


def _ask(model: VideoLlmBackend, instance: ProbeInstance, user_prompt: str) -> str:
    profile = PromptProfile(position=instance.vp_position or "BL", vp_enabled=instance.vp_position is not None)
    return model.answer(system_prompt(profile), user_prompt, instance.frames)


def probe_results(model: VideoLlmBackend, instance: ProbeInstance, n_frames: int, video_id: str) -> list[ProbeResult]:
    """Ask both probe questions and score them: lookup exactly, reverse lookup at tolerance 0 and 1."""
    position = instance.vp_position or NO_VP
    k = instance.marker_display_index
    lookup_answer = _ask(model, instance, lookup_question(k))
    reverse_answer = _ask(model, instance, reverse_question(instance.marker_word))
    results = [
        ProbeResult("lookup", n_frames, position, video_id, score_lookup(lookup_answer, instance.marker_word), 0, lookup_answer)
    ]
    for tolerance in (0, 1):
        correct = score_reverse(reverse_answer, k, tolerance)
        results.append(ProbeResult("reverse_lookup", n_frames, position, video_id, correct, tolerance, reverse_answer))
    return results


def run_probe_suite(
    sources: Sequence[VideoSource],
    frame_counts: Sequence[int],
    positions: Sequence[Position],
    model: VideoLlmBackend,
    vp_base_config: VpConfig,
    seed: int,
    *,
    marker: Image.Image | None = None,
    marker_word: str = DEFAULT_MARKER_WORD,
    include_no_vp: bool = True,
    in_flight: int = 1,
    spinner: bool = False,
) -> ProbeTable:
    """Run every (source, n, position) probe and collect accuracy per position and frame count."""
    if not sources:
        raise ValueError("the probe suite needs at least one video")
    marker = marker if marker is not None else default_marker()
    table = ProbeTable(frame_counts=list(frame_counts), positions=([NO_VP] if include_no_vp else []) + list(positions))

    with Halo(text="Probing", stream=sys.stderr, enabled=spinner) as halo:
        for source in sources:
            for n in frame_counts:
                seq = sample_fixed(source, n)
                marked = mark_sequence(seq, marker, seed)
                variants: list[tuple[str, VpConfig, bool]] = [
                    (position, vp_base_config.model_copy(update={"position": position}), True) for position in positions
                ]
                if include_no_vp:
                    variants.insert(0, (NO_VP, vp_base_config, False))

                def run(variant: tuple[str, VpConfig, bool]) -> list[ProbeResult] | str:
                    position, config, enabled = variant
                    try:
                        instance = build_probe(seq, marker, seed, config, marker_word=marker_word, vp_enabled=enabled, marked=marked)
                        return probe_results(model, instance, n, source.video_id)
                    except Exception as e:
                        return f"{type(e).__name__}: {e}"

                for (position, _, _), outcome in zip(variants, _map(run, variants, in_flight)):
                    if isinstance(outcome, str):
                        logger.warning(f"Probe failed for '{source.video_id}' n={n} position={position}: {outcome}")
                        table.record_failure(position, n)
                    else:
                        table.record(outcome)
                halo.text = f"Probing {source.video_id} n={n}"
    return table


def _map(fn: Callable, items: list, in_flight: int) -> list:
    if in_flight <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=in_flight) as pool:
        return list(pool.map(fn, items))
