"""Deterministic synthetic videos for probe runs and tests.

Pixel values stay within 16..239 so frames never contain pure black, white or
red, the colours used by the marker and the labels.
"""

import logging
from pathlib import Path

import numpy as np
from PIL import Image

from framecue.frames.source import VideoSource, dump_manifest
from framecue.utils import save_png

logger = logging.getLogger(__name__)

LOW, HIGH = 16, 239


def synthetic_frame(rng: np.random.Generator, base: np.ndarray, position: float, size: tuple[int, int]) -> Image.Image:
    width, height = size
    ramp_x = np.linspace(0, 1, width)[None, :, None]
    ramp_y = np.linspace(0, 1, height)[:, None, None]
    colour = base[None, None, :] * (0.6 + 0.4 * ramp_x) + 40 * np.sin(2 * np.pi * (ramp_y + position))
    noise = rng.integers(-6, 7, size=(height, width, 3))
    pixels = np.clip(np.rint(colour) + noise, LOW, HIGH).astype(np.uint8)
    return Image.fromarray(pixels)


def make_synthetic_videos(
    directory: str | Path,
    count: int = 20,
    frames: int = 64,
    size: tuple[int, int] = (224, 224),
    seed: int = 0,
    fps: float = 1.0,
) -> list[VideoSource]:
    """Write `count` videos of `frames` PNG frames each plus a `manifest.json`."""
    if count < 1 or frames < 1:
        raise ValueError(f"count and frames must be >= 1, got {count} and {frames}")
    directory = Path(directory)
    rng = np.random.default_rng(seed)
    sources = []
    for video in range(count):
        video_id = f"synthetic-{video:03d}"
        base = rng.uniform(LOW + 40, HIGH - 40, size=3)
        paths = []
        for index in range(frames):
            path = directory / video_id / f"{index:04d}.png"
            save_png(synthetic_frame(rng, base, index / frames, size), path)
            paths.append(path)
        sources.append(VideoSource(video_id=video_id, frame_paths=paths, source_fps=fps, duration_s=frames / fps))
    dump_manifest(sources, directory / "manifest.json")
    logger.info(f"Wrote {count} synthetic videos of {frames} frames to {directory}")
    return sources
