"""The probe marker: a small black-and-white picture pasted into one frame."""

from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from framecue.errors import RenderError

Box = tuple[int, int, int, int]

MARKER_SCALE = 0.5

BLACK = (0, 0, 0, 255)
WHITE = (255, 255, 255, 255)


def default_marker(size: int = 64) -> Image.Image:
    """A panda-like face drawn with plain ellipses on a transparent background."""
    if size < 16:
        raise RenderError(f"marker size must be >= 16, got {size}")
    marker = Image.new("RGBA", (size, size), (0, 0, 0, 0))
    draw = ImageDraw.Draw(marker)
    u = size / 16

    def ellipse(x0: float, y0: float, x1: float, y1: float, fill: tuple[int, int, int, int]) -> None:
        draw.ellipse((round(x0 * u), round(y0 * u), round(x1 * u) - 1, round(y1 * u) - 1), fill=fill)

    ellipse(0, 0, 5, 5, BLACK)  # ears
    ellipse(11, 0, 16, 5, BLACK)
    ellipse(1, 2, 15, 16, WHITE)  # head
    ellipse(3.5, 6, 7, 10.5, BLACK)  # eye patches
    ellipse(9, 6, 12.5, 10.5, BLACK)
    ellipse(5, 7.5, 6, 8.5, WHITE)
    ellipse(10, 7.5, 11, 8.5, WHITE)
    ellipse(7, 11, 9, 12.5, BLACK)  # nose
    return marker


def load_marker(path: str | Path) -> Image.Image:
    try:
        with Image.open(path) as image:
            return image.convert("RGBA")
    except OSError as e:
        raise RenderError(f"cannot load marker image {path}: {e}") from e


def fit_marker(marker: Image.Image, content_size: tuple[int, int]) -> Image.Image:
    """Resize so the marker's longer side is half the frame's shorter side."""
    target = int(min(content_size) * MARKER_SCALE)
    if target < 1:
        raise RenderError(f"frame {content_size} is too small for a marker")
    width, height = marker.size
    if width >= height:
        new_size = (target, max(1, height * target // width))
    else:
        new_size = (max(1, width * target // height), target)
    return marker.convert("RGBA").resize(new_size, Image.Resampling.NEAREST)


def marker_origin(content_box: Box, marker_size: tuple[int, int]) -> tuple[int, int]:
    x, y, w, h = content_box
    return (x + (w - marker_size[0]) // 2, y + (h - marker_size[1]) // 2)


def composite_marker(frame: Image.Image, marker: Image.Image) -> Image.Image:
    """Paste the marker, scaled, at the centre of a copy of `frame`."""
    fitted = fit_marker(marker, frame.size)
    out = frame.convert("RGB").copy()
    out.paste(fitted, marker_origin((0, 0, *frame.size), fitted.size), fitted)
    return out


def marker_present(image: Image.Image, content_box: Box, marker: Image.Image) -> bool:
    """True when every fully opaque marker pixel is found unchanged at the frame centre."""
    fitted = fit_marker(marker, content_box[2:])
    x, y = marker_origin(content_box, fitted.size)
    rgba = np.asarray(fitted)
    opaque = rgba[..., 3] == 255
    if not opaque.any():
        raise RenderError("marker has no fully opaque pixels to match")
    region = np.asarray(image.convert("RGB").crop((x, y, x + fitted.width, y + fitted.height)))
    return bool(np.array_equal(region[opaque], rgba[..., :3][opaque]))
