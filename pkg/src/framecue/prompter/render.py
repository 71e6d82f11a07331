"""Frame-index label rendering.

Labels are drawn from the bundled bitmap atlas so that identical inputs give
byte-identical pixels on every platform.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from PIL import Image, ImageFilter

from framecue.errors import RenderError
from framecue.frames.source import SampledSequence
from framecue.prompter.config import Style, VpConfig
from framecue.prompter.glyphs import DEFAULT_ATLAS, GlyphAtlas
from framecue.utils import load_image

logger = logging.getLogger(__name__)

Box = tuple[int, int, int, int]

LETTERBOX_COLOR = (0, 0, 0)


@dataclass(frozen=True)
class LabeledFrame:
    display_index: int
    pixels: Image.Image
    # (x, y, w, h); None when the frame was passed through without a label
    label_box: Box | None
    label_text: str
    # where the original frame pixels sit inside `pixels`
    content_box: Box

    @property
    def size(self) -> tuple[int, int]:
        return self.pixels.size


def compute_fontsize(width: int, height: int, s: int) -> int:
    if s < 1:
        raise RenderError(f"size divisor s must be >= 1, got {s}")
    if width < 1 or height < 1:
        raise RenderError(f"frame must be non-empty, got {width}x{height}")
    return max(1, min(width, height) // s)


def format_timestamp(seconds: float) -> str:
    whole = int(math.floor(seconds))
    return f"{whole // 60:02d}:{whole % 60:02d}"


def render_label(display_index: int, style: Style, pad_width: int, timestamp_s: float | None = None) -> str:
    if display_index < 1:
        raise RenderError(f"display index must be >= 1, got {display_index}")
    if pad_width < 1:
        raise RenderError(f"pad width must be >= 1, got {pad_width}")
    match style:
        case "style1":
            return f"frame #{display_index:0{pad_width}d}"
        case "style2":
            return f"#{display_index:0{pad_width}d}"
        case "style3":
            return str(display_index)
        case "style4":
            if timestamp_s is None:
                raise RenderError("style4 labels need source fps to compute timestamps")
            return f"t={format_timestamp(timestamp_s)}"
    raise RenderError(f"unknown label style '{style}'")


def pad_width_for(num_frames: int) -> int:
    return len(str(num_frames))


def margin_for(fontsize: int, config: VpConfig) -> int:
    if config.margin_px == "auto":
        return max(2, fontsize // 8)
    return config.margin_px


def stroke_width_for(fontsize: int, outline: bool) -> int:
    return math.ceil(fontsize / 15) if outline else 0


@dataclass(frozen=True)
class _Layout:
    fontsize: int
    scale: int
    stroke: int
    margin: int
    box_w: int
    box_h: int


def _layout(text: str, fontsize: int, config: VpConfig, atlas: GlyphAtlas) -> _Layout:
    scale = atlas.scale_for(fontsize)
    stroke = stroke_width_for(fontsize, config.outline)
    text_w, text_h = atlas.text_size(text, scale)
    if config.padding_mode == "letterbox":
        # the outlined label must stay within the fontsize-high band content
        stroke = min(stroke, max(0, (fontsize - text_h) // 2))
    return _Layout(
        fontsize=fontsize,
        scale=scale,
        stroke=stroke,
        margin=margin_for(fontsize, config),
        box_w=text_w + 2 * stroke,
        box_h=text_h + 2 * stroke,
    )


def _fits(layout: _Layout, width: int, height: int, config: VpConfig) -> bool:
    if layout.box_w + 2 * layout.margin > width:
        return False
    # a letterbox band is always tall enough for the label
    return config.padding_mode == "letterbox" or layout.box_h + 2 * layout.margin <= height


def _fit_layout(text: str, width: int, height: int, config: VpConfig, atlas: GlyphAtlas) -> _Layout:
    requested = compute_fontsize(width, height, config.size_divisor)
    fontsize = requested
    layout = _layout(text, fontsize, config, atlas)
    while not _fits(layout, width, height, config):
        if fontsize == 1:
            raise RenderError(f"label '{text}' does not fit a {width}x{height} frame even at fontsize 1")
        fontsize -= 1
        layout = _layout(text, fontsize, config, atlas)
    if fontsize != requested:
        logger.warning(f"Label '{text}' too wide for a {width}x{height} frame, fontsize shrunk {requested} -> {fontsize}")
    return layout


def _mask_image(mask: np.ndarray) -> Image.Image:
    return Image.fromarray(mask.astype(np.uint8) * 255)


def _draw_label(canvas: Image.Image, text: str, origin: tuple[int, int], layout: _Layout, config: VpConfig, atlas: GlyphAtlas) -> None:
    x, y = origin
    text_mask = atlas.text_mask(text, layout.scale)
    if layout.stroke:
        padded = np.pad(text_mask, layout.stroke)
        outline = _mask_image(padded).filter(ImageFilter.MaxFilter(2 * layout.stroke + 1))
        canvas.paste(config.outline_color, (x, y, x + layout.box_w, y + layout.box_h), outline)
    text_h, text_w = text_mask.shape
    tx, ty = x + layout.stroke, y + layout.stroke
    canvas.paste(config.text_color, (tx, ty, tx + text_w, ty + text_h), _mask_image(text_mask))


def insert_vp(
    frame: Image.Image,
    display_index: int,
    config: VpConfig,
    pad_width: int,
    *,
    label_text: str | None = None,
    timestamp_s: float | None = None,
    atlas: GlyphAtlas = DEFAULT_ATLAS,
) -> LabeledFrame:
    """Draw the frame's index label in the configured corner.

    In overlay mode only pixels inside the returned `label_box` differ from the
    input. In letterbox mode a black band is added on the label's edge and the
    original pixels are copied unchanged into `content_box`.
    """
    if frame.width < 1 or frame.height < 1:
        raise RenderError("cannot label an empty frame")
    if frame.mode != "RGB":
        frame = frame.convert("RGB")
    text = label_text if label_text is not None else render_label(display_index, config.style, pad_width, timestamp_s)

    width, height = frame.size
    layout = _fit_layout(text, width, height, config, atlas)

    if config.padding_mode == "letterbox":
        # fontsize + 2m, unless the 7-pixel glyph is taller than a fontsize below 7
        band_h = max(layout.fontsize, layout.box_h) + 2 * layout.margin
        canvas = Image.new("RGB", (width, height + band_h), LETTERBOX_COLOR)
        content_y = band_h if config.is_top else 0
        canvas.paste(frame, (0, content_y))
        content_box = (0, content_y, width, height)
    else:
        canvas = frame.copy()
        content_box = (0, 0, width, height)

    x = layout.margin if config.is_left else canvas.width - layout.margin - layout.box_w
    y = layout.margin if config.is_top else canvas.height - layout.margin - layout.box_h
    _draw_label(canvas, text, (x, y), layout, config, atlas)

    return LabeledFrame(
        display_index=display_index,
        pixels=canvas,
        label_box=(x, y, layout.box_w, layout.box_h),
        label_text=text,
        content_box=content_box,
    )


def unlabeled_frame(frame: Image.Image, display_index: int) -> LabeledFrame:
    """Wrap a frame without drawing anything (the no-VP baseline)."""
    if frame.mode != "RGB":
        frame = frame.convert("RGB")
    return LabeledFrame(
        display_index=display_index,
        pixels=frame.copy(),
        label_box=None,
        label_text="",
        content_box=(0, 0, frame.width, frame.height),
    )


def label_numbers(num_frames: int, config: VpConfig) -> list[int]:
    """The number drawn on each frame, in display order."""
    if config.numbering == "random":
        rng = np.random.default_rng(config.numbering_seed)
        return [int(value) + 1 for value in rng.permutation(num_frames)]
    return list(range(1, num_frames + 1))


def _load_frames(seq: SampledSequence, images: Sequence[Image.Image] | None) -> list[Image.Image]:
    if images is None:
        return [load_image(item.frame_ref) for item in seq.items]
    if len(images) != len(seq):
        raise RenderError(f"got {len(images)} images for a sequence of {len(seq)} frames")
    return list(images)


def apply_sequence(
    seq: SampledSequence,
    config: VpConfig,
    images: Sequence[Image.Image] | None = None,
    *,
    enabled: bool = True,
    max_workers: int | None = None,
) -> list[LabeledFrame]:
    """Label every frame of a sampled sequence, returned in display order.

    `images` overrides loading from `frame_ref` (the probe composites a marker
    first). `max_workers > 1` renders frames on a thread pool.
    """
    frames = _load_frames(seq, images)
    if not enabled:
        return [unlabeled_frame(frame, item.display_index) for item, frame in zip(seq.items, frames)]

    pad_width = pad_width_for(len(seq))
    numbers = label_numbers(len(seq), config)

    def render(position: int) -> LabeledFrame:
        item = seq.items[position]
        text = render_label(numbers[position], config.style, pad_width, seq.timestamp_s(item))
        return insert_vp(frames[position], item.display_index, config, pad_width, label_text=text)

    if max_workers is None or max_workers <= 1:
        return [render(position) for position in range(len(seq))]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(render, range(len(seq))))
