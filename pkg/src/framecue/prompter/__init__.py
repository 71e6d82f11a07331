from .config import POSITIONS, POSITION_WORDS, Position, Style, VpConfig
from .glyphs import DEFAULT_ATLAS, GlyphAtlas
from .marker import composite_marker, default_marker, load_marker, marker_present
from .render import (
    LabeledFrame,
    apply_sequence,
    compute_fontsize,
    insert_vp,
    label_numbers,
    pad_width_for,
    render_label,
    unlabeled_frame,
)

__all__ = [
    "POSITIONS",
    "POSITION_WORDS",
    "Position",
    "Style",
    "VpConfig",
    "DEFAULT_ATLAS",
    "GlyphAtlas",
    "composite_marker",
    "default_marker",
    "load_marker",
    "marker_present",
    "LabeledFrame",
    "apply_sequence",
    "compute_fontsize",
    "insert_vp",
    "label_numbers",
    "pad_width_for",
    "render_label",
    "unlabeled_frame",
]
