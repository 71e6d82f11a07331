"""Position-index assignment for visual tokens, with and without degradation.

Text tokens keep their own indices 0..L_t-1 in every mode; only visual tokens
are rewritten.
"""

from dataclasses import dataclass
from typing import Literal, get_args

DegradationMode = Literal["standard", "temporal_only", "full_collapse"]

DEGRADATION_MODES: tuple[DegradationMode, ...] = get_args(DegradationMode)


@dataclass(frozen=True)
class RopeLayout:
    text_len: int
    tokens_per_frame: int
    num_frames: int

    def __post_init__(self):
        if self.text_len < 0:
            raise ValueError(f"text_len must be >= 0, got {self.text_len}")
        if self.tokens_per_frame < 1 or self.num_frames < 1:
            raise ValueError(f"tokens_per_frame and num_frames must be >= 1, got {self.tokens_per_frame} and {self.num_frames}")


@dataclass(frozen=True, order=True)
class MRopeTriplet:
    t: int
    h: int
    w: int

    def __post_init__(self):
        if min(self.t, self.h, self.w) < 0:
            raise ValueError(f"triplet components must be non-negative, got {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.t, self.h, self.w)


ORIGIN = MRopeTriplet(0, 0, 0)


def _check_mode(mode: str) -> None:
    if mode not in DEGRADATION_MODES:
        raise ValueError(f"unknown degradation mode '{mode}', expected one of {DEGRADATION_MODES}")


def rope_pos(layout: RopeLayout, k: int, j: int, mode: DegradationMode) -> int:
    """1-D index of token j (0-based) of frame k (1-based)."""
    _check_mode(mode)
    if not 1 <= k <= layout.num_frames:
        raise ValueError(f"frame index k={k} outside 1..{layout.num_frames}")
    if not 0 <= j < layout.tokens_per_frame:
        raise ValueError(f"token index j={j} outside 0..{layout.tokens_per_frame - 1}")
    match mode:
        case "standard":
            return layout.text_len + (k - 1) * layout.tokens_per_frame + j
        case "temporal_only":
            return layout.text_len + j
        case "full_collapse":
            return layout.text_len


def layout_table(layout: RopeLayout, mode: DegradationMode) -> list[int]:
    """rope_pos for every visual token, frame by frame."""
    return [
        rope_pos(layout, k, j, mode)
        for k in range(1, layout.num_frames + 1)
        for j in range(layout.tokens_per_frame)
    ]


def mrope_pos(base: MRopeTriplet, mode: DegradationMode, anchor: MRopeTriplet = ORIGIN) -> MRopeTriplet:
    _check_mode(mode)
    match mode:
        case "standard":
            return base
        case "temporal_only":
            return MRopeTriplet(anchor.t, base.h, base.w)
        case "full_collapse":
            return anchor


def mrope_layout_table(
    grid_h: int,
    grid_w: int,
    num_frames: int,
    mode: DegradationMode,
    anchor: MRopeTriplet = ORIGIN,
) -> list[tuple[MRopeTriplet, MRopeTriplet]]:
    """(original, degraded) triplets for a num_frames x grid_h x grid_w token grid."""
    if min(grid_h, grid_w, num_frames) < 1:
        raise ValueError(f"grid and frame counts must be >= 1, got {grid_h}x{grid_w}x{num_frames}")
    rows = []
    for t in range(num_frames):
        for h in range(grid_h):
            for w in range(grid_w):
                base = MRopeTriplet(t, h, w)
                rows.append((base, mrope_pos(base, mode, anchor)))
    return rows
