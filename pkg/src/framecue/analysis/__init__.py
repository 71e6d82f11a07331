from .attention import AttentionDump, RelativeChange, layer_mean_attention, load_dump, relative_change, save_dump
from .position_lab import (
    DEGRADATION_MODES,
    DegradationMode,
    MRopeTriplet,
    RopeLayout,
    layout_table,
    mrope_layout_table,
    mrope_pos,
    rope_pos,
)

__all__ = [
    "AttentionDump",
    "RelativeChange",
    "layer_mean_attention",
    "load_dump",
    "relative_change",
    "save_dump",
    "DEGRADATION_MODES",
    "DegradationMode",
    "MRopeTriplet",
    "RopeLayout",
    "layout_table",
    "mrope_layout_table",
    "mrope_pos",
    "rope_pos",
]
