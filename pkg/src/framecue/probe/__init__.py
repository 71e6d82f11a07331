from .bench import (
    DEFAULT_MARKER_WORD,
    MarkedFrames,
    ProbeInstance,
    ProbeResult,
    build_probe,
    choose_marker_index,
    lookup_question,
    mark_sequence,
    probe_results,
    reverse_question,
    run_probe_suite,
)
from .scoring import parse_frame_number, score_lookup, score_reverse
from .synthetic import make_synthetic_videos
from .table import NO_VP, ProbeTable, round_half_up

__all__ = [
    "DEFAULT_MARKER_WORD",
    "MarkedFrames",
    "ProbeInstance",
    "ProbeResult",
    "build_probe",
    "choose_marker_index",
    "lookup_question",
    "mark_sequence",
    "probe_results",
    "reverse_question",
    "run_probe_suite",
    "parse_frame_number",
    "score_lookup",
    "score_reverse",
    "make_synthetic_videos",
    "NO_VP",
    "ProbeTable",
    "round_half_up",
]
