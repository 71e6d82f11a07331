"""Frame-index visual prompts and keyword-to-frame query rewriting for video question answering."""

from framecue.errors import FramecueError
from framecue.frames import VideoSource, apply_steps, load_manifest
from framecue.kfm import insert_index, map_keywords
from framecue.prompter import LabeledFrame, VpConfig, apply_sequence, insert_vp

__version__ = "0.1.0"

__all__ = [
    "FramecueError",
    "VideoSource",
    "apply_steps",
    "load_manifest",
    "insert_index",
    "map_keywords",
    "LabeledFrame",
    "VpConfig",
    "apply_sequence",
    "insert_vp",
]
