from . import default
from .backend import EmbedderBackend, ExtractorBackend, VideoLlmBackend
from .config import backends_config, embedders_config, extractors_config, videollms_config

__all__ = [
    "default",
    "EmbedderBackend",
    "ExtractorBackend",
    "VideoLlmBackend",
    "backends_config",
    "embedders_config",
    "extractors_config",
    "videollms_config",
]
