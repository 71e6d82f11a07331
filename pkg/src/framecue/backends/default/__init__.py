from .chat_videollm import ChatVideoLlm
from .hash_embedder import HashEmbedder
from .http_embedder import HttpEmbedder
from .llm_extractor import LlmExtractor
from .mock_decoder import MockDecoder
from .rule_extractor import RuleExtractor

__all__ = [
    "ChatVideoLlm",
    "HashEmbedder",
    "HttpEmbedder",
    "LlmExtractor",
    "MockDecoder",
    "RuleExtractor",
]
