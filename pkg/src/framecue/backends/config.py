from framecue.backends.default.chat_videollm import ChatVideoLlm
from framecue.backends.default.hash_embedder import HashEmbedder
from framecue.backends.default.http_embedder import HttpEmbedder
from framecue.backends.default.llm_extractor import LlmExtractor
from framecue.backends.default.mock_decoder import MockDecoder
from framecue.backends.default.rule_extractor import RuleExtractor

embedders_config = {
    "hash": HashEmbedder,
    "http": HttpEmbedder,
}

extractors_config = {
    "rule": RuleExtractor,
    "llm": LlmExtractor,
}

videollms_config = {
    "mock": MockDecoder,
    "chat": ChatVideoLlm,
}

backends_config = {
    "embedder": embedders_config,
    "extractor": extractors_config,
    "model": videollms_config,
}
