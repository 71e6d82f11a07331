import ast
import json
import logging
import re
from typing import Any

from framecue.backends.shared.base_http import BaseHttpBackend
from framecue.backends.shared.chat import chat_payload, message, read_text, text_part
from framecue.kfm.mapping import Keyword, locate
from framecue.prompting import DATASET_STYLES, PromptProfile, extractor_prompt

logger = logging.getLogger(__name__)

_FENCE = re.compile(r"^```[\w-]*\s*|\s*```$")


def parse_keyword_list(text: str) -> list[str] | None:
    """Parse a model's list literal, or return None when it is not a list of strings."""
    cleaned = _FENCE.sub("", text.strip())
    start, end = cleaned.find("["), cleaned.rfind("]")
    if start < 0 or end < start:
        return None
    literal = cleaned[start : end + 1]
    try:
        parsed: Any = json.loads(literal)
    except json.JSONDecodeError:
        try:
            parsed = ast.literal_eval(literal)
        except (ValueError, SyntaxError):
            return None
    if not isinstance(parsed, list) or not all(isinstance(item, str) for item in parsed):
        return None
    return parsed


class LlmExtractor(BaseHttpBackend):
    """Keyword extraction by prompting a chat LLM with few-shot examples."""

    name = "llm-extractor"

    def __init__(self, endpoint_url: str, model_name: str, auth_token: str | None = None, *, max_tokens: int = 128, **kwargs: Any):
        super().__init__(endpoint_url, auth_token, **kwargs)
        self.model_name = model_name
        self.max_tokens = max_tokens

    def extract(self, question: str, dataset_profile: str = "generic") -> list[Keyword]:
        style = dataset_profile if dataset_profile in DATASET_STYLES else "generic"
        system, user = extractor_prompt(PromptProfile(dataset_style=style), question)
        messages = [message("system", [text_part(system)]), message("user", [text_part(user)])]
        response = read_text(self.post_json(chat_payload(self.model_name, messages, self.max_tokens, 0.0)), self.name)

        phrases = parse_keyword_list(response)
        if phrases is None:
            logger.warning(f"Unparseable extractor response, using no keywords: {response[:120]!r}")
            return []

        keywords: list[Keyword] = []
        for phrase in dict.fromkeys(phrases):
            span = locate(question, phrase) if phrase else None
            if span is None:
                logger.warning(f"Dropping keyword '{phrase}': not an exact substring of the question")
                continue
            keywords.append(Keyword(text=phrase, span=span))
        return keywords
