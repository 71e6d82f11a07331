"""Chat wire protocol shared by the VideoLLM client and the LLM keyword extractor.

Request: {"model", "messages": [{"role", "content": [part, ...]}], "max_tokens", "temperature"}
where a part is {"type": "text", "text": ...} or {"type": "image", "image_base64": <png>}.
Response: {"text": ...}.
"""

from typing import Any

from PIL import Image

from framecue.errors import BackendError
from framecue.utils import image_to_base64


def text_part(text: str) -> dict[str, str]:
    return {"type": "text", "text": text}


def image_part(image: Image.Image) -> dict[str, str]:
    return {"type": "image", "image_base64": image_to_base64(image)}


def message(role: str, parts: list[dict[str, str]]) -> dict[str, Any]:
    return {"role": role, "content": parts}


def chat_payload(model: str, messages: list[dict[str, Any]], max_tokens: int, temperature: float) -> dict[str, Any]:
    return {"model": model, "messages": messages, "max_tokens": max_tokens, "temperature": temperature}


def read_text(body: dict[str, Any], backend: str) -> str:
    text = body.get("text")
    if not isinstance(text, str):
        raise BackendError(f"{backend}: chat response has no 'text' string")
    return text
