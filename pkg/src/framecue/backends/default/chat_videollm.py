import json
import logging
from typing import Any, Literal, Sequence

from framecue.backends.shared.base_http import BaseHttpBackend
from framecue.backends.shared.chat import chat_payload, image_part, message, read_text, text_part
from framecue.errors import BackendError, PayloadTooLargeError
from framecue.prompter.render import LabeledFrame

logger = logging.getLogger(__name__)

FrameText = Literal["none", "interleaved"]

DEFAULT_MAX_PAYLOAD_BYTES = 20 * 1024 * 1024


class ChatVideoLlm(BaseHttpBackend):
    """A chat-style VideoLLM endpoint: one request per question, frames first, prompt last."""

    name = "chat-videollm"

    def __init__(
        self,
        endpoint_url: str,
        model_name: str,
        auth_token: str | None = None,
        *,
        max_tokens: int = 256,
        temperature: float = 0.0,
        frame_text: FrameText = "none",
        max_payload_bytes: int = DEFAULT_MAX_PAYLOAD_BYTES,
        **kwargs: Any,
    ):
        super().__init__(endpoint_url, auth_token, **kwargs)
        self.model_name = model_name
        self.max_tokens = max_tokens
        self.temperature = temperature
        self.frame_text = frame_text
        self.max_payload_bytes = max_payload_bytes

    def build_payload(self, system_prompt: str, user_prompt: str, frames: Sequence[LabeledFrame]) -> dict[str, Any]:
        if not frames:
            raise BackendError(f"{self.name}: a video question needs at least one frame")
        parts = []
        for frame in sorted(frames, key=lambda f: f.display_index):
            if self.frame_text == "interleaved":
                parts.append(text_part(f"frame #{frame.display_index}"))
            parts.append(image_part(frame.pixels))
        parts.append(text_part(user_prompt))
        messages = [message("system", [text_part(system_prompt)]), message("user", parts)]
        return chat_payload(self.model_name, messages, self.max_tokens, self.temperature)

    def answer(self, system_prompt: str, user_prompt: str, frames: Sequence[LabeledFrame]) -> str:
        payload = self.build_payload(system_prompt, user_prompt, frames)
        total_bytes = len(json.dumps(payload).encode("utf-8"))
        if total_bytes > self.max_payload_bytes:
            raise PayloadTooLargeError(len(frames), total_bytes, self.max_payload_bytes)
        logger.debug(f"Sending {len(frames)} frames ({total_bytes} bytes) to {self.model_name}")
        return read_text(self.post_json(payload), self.name)
