import logging
import re
from typing import Sequence

from PIL import Image

from framecue.errors import LabelDecodeError
from framecue.prompter.config import RGB
from framecue.prompter.glyphs import DEFAULT_ATLAS, GlyphAtlas
from framecue.prompter.marker import default_marker, marker_present
from framecue.prompter.render import LabeledFrame

logger = logging.getLogger(__name__)

_LOOKUP = re.compile(r"Describe the content of frame #(\d+)")
_REVERSE = re.compile(r"Which frame number contains the (.+?)\?")
_LABEL_NUMBER = re.compile(r"#?(\d+)$")

UNKNOWN = "unknown"


class MockDecoder:
    """A VideoLLM stand-in that reads frames by exact template matching.

    Labels are decoded with the renderer's glyph atlas and the marker is found by
    comparing its opaque pixels at the frame centre, so a correct rendering and
    prompt pipeline always scores 100% on the probe questions.
    """

    name = "mock"

    def __init__(
        self,
        marker: Image.Image | None = None,
        marker_word: str = "panda",
        text_color: RGB = (255, 0, 0),
        atlas: GlyphAtlas = DEFAULT_ATLAS,
        strict: bool = False,
    ):
        self.marker = marker if marker is not None else default_marker()
        self.marker_word = marker_word
        self.text_color = text_color
        self.atlas = atlas
        self.strict = strict

    def read_index(self, frame: LabeledFrame) -> int | None:
        if frame.label_box is None:
            return None
        try:
            text = self.atlas.read(frame.pixels, self.text_color)
        except LabelDecodeError:
            return None
        match = _LABEL_NUMBER.search(text)
        return int(match.group(1)) if match else None

    def _undecodable(self) -> str:
        if self.strict:
            raise LabelDecodeError("no frame label could be decoded")
        return UNKNOWN

    def _lookup(self, k: int, labels: dict[int, LabeledFrame]) -> str:
        frame = labels.get(k)
        if frame is None:
            return f"There is no frame #{k}."
        if marker_present(frame.pixels, frame.content_box, self.marker):
            return f"I can see a {self.marker_word} in the middle of the frame."
        return "The frame shows a plain textured background."

    def _reverse(self, word: str, frames: Sequence[LabeledFrame], labels: dict[int, LabeledFrame]) -> str:
        for frame in frames:
            if not marker_present(frame.pixels, frame.content_box, self.marker):
                continue
            number = next((n for n, labeled in labels.items() if labeled is frame), None)
            if number is None:
                return self._undecodable()
            return f"frame {number}"
        return f"No frame contains the {word}."

    def answer(self, system_prompt: str, user_prompt: str, frames: Sequence[LabeledFrame]) -> str:
        labels: dict[int, LabeledFrame] = {}
        for frame in frames:
            number = self.read_index(frame)
            if number is not None:
                labels.setdefault(number, frame)
        if not labels:
            return self._undecodable()

        if match := _LOOKUP.search(user_prompt):
            return self._lookup(int(match.group(1)), labels)
        if match := _REVERSE.search(user_prompt):
            return self._reverse(match.group(1), frames, labels)
        logger.debug("Prompt matches no probe template")
        return UNKNOWN
