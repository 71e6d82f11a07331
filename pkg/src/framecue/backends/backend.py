from typing import Protocol, Sequence, runtime_checkable

from PIL import Image

from framecue.kfm.mapping import Keyword
from framecue.kfm.similarity import EmbeddingVector
from framecue.prompter.render import LabeledFrame


@runtime_checkable
class EmbedderBackend(Protocol):
    """Maps text and images into one shared vector space."""

    name: str

    @property
    def dim(self) -> int: ...

    def embed_texts(self, texts: Sequence[str]) -> list[EmbeddingVector]: ...

    def embed_images(self, images: Sequence[Image.Image]) -> list[EmbeddingVector]: ...


@runtime_checkable
class ExtractorBackend(Protocol):
    """Pulls key phrases out of a question; every returned span must index the question exactly."""

    name: str

    def extract(self, question: str, dataset_profile: str) -> list[Keyword]: ...


@runtime_checkable
class VideoLlmBackend(Protocol):
    """Answers one question about an ordered list of frames. Stateless per call."""

    name: str

    def answer(self, system_prompt: str, user_prompt: str, frames: Sequence[LabeledFrame]) -> str: ...
