import logging
from typing import Any, Sequence

from PIL import Image

from framecue.backends.shared.base_http import BaseHttpBackend
from framecue.errors import BackendError, EmbeddingError
from framecue.kfm.similarity import EmbeddingVector
from framecue.utils import image_to_base64

logger = logging.getLogger(__name__)


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number_list(values: Any) -> bool:
    return isinstance(values, list) and bool(values) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values)


class HttpEmbedder(BaseHttpBackend):
    """Embedding endpoint client.

    Request: {"texts": [...]} or {"images": [base64 png, ...]}.
    Response: {"vectors": [[...], ...], "dim": int}.
    """

    name = "http-embedder"

    def __init__(self, endpoint_url: str, auth_token: str | None = None, *, batch_size: int = 32, dim: int | None = None, **kwargs: Any):
        super().__init__(endpoint_url, auth_token, **kwargs)
        if batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {batch_size}")
        self.batch_size = batch_size
        self._dim = dim

    @property
    def dim(self) -> int:
        if self._dim is None:
            raise BackendError(f"{self.name}: dimension unknown until the first response")
        return self._dim

    def _embed(self, field: str, items: list[Any], labels: list[str]) -> list[EmbeddingVector]:
        vectors: list[EmbeddingVector] = []
        for start in range(0, len(items), self.batch_size):
            batch = items[start : start + self.batch_size]
            body = self.post_json({field: batch})
            raw = body.get("vectors")
            if not isinstance(raw, list) or len(raw) != len(batch):
                got = len(raw) if isinstance(raw, list) else type(raw).__name__
                raise BackendError(f"{self.name}: expected {len(batch)} vectors, got {got}")
            for offset, values in enumerate(raw):
                if not _is_number_list(values):
                    raise BackendError(f"{self.name}: vector for {labels[start + offset]} is not a non-empty list of numbers")
            declared = body.get("dim")
            if declared is not None and (not _is_int(declared) or declared < 1):
                raise BackendError(f"{self.name}: response field 'dim' must be a positive integer, got {declared!r}")
            if self._dim is None:
                self._dim = declared if declared is not None else len(raw[0])
            elif declared is not None and declared != self._dim:
                raise EmbeddingError(f"{self.name}: response declares dim {declared}, expected {self._dim}")
            for offset, values in enumerate(raw):
                if len(values) != self._dim:
                    label = labels[start + offset]
                    raise EmbeddingError(f"{self.name}: vector for {label} has length {len(values)}, expected {self._dim}")
                vectors.append(EmbeddingVector(values))
        logger.debug(f"Embedded {len(items)} {field} in {-(-len(items) // self.batch_size)} requests")
        return vectors

    def embed_texts(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        return self._embed("texts", list(texts), [f"text {i} '{text}'" for i, text in enumerate(texts)])

    def embed_images(self, images: Sequence[Image.Image]) -> list[EmbeddingVector]:
        encoded = [image_to_base64(image) for image in images]
        return self._embed("images", encoded, [f"image {i}" for i in range(len(encoded))])
