import hashlib
from typing import Sequence

import numpy as np
from PIL import Image

from framecue.errors import EmbeddingError
from framecue.kfm.similarity import EmbeddingVector


class HashEmbedder:
    """Deterministic stand-in for a CLIP-style embedder.

    Content is hashed (with the seed and the modality) into a seed for a normal
    draw, then normalised. Identical content gives an identical unit vector.
    """

    name = "hash"

    def __init__(self, dim: int = 64, seed: int = 0):
        if dim < 2:
            raise EmbeddingError(f"hash embedder needs dim >= 2, got {dim}")
        self._dim = dim
        self.seed = seed

    @property
    def dim(self) -> int:
        return self._dim

    def _vector(self, kind: bytes, content: bytes) -> EmbeddingVector:
        digest = hashlib.blake2b(digest_size=32)
        digest.update(self.seed.to_bytes(8, "little", signed=True))
        digest.update(kind)
        digest.update(content)
        rng = np.random.default_rng(int.from_bytes(digest.digest(), "little"))
        values = rng.standard_normal(self._dim)
        return EmbeddingVector(values / np.linalg.norm(values))

    def embed_texts(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        return [self._vector(b"text:", text.encode("utf-8")) for text in texts]

    def embed_images(self, images: Sequence[Image.Image]) -> list[EmbeddingVector]:
        vectors = []
        for image in images:
            header = f"{image.mode}:{image.width}x{image.height}:".encode()
            vectors.append(self._vector(b"image:", header + image.tobytes()))
        return vectors
