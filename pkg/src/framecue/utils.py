import base64
import hashlib
import io
import json
from pathlib import Path
from typing import Any

from PIL import Image

# Fixed encoder settings: identical pixels always give identical bytes.
PNG_COMPRESS_LEVEL = 6


def dumps_stable(obj: Any) -> str:
    """JSON with sorted keys and a trailing newline, used for every report file."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_image(path: str | Path) -> Image.Image:
    with Image.open(path) as image:
        return image.convert("RGB")


def encode_png(image: Image.Image) -> bytes:
    buffer = io.BytesIO()
    image.save(buffer, format="PNG", compress_level=PNG_COMPRESS_LEVEL, optimize=False)
    return buffer.getvalue()


def save_png(image: Image.Image, path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(encode_png(image))


def image_to_base64(image: Image.Image) -> str:
    return base64.b64encode(encode_png(image)).decode("utf-8")


def base64_to_image(base_64_image: str) -> Image.Image:
    image_data = base64.b64decode(base_64_image)
    with Image.open(io.BytesIO(image_data)) as image:
        return image.convert("RGB")


def pixel_digest(image: Image.Image) -> str:
    """sha256 over mode, size and raw pixel bytes (independent of the PNG encoder)."""
    digest = hashlib.sha256()
    digest.update(f"{image.mode}:{image.size[0]}x{image.size[1]}:".encode())
    digest.update(image.tobytes())
    return digest.hexdigest()
