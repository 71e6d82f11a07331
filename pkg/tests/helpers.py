import json
from pathlib import Path

import httpx
import numpy as np
from PIL import Image

from framecue.probe.synthetic import synthetic_frame

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(*parts: str):
    return json.loads(FIXTURES.joinpath(*parts).read_text(encoding="utf-8"))


def solid_frame(width: int, height: int, color=(128, 128, 128)) -> Image.Image:
    return Image.new("RGB", (width, height), color)


def textured_frame(width: int, height: int, seed: int = 0) -> Image.Image:
    rng = np.random.default_rng(seed)
    return synthetic_frame(rng, rng.uniform(60, 200, size=3), 0.25, (width, height))


class ReplayTransport(httpx.MockTransport):
    """Answers requests from a list of (status, json body) pairs and keeps what it was sent."""

    def __init__(self, responses: list[tuple[int, dict]]):
        self.responses = list(responses)
        self.requests: list[dict] = []
        super().__init__(self._handle)

    def _handle(self, request: httpx.Request) -> httpx.Response:
        self.requests.append(json.loads(request.content))
        if not self.responses:
            raise AssertionError("replay transport ran out of responses")
        status, body = self.responses.pop(0)
        return httpx.Response(status, json=body)
