import pytest

from framecue.frames.source import VideoSource
from framecue.probe.synthetic import make_synthetic_videos


@pytest.fixture(scope="session")
def probe_videos(tmp_path_factory) -> list[VideoSource]:
    """Twenty 64-frame synthetic videos, written once per test session."""
    return make_synthetic_videos(tmp_path_factory.mktemp("probe-videos"), count=20, frames=64, size=(112, 112), seed=7)


@pytest.fixture
def small_video(tmp_path) -> VideoSource:
    return make_synthetic_videos(tmp_path / "videos", count=1, frames=12, size=(96, 72), seed=3)[0]
