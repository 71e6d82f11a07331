import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, PositiveFloat, ValidationError, field_validator, model_validator

from framecue.errors import ManifestError


class VideoSource(BaseModel):
    """One video as an ordered list of pre-extracted frame images."""

    video_id: str
    frame_paths: list[Path] = Field(min_length=1)
    source_fps: PositiveFloat | None = None
    duration_s: PositiveFloat | None = None

    @field_validator("frame_paths")
    @classmethod
    def _distinct(cls, paths: list[Path]) -> list[Path]:
        if len(set(paths)) != len(paths):
            raise ValueError("frame paths must be distinct")
        return paths

    @property
    def num_frames(self) -> int:
        return len(self.frame_paths)


class SampledItem(BaseModel):
    display_index: int = Field(ge=1)
    source_index: int = Field(ge=0)
    frame_ref: Path


class SampledSequence(BaseModel):
    video_id: str
    items: list[SampledItem] = Field(min_length=1)
    fps: PositiveFloat | None = None

    @model_validator(mode="after")
    def _check_indices(self) -> "SampledSequence":
        for position, item in enumerate(self.items, start=1):
            if item.display_index != position:
                raise ValueError(f"display indices must be 1..N, got {item.display_index} at position {position}")
        sources = [item.source_index for item in self.items]
        if any(b <= a for a, b in zip(sources, sources[1:])):
            raise ValueError("source indices must be strictly increasing")
        return self

    def __len__(self) -> int:
        return len(self.items)

    def timestamp_s(self, item: SampledItem) -> float | None:
        if self.fps is None:
            return None
        return item.source_index / self.fps


def _entry_to_source(entry: Any, index: int, base_dir: Path) -> VideoSource:
    if not isinstance(entry, dict):
        raise ManifestError("entry must be an object", index=index)
    video_id = entry.get("video_id")
    frames = entry.get("frames")
    if frames is not None and (not isinstance(frames, list) or not all(isinstance(frame, str) for frame in frames)):
        raise ManifestError("'frames' must be a list of paths", index=index, video_id=video_id)
    if not frames:
        raise ManifestError("empty frame list", index=index, video_id=video_id)
    try:
        return VideoSource(
            video_id=video_id,
            frame_paths=[base_dir / frame for frame in frames],
            source_fps=entry.get("fps"),
            duration_s=entry.get("duration_s"),
        )
    except ValidationError as e:
        raise ManifestError(f"malformed entry: {e}", index=index, video_id=video_id) from e


def load_manifest(path: str | Path) -> list[VideoSource]:
    """Read a video manifest (a JSON list, or JSON lines) into VideoSources, resolving frame paths
    relative to the manifest's directory."""
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        if text.lstrip().startswith("["):
            entries = json.loads(text)
        else:
            entries = [json.loads(line) for line in text.splitlines() if line.strip()]
    except json.JSONDecodeError as e:
        raise ManifestError(f"{path} is not valid JSON: {e}") from e

    sources = [_entry_to_source(entry, index, path.parent) for index, entry in enumerate(entries)]
    seen: set[str] = set()
    for index, source in enumerate(sources):
        if source.video_id in seen:
            raise ManifestError("duplicate video_id", index=index, video_id=source.video_id)
        seen.add(source.video_id)
    return sources


def dump_manifest(sources: list[VideoSource], path: str | Path) -> None:
    """Write sources as a JSON manifest whose frame paths are relative to its directory."""
    path = Path(path)
    base_dir = path.parent.resolve()
    entries = []
    for source in sources:
        entry: dict[str, Any] = {
            "video_id": source.video_id,
            "frames": [Path(frame).resolve().relative_to(base_dir).as_posix() for frame in source.frame_paths],
        }
        if source.source_fps is not None:
            entry["fps"] = source.source_fps
        if source.duration_s is not None:
            entry["duration_s"] = source.duration_s
        entries.append(entry)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(entries, indent=2) + "\n", encoding="utf-8")
