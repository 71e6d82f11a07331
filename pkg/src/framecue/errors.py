class FramecueError(Exception):
    """Base class for every error raised by framecue."""


class ManifestError(FramecueError, ValueError):
    def __init__(self, message: str, *, index: int | None = None, video_id: str | None = None):
        self.index = index
        self.video_id = video_id
        where = []
        if index is not None:
            where.append(f"entry {index}")
        if video_id is not None:
            where.append(f"video '{video_id}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


class SamplingError(FramecueError, ValueError):
    pass


class RenderError(FramecueError, ValueError):
    pass


class EmbeddingError(FramecueError, ValueError):
    pass


class MappingError(FramecueError, ValueError):
    pass


class BackendError(FramecueError):
    """Transport failure or wire-protocol violation from an external model endpoint."""


class PayloadTooLargeError(BackendError):
    def __init__(self, frame_count: int, total_bytes: int, limit: int):
        self.frame_count = frame_count
        self.total_bytes = total_bytes
        self.limit = limit
        super().__init__(
            f"Request payload too large: {frame_count} frames, {total_bytes} bytes (limit {limit} bytes)"
        )


class LabelDecodeError(FramecueError):
    pass


class DumpError(FramecueError, ValueError):
    pass


class ConfigError(FramecueError, ValueError):
    pass
