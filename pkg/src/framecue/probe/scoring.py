import re

_INTEGER = re.compile(r"\d+")


def score_lookup(answer: str, marker_word: str) -> bool:
    """Case-insensitive whole-word containment of the marker word."""
    if not marker_word:
        return False
    pattern = rf"(?<!\w){re.escape(marker_word)}(?!\w)"
    return re.search(pattern, answer, flags=re.IGNORECASE) is not None


def parse_frame_number(answer: str) -> int | None:
    """First integer in the answer; a leading "frame" or "frame #" is skipped naturally."""
    match = _INTEGER.search(answer)
    return int(match.group()) if match else None


def score_reverse(answer: str, true_k: int, tolerance: int = 0) -> bool:
    if true_k < 1:
        raise ValueError(f"true frame index must be >= 1, got {true_k}")
    if tolerance < 0:
        raise ValueError(f"tolerance must be >= 0, got {tolerance}")
    predicted = parse_frame_number(answer)
    return predicted is not None and abs(predicted - true_k) <= tolerance
