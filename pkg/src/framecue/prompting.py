"""Prompt templates: the VideoLLM system and user prompts and the keyword-extractor prompt.

Every string here is a constant template; golden tests pin them byte for byte.
"""

import json
import re
import string
from typing import Literal, Sequence

from pydantic import BaseModel, ConfigDict

from framecue.errors import RenderError
from framecue.frames.source import SampledSequence
from framecue.prompter.config import POSITION_WORDS, Position
from framecue.prompter.render import format_timestamp

DatasetStyle = Literal["tempcompass", "mvbench", "videomme", "longvideobench", "generic"]

DATASET_STYLES: tuple[DatasetStyle, ...] = ("tempcompass", "mvbench", "videomme", "longvideobench", "generic")

BASE_SYSTEM_PROMPT = "You are a helpful assistant."
VP_SYSTEM_HINT = "Focus on the temporal relationships by referring to the number written in the {position_word} corner of each frame."

GENERIC_CLOSING = "Please answer the question."

CLOSINGS: dict[str, str] = {
    "mvbench": "Only give the best option.",
    "videomme": "The best answer is:",
    "longvideobench": "Answer with the option's letter from the given choices directly.",
    "generic": GENERIC_CLOSING,
}

TEMPCOMPASS_CLOSINGS: dict[str, str] = {
    "multi-choice": "Please directly give the best option.",
    "caption_matching": "Please directly give the best option.",
    "captioning": "Please directly give the best option.",
    "yes_no": "Please answer yes or no.",
}

EXTRACTOR_SYSTEM_PROMPT = "You are a helpful assistant that only extracts keywords and outputs them as a Python list."

EXTRACTOR_RULES = (
    "Follow these rules carefully:\n"
    "1. Identify Key Phrases: Your goal is to extract key phrases from the question that refer to specific "
    "scenes, events, actions, or distinct items.\n"
    "2. Exact Extraction: The extracted phrases must appear exactly as they do in the question. "
    "Do not modify or rephrase them.\n"
    "3. Empty List Condition: If no relevant key phrases (as defined in Rule 1) are found in the question, "
    "you must return an empty list []."
)

FewShot = tuple[str, list[str]]

EXTRACTOR_EXAMPLES: dict[str, tuple[FewShot, FewShot]] = {
    "tempcompass": (
        ("Which sentence better captures the essence of the video?", []),
        ("Which description is a more suitable match for the video?", []),
    ),
    "mvbench": (
        ("What happened after the person took the food?", ["the person took the food"]),
        ("What happened after the person closed the door?", ["the person closed the door"]),
    ),
    "videomme": (
        ("When is the zodiacal light visible from the video?", ["the zodiacal light"]),
        ("Which GPT is introduced after Convert Anything?", ["Convert Anything"]),
    ),
    "longvideobench": (
        (
            "In front of a blue background, a gentleman wearing a shirt with pink floral patterns is speaking. "
            "What did the gentleman do after becoming friends with the unicorn?",
            ["gentleman wearing a shirt with pink floral patterns is speaking", "becoming friends with the unicorn"],
        ),
        (
            "In the movie scene, there is a man in gray-black clothes standing between a red door and wall on the "
            "left, and a silver-white window and yellow wall on the right. After this man appears, which person or "
            "object appears first?",
            [
                "man in gray-black clothes standing",
                "a red door and wall on the left, and a silver-white window and yellow wall on the right",
            ],
        ),
    ),
}
# user-supplied datasets borrow the open-ended question style
EXTRACTOR_EXAMPLES["generic"] = EXTRACTOR_EXAMPLES["videomme"]

_OPTION_PREFIX = re.compile(r"^\(?[A-Z][.)]\s+")


class PromptProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    dataset_style: DatasetStyle = "generic"
    position: Position = "BL"
    vp_enabled: bool = True

    @property
    def position_word(self) -> str:
        return POSITION_WORDS[self.position]


def system_prompt(profile: PromptProfile) -> str:
    if not profile.vp_enabled:
        return BASE_SYSTEM_PROMPT
    return f"{BASE_SYSTEM_PROMPT}\n{VP_SYSTEM_HINT.format(position_word=profile.position_word)}"


def closing_line(profile: PromptProfile, task_type: str | None = None) -> str:
    if profile.dataset_style == "tempcompass":
        key = (task_type or "multi-choice").lower().replace(" ", "_").replace("/", "_")
        return TEMPCOMPASS_CLOSINGS.get(key, GENERIC_CLOSING)
    return CLOSINGS[profile.dataset_style]


def option_letters(count: int) -> str:
    if count > len(string.ascii_uppercase):
        raise ValueError(f"at most 26 options can be lettered, got {count}")
    return string.ascii_uppercase[:count]


def strip_option_prefix(option: str) -> str:
    return _OPTION_PREFIX.sub("", option, count=1)


def format_options(options: Sequence[str]) -> list[str]:
    """Letter options "A. ...", dropping any letter prefix they already carry."""
    letters = option_letters(len(options))
    return [f"{letter}. {strip_option_prefix(option)}" for letter, option in zip(letters, options)]


def user_prompt(profile: PromptProfile, question: str, options: Sequence[str] = (), task_type: str | None = None) -> str:
    lines = [question, *format_options(options), closing_line(profile, task_type)]
    return "\n".join(lines)


def extractor_prompt(profile: PromptProfile, question: str) -> tuple[str, str]:
    examples = []
    for number, (example_question, answer) in enumerate(EXTRACTOR_EXAMPLES[profile.dataset_style], start=1):
        examples.append(f"Example {number}:\nQuestion: {example_question}\nYour Answer: {json.dumps(answer)}")
    user = f"{EXTRACTOR_RULES}\n\n" + "\n\n".join(examples) + f"\n\nNow:\nQuestion: {question}\nYour Answer:"
    return EXTRACTOR_SYSTEM_PROMPT, user


def timeline_block(seq: SampledSequence) -> str:
    """A "Frame i: mm:ss" listing of the sampled frames' source timestamps."""
    if seq.fps is None:
        raise RenderError(f"video '{seq.video_id}' has no fps, cannot build a timeline")
    lines = ["Frame timeline:"]
    for item in seq.items:
        lines.append(f"Frame {item.display_index}: {format_timestamp(item.source_index / seq.fps)}")
    return "\n".join(lines)
