"""Answer parsing, scoring and the per-category accuracy report."""

import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from statistics import fmean
from typing import TYPE_CHECKING, Any, Iterable, Sequence

from framecue.probe.table import percentage, round_half_up
from framecue.prompting import option_letters, strip_option_prefix

if TYPE_CHECKING:
    from framecue.harness.pipeline import EvalRecord

TOTAL = "total"

_STANDALONE_LETTER = re.compile(r"\b([A-Z])\b")


def parse_choice(answer: str, options: Sequence[str]) -> str | None:
    """First standalone option letter in range, else the option whose full text appears in the answer."""
    if not options:
        raise ValueError("parse_choice needs at least one option")
    letters = option_letters(len(options))
    for match in _STANDALONE_LETTER.finditer(answer):
        if match.group(1) in letters:
            return match.group(1)

    lowered = answer.lower()
    best: tuple[int, str] | None = None
    for letter, option in zip(letters, options):
        text = strip_option_prefix(option).strip().lower()
        if text and text in lowered and (best is None or len(text) > best[0]):
            best = (len(text), letter)
    return best[1] if best else None


def contains_phrase(answer: str, gold: str) -> bool:
    """Case-insensitive whole-phrase containment, used for open-ended questions."""
    gold = gold.strip()
    if not gold:
        return False
    return re.search(rf"(?<!\w){re.escape(gold)}(?!\w)", answer, flags=re.IGNORECASE) is not None


def score(answer: str, options: Sequence[str], gold: str | None) -> tuple[str | None, bool | None]:
    """Returns (parsed choice, correct); correct is None without a gold answer."""
    parsed = parse_choice(answer, options) if options else None
    if gold is None:
        return parsed, None
    if options:
        return parsed, parsed == gold
    return parsed, contains_phrase(answer, gold)


# ############################################################
# Aggregation
# ############################################################


@dataclass
class CategoryCounts:
    correct: int = 0
    evaluated: int = 0
    unevaluated: int = 0
    ungraded: int = 0

    def add(self, record: "EvalRecord") -> None:
        if not record.evaluated:
            self.unevaluated += 1
        elif record.correct is None:
            self.ungraded += 1
        else:
            self.evaluated += 1
            self.correct += int(record.correct)

    @property
    def accuracy(self) -> Fraction | None:
        return percentage(self.correct, self.evaluated)

    def to_dict(self) -> dict[str, Any]:
        accuracy = self.accuracy
        return {
            "correct": self.correct,
            "evaluated": self.evaluated,
            "unevaluated": self.unevaluated,
            "ungraded": self.ungraded,
            "accuracy": None if accuracy is None else float(round_half_up(accuracy)),
        }


def aggregate(records: Iterable["EvalRecord"]) -> dict[str, Any]:
    """Counts and accuracy per category and in total; independent of record order."""
    by_category: dict[str, CategoryCounts] = defaultdict(CategoryCounts)
    total = CategoryCounts()
    for record in records:
        by_category[record.category].add(record)
        total.add(record)

    notes = [
        f"category '{name}' has no graded answers"
        for name, counts in sorted(by_category.items())
        if counts.evaluated == 0
    ]
    return {
        "categories": {
            name: counts.to_dict() for name, counts in sorted(by_category.items()) if counts.evaluated > 0
        },
        TOTAL: total.to_dict(),
        "notes": notes,
    }


def timing(records: Sequence["EvalRecord"]) -> dict[str, Any]:
    """Mean latency and frames per question. Kept out of the report because it varies between runs."""
    answered = [record for record in records if record.latency_ms is not None]
    return {
        "questions": len(records),
        "mean_latency_ms": fmean(r.latency_ms for r in answered) if answered else None,
        "mean_frames_sent": fmean(r.frames_sent for r in records) if records else None,
    }


def report_text(report: dict[str, Any]) -> str:
    def fmt(value: float | None) -> str:
        return "n/a" if value is None else f"{value:.2f}"

    rows = [("category", "accuracy", "correct", "graded", "failed")]
    for name, counts in [*report["categories"].items(), (TOTAL, report[TOTAL])]:
        rows.append(
            (name, fmt(counts["accuracy"]), str(counts["correct"]), str(counts["evaluated"]), str(counts["unevaluated"]))
        )
    width = max(len(row[0]) for row in rows)
    lines = [f"{row[0]:<{width}}" + "".join(f"{cell:>10}" for cell in row[1:]) for row in rows]
    lines.extend(f"note: {note}" for note in report["notes"])
    return "\n".join(lines) + "\n"
