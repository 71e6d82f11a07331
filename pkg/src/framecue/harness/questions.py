"""Question manifests: one JSON object per line with the fields of `QuestionRecord`."""

import json
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError, model_validator

from framecue.errors import ManifestError
from framecue.prompting import option_letters


class QuestionRecord(BaseModel):
    id: str = Field(min_length=1)
    video_id: str
    question: str = Field(min_length=1)
    options: list[str] = Field(default_factory=list)
    answer: str | None = None
    category: str = "all"
    task_type: str | None = None

    @model_validator(mode="after")
    def _check_answer(self) -> "QuestionRecord":
        if self.options and self.answer is not None:
            letters = option_letters(len(self.options))
            if self.answer not in letters:
                raise ValueError(f"answer '{self.answer}' is not one of the option letters {', '.join(letters)}")
        return self

    @property
    def is_multiple_choice(self) -> bool:
        return bool(self.options)


def load_questions(path: str | Path) -> list[QuestionRecord]:
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"question file not found: {path}")
    records: list[QuestionRecord] = []
    seen: set[str] = set()
    for index, line in enumerate(path.read_text(encoding="utf-8").splitlines()):
        if not line.strip():
            continue
        try:
            record = QuestionRecord.model_validate(json.loads(line))
        except json.JSONDecodeError as e:
            raise ManifestError(f"line {index + 1} is not valid JSON: {e}", index=index) from e
        except ValidationError as e:
            raise ManifestError(f"malformed question: {e}", index=index) from e
        if record.id in seen:
            raise ManifestError(f"duplicate question id '{record.id}'", index=index, video_id=record.video_id)
        seen.add(record.id)
        records.append(record)
    return records


def dump_questions(records: list[QuestionRecord], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [record.model_dump_json(exclude_none=True) for record in records]
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
