"""Accuracy tables in the layout of the frame-referencing results: one row per
label position (plus the unlabeled row), one column per frame count, and an
average column."""

import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Iterable

NO_VP = "--"

TABLES: dict[str, str] = {
    "lookup": "Lookup accuracy (%)",
    "reverse_lookup": "Reverse-lookup accuracy (%)",
    "reverse_lookup_tol1": "Reverse-lookup accuracy, +/-1 frame (%)",
}


def round_half_up(value: Fraction, places: int = 2) -> Decimal:
    scale = 10**places
    units = math.floor(value * scale + Fraction(1, 2))
    return Decimal(units).scaleb(-places)


def percentage(correct: int, evaluated: int) -> Fraction | None:
    if evaluated == 0:
        return None
    return Fraction(100 * correct, evaluated)


@dataclass
class CellCounts:
    correct: int = 0
    evaluated: int = 0

    def add(self, correct: bool) -> None:
        self.correct += int(correct)
        self.evaluated += 1


@dataclass
class ProbeTable:
    frame_counts: list[int]
    positions: list[str]
    cells: dict[tuple[str, str, int], CellCounts] = field(default_factory=dict)
    failures: dict[tuple[str, int], int] = field(default_factory=dict)

    def cell(self, table: str, position: str, n: int) -> CellCounts:
        return self.cells.setdefault((table, position, n), CellCounts())

    def record(self, results: Iterable[Any]) -> None:
        for result in results:
            if result.task == "lookup":
                name = "lookup"
            else:
                name = "reverse_lookup" if result.tolerance == 0 else "reverse_lookup_tol1"
            self.cell(name, result.position, result.n_frames).add(result.correct)

    def record_failure(self, position: str, n: int) -> None:
        self.failures[(position, n)] = self.failures.get((position, n), 0) + 1

    def accuracy(self, table: str, position: str, n: int) -> Fraction | None:
        counts = self.cells.get((table, position, n), CellCounts())
        return percentage(counts.correct, counts.evaluated)

    def average(self, table: str, position: str) -> Fraction | None:
        """Mean of the row's cell accuracies (cells without data are skipped)."""
        values = [v for n in self.frame_counts if (v := self.accuracy(table, position, n)) is not None]
        if not values:
            return None
        return sum(values, Fraction(0)) / len(values)

    def to_dict(self) -> dict[str, Any]:
        def fmt(value: Fraction | None) -> float | None:
            return None if value is None else float(round_half_up(value))

        out: dict[str, Any] = {"frame_counts": self.frame_counts, "positions": self.positions}
        for table in TABLES:
            rows = {}
            for position in self.positions:
                row = {str(n): fmt(self.accuracy(table, position, n)) for n in self.frame_counts}
                row["average"] = fmt(self.average(table, position))
                rows[position] = row
            out[table] = rows
        out["evaluated"] = {
            position: {str(n): self.cells.get(("lookup", position, n), CellCounts()).evaluated for n in self.frame_counts}
            for position in self.positions
        }
        out["failures"] = {
            position: {str(n): self.failures.get((position, n), 0) for n in self.frame_counts}
            for position in self.positions
        }
        return out

    def to_text(self) -> str:
        def fmt(value: Fraction | None) -> str:
            return "n/a" if value is None else str(round_half_up(value))

        header = ["VP", *(str(n) for n in self.frame_counts), "avg"]
        blocks = []
        for table, title in TABLES.items():
            lines = [title, _row(header)]
            for position in self.positions:
                cells = [fmt(self.accuracy(table, position, n)) for n in self.frame_counts]
                lines.append(_row([position, *cells, fmt(self.average(table, position))]))
            blocks.append("\n".join(lines))
        failed = sum(self.failures.values())
        if failed:
            blocks.append(f"{failed} probe(s) failed and were left out of the denominators")
        return "\n\n".join(blocks) + "\n"


def _row(cells: list[str]) -> str:
    return f"{cells[0]:<4}" + "".join(f"{cell:>9}" for cell in cells[1:])
