"""CSV intake with named-column validation.

The simulator documents a fixed header per file kind; every reader here
checks for the columns it needs and fails with an error that names the
missing column and the offending file.
"""

from __future__ import annotations

import csv
from pathlib import Path


class PlotInputError(ValueError):
    """An input CSV is unreadable or lacks a required column."""


def read_rows(path: str | Path) -> list[dict[str, str]]:
    """All rows of a CSV as dicts keyed by its header."""
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise PlotInputError(f"{path}: empty file, no header")
            rows = list(reader)
    except OSError as exc:
        raise PlotInputError(f"cannot read {path}: {exc}") from exc
    return rows


def require_columns(path: str | Path, rows: list[dict[str, str]],
                    needed: tuple[str, ...]) -> None:
    """Raise a PlotInputError naming each column absent from the header."""
    header = set(rows[0]) if rows else set()
    if not rows:
        with open(path, newline="") as fh:
            first = csv.reader(fh)
            header = set(next(first, []))
    missing = [col for col in needed if col not in header]
    if missing:
        raise PlotInputError(
            f"{path}: missing column(s) {', '.join(repr(c) for c in missing)}"
            f" (header has {sorted(header)})")


def floats(rows: list[dict[str, str]], column: str) -> list[float]:
    try:
        return [float(row[column]) for row in rows]
    except ValueError as exc:
        raise PlotInputError(f"column {column!r}: {exc}") from exc
