"""Experiment report containers and CSV/JSON serialization.

A report is a header (config echo), a rectangular row block with a
declared column schema, and a summary of derived quantities (min/max,
fitted slopes, verdicts).  CSV carries the rows (RFC 4180, header row
first); JSON carries name, header, column schema and summary.  Rows are
written with repr-style shortest float formatting, so identical configs
reproduce byte-identical CSV bodies.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

ARTIFACT_VERSION = "0.1.0"

Scalar = bool | int | float | str | None


def _cell(value: Scalar) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


@dataclass
class ExperimentReport:
    """Rows plus self-describing schema for one experiment run."""

    name: str
    columns: tuple[str, ...]
    header: dict[str, Scalar] = field(default_factory=dict)
    rows: list[tuple[Scalar, ...]] = field(default_factory=list)
    summary: dict[str, Scalar] = field(default_factory=dict)

    def add_row(self, *values: Scalar) -> None:
        if len(values) != len(self.columns):
            raise ValueError(
                f"row width {len(values)} != schema width {len(self.columns)}"
            )
        self.rows.append(values)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)  # default dialect is RFC-4180 quoting
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_cell(v) for v in row])

    def write_json(self, path: str | Path) -> None:
        doc = {
            "name": self.name,
            "artifact_version": ARTIFACT_VERSION,
            "header": self.header,
            "columns": list(self.columns),
            "row_count": len(self.rows),
            "summary": self.summary,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def column(self, name: str) -> list[Scalar]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]
