"""Reader for the commented-CSV format produced by the thermometry CLI.

The format is: '#'-prefixed header lines, one column-name line, data rows,
and optional '#'-prefixed footer lines. Cell values are kept as the raw
strings from the file so a text dump can reproduce them bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class PlotError(Exception):
    """Base error for the figure pipeline."""


class EmptyTableError(PlotError):
    """The CSV contains no data rows."""


class SchemaError(PlotError):
    """The CSV columns do not match what the figure id requires."""


@dataclass(frozen=True)
class FigureTable:
    """Parsed CSV: header comments, column names, raw string cells, footer."""

    header: tuple[str, ...]
    columns: tuple[str, ...]
    cells: tuple[tuple[str, ...], ...]
    footer: tuple[str, ...]

    def require(self, names: tuple[str, ...]) -> None:
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise SchemaError(
                f"missing column(s) {', '.join(missing)}; "
                f"file provides: {', '.join(self.columns)}"
            )

    def raw_column(self, name: str) -> list[str]:
        self.require((name,))
        i = self.columns.index(name)
        return [row[i] for row in self.cells]

    def column(self, name: str) -> np.ndarray:
        return np.array([float(v) for v in self.raw_column(name)])


def read_table(path: str) -> FigureTable:
    header: list[str] = []
    footer: list[str] = []
    columns: tuple[str, ...] | None = None
    cells: list[tuple[str, ...]] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                (header if columns is None else footer).append(line)
            elif columns is None:
                columns = tuple(line.split(","))
            else:
                row = tuple(line.split(","))
                if len(row) != len(columns):
                    raise SchemaError(
                        f"row has {len(row)} fields, expected {len(columns)}: {line!r}"
                    )
                cells.append(row)
    if columns is None or not cells:
        raise EmptyTableError(f"no data rows in {path}")
    return FigureTable(tuple(header), columns, tuple(cells), tuple(footer))
