"""CSV reading against the fixed artifact schemas.

The solver pipeline writes its results as CSV files with exact, documented
headers (including the unicode kappa/sigma column names). Everything here
validates against those headers and converts cells with errors that name the
offending file, column, and line.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import SchemaError

CONVERGENCE_COLUMNS = ("iteration", "residual", "e_L1")

SPECTRA_COLUMNS = ("index", "σ(M)", "σ(Q)")

SWEEP_COLUMNS = ("K", "δ", "κ(M)", "κ(M̂S⁻¹)")

AGGREGATE_COLUMNS = (
    "network", "h", "K", "κ(M)", "κ(M̂)", "κ(M̂S⁻¹)",
    "κ(MᵀM)", "κ(A_AS⁻¹A)", "optimiser", "σ", "drop %",
    "e_L1 median", "e_L1 range", "time mean", "time stddev",
)


@dataclass(frozen=True)
class Table:
    """One parsed CSV: the path it came from, its header, and string cells."""

    path: str
    header: tuple[str, ...]
    cells: tuple[tuple[str, ...], ...]

    def column(self, name: str, cast=float, blank=None) -> np.ndarray:
        """One column as an array; conversion failures name file and line.

        blank substitutes for empty cells; columns of different length are
        padded with empty cells in these files (e.g. the filtered spectrum is
        shorter than the raw one). With blank=None an empty cell is an error.
        """
        if name not in self.header:
            raise SchemaError(f"{self.path}: missing columns: {name}")
        at = self.header.index(name)
        out = []
        for number, row in enumerate(self.cells, start=2):
            if row[at] == "" and blank is not None:
                out.append(blank)
                continue
            try:
                out.append(cast(row[at]))
            except ValueError as err:
                raise SchemaError(
                    f"{self.path}:{number}: column {name!r}: "
                    f"cannot read {row[at]!r} as {cast.__name__}") from err
        return np.asarray(out)

    def strings(self, name: str) -> list[str]:
        if name not in self.header:
            raise SchemaError(f"{self.path}: missing columns: {name}")
        at = self.header.index(name)
        return [row[at] for row in self.cells]


def read_table(path: str, required: tuple[str, ...]) -> Table:
    """Parse a CSV and check that every required column is present.

    Extra columns are fine (schemas only grow); missing ones are reported all
    at once, by name. An empty file and a header-only file are both errors:
    every figure needs at least one data row.
    """
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise SchemaError(f"cannot read {path}: {err}") from err
    if not rows:
        raise SchemaError(
            f"{path}: empty file, expected columns: {', '.join(required)}")
    header = tuple(cell.strip() for cell in rows[0])
    missing = [name for name in required if name not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns: {', '.join(missing)}")
    cells = []
    for number, row in enumerate(rows[1:], start=2):
        if not row:
            continue        # trailing blank line
        if len(row) != len(header):
            raise SchemaError(f"{path}:{number}: expected {len(header)} "
                              f"fields, got {len(row)}")
        cells.append(tuple(row))
    if not cells:
        raise SchemaError(f"{path}: no data rows")
    return Table(path, header, tuple(cells))


def read_solution(path: str) -> Table:
    """Parse a solution table: x0..x{d-1} coordinates, then true, predicted.

    The coordinate count is not fixed, so the schema check is structural:
    contiguous x0, x1, ... columns followed by the two value columns.
    """
    return read_table(path, ("x0", "true", "predicted"))


def coordinate_count(table: Table) -> int:
    """Number of contiguous x0, x1, ... coordinate columns."""
    count = 0
    while f"x{count}" in table.header:
        count += 1
    return count
