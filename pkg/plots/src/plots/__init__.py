"""Figure rendering for the solver's CSV artifacts.

Reads the documented CSV schemas (convergence traces, aggregate tables,
singular spectra, condition sweeps, solution lattices) and draws them as
deterministic SVG + PNG pairs. Nothing is recomputed: if it is not in the
CSV, it is not in the figure.
"""

from .errors import SchemaError, SpecError
from .figspec import KINDS, FigureSpec, load_spec
from .render import render
from .schema import (AGGREGATE_COLUMNS, CONVERGENCE_COLUMNS, SPECTRA_COLUMNS,
                     SWEEP_COLUMNS, Table, read_solution, read_table)

__all__ = [
    "AGGREGATE_COLUMNS", "CONVERGENCE_COLUMNS", "FigureSpec", "KINDS",
    "SchemaError", "SpecError", "SPECTRA_COLUMNS", "SWEEP_COLUMNS", "Table",
    "load_spec", "read_solution", "read_table", "render",
]
