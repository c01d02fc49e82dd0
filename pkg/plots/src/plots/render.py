"""Figure builders: CSV tables in, SVG + PNG out.

Rendering is deterministic: fixed figure sizes and DPI, a fixed SVG hash
salt, no timestamps in the output metadata. Re-rendering the same inputs
with the same library versions reproduces the files byte for byte. Inputs
are only ever read.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import LogNorm

from .errors import SchemaError, SpecError
from .figspec import FigureSpec
from .schema import (AGGREGATE_COLUMNS, CONVERGENCE_COLUMNS, SPECTRA_COLUMNS,
                     SWEEP_COLUMNS, Table, coordinate_count, read_solution,
                     read_table)

matplotlib.rcParams["svg.hashsalt"] = "featlsq-plots"
# keep text as text: greppable, diffable, and smaller than glyph outlines
matplotlib.rcParams["svg.fonttype"] = "none"

SIZE = (6.4, 4.8)
WIDE = (9.6, 4.2)
DPI = 150


def render(spec: FigureSpec) -> tuple[str, str]:
    """Draw the figure a spec describes; returns the (svg, png) paths."""
    fig = _BUILDERS[spec.kind](spec)
    if spec.title:
        fig.suptitle(spec.title)
    return _save(fig, spec.output)


def _save(fig, output: str) -> tuple[str, str]:
    base, ext = os.path.splitext(output)
    if ext.lower() not in (".svg", ".png"):
        base = output
    parent = os.path.dirname(base)
    if parent:
        os.makedirs(parent, exist_ok=True)
    svg, png = base + ".svg", base + ".png"
    fig.savefig(svg, format="svg", metadata={"Date": None})
    fig.savefig(png, format="png", dpi=DPI)
    plt.close(fig)
    return svg, png


def _single_input(spec: FigureSpec) -> str:
    if len(spec.inputs) != 1:
        raise SpecError(f"kind {spec.kind!r} takes exactly one input CSV, "
                        f"got {len(spec.inputs)}")
    return spec.inputs[0]


def _label(spec: FigureSpec, index: int) -> str:
    if spec.labels:
        return spec.labels[index]
    return os.path.splitext(os.path.basename(spec.inputs[index]))[0]


# ---------------------------------------------------------------------------
# convergence: residual and test error vs iteration, one curve per input

def _convergence(spec: FigureSpec):
    tables = [read_table(path, CONVERGENCE_COLUMNS) for path in spec.inputs]
    panels = ("residual", "e_L1") if spec.value in ("", "both") \
        else (spec.value,)
    fig, axes = plt.subplots(len(panels), 1, figsize=SIZE, sharex=True,
                             squeeze=False)
    for axis, quantity in zip(axes[:, 0], panels):
        for index, table in enumerate(tables):
            axis.semilogy(table.column("iteration"), table.column(quantity),
                          label=_label(spec, index), linewidth=1.0)
        axis.set_ylabel(quantity)
        axis.grid(True, which="both", alpha=0.3)
    axes[-1, 0].set_xlabel("iteration")
    axes[0, 0].legend(loc="upper right", fontsize="small")
    return fig


# ---------------------------------------------------------------------------
# scaling: accuracy vs wall time, one series per solver, labeled by K

def _scaling(spec: FigureSpec):
    tables = [read_table(path, AGGREGATE_COLUMNS) for path in spec.inputs]
    series: dict[str, list[tuple[float, float, int]]] = {}
    for table in tables:
        times = table.column("time mean")
        errors = table.column("e_L1 median")
        sizes = table.column("K", cast=int)
        for solver, time, error, k in zip(table.strings("optimiser"), times,
                                          errors, sizes):
            series.setdefault(solver, []).append((float(time), float(error),
                                                  int(k)))
    fig, axis = plt.subplots(figsize=SIZE)
    for solver in sorted(series):
        points = sorted(series[solver], key=lambda p: p[2])
        times = [p[0] for p in points]
        errors = [p[1] for p in points]
        axis.loglog(times, errors, marker="o", markersize=4, linewidth=1.0,
                    label=solver)
        for time, error, k in points:
            axis.annotate(f"K={k}", (time, error), fontsize=7,
                          xytext=(3, 3), textcoords="offset points")
    axis.set_xlabel("solve time mean [s]")
    axis.set_ylabel("e_L1 median")
    axis.grid(True, which="both", alpha=0.3)
    axis.legend(fontsize="small")
    return fig


# ---------------------------------------------------------------------------
# spectra: singular values of the raw and preconditioned systems

def _spectra(spec: FigureSpec):
    table = read_table(_single_input(spec), SPECTRA_COLUMNS)
    fig, axis = plt.subplots(figsize=SIZE)
    index = table.column("index")
    # the filtered spectrum is shorter than the raw one; its tail is padded
    # with empty cells, drawn as gaps
    pad = float("nan")
    axis.semilogy(index, table.column("σ(M)", blank=pad), label="σ(M)",
                  linewidth=1.2)
    axis.semilogy(index, table.column("σ(Q)", blank=pad), label="σ(Q)",
                  linewidth=1.2, linestyle="--")
    axis.set_xlabel("singular value index")
    axis.set_ylabel("σ")
    axis.grid(True, which="both", alpha=0.3)
    axis.legend()
    return fig


# ---------------------------------------------------------------------------
# kappa-sweep: heatmap of a condition number over the (K, overlap) grid

def _kappa_sweep(spec: FigureSpec):
    table = read_table(_single_input(spec), SWEEP_COLUMNS)
    quantity = spec.value or "κ(M̂S⁻¹)"
    sizes = table.column("K", cast=int)
    deltas = table.column("δ")
    values = table.column(quantity)
    rows = np.unique(sizes)
    cols = np.unique(deltas)
    grid = np.full((rows.size, cols.size), np.nan)
    for k, delta, value in zip(sizes, deltas, values):
        i = int(np.searchsorted(rows, k))
        j = int(np.searchsorted(cols, delta))
        if not np.isnan(grid[i, j]):
            raise SchemaError(f"{table.path}: duplicate cell K={k} δ={delta:g}")
        grid[i, j] = value
    fig, axis = plt.subplots(figsize=SIZE)
    finite = grid[np.isfinite(grid)]
    if finite.size == 0 or np.min(finite) <= 0.0:
        raise SchemaError(f"{table.path}: {quantity} must be positive for "
                          "the log color scale")
    image = axis.imshow(grid, aspect="auto", origin="lower",
                        norm=LogNorm(vmin=float(np.min(finite)),
                                     vmax=float(np.max(finite))),
                        cmap="viridis")
    axis.set_xticks(range(cols.size), [f"{d:g}" for d in cols])
    axis.set_yticks(range(rows.size), [str(int(k)) for k in rows])
    axis.set_xlabel("overlap δ")
    axis.set_ylabel("features per subdomain K")
    for i in range(rows.size):
        for j in range(cols.size):
            if np.isfinite(grid[i, j]):
                axis.text(j, i, f"{grid[i, j]:.2g}", ha="center", va="center",
                          fontsize=7, color="white")
    fig.colorbar(image, ax=axis, label=quantity)
    return fig


# ---------------------------------------------------------------------------
# solution-compare: reference vs prediction on the test lattice

def _solution_compare(spec: FigureSpec):
    table = read_solution(_single_input(spec))
    dim = coordinate_count(table)
    if dim == 1:
        return _solution_curve(table)
    if dim == 2:
        return _solution_panels(table, table.column("x0"), table.column("x1"),
                                np.ones(len(table.cells), dtype=bool), "")
    if dim == 3:
        # a (2+1)-d field: show the middle time slice
        slices = np.unique(table.column("x2"))
        at = slices[slices.size // 2]
        keep = table.column("x2") == at
        return _solution_panels(table, table.column("x0"), table.column("x1"),
                                keep, f" at x2 = {at:g}")
    raise SchemaError(f"{table.path}: {dim} coordinate columns; "
                      "can draw 1, 2, or 3")


def _solution_curve(table: Table):
    order = np.argsort(table.column("x0"))
    x = table.column("x0")[order]
    fig, axis = plt.subplots(figsize=SIZE)
    axis.plot(x, table.column("true")[order], label="true", linewidth=1.2)
    axis.plot(x, table.column("predicted")[order], label="predicted",
              linewidth=1.2, linestyle="--")
    axis.set_xlabel("x0")
    axis.grid(True, alpha=0.3)
    axis.legend()
    return fig


def _solution_panels(table: Table, x: np.ndarray, y: np.ndarray,
                     keep: np.ndarray, note: str):
    x, y = x[keep], y[keep]
    xu, yu = np.unique(x), np.unique(y)
    names = ("true", "predicted")
    grids = []
    for name in names:
        values = table.column(name)[keep]
        grid = np.full((xu.size, yu.size), np.nan)
        grid[np.searchsorted(xu, x), np.searchsorted(yu, y)] = values
        if np.isnan(grid).any():
            raise SchemaError(f"{table.path}: points do not fill a full "
                              "(x0, x1) lattice")
        grids.append(grid)
    low = min(float(np.min(g)) for g in grids)
    high = max(float(np.max(g)) for g in grids)
    fig, axes = plt.subplots(1, 2, figsize=WIDE, sharey=True)
    for axis, name, grid in zip(axes, names, grids):
        image = axis.pcolormesh(xu, yu, grid.T, vmin=low, vmax=high,
                                shading="nearest", rasterized=True)
        axis.set_title(name + note, fontsize="medium")
        axis.set_xlabel("x0")
    axes[0].set_ylabel("x1")
    fig.colorbar(image, ax=list(axes))
    return fig


_BUILDERS = {
    "convergence": _convergence,
    "scaling": _scaling,
    "spectra": _spectra,
    "kappa-sweep": _kappa_sweep,
    "solution-compare": _solution_compare,
}
