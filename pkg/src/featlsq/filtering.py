"""Per-subdomain column filtering and the block right preconditioner.

Each subdomain block gets a column-pivoted QR truncated at a relative
diagonal threshold; columns past the truncation point are dropped from the
global system. The kept columns of block j then satisfy
M_j[:, kept_j] = Q_j R_j with orthonormal Q_j, so right-preconditioning the
filtered matrix by the block inverse of the stacked R factors yields an
operator whose blocks are orthonormal. Products with that operator never
touch the R factors; only the final coefficient recovery does one triangular
solve per block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .assembly import GlobalSystem
from .errors import CapExceededError, DegenerateSubdomainError, InvalidInputError
from .linalg import DENSE_SIZE_CAP, back_substitute, qr_column_pivot


@dataclass(frozen=True)
class FilteredBlock:
    """QR data of one subdomain block restricted to its kept columns."""

    subdomain: int
    rows: np.ndarray
    kept_columns: np.ndarray
    dropped_columns: np.ndarray
    q_factor: np.ndarray
    r_factor: np.ndarray

    @property
    def kept_count(self) -> int:
        return self.kept_columns.size


@dataclass
class FilteredSystem:
    system: GlobalSystem
    sigma: float
    blocks: list[FilteredBlock]
    offsets: np.ndarray
    _csr: scipy.sparse.csr_matrix | None = field(default=None, repr=False)

    @property
    def kept_total(self) -> int:
        return int(self.offsets[-1])

    @property
    def kept_columns(self) -> np.ndarray:
        return np.concatenate([b.kept_columns for b in self.blocks])

    @property
    def drop_fraction(self) -> float:
        return 1.0 - self.kept_total / self.system.column_count

    def csr(self) -> scipy.sparse.csr_matrix:
        """Filtered matrix: original blocks restricted to kept columns, in
        block-concatenated pivot order."""
        if self._csr is None:
            rows, cols, vals = [], [], []
            for blk, sys_blk, lo in zip(self.blocks, self.system.blocks, self.offsets):
                local = np.searchsorted(sys_blk.columns, blk.kept_columns)
                sub = sys_blk.matrix[:, local]
                rows.append(np.repeat(blk.rows, blk.kept_count))
                cols.append(np.tile(np.arange(lo, lo + blk.kept_count), blk.rows.size))
                vals.append(sub.ravel())
            self._csr = scipy.sparse.coo_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=(self.system.row_count, self.kept_total)).tocsr()
        return self._csr

    def materialize(self, size_cap: int = DENSE_SIZE_CAP) -> np.ndarray:
        if max(self.system.row_count, self.kept_total) > size_cap:
            raise CapExceededError("filtered matrix exceeds dense cap")
        return self.csr().toarray()

    def summary(self) -> dict:
        return {
            "sigma": self.sigma,
            "kept_per_block": [b.kept_count for b in self.blocks],
            "kept_total": self.kept_total,
            "column_count": self.system.column_count,
            "drop_fraction": self.drop_fraction,
        }


def filter_system(system: GlobalSystem, sigma: float) -> FilteredSystem:
    """Filter every subdomain block at relative threshold sigma.

    A block whose columns are all dropped aborts the filtering: that means
    the subdomain contributes nothing and the setup is degenerate.
    """
    blocks = []
    counts = [0]
    for blk in system.blocks:
        pqr = qr_column_pivot(blk.matrix, sigma)
        if pqr.kept.size == 0:
            raise DegenerateSubdomainError(
                f"subdomain {blk.subdomain}: all {blk.columns.size} columns dropped "
                f"at sigma={sigma}")
        blocks.append(FilteredBlock(
            subdomain=blk.subdomain,
            rows=blk.rows,
            kept_columns=blk.columns[pqr.kept],
            dropped_columns=blk.columns[pqr.dropped],
            q_factor=pqr.q_factor,
            r_factor=pqr.r_factor,
        ))
        counts.append(counts[-1] + pqr.kept.size)
    return FilteredSystem(system, sigma, blocks, np.asarray(counts))


@dataclass
class PreconditionedOperator:
    """The filtered matrix times the block inverse of its R factors.

    Blockwise orthonormal by construction; applying it or its transpose uses
    the orthonormal Q blocks only, no triangular solves.
    """

    filtered: FilteredSystem
    _csr: scipy.sparse.csr_matrix | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.filtered.system.row_count, self.filtered.kept_total)

    def csr(self) -> scipy.sparse.csr_matrix:
        if self._csr is None:
            fs = self.filtered
            rows, cols, vals = [], [], []
            for blk, lo in zip(fs.blocks, fs.offsets):
                rows.append(np.repeat(blk.rows, blk.kept_count))
                cols.append(np.tile(np.arange(lo, lo + blk.kept_count), blk.rows.size))
                vals.append(blk.q_factor.ravel())
            self._csr = scipy.sparse.coo_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=self.shape).tocsr()
        return self._csr

    def apply(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.shape[1],):
            raise InvalidInputError(f"expected shape ({self.shape[1]},), got {y.shape}")
        return self.csr() @ y

    def apply_transpose(self, residual: np.ndarray) -> np.ndarray:
        residual = np.asarray(residual, dtype=float)
        if residual.shape != (self.shape[0],):
            raise InvalidInputError(
                f"expected shape ({self.shape[0]},), got {residual.shape}")
        return self.csr().T @ residual

    def materialize(self, size_cap: int = DENSE_SIZE_CAP) -> np.ndarray:
        if max(self.shape) > size_cap:
            raise CapExceededError("preconditioned operator exceeds dense cap")
        return self.csr().toarray()


def precondition(filtered: FilteredSystem) -> PreconditionedOperator:
    return PreconditionedOperator(filtered)


def recover_solution(filtered: FilteredSystem, y: np.ndarray) -> np.ndarray:
    """Map a preconditioned solution back to full feature coefficients.

    Per block: solve R_j a_j = y_j, scatter onto the kept columns; dropped
    columns get exactly zero.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (filtered.kept_total,):
        raise InvalidInputError(
            f"expected shape ({filtered.kept_total},), got {y.shape}")
    coeffs = np.zeros(filtered.system.column_count)
    for blk, lo in zip(filtered.blocks, filtered.offsets):
        coeffs[blk.kept_columns] = back_substitute(
            blk.r_factor, y[lo:lo + blk.kept_count])
    return coeffs
