"""Least-squares system assembly from windowed random features.

Each column of the global matrix is one feature of one subdomain multiplied
by that subdomain's partition-of-unity window (and the problem's hard
constraint mask, when present), pushed through the problem's linear operator.
Interior rows are residual collocation on a regular lattice with
count_per_dim * ceil(feature_count^(1/d)) points per dimension (one extra
point per subdomain per dimension when a mask is present), scaled by
1/sqrt(row count); soft constraint rows are scaled by sqrt(weight / count).

Storage is per-subdomain dense blocks; since each subdomain owns a disjoint
column range, every (row, column) pair lives in exactly one block. Products
with the full matrix and its transpose go through a CSR cache assembled once
from the blocks, so the global matrix is never densified unless asked for.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .basis import FeatureBasis, feature_jets
from .domains import Decomposition, coverage_counts, support_mask, window_jets
from .errors import CapExceededError, CoverageError, InvalidInputError
from .jets import Jet2
from .linalg import DENSE_SIZE_CAP
from .problems import ProblemSpec


def lattice_counts(count_per_dim: int, feature_count: int, dim: int,
                   extra: int = 0) -> int:
    """Interior lattice points per dimension: S * (ceil(K^(1/d)) + extra)."""
    root = int(np.ceil(feature_count ** (1.0 / dim)))
    while root > 1 and (root - 1) ** dim >= feature_count:
        root -= 1
    while root ** dim < feature_count:
        root += 1
    return count_per_dim * (root + extra)


@dataclass(frozen=True)
class SubdomainBlock:
    """One subdomain's rows and columns of the global matrix."""

    subdomain: int
    rows: np.ndarray
    columns: np.ndarray
    matrix: np.ndarray


@dataclass
class GlobalSystem:
    problem: ProblemSpec
    decomposition: Decomposition
    basis: FeatureBasis
    blocks: list[SubdomainBlock]
    rhs: np.ndarray
    interior_count: int
    row_count: int
    column_count: int
    lattice_axes: tuple[np.ndarray, ...]
    _csr: scipy.sparse.csr_matrix | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.row_count, self.column_count)

    def csr(self) -> scipy.sparse.csr_matrix:
        if self._csr is None:
            rows, cols, vals = [], [], []
            for blk in self.blocks:
                r = np.repeat(blk.rows, blk.columns.size)
                c = np.tile(blk.columns, blk.rows.size)
                rows.append(r)
                cols.append(c)
                vals.append(blk.matrix.ravel())
            coo = scipy.sparse.coo_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=self.shape)
            self._csr = coo.tocsr()
        return self._csr

    def materialize(self, size_cap: int = DENSE_SIZE_CAP) -> np.ndarray:
        if max(self.shape) > size_cap:
            raise CapExceededError(f"shape {self.shape} exceeds cap {size_cap}")
        return self.csr().toarray()


def apply(system: GlobalSystem, coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (system.column_count,):
        raise InvalidInputError(
            f"coefficients must have shape ({system.column_count},), got {coeffs.shape}")
    return system.csr() @ coeffs


def apply_transpose(system: GlobalSystem, residual: np.ndarray) -> np.ndarray:
    residual = np.asarray(residual, dtype=float)
    if residual.shape != (system.row_count,):
        raise InvalidInputError(
            f"residual must have shape ({system.row_count},), got {residual.shape}")
    return system.csr().T @ residual


def _effective_jets(problem: ProblemSpec, dec: Decomposition, basis: FeatureBasis,
                    j: int, points: np.ndarray, axis: int) -> Jet2:
    """Jet of mask * window_j * features_j at points, (P, K) payloads."""
    window = window_jets(dec, j, points, axis)
    if problem.mask_jets is not None:
        window = window * problem.mask_jets(points, axis)
    scalar = Jet2(window.value[:, None], window.first[:, None], window.second[:, None])
    return scalar * feature_jets(basis, j, points, axis)


def _lift_operator_values(problem: ProblemSpec, operator, points: np.ndarray) -> np.ndarray:
    if problem.lift_jets is None:
        return np.zeros(np.atleast_2d(points).shape[0])
    jets = [problem.lift_jets(points, a) for a in range(problem.domain.dim)]
    return operator.apply(jets)


def assemble(problem: ProblemSpec, dec: Decomposition, basis: FeatureBasis,
             interior_per_dim: int | tuple[int, ...] | None = None) -> GlobalSystem:
    """Build the weighted least-squares system for one problem and basis.

    interior_per_dim overrides the default lattice density, either one count
    for every dimension or a per-dimension tuple; condition-number sweeps hold
    the collocation count fixed while varying the basis size.
    """
    if basis.decomposition is not dec and (
            basis.decomposition.count_per_dim != dec.count_per_dim
            or basis.decomposition.overlap_ratio != dec.overlap_ratio
            or not np.array_equal(basis.decomposition.domain.bounds, dec.domain.bounds)):
        raise InvalidInputError("basis was initialized on a different decomposition")
    if not np.array_equal(problem.domain.bounds, dec.domain.bounds):
        raise InvalidInputError("problem and decomposition domains differ")

    d = dec.dim
    if interior_per_dim is None:
        # masked problems get one extra point per subdomain per dimension:
        # mask attenuation starves boundary-adjacent rows, and a merely
        # square system leaves the smallest singular value at rounding noise
        extra = 0 if problem.mask_jets is None else 1
        counts = (lattice_counts(dec.count_per_dim, basis.feature_count, d, extra),) * d
    else:
        counts = (tuple(int(c) for c in interior_per_dim)
                  if isinstance(interior_per_dim, (tuple, list))
                  else (int(interior_per_dim),) * d)
        if len(counts) != d:
            raise InvalidInputError(
                f"interior_per_dim has {len(counts)} entries for a {d}-dim problem")
        if min(counts) < 2:
            raise InvalidInputError("interior_per_dim must be at least 2")
    if problem.mask_jets is None:
        axes = tuple(np.linspace(dec.domain.bounds[i, 0], dec.domain.bounds[i, 1],
                                 counts[i]) for i in range(d))
    else:
        # with a hard-constraint mask, cell centers only: where two mask
        # factors vanish together (corners, initial slices) every ansatz term
        # is annihilated and a boundary point would contribute an exactly-zero
        # row, making the square system singular
        steps = dec.domain.widths / np.asarray(counts)
        axes = tuple(dec.domain.bounds[i, 0] + steps[i] * (np.arange(counts[i]) + 0.5)
                     for i in range(d))
    mesh = np.meshgrid(*axes, indexing="ij")
    interior = np.stack([m.ravel() for m in mesh], axis=1)
    n_interior = interior.shape[0]

    uncovered = coverage_counts(dec, interior) == 0
    if uncovered.any():
        raise CoverageError(
            f"{int(uncovered.sum())} interior points covered by no subdomain")
    for con in problem.constraints:
        if (coverage_counts(dec, con.points) == 0).any():
            raise CoverageError(f"constraint {con.label!r} has uncovered points")

    # right-hand side: forcing minus the operator applied to the lift
    interior_weight = 1.0 / np.sqrt(n_interior)
    rhs_parts = [(problem.forcing(interior)
                  - _lift_operator_values(problem, problem.operator, interior))
                 * interior_weight]
    con_offsets, offset = [], n_interior
    for con in problem.constraints:
        n_con = con.points.shape[0]
        w = np.sqrt(con.weight / n_con)
        rhs_parts.append((con.targets
                          - _lift_operator_values(problem, con.operator, con.points)) * w)
        con_offsets.append((offset, w))
        offset += n_con
    rhs = np.concatenate(rhs_parts)
    row_count = offset
    column_count = basis.column_count

    # per-dimension lattice index ranges covered by each subdomain
    blocks: list[SubdomainBlock] = []
    k = basis.feature_count
    for j in range(dec.subdomain_count):
        idx = dec.multi_index(j)
        dim_indices = []
        for i in range(d):
            mu, half = dec.centers[i, idx[i]], dec.half_widths[i]
            dim_indices.append(np.nonzero(np.abs(axes[i] - mu) < half)[0])
        if any(ix.size == 0 for ix in dim_indices):
            box_rows = np.empty(0, dtype=int)
            box_points = np.empty((0, d))
        else:
            grids = np.meshgrid(*dim_indices, indexing="ij")
            box_rows = np.ravel_multi_index([g.ravel() for g in grids], counts)
            box_points = np.stack([axes[i][g.ravel()] for i, g in enumerate(grids)],
                                  axis=1)

        row_sets = [box_rows]
        parts = []
        if box_points.shape[0]:
            jets = [_effective_jets(problem, dec, basis, j, box_points, a)
                    for a in range(d)]
            parts.append(problem.operator.apply(jets) * interior_weight)
        else:
            parts.append(np.empty((0, k)))
        for con, (con_offset, w) in zip(problem.constraints, con_offsets):
            inside = support_mask(dec, j, con.points)
            row_sets.append(con_offset + np.nonzero(inside)[0])
            if inside.any():
                pts = np.atleast_2d(con.points)[inside]
                jets = [_effective_jets(problem, dec, basis, j, pts, a)
                        for a in range(d)]
                parts.append(con.operator.apply(jets) * w)
            else:
                parts.append(np.empty((0, k)))

        rows = np.concatenate(row_sets).astype(int)
        matrix = np.concatenate(parts, axis=0)
        blocks.append(SubdomainBlock(j, rows, basis.column_range(j), matrix))

    return GlobalSystem(problem, dec, basis, blocks, rhs, n_interior,
                        row_count, column_count, axes)


# ---------------------------------------------------------------------------
# prediction and testing

def solution_matrix(problem: ProblemSpec, dec: Decomposition, basis: FeatureBasis,
                    points: np.ndarray):
    """CSR matrix P of mask * window * feature values at points, plus the lift
    values, so predictions are P @ coeffs + lift."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = points.shape[0]
    mask_vals = problem.mask_value(points) if problem.mask_value else None
    rows, cols, vals = [], [], []
    for j in range(dec.subdomain_count):
        inside = np.nonzero(support_mask(dec, j, points))[0]
        if inside.size == 0:
            continue
        pts = points[inside]
        w = window_jets(dec, j, pts, 0).value
        if mask_vals is not None:
            w = w * mask_vals[inside]
        phi = feature_jets(basis, j, pts, 0).value
        block = w[:, None] * phi
        rows.append(np.repeat(inside, basis.feature_count))
        cols.append(np.tile(basis.column_range(j), inside.size))
        vals.append(block.ravel())
    if rows:
        phi_matrix = scipy.sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, basis.column_count)).tocsr()
    else:
        phi_matrix = scipy.sparse.csr_matrix((n, basis.column_count))
    lift = problem.lift_value(points) if problem.lift_value else np.zeros(n)
    return phi_matrix, lift


def evaluate_solution(problem: ProblemSpec, dec: Decomposition, basis: FeatureBasis,
                      coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Predicted solution mask * sum_j window_j sum_k coeff_jk feature_jk + lift."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (basis.column_count,):
        raise InvalidInputError(
            f"coefficients must have shape ({basis.column_count},)")
    phi_matrix, lift = solution_matrix(problem, dec, basis, points)
    return phi_matrix @ coeffs + lift


@dataclass(frozen=True)
class TestSet:
    """Regular evaluation lattice with true values and their spread."""

    points: np.ndarray
    true_values: np.ndarray
    spread: float


def make_test_set(problem: ProblemSpec, dec: Decomposition) -> TestSet:
    """Evaluation lattice with problem.test_points_per_count * count points
    per dimension; true values come from the problem's exact solution."""
    if problem.exact is None:
        raise InvalidInputError(
            f"problem {problem.name!r} has no exact or reference solution attached")
    per_dim = problem.test_points_per_count * dec.count_per_dim
    axes = [np.linspace(problem.domain.bounds[i, 0], problem.domain.bounds[i, 1],
                        per_dim) for i in range(problem.domain.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    true_values = problem.exact(points)
    spread = float(np.std(true_values))
    if spread == 0.0:
        raise InvalidInputError("true solution has zero spread on the test lattice")
    return TestSet(points, true_values, spread)


def l1_error(predicted: np.ndarray, test_set: TestSet) -> float:
    """Mean absolute error normalized by the spread of the true values."""
    predicted = np.asarray(predicted, dtype=float)
    if predicted.shape != test_set.true_values.shape:
        raise InvalidInputError("prediction and truth shapes differ")
    return float(np.mean(np.abs(predicted - test_set.true_values)) / test_set.spread)


def export_coo(system: GlobalSystem, path: str, size_cap: int = DENSE_SIZE_CAP) -> None:
    """Write the matrix as 'row col value' text plus the rhs, one value per line."""
    if max(system.shape) > size_cap:
        raise CapExceededError(f"shape {system.shape} exceeds cap {size_cap}")
    coo = system.csr().tocoo()
    with open(path + ".coo", "w") as fh:
        fh.write(f"# rows {system.row_count} cols {system.column_count}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {v:.17g}\n")
    with open(path + ".rhs", "w") as fh:
        for v in system.rhs:
            fh.write(f"{v:.17g}\n")
