"""Conditioning analysis: measured condition numbers, overlap coupling
against the block-tridiagonal bound, and random-matrix statistics that
predict the coupling for randomly initialized features.

The coupling story: after filtering and right preconditioning, each
subdomain's columns are orthonormal over its own rows, so the Gram matrix of
the global operator is identity plus coupling blocks from row overlap. For a
chain of subdomains where only neighbors overlap, the Gram matrix is block
tridiagonal and kappa <= sqrt((1 + 2 alpha) / (1 - 2 alpha)) whenever
2 alpha < 1, with alpha the largest coupling-block spectral norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, UnsupportedTopologyError
from .filtering import FilteredSystem
from .linalg import DENSE_SIZE_CAP, haar_orthogonal, singular_values, spectral_block_bound
from .solvers import as_operator

SINGULAR_FLAG_FACTOR = 100.0


@dataclass(frozen=True)
class ConditionEstimate:
    value: float
    method: str  # "dense" or "lanczos"
    numerically_singular: bool

    def __float__(self) -> float:
        return self.value


def _lanczos_extremes(op, max_iters: int, seed: int) -> tuple[float, float]:
    """Golub-Kahan bidiagonalization with full reorthogonalization; exact to
    rounding when the step count reaches min(shape)."""
    m, n = op.shape
    steps = min(max_iters, m, n)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    us = np.zeros((m, steps))
    vs = np.zeros((n, steps + 1))
    vs[:, 0] = v
    alphas, betas = [], []
    u_prev = np.zeros(m)
    beta = 0.0
    for i in range(steps):
        u = op.matvec(vs[:, i]) - beta * u_prev
        u -= us[:, :i] @ (us[:, :i].T @ u)
        alpha = float(np.linalg.norm(u))
        if alpha == 0.0:
            break
        u /= alpha
        us[:, i] = u
        alphas.append(alpha)
        w = op.rmatvec(u) - alpha * vs[:, i]
        w -= vs[:, :i + 1] @ (vs[:, :i + 1].T @ w)
        beta = float(np.linalg.norm(w))
        if beta == 0.0:
            break
        vs[:, i + 1] = w / beta
        betas.append(beta)
        u_prev = u
    k = len(alphas)
    if k == 0:
        return 0.0, 0.0
    bidiag = np.zeros((k, k))
    bidiag[np.arange(k), np.arange(k)] = alphas
    if k > 1:
        bidiag[np.arange(1, k), np.arange(k - 1)] = betas[:k - 1]
    svals = np.linalg.svd(bidiag, compute_uv=False)
    return float(svals[0]), float(svals[-1])


def condition_number(thing, size_cap: int = DENSE_SIZE_CAP,
                     lanczos_iters: int = 200, seed: int = 0) -> ConditionEstimate:
    """Spectral condition number.

    Dense SVD when given a matrix within the size cap; otherwise a Lanczos
    bidiagonalization estimate (exact only when iterations reach the smaller
    dimension, flagged by method="lanczos"). sigma_min at rounding level is
    returned as-is but flagged numerically singular.
    """
    if isinstance(thing, np.ndarray) and max(thing.shape) <= size_cap:
        svals = singular_values(thing, size_cap)
        if svals.size == 0 or svals[0] == 0.0:
            raise InvalidInputError("condition number of an empty or zero matrix")
        smax, smin = float(svals[0]), float(svals[-1])
        method = "dense"
    else:
        op = as_operator(thing)
        smax, smin = _lanczos_extremes(op, lanczos_iters, seed)
        if smax == 0.0:
            raise InvalidInputError("condition number of a zero operator")
        method = "lanczos"
    singular = smin <= SINGULAR_FLAG_FACTOR * np.finfo(float).eps * smax
    value = np.inf if smin == 0.0 else smax / smin
    return ConditionEstimate(value, method, bool(singular))


# ---------------------------------------------------------------------------
# overlap coupling and the tridiagonal bound

def tridiagonal_bound(alpha: float) -> float:
    """sqrt((1 + 2a)/(1 - 2a)) for 2a < 1, else +inf (bound not applicable)."""
    if alpha < 0.0:
        raise InvalidInputError("coupling norm cannot be negative")
    if 2.0 * alpha >= 1.0:
        return np.inf
    return float(np.sqrt((1.0 + 2.0 * alpha) / (1.0 - 2.0 * alpha)))


@dataclass(frozen=True)
class CouplingReport:
    pair_norms: np.ndarray
    shared_row_counts: np.ndarray
    alpha: float
    bound: float
    measured: float
    pairwise_only: bool
    two_block_exact: float | None


def chain_coupling(rows_list: list[np.ndarray], q_list: list[np.ndarray],
                   row_count: int) -> CouplingReport:
    """Coupling analysis of a chain of blockwise-orthonormal blocks.

    Blocks are taken adjacent in list order. Rows shared by three or more
    blocks break the tridiagonal model; they are reported via pairwise_only
    = False and the bound should not be asserted in that case.
    """
    if len(rows_list) != len(q_list) or len(q_list) < 1:
        raise InvalidInputError("need equal, nonempty block row and factor lists")
    norms, counts = [], []
    for j in range(len(q_list) - 1):
        shared, idx_a, idx_b = np.intersect1d(
            rows_list[j], rows_list[j + 1], return_indices=True)
        counts.append(shared.size)
        if shared.size == 0:
            norms.append(0.0)
            continue
        cross = q_list[j + 1][idx_b].T @ q_list[j][idx_a]
        norms.append(float(np.linalg.norm(cross, 2)))
    norms = np.asarray(norms) if norms else np.zeros(0)
    counts = np.asarray(counts, dtype=int) if counts else np.zeros(0, dtype=int)
    alpha = float(norms.max()) if norms.size else 0.0

    hits = np.zeros(row_count, dtype=int)
    total_cols = 0
    for rows, q in zip(rows_list, q_list):
        hits[rows] += 1
        total_cols += q.shape[1]
    pairwise_only = bool(hits.max(initial=0) <= 2)

    dense = np.zeros((row_count, total_cols))
    col = 0
    for rows, q in zip(rows_list, q_list):
        dense[rows, col:col + q.shape[1]] = q
        col += q.shape[1]
    svals = singular_values(dense)
    measured = float(svals[0] / svals[-1]) if svals[-1] > 0.0 else np.inf

    two_block = None
    if len(q_list) == 2:
        a1 = norms[0]
        two_block = np.inf if a1 >= 1.0 else float(np.sqrt((1.0 + a1) / (1.0 - a1)))
    return CouplingReport(norms, counts, alpha, tridiagonal_bound(alpha),
                          measured, pairwise_only, two_block)


def coupling_report(filtered: FilteredSystem) -> CouplingReport:
    """Coupling analysis of a filtered one-dimensional system."""
    if filtered.system.decomposition.dim != 1:
        raise UnsupportedTopologyError(
            "coupling analysis needs a chain; only 1-D decompositions qualify")
    rows_list = [blk.rows for blk in filtered.blocks]
    q_list = [blk.q_factor for blk in filtered.blocks]
    return chain_coupling(rows_list, q_list, filtered.system.row_count)


def random_chain(rng: np.random.Generator, block_count: int, cols: int,
                 interior_rows: tuple[int, int] = (8, 40),
                 overlap_rows: tuple[int, int] = (1, 8)):
    """Random blockwise-orthonormal chain with pairwise-only overlap.

    Returns (rows_list, q_list, row_count). Block j owns a run of private
    rows plus shared runs with each neighbor; its factor is the Q of a
    Gaussian draw, so columns are orthonormal over the block's rows.
    """
    if block_count < 2:
        raise InvalidInputError("a chain needs at least two blocks")
    privates = rng.integers(max(cols, interior_rows[0]), interior_rows[1] + 1,
                            size=block_count)
    overlaps = rng.integers(overlap_rows[0], overlap_rows[1] + 1,
                            size=block_count - 1)
    starts, row_count = [], 0
    for j in range(block_count):
        starts.append(row_count)
        row_count += int(privates[j])
        if j < block_count - 1:
            row_count += int(overlaps[j])
    rows_list, q_list = [], []
    for j in range(block_count):
        lo = starts[j] - (int(overlaps[j - 1]) if j > 0 else 0)
        hi = starts[j] + int(privates[j]) + (int(overlaps[j]) if j < block_count - 1 else 0)
        rows = np.arange(lo, hi)
        g = rng.standard_normal((rows.size, cols))
        q, _ = np.linalg.qr(g)
        rows_list.append(rows)
        q_list.append(q)
    return rows_list, q_list, row_count


# ---------------------------------------------------------------------------
# random-matrix statistics for Haar blocks

@dataclass(frozen=True)
class BlockStatsReport:
    dim: int
    block_rows: int
    block_cols: int
    trials: int
    mean_cross_fro: float
    cross_fro_bound: float
    mean_block_fro: float
    block_fro_expected: float
    mean_block_spectral: float
    block_spectral_bound: float
    mean_cross_spectral: float
    cross_spectral_bound: float
    kappa_estimate_squared: float
    kappa_estimate_linear: float

    def all_bounds_hold(self, fro_slack: float) -> bool:
        return (self.mean_cross_fro <= self.cross_fro_bound * fro_slack
                and self.mean_block_spectral <= self.block_spectral_bound
                and self.mean_cross_spectral <= self.cross_spectral_bound)


def haar_block_stats(dim: int, block_rows: int, block_cols: int, trials: int,
                     rng: np.random.Generator) -> BlockStatsReport:
    """Monte Carlo means of block norms of independent Haar matrices.

    Per trial, draw two independent Haar dim x dim matrices, slice the
    leading block_rows x block_cols corner of each, and record the Frobenius
    and spectral norms of one block and of the cross product.
    """
    if trials < 1:
        raise InvalidInputError("need at least one trial")
    cross_fro = np.empty(trials)
    block_fro = np.empty(trials)
    block_spec = np.empty(trials)
    cross_spec = np.empty(trials)
    for t in range(trials):
        p1 = haar_orthogonal(dim, rng)[:block_rows, :block_cols]
        q1 = haar_orthogonal(dim, rng)[:block_rows, :block_cols]
        cross = q1.T @ p1
        cross_fro[t] = np.linalg.norm(cross, "fro")
        cross_spec[t] = np.linalg.norm(cross, 2)
        block_fro[t] = np.linalg.norm(p1, "fro")
        block_spec[t] = np.linalg.norm(p1, 2)
    eps = spectral_block_bound(block_rows, block_cols, dim)
    eps_sq = eps * eps

    def kappa_from(alpha: float) -> float:
        return float(np.sqrt((1.0 + 2.0 * alpha) / (1.0 - 2.0 * alpha))) \
            if 2.0 * alpha < 1.0 else np.inf

    return BlockStatsReport(
        dim=dim, block_rows=block_rows, block_cols=block_cols, trials=trials,
        mean_cross_fro=float(cross_fro.mean()),
        cross_fro_bound=block_cols * np.sqrt(block_rows) / dim,
        mean_block_fro=float(block_fro.mean()),
        block_fro_expected=float(np.sqrt(block_cols * block_rows / dim)),
        mean_block_spectral=float(block_spec.mean()),
        block_spectral_bound=eps,
        mean_cross_spectral=float(cross_spec.mean()),
        cross_spectral_bound=eps_sq,
        kappa_estimate_squared=kappa_from(eps_sq),
        kappa_estimate_linear=kappa_from(eps),
    )
