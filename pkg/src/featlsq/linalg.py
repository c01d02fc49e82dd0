"""Dense linear-algebra kernels: pivoted QR with relative truncation,
triangular solves, singular values, and Haar-orthogonal sampling.

Everything here is deterministic for fixed inputs and seeds. The QR and SVD
cores are LAPACK (Householder / divide-and-conquer); this module owns the
truncation rule, the sign conventions, and the input checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CapExceededError, InvalidInputError, SingularFactorError

DENSE_SIZE_CAP = 20_000


@dataclass(frozen=True)
class RandomSource:
    """Deterministic, cross-platform RNG handle: one seed, many streams."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class PivotedQR:
    """Truncated column-pivoted QR of one matrix.

    q_factor has orthonormal columns, one per kept column. r_factor is upper
    triangular with positive, non-increasing diagonal. kept/dropped index the
    original columns; kept is in pivot order, so a[:, kept] ~ q_factor @ r_factor.
    """

    q_factor: np.ndarray
    r_factor: np.ndarray
    kept: np.ndarray
    dropped: np.ndarray
    diag_ratios: np.ndarray


def _check_matrix(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise InvalidInputError(f"{name} contains non-finite entries")
    return a


def qr_column_pivot(a: np.ndarray, sigma_rel: float) -> PivotedQR:
    """Column-pivoted Householder QR truncated at the first diagonal entry
    smaller than sigma_rel times the leading one.

    Columns from that point on are declared dropped; a diagonal entry exactly
    at threshold is kept. sigma_rel = 0 keeps every column. The returned
    diagonal is sign-normalized positive.
    """
    a = _check_matrix(a)
    if not 0.0 <= sigma_rel < 1.0:
        raise InvalidInputError(f"sigma_rel must be in [0, 1), got {sigma_rel}")
    rows, cols = a.shape
    if cols == 0:
        empty = np.empty(0, dtype=int)
        return PivotedQR(np.empty((rows, 0)), np.empty((0, 0)), empty, empty, np.empty(0))

    q, r, perm = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    limit = min(rows, cols)
    lead = diag[0] if diag.size else 0.0

    if lead == 0.0:
        rank = limit if sigma_rel == 0.0 else 0
    elif sigma_rel == 0.0:
        rank = limit
    else:
        below = np.nonzero(diag < sigma_rel * lead)[0]
        rank = int(below[0]) if below.size else limit

    ratios = diag / lead if lead > 0.0 else np.zeros_like(diag)
    kept = perm[:rank].copy()
    dropped = np.sort(perm[rank:]).copy()
    q = q[:, :rank].copy()
    r = r[:rank, :rank].copy()
    # normalize the factorization so the diagonal of R is positive
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    q *= signs
    r *= signs[:, None]
    return PivotedQR(q, r, kept, dropped, ratios[:rank])


def back_substitute(r: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Solve r @ x = y for upper-triangular r."""
    r = _check_matrix(r, "triangular factor")
    if r.shape[0] != r.shape[1]:
        raise InvalidInputError(f"triangular factor must be square, got {r.shape}")
    y = np.asarray(y, dtype=float)
    if y.shape[0] != r.shape[0]:
        raise InvalidInputError(f"rhs length {y.shape[0]} != factor size {r.shape[0]}")
    if r.shape[0] == 0:
        return np.zeros_like(y)
    if np.any(np.diag(r) == 0.0):
        raise SingularFactorError("zero diagonal entry in triangular factor")
    return scipy.linalg.solve_triangular(r, y, lower=False)


def singular_values(a: np.ndarray, size_cap: int = DENSE_SIZE_CAP) -> np.ndarray:
    """All singular values of a dense matrix, non-increasing."""
    a = _check_matrix(a)
    if max(a.shape) > size_cap:
        raise CapExceededError(f"shape {a.shape} exceeds dense cap {size_cap}")
    if min(a.shape) == 0:
        return np.empty(0)
    return np.linalg.svd(a, compute_uv=False)


def haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw an n x n orthogonal matrix Haar-uniformly.

    QR of a standard Gaussian matrix with the R diagonal sign-normalized
    positive; without that normalization the distribution is not uniform.
    """
    if n < 1:
        raise InvalidInputError(f"dimension must be >= 1, got {n}")
    g = rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return q * signs


def spectral_block_bound(block_rows: int, block_cols: int, dim: int) -> float:
    """Expected-norm bound for an l x K block of a Haar n x n matrix:
    (1 + K/(2n)) (sqrt(K) + sqrt(l)) / sqrt(n).
    """
    if min(block_rows, block_cols, dim) < 1:
        raise InvalidInputError("block and matrix dimensions must be >= 1")
    if block_rows > dim or block_cols > dim:
        raise InvalidInputError("block does not fit inside the matrix")
    k, ell, n = float(block_cols), float(block_rows), float(dim)
    return (1.0 + k / (2.0 * n)) * (np.sqrt(k) + np.sqrt(ell)) / np.sqrt(n)
