"""Iterative least-squares solvers with per-iteration instrumentation.

All solvers run a fixed iteration count with no stopping rule (matching the
experiment protocol) except on exact breakdown, and report through a
ConvergenceMonitor that records residual and test error at a configurable
stride and retains the best-error iterate seen.

lsqr is the Golub-Kahan bidiagonalization method; cg_normal runs conjugate
gradients on the normal equations, optionally through an additive block
preconditioner built from the per-subdomain Gramians.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .assembly import GlobalSystem
from .errors import DivergenceError, InvalidInputError


class Operator:
    """Minimal matvec/rmatvec wrapper over the things we solve with."""

    def __init__(self, matvec, rmatvec, shape):
        self.matvec = matvec
        self.rmatvec = rmatvec
        self.shape = shape


def as_operator(thing) -> Operator:
    if isinstance(thing, Operator):
        return thing
    if isinstance(thing, GlobalSystem):
        csr = thing.csr()
        return Operator(lambda v: csr @ v, lambda r: csr.T @ r, thing.shape)
    if hasattr(thing, "apply") and hasattr(thing, "apply_transpose"):
        return Operator(thing.apply, thing.apply_transpose, thing.shape)
    arr = np.asarray(thing, dtype=float)
    if arr.ndim != 2:
        raise InvalidInputError(f"cannot interpret {type(thing)} as an operator")
    return Operator(lambda v: arr @ v, lambda r: arr.T @ r, arr.shape)


@dataclass
class ConvergenceMonitor:
    """Records (iteration, residual norm, test error) and keeps the iterate
    with the lowest test error (lowest residual when no error_fn is given)."""

    error_fn: Optional[Callable[[np.ndarray], float]] = None
    stride: int = 1
    records: list = field(default_factory=list)
    best_error: float = np.inf
    best_iteration: int = -1
    best_iterate: np.ndarray | None = None

    def observe(self, iteration: int, iterate: np.ndarray,
                residual_fn: Callable[[], float]) -> None:
        if self.stride > 1 and iteration % self.stride != 0:
            return
        residual = float(residual_fn())
        error = float(self.error_fn(iterate)) if self.error_fn else residual
        self.records.append((iteration, residual, error))
        if error < self.best_error:
            self.best_error = error
            self.best_iteration = iteration
            self.best_iterate = iterate.copy()


@dataclass(frozen=True)
class SolveResult:
    solution: np.ndarray
    iterations_run: int
    residual_norm: float
    monitor: ConvergenceMonitor
    breakdown: bool = False

    @property
    def best_solution(self) -> np.ndarray:
        if self.monitor.best_iterate is None:
            return self.solution
        return self.monitor.best_iterate


def lsqr(operator, rhs: np.ndarray, max_iters: int,
         monitor: ConvergenceMonitor | None = None) -> SolveResult:
    """Golub-Kahan LSQR from the zero start, fixed iteration budget.

    The recurrence's residual estimate (monotone non-increasing) is what the
    monitor records; it equals the true residual norm in exact arithmetic.
    Stops early only on exact breakdown, which means the normal equations are
    solved to working precision.
    """
    op = as_operator(operator)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (op.shape[0],):
        raise InvalidInputError(f"rhs shape {rhs.shape} != operator rows {op.shape[0]}")
    monitor = monitor or ConvergenceMonitor()
    x = np.zeros(op.shape[1])

    beta = float(np.linalg.norm(rhs))
    if beta == 0.0:
        monitor.observe(0, x, lambda: 0.0)
        return SolveResult(x, 0, 0.0, monitor)
    u = rhs / beta
    v = op.rmatvec(u)
    alpha = float(np.linalg.norm(v))
    if alpha == 0.0:
        monitor.observe(0, x, lambda: beta)
        return SolveResult(x, 0, beta, monitor, breakdown=True)
    v = v / alpha
    w = v.copy()
    phibar, rhobar = beta, alpha

    iterations = 0
    breakdown = False
    for it in range(1, max_iters + 1):
        u = op.matvec(v) - alpha * u
        beta = float(np.linalg.norm(u))
        if beta > 0.0:
            u = u / beta
        rho = float(np.hypot(rhobar, beta))
        c, s = rhobar / rho, beta / rho
        phi = c * phibar
        phibar = s * phibar
        x = x + (phi / rho) * w
        iterations = it
        if not np.isfinite(x).all():
            raise DivergenceError(f"non-finite iterate at iteration {it}")
        monitor.observe(it, x, lambda: phibar)
        if beta == 0.0:
            breakdown = True
            break
        v_next = op.rmatvec(u) - beta * v
        alpha = float(np.linalg.norm(v_next))
        if alpha == 0.0:
            breakdown = True
            break
        v = v_next / alpha
        theta = s * alpha
        rhobar = -c * alpha
        w = v - (theta / rho) * w
    return SolveResult(x, iterations, float(phibar), monitor, breakdown)


@dataclass(frozen=True)
class AdditiveSchwarz:
    """Block-diagonal inverse of the per-subdomain Gramians.

    Blocks are pseudo-inverted with a 1e-14 relative eigenvalue cutoff;
    degenerate_blocks lists subdomains where that cutoff bit.
    """

    column_count: int
    block_ranges: tuple
    block_inverses: tuple
    degenerate_blocks: tuple

    def apply(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (self.column_count,):
            raise InvalidInputError(
                f"expected shape ({self.column_count},), got {vec.shape}")
        out = np.empty_like(vec)
        for cols, inv in zip(self.block_ranges, self.block_inverses):
            out[cols] = inv @ vec[cols]
        return out

    def materialize(self) -> np.ndarray:
        dense = np.zeros((self.column_count, self.column_count))
        for cols, inv in zip(self.block_ranges, self.block_inverses):
            dense[np.ix_(cols, cols)] = inv
        return dense


def as_preconditioner(system: GlobalSystem, cutoff: float = 1e-14) -> AdditiveSchwarz:
    """Assemble the additive block preconditioner from the system's blocks."""
    ranges, inverses, degenerate = [], [], []
    for blk in system.blocks:
        gram = blk.matrix.T @ blk.matrix
        evals, evecs = np.linalg.eigh(gram)
        top = float(evals[-1]) if evals.size else 0.0
        keep = evals > cutoff * top if top > 0.0 else np.zeros_like(evals, dtype=bool)
        if not keep.all():
            degenerate.append(blk.subdomain)
        inv_vals = np.where(keep, 1.0 / np.where(keep, evals, 1.0), 0.0)
        inverses.append((evecs * inv_vals) @ evecs.T)
        ranges.append(blk.columns)
    return AdditiveSchwarz(system.column_count, tuple(ranges), tuple(inverses),
                           tuple(degenerate))


def cg_normal(operator, rhs: np.ndarray, max_iters: int,
              monitor: ConvergenceMonitor | None = None,
              preconditioner: AdditiveSchwarz | None = None) -> SolveResult:
    """Conjugate gradients on the normal equations, zero start.

    The monitor's residual column is the least-squares residual of the
    original system, computed only at recorded iterations. Halts with a
    breakdown flag if the normal matrix stops looking positive definite.
    """
    op = as_operator(operator)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (op.shape[0],):
        raise InvalidInputError(f"rhs shape {rhs.shape} != operator rows {op.shape[0]}")
    monitor = monitor or ConvergenceMonitor()
    x = np.zeros(op.shape[1])
    r = op.rmatvec(rhs)
    z = preconditioner.apply(r) if preconditioner else r
    p = z.copy()
    rz = float(r @ z)

    breakdown = False
    iterations = 0
    for it in range(1, max_iters + 1):
        q = op.rmatvec(op.matvec(p))
        pq = float(p @ q)
        if pq <= 0.0 or not np.isfinite(pq):
            breakdown = True
            break
        step = rz / pq
        x = x + step * p
        r = r - step * q
        iterations = it
        if not np.isfinite(x).all():
            raise DivergenceError(f"non-finite iterate at iteration {it}")
        monitor.observe(it, x,
                        lambda: float(np.linalg.norm(op.matvec(x) - rhs)))
        z = preconditioner.apply(r) if preconditioner else r
        rz_next = float(r @ z)
        if rz == 0.0:
            breakdown = True
            break
        p = z + (rz_next / rz) * p
        rz = rz_next
    final_res = float(np.linalg.norm(op.matvec(x) - rhs))
    return SolveResult(x, iterations, final_res, monitor, breakdown)
