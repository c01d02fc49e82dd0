"""Rectangular domains, overlapping subdomain grids, and window functions.

Subdomain centers are laid out on a regular grid with the first and last
centers on the domain boundary; every subdomain has half-width
(overlap_ratio / 2) * spacing, so overlap_ratio > 1 makes neighbors overlap.

The raw window of a subdomain is a separable product of squared raised
cosines, exactly zero outside its support and C^2 across it. Normalizing by
the sum over all subdomains gives a partition of unity. Because the subdomain
index set is a full product grid, that sum factorizes per dimension:
sum_j prod_i w_{j_i}(x_i) = prod_i (sum_s w_s(x_i)). Normalized windows are
therefore products of per-dimension normalized factors, which is what every
routine below computes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, UnsupportedDecompositionError
from .jets import Jet2


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box given as bounds[i] = (low_i, high_i)."""

    bounds: np.ndarray

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.bounds, dtype=float))
        if b.ndim != 2 or b.shape[1] != 2:
            raise InvalidInputError(f"bounds must be (d, 2), got {b.shape}")
        if not np.isfinite(b).all():
            raise InvalidInputError("bounds must be finite")
        if np.any(b[:, 1] <= b[:, 0]):
            raise InvalidInputError("each dimension needs high > low")
        object.__setattr__(self, "bounds", b)

    @property
    def dim(self) -> int:
        return self.bounds.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return self.bounds[:, 1] - self.bounds[:, 0]


@dataclass(frozen=True)
class Decomposition:
    """Regular grid of overlapping subdomains over a Domain.

    centers has shape (dim, count); half_widths (dim,). Subdomain flat index
    is C-order over the per-dimension center indices.
    """

    domain: Domain
    count_per_dim: int
    overlap_ratio: float
    centers: np.ndarray
    half_widths: np.ndarray

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def subdomain_count(self) -> int:
        return self.count_per_dim ** self.dim

    def multi_index(self, j: int) -> tuple[int, ...]:
        if not 0 <= j < self.subdomain_count:
            raise InvalidInputError(f"subdomain index {j} out of range")
        return tuple(int(v) for v in
                     np.unravel_index(j, (self.count_per_dim,) * self.dim))

    def subdomain_bounds(self, j: int) -> np.ndarray:
        idx = self.multi_index(j)
        mu = np.array([self.centers[i, idx[i]] for i in range(self.dim)])
        return np.stack([mu - self.half_widths, mu + self.half_widths], axis=1)


def decompose(domain: Domain, count_per_dim: int, overlap_ratio: float) -> Decomposition:
    """Place count_per_dim subdomains along each dimension.

    Centers: low + width * s / (count - 1) for s = 0..count-1; half-width is
    (overlap_ratio / 2) * width / (count - 1). Needs count >= 2 so the spacing
    is defined. Edge subdomains extend past the domain; windows are only ever
    evaluated inside it.
    """
    if count_per_dim < 2:
        raise UnsupportedDecompositionError(
            f"need at least 2 subdomains per dimension, got {count_per_dim}")
    if overlap_ratio <= 0.0:
        raise UnsupportedDecompositionError(
            f"overlap_ratio must be positive, got {overlap_ratio}")
    spacing = domain.widths / (count_per_dim - 1)
    offsets = np.arange(count_per_dim, dtype=float)
    centers = domain.bounds[:, 0][:, None] + spacing[:, None] * offsets[None, :]
    half_widths = 0.5 * overlap_ratio * spacing
    return Decomposition(domain, count_per_dim, overlap_ratio, centers, half_widths)


# ---------------------------------------------------------------------------
# per-dimension window factors

def _factor_arrays(t: np.ndarray, mu: float, half: float):
    """Raw 1-D window factor (1 + cos(pi (t - mu)/half))^2 with two
    derivatives, exactly zero (all three) outside |t - mu| < half."""
    t = np.asarray(t, dtype=float)
    inside = np.abs(t - mu) < half
    theta = np.where(inside, np.pi * (t - mu) / half, 0.0)
    c, s = np.cos(theta), np.sin(theta)
    scale = np.pi / half
    w = (1.0 + c) ** 2
    w1 = -2.0 * (1.0 + c) * s * scale
    w2 = -2.0 * (c + c * c - s * s) * scale * scale
    zero = ~inside
    for arr in (w, w1, w2):
        arr[zero] = 0.0
    return w, w1, w2


def _dim_factor_jet(dec: Decomposition, dim_i: int, center_s: int,
                    t: np.ndarray, with_derivatives: bool) -> Jet2:
    mu = float(dec.centers[dim_i, center_s])
    half = float(dec.half_widths[dim_i])
    w, w1, w2 = _factor_arrays(t, mu, half)
    if not with_derivatives:
        z = np.zeros_like(w)
        return Jet2(w, z, z)
    return Jet2(w, w1, w2)


def _dim_sum_jet(dec: Decomposition, dim_i: int, t: np.ndarray,
                 with_derivatives: bool) -> Jet2:
    """Jet of the per-dimension normalizer sum_s w_s(t)."""
    t = np.asarray(t, dtype=float)
    acc = Jet2(np.zeros_like(t), np.zeros_like(t), np.zeros_like(t))
    for s in range(dec.count_per_dim):
        acc = acc + _dim_factor_jet(dec, dim_i, s, t, with_derivatives)
    return acc


def normalized_factor_jet(dec: Decomposition, dim_i: int, center_s: int,
                          t: np.ndarray, with_derivatives: bool = True) -> Jet2:
    """Jet of w_s(t) / sum_r w_r(t) along dimension dim_i."""
    num = _dim_factor_jet(dec, dim_i, center_s, t, with_derivatives)
    den = _dim_sum_jet(dec, dim_i, t, with_derivatives)
    if np.any(den.value <= 0.0):
        raise InvalidInputError("window normalizer vanishes at an evaluation point")
    return num / den


def window_jets(dec: Decomposition, j: int, x: np.ndarray, axis: int) -> Jet2:
    """Jet of the normalized window of subdomain j along one axis.

    x may be a single point (d,) or a batch (P, d). Outside the subdomain's
    support the value and both derivatives are exactly zero.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != dec.dim:
        raise InvalidInputError(f"points must have {dec.dim} coordinates")
    if not 0 <= axis < dec.dim:
        raise InvalidInputError(f"axis {axis} out of range for dim {dec.dim}")
    idx = dec.multi_index(j)
    jet = None
    for i in range(dec.dim):
        fac = normalized_factor_jet(dec, i, idx[i], x[:, i], with_derivatives=(i == axis))
        jet = fac if jet is None else jet * fac
    return jet


def support_mask(dec: Decomposition, j: int, x: np.ndarray) -> np.ndarray:
    """True where the raw window of subdomain j is nonzero."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    idx = dec.multi_index(j)
    mask = np.ones(x.shape[0], dtype=bool)
    for i in range(dec.dim):
        mu = dec.centers[i, idx[i]]
        mask &= np.abs(x[:, i] - mu) < dec.half_widths[i]
    return mask


def coverage_counts(dec: Decomposition, x: np.ndarray) -> np.ndarray:
    """Number of subdomains whose support contains each point."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    counts = np.ones(x.shape[0], dtype=int)
    for i in range(dec.dim):
        per_dim = np.zeros(x.shape[0], dtype=int)
        for s in range(dec.count_per_dim):
            per_dim += np.abs(x[:, i] - dec.centers[i, s]) < dec.half_widths[i]
        counts *= per_dim
    return counts
