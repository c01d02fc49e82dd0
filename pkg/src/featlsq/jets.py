"""Second-order forward-mode jets along a single axis.

A Jet2 carries (value, first, second) of one scalar quantity with respect to
one chosen coordinate. All payloads are numpy arrays (scalars become 0-d
arrays) and broadcast like numpy. Mixed partials are never needed by the
residual operators here, so one axis at a time is enough.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Jet2:
    value: np.ndarray
    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "value", np.asarray(self.value, dtype=float))
        object.__setattr__(self, "first", np.asarray(self.first, dtype=float))
        object.__setattr__(self, "second", np.asarray(self.second, dtype=float))

    @staticmethod
    def variable(x) -> "Jet2":
        """The coordinate itself: derivative 1, curvature 0."""
        x = np.asarray(x, dtype=float)
        return Jet2(x, np.ones_like(x), np.zeros_like(x))

    @staticmethod
    def constant(c) -> "Jet2":
        c = np.asarray(c, dtype=float)
        return Jet2(c, np.zeros_like(c), np.zeros_like(c))

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value + other.value, self.first + other.first,
                        self.second + other.second)
        return Jet2(self.value + other, self.first, self.second)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.first, -self.second)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet2) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return Jet2(
                self.value * other.value,
                self.first * other.value + self.value * other.first,
                self.second * other.value + 2.0 * self.first * other.first
                + self.value * other.second,
            )
        return Jet2(self.value * other, self.first * other, self.second * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            inv = other.reciprocal()
            return self * inv
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self) -> "Jet2":
        v = self.value
        iv = 1.0 / v
        return Jet2(iv, -self.first * iv * iv,
                    (2.0 * self.first * self.first * iv - self.second) * iv * iv)

    def apply(self, f, df, d2f) -> "Jet2":
        """Chain rule through a scalar function given with two derivatives."""
        fv = f(self.value)
        d1 = df(self.value)
        return Jet2(fv, d1 * self.first,
                    d2f(self.value) * self.first * self.first + d1 * self.second)

    def tanh(self) -> "Jet2":
        t = np.tanh(self.value)
        sech2 = 1.0 - t * t
        return Jet2(t, sech2 * self.first,
                    -2.0 * t * sech2 * self.first * self.first + sech2 * self.second)

    def exp(self) -> "Jet2":
        e = np.exp(self.value)
        return Jet2(e, e * self.first,
                    e * (self.first * self.first + self.second))

    def sin(self) -> "Jet2":
        s, c = np.sin(self.value), np.cos(self.value)
        return Jet2(s, c * self.first, -s * self.first * self.first + c * self.second)

    def cos(self) -> "Jet2":
        s, c = np.sin(self.value), np.cos(self.value)
        return Jet2(c, -s * self.first, -c * self.first * self.first - s * self.second)

    def square(self) -> "Jet2":
        return self * self


def radial_jet(offsets: np.ndarray, axis_jet_index: int) -> Jet2:
    """Jet of r = ||offsets|| along one coordinate of the offset vector.

    offsets has shape (..., d); the jet is taken with respect to coordinate
    axis_jet_index. r must be nonzero everywhere it is evaluated.
    """
    offsets = np.asarray(offsets, dtype=float)
    r = np.sqrt(np.sum(offsets * offsets, axis=-1))
    xa = offsets[..., axis_jet_index]
    dr = xa / r
    return Jet2(r, dr, (1.0 - dr * dr) / r)
