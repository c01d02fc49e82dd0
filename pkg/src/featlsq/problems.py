"""Benchmark problems: linear PDE residual descriptions plus exact or
reference solutions.

A problem is a second-order linear operator given by per-axis coefficient
triples, a forcing term, optional soft constraint rows (point sets with their
own linear operators and targets), and optional hard-constraint factors:
the ansatz is mask(x) * u_features(x) + lift(x), where the mask vanishes on
the constrained boundary and the lift carries the inhomogeneous data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .domains import Domain
from .errors import InvalidInputError
from .jets import Jet2, radial_jet


@dataclass(frozen=True)
class LinearOperator2:
    """value_coef * u + sum_a first_coefs[a] * du/dx_a + second_coefs[a] * d2u/dx_a2."""

    value_coef: float
    first_coefs: np.ndarray
    second_coefs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "first_coefs", np.asarray(self.first_coefs, float))
        object.__setattr__(self, "second_coefs", np.asarray(self.second_coefs, float))

    @property
    def dim(self) -> int:
        return self.first_coefs.shape[0]

    def apply(self, axis_jets: list[Jet2]) -> np.ndarray:
        """Combine per-axis jets of one function into operator values."""
        if len(axis_jets) != self.dim:
            raise InvalidInputError(f"need {self.dim} axis jets, got {len(axis_jets)}")
        out = self.value_coef * axis_jets[0].value
        for a, jet in enumerate(axis_jets):
            out = out + self.first_coefs[a] * jet.first \
                      + self.second_coefs[a] * jet.second
        return out


@dataclass(frozen=True)
class ConstraintRows:
    """Soft constraint: operator applied at points must equal targets.

    Rows are weighted by sqrt(weight / len(points)) during assembly.
    """

    label: str
    operator: LinearOperator2
    points: np.ndarray
    targets: np.ndarray
    weight: float = 1.0


JetFn = Callable[[np.ndarray, int], Jet2]


ValueFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    domain: Domain
    operator: LinearOperator2
    forcing: Callable[[np.ndarray], np.ndarray]
    constraints: tuple[ConstraintRows, ...] = ()
    mask_jets: Optional[JetFn] = None
    lift_jets: Optional[JetFn] = None
    mask_value: Optional[ValueFn] = None
    lift_value: Optional[ValueFn] = None
    exact: Optional[Callable[[np.ndarray], np.ndarray]] = None
    test_points_per_count: int = 50
    params: dict | None = None

    def with_exact(self, exact: Callable[[np.ndarray], np.ndarray]) -> "ProblemSpec":
        return replace(self, exact=exact)


# ---------------------------------------------------------------------------
# damped harmonic oscillator in time

def oscillator_problem(omega0: float, constraint_weight: float = 1.0) -> ProblemSpec:
    """u'' + 4 u' + omega0^2 u = 0 on [0, 1], u(0) = 1, u'(0) = 0.

    Damping delta = 2 is fixed; needs omega0 > 2 (under-damped) so the exact
    solution is exp(-2t)(cos(w t) + (2/w) sin(w t)) with w = sqrt(omega0^2 - 4).
    Both initial conditions are soft constraint rows at the given weight.
    """
    if omega0 <= 2.0:
        raise InvalidInputError(f"omega0 must exceed the damping 2, got {omega0}")
    if constraint_weight <= 0.0:
        raise InvalidInputError("constraint weight must be positive")
    domain = Domain(np.array([[0.0, 1.0]]))
    operator = LinearOperator2(omega0 ** 2, [4.0], [1.0])
    w = np.sqrt(omega0 ** 2 - 4.0)

    def exact(points: np.ndarray) -> np.ndarray:
        t = np.atleast_2d(points)[:, 0]
        return np.exp(-2.0 * t) * (np.cos(w * t) + (2.0 / w) * np.sin(w * t))

    zero_point = np.zeros((1, 1))
    constraints = (
        ConstraintRows("initial value", LinearOperator2(1.0, [0.0], [0.0]),
                       zero_point, np.array([1.0]), constraint_weight),
        ConstraintRows("initial slope", LinearOperator2(0.0, [1.0], [0.0]),
                       zero_point, np.array([0.0]), constraint_weight),
    )
    return ProblemSpec(
        name="oscillator",
        domain=domain,
        operator=operator,
        forcing=lambda pts: np.zeros(np.atleast_2d(pts).shape[0]),
        constraints=constraints,
        exact=exact,
        test_points_per_count=50,
        params={"omega0": omega0},
    )


# ---------------------------------------------------------------------------
# multi-scale Laplace problem on the unit square

def _edge_product_jet(points: np.ndarray, axis: int, dims: list[int],
                      lows: np.ndarray, highs: np.ndarray, sharpness: float) -> Jet2:
    """Jet of prod_i tanh(s (x_i - low_i)) tanh(s (high_i - x_i)) over dims."""
    points = np.atleast_2d(points)
    jet = None
    for i in dims:
        xi = points[:, i]
        if i == axis:
            base = Jet2.variable(xi)
        else:
            base = Jet2.constant(xi)
        fac = ((base - lows[i]) * sharpness).tanh() * ((-base + highs[i]) * sharpness).tanh()
        jet = fac if jet is None else jet * fac
    return jet


def laplace_problem(scale_count: int) -> ProblemSpec:
    """-laplacian(u) = f on [0, 1]^2 with u = 0 on the boundary.

    The solution mixes scale_count frequencies 2^i pi; the boundary condition
    is hard-constrained by a tanh edge mask with sharpness 2^scale_count, so
    there are no soft constraint rows.
    """
    if scale_count < 1:
        raise InvalidInputError(f"scale_count must be >= 1, got {scale_count}")
    domain = Domain(np.array([[0.0, 1.0], [0.0, 1.0]]))
    operator = LinearOperator2(0.0, [0.0, 0.0], [-1.0, -1.0])
    freqs = np.pi * 2.0 ** np.arange(1, scale_count + 1)
    sharp = 2.0 ** scale_count
    lows, highs = domain.bounds[:, 0], domain.bounds[:, 1]

    def exact(points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(points)
        acc = np.zeros(p.shape[0])
        for w in freqs:
            acc += np.sin(w * p[:, 0]) * np.sin(w * p[:, 1])
        return acc / scale_count

    def forcing(points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(points)
        acc = np.zeros(p.shape[0])
        for w in freqs:
            acc += 2.0 * w * w * np.sin(w * p[:, 0]) * np.sin(w * p[:, 1])
        return acc / scale_count

    def mask_jets(points: np.ndarray, axis: int) -> Jet2:
        return _edge_product_jet(points, axis, [0, 1], lows, highs, sharp)

    def mask_value(points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(points)
        out = np.ones(p.shape[0])
        for i in (0, 1):
            out *= np.tanh(sharp * (p[:, i] - lows[i])) \
                 * np.tanh(sharp * (highs[i] - p[:, i]))
        return out

    return ProblemSpec(
        name="laplace",
        domain=domain,
        operator=operator,
        forcing=forcing,
        mask_jets=mask_jets,
        mask_value=mask_value,
        exact=exact,
        test_points_per_count=6,
        params={"scale_count": scale_count},
    )


# ---------------------------------------------------------------------------
# acoustic wave equation in (2+1)D

def wave_problem(wavelength: float, wave_speed: float = 1.0) -> ProblemSpec:
    """laplacian_x(u) - u_tt / c^2 = 0 on [-1, 1]^2 x [0, 1].

    A Gaussian of width wavelength starts at rest at the origin; u = 0 on the
    spatial boundary. Both conditions are hard-constrained: the ansatz is
    edge_mask(x) * (gaussian_pulse(x, t) + tanh^2(t/tau) u_features). There is
    no closed-form solution; attach a finite-difference reference for testing.
    """
    if wavelength <= 0.0 or wave_speed <= 0.0:
        raise InvalidInputError("wavelength and wave_speed must be positive")
    domain = Domain(np.array([[-1.0, 1.0], [-1.0, 1.0], [0.0, 1.0]]))
    operator = LinearOperator2(0.0, [0.0, 0.0, 0.0], [1.0, 1.0, -1.0 / wave_speed ** 2])
    lam = float(wavelength)
    edge_width = lam / 2.5
    tau = lam / (2.5 * wave_speed)
    lows, highs = domain.bounds[:, 0], domain.bounds[:, 1]

    def edge_mask(points: np.ndarray, axis: int) -> Jet2:
        return _edge_product_jet(points, axis, [0, 1], lows, highs, 1.0 / edge_width)

    def mask_jets(points: np.ndarray, axis: int) -> Jet2:
        p = np.atleast_2d(points)
        t = p[:, 2]
        t_jet = Jet2.variable(t) if axis == 2 else Jet2.constant(t)
        ramp = (t_jet * (1.0 / tau)).tanh().square()
        return edge_mask(p, axis) * ramp

    def pulse_jets(points: np.ndarray, axis: int) -> Jet2:
        p = np.atleast_2d(points)
        t = p[:, 2]
        if axis == 2:
            onset = Jet2.variable(t) * (0.6 / tau)
        else:
            onset = Jet2.constant(t) * (0.6 / tau)
        onset2 = onset.square()
        space = p[:, :2]
        radii = np.sqrt(np.sum(space * space, axis=1))
        if axis < 2:
            if np.any(radii == 0.0):
                raise InvalidInputError(
                    "pulse jets are singular at the source center; "
                    "use a point set avoiding the origin")
            r_jet = radial_jet(space, axis)
        else:
            r_jet = Jet2.constant(radii)
        inner = onset2 + r_jet * (1.0 / lam)
        return (inner.square() * (-0.5)).exp()

    def lift_jets(points: np.ndarray, axis: int) -> Jet2:
        return edge_mask(points, axis) * pulse_jets(points, axis)

    def edge_values(p: np.ndarray) -> np.ndarray:
        out = np.ones(p.shape[0])
        for i in (0, 1):
            out *= np.tanh((p[:, i] - lows[i]) / edge_width) \
                 * np.tanh((highs[i] - p[:, i]) / edge_width)
        return out

    def mask_value(points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(points)
        return edge_values(p) * np.tanh(p[:, 2] / tau) ** 2

    def lift_value(points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(points)
        radii = np.sqrt(p[:, 0] ** 2 + p[:, 1] ** 2)
        inner = (0.6 * p[:, 2] / tau) ** 2 + radii / lam
        return edge_values(p) * np.exp(-0.5 * inner ** 2)

    return ProblemSpec(
        name="wave",
        domain=domain,
        operator=operator,
        forcing=lambda pts: np.zeros(np.atleast_2d(pts).shape[0]),
        mask_jets=mask_jets,
        lift_jets=lift_jets,
        mask_value=mask_value,
        lift_value=lift_value,
        exact=None,
        test_points_per_count=4,
        params={"wavelength": lam, "wave_speed": wave_speed},
    )
