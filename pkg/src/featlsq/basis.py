"""Random feature bases: frozen random networks, one per subdomain.

Each subdomain carries feature_count features. Inputs are first normalized to
[-1, 1] over the subdomain. depth = 1 means a single affine map with bias
followed by the activation (feature_count independent rows); depth >= 2 adds
shared hidden layers of width feature_count, with the final feature head a
bias-free linear map through the activation. All parameters are drawn once
from the uniform LeCun distribution [-sqrt(1/fan_in), +sqrt(1/fan_in)] and
never trained.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .domains import Decomposition, Domain, decompose
from .errors import InvalidInputError
from .jets import Jet2


def _sigmoid(v):
    return 0.5 * (1.0 + np.tanh(0.5 * v))


def _sigmoid_jet(jet: Jet2) -> Jet2:
    return jet.apply(
        _sigmoid,
        lambda v: _sigmoid(v) * (1.0 - _sigmoid(v)),
        lambda v: _sigmoid(v) * (1.0 - _sigmoid(v)) * (1.0 - 2.0 * _sigmoid(v)),
    )


ACTIVATIONS = {
    "tanh": lambda jet: jet.tanh(),
    "sin": lambda jet: jet.sin(),
    "sigmoid": _sigmoid_jet,
}


@dataclass(frozen=True)
class FeatureBasis:
    """Frozen random features over a decomposition.

    weights[l] is stacked over subdomains: (J, out, in); biases[l] is (J, out)
    or None for the bias-free head. len(weights) == depth.
    """

    decomposition: Decomposition
    feature_count: int
    depth: int
    activation: str
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray | None, ...]

    @property
    def column_count(self) -> int:
        return self.decomposition.subdomain_count * self.feature_count

    def column_range(self, j: int) -> np.ndarray:
        k = self.feature_count
        return np.arange(j * k, (j + 1) * k)


def init_basis(dec: Decomposition, feature_count: int, depth: int,
               activation: str, rng: np.random.Generator) -> FeatureBasis:
    """Draw all network parameters, subdomain by subdomain, layer by layer."""
    if feature_count < 1:
        raise InvalidInputError(f"feature_count must be >= 1, got {feature_count}")
    if depth < 1:
        raise InvalidInputError(f"depth must be >= 1, got {depth}")
    if activation not in ACTIVATIONS:
        raise InvalidInputError(
            f"unknown activation {activation!r}, have {sorted(ACTIVATIONS)}")
    d, k, j_count = dec.dim, feature_count, dec.subdomain_count

    # (fan_in, fan_out, has_bias) per affine map
    shapes = [(d, k, True)]
    shapes += [(k, k, True)] * (depth - 2)
    if depth >= 2:
        shapes += [(k, k, False)]

    weights, biases = [], []
    for fan_in, fan_out, has_bias in shapes:
        weights.append(np.empty((j_count, fan_out, fan_in)))
        biases.append(np.empty((j_count, fan_out)) if has_bias else None)
    for j in range(j_count):
        for layer, (fan_in, fan_out, has_bias) in enumerate(shapes):
            bound = np.sqrt(1.0 / fan_in)
            weights[layer][j] = rng.uniform(-bound, bound, size=(fan_out, fan_in))
            if has_bias:
                biases[layer][j] = rng.uniform(-bound, bound, size=fan_out)
    return FeatureBasis(dec, feature_count, depth, activation,
                        tuple(weights), tuple(biases))


def normalize_inputs(dec: Decomposition, j: int, x: np.ndarray) -> np.ndarray:
    """Map subdomain j to [-1, 1]^d."""
    idx = dec.multi_index(j)
    mu = np.array([dec.centers[i, idx[i]] for i in range(dec.dim)])
    return (np.atleast_2d(x) - mu) / dec.half_widths


def feature_jets(basis: FeatureBasis, j: int, x: np.ndarray, axis: int) -> Jet2:
    """Jet of all features of subdomain j at points x along one axis.

    x is (P, d) or (d,); the returned jet holds (P, feature_count) arrays.
    """
    dec = basis.decomposition
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != dec.dim:
        raise InvalidInputError(f"points must have {dec.dim} coordinates")
    if not 0 <= axis < dec.dim:
        raise InvalidInputError(f"axis {axis} out of range for dim {dec.dim}")
    act = ACTIVATIONS[basis.activation]
    xt = normalize_inputs(dec, j, x)
    scale = 1.0 / dec.half_widths[axis]

    w0 = basis.weights[0][j]
    pre = xt @ w0.T
    if basis.biases[0] is not None:
        pre = pre + basis.biases[0][j]
    first = np.broadcast_to(w0[:, axis] * scale, pre.shape)
    jet = act(Jet2(pre, first, np.zeros_like(pre)))
    for layer in range(1, basis.depth):
        w = basis.weights[layer][j]
        value = jet.value @ w.T
        if basis.biases[layer] is not None:
            value = value + basis.biases[layer][j]
        jet = act(Jet2(value, jet.first @ w.T, jet.second @ w.T))
    return jet


def basis_jets(basis: FeatureBasis, j: int, k: int, x: np.ndarray, axis: int) -> Jet2:
    """Jet of one feature (subdomain j, feature k)."""
    if not 0 <= k < basis.feature_count:
        raise InvalidInputError(f"feature index {k} out of range")
    full = feature_jets(basis, j, x, axis)
    return Jet2(full.value[..., k], full.first[..., k], full.second[..., k])


# ---------------------------------------------------------------------------
# serialization

def save_basis(basis: FeatureBasis, path: str) -> None:
    """Write all parameters plus enough metadata to rebuild the decomposition."""
    dec = basis.decomposition
    meta = {
        "bounds": dec.domain.bounds.tolist(),
        "count_per_dim": dec.count_per_dim,
        "overlap_ratio": dec.overlap_ratio,
        "feature_count": basis.feature_count,
        "depth": basis.depth,
        "activation": basis.activation,
        "has_bias": [b is not None for b in basis.biases],
    }
    arrays = {f"w{i}": w for i, w in enumerate(basis.weights)}
    arrays.update({f"b{i}": b for i, b in enumerate(basis.biases) if b is not None})
    np.savez(path, meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
             **arrays)


def load_basis(path: str) -> FeatureBasis:
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        dec = decompose(Domain(np.array(meta["bounds"])),
                        meta["count_per_dim"], meta["overlap_ratio"])
        weights, biases = [], []
        for i, has_bias in enumerate(meta["has_bias"]):
            weights.append(data[f"w{i}"])
            biases.append(data[f"b{i}"] if has_bias else None)
    return FeatureBasis(dec, meta["feature_count"], meta["depth"],
                        meta["activation"], tuple(weights), tuple(biases))
