"""Frozen random feature bases: initialization, jets, serialization."""

import numpy as np
import pytest

from featlsq.basis import (ACTIVATIONS, FeatureBasis, basis_jets, feature_jets,
                           init_basis, load_basis, normalize_inputs, save_basis)
from featlsq.domains import Domain, decompose
from featlsq.errors import InvalidInputError
from featlsq.linalg import RandomSource


def interval_dec(count=4, overlap=2.0):
    return decompose(Domain(np.array([[0.0, 1.0]])), count, overlap)


def square_dec(count=3, overlap=2.0):
    return decompose(Domain(np.array([[0.0, 1.0], [-1.0, 1.0]])), count, overlap)


def make(dec, features=6, depth=1, activation="tanh", seed=0):
    return init_basis(dec, features, depth, activation, RandomSource(seed).generator())


class TestInit:
    def test_deterministic_per_seed(self):
        dec = interval_dec()
        a, b = make(dec, seed=3), make(dec, seed=3)
        for wa, wb in zip(a.weights, b.weights):
            assert np.array_equal(wa, wb)
        assert not np.array_equal(make(dec, seed=4).weights[0], a.weights[0])

    def test_uniform_bounds_scale_with_fan_in(self):
        # U[-sqrt(1/fan_in), +sqrt(1/fan_in)] for weights and biases alike
        dec = square_dec()
        basis = make(dec, features=64, depth=3, seed=1)
        fan_ins = [2, 64, 64]
        for layer, fan_in in enumerate(fan_ins):
            bound = np.sqrt(1.0 / fan_in)
            w = basis.weights[layer]
            assert np.abs(w).max() <= bound
            assert np.abs(w).max() > 0.8 * bound  # actually fills the range
            if basis.biases[layer] is not None:
                assert np.abs(basis.biases[layer]).max() <= bound

    def test_layer_shapes(self):
        # weights[l] is (subdomains, fan_out, fan_in); final layer bias-free
        dec = square_dec()
        basis = make(dec, features=5, depth=3)
        j_count = dec.subdomain_count
        assert basis.weights[0].shape == (j_count, 5, 2)
        assert basis.weights[1].shape == (j_count, 5, 5)
        assert basis.weights[2].shape == (j_count, 5, 5)
        assert basis.biases[0].shape == (j_count, 5)
        assert basis.biases[2] is None
        assert len(basis.weights) == 3

    def test_subdomains_draw_distinct_features(self):
        basis = make(interval_dec())
        assert not np.array_equal(basis.weights[0][0], basis.weights[0][1])

    def test_column_layout(self):
        dec = interval_dec(count=4)
        basis = make(dec, features=6)
        assert basis.column_count == 24
        assert np.array_equal(basis.column_range(2), np.arange(12, 18))

    def test_rejects_unknown_activation(self):
        with pytest.raises(InvalidInputError):
            make(interval_dec(), activation="relu")

    def test_rejects_bad_sizes(self):
        with pytest.raises(InvalidInputError):
            make(interval_dec(), features=0)
        with pytest.raises(InvalidInputError):
            make(interval_dec(), depth=0)


def test_normalize_inputs_maps_subdomain_to_unit_box():
    dec = square_dec(count=3, overlap=2.0)
    j = 4  # middle subdomain
    mu = dec.centers[:, dec.multi_index(j)].diagonal() \
        if False else np.array([dec.centers[i][dec.multi_index(j)[i]]
                                for i in range(2)])
    corners = np.stack([mu - dec.half_widths, mu + dec.half_widths])
    normalized = normalize_inputs(dec, j, corners)
    assert np.allclose(normalized, [[-1.0, -1.0], [1.0, 1.0]], atol=1e-12)


class TestFeatureJets:
    @pytest.mark.parametrize("activation", sorted(ACTIVATIONS))
    @pytest.mark.parametrize("depth", [1, 2, 3])
    def test_against_finite_differences(self, activation, depth):
        dec = interval_dec(count=3, overlap=2.0)
        basis = make(dec, features=4, depth=depth, activation=activation, seed=7)
        j = 1
        mu = dec.centers[0][1]
        half = dec.half_widths[0]
        t = np.linspace(mu - 0.8 * half, mu + 0.8 * half, 15)[:, None]
        h = 1e-5

        def values(points):
            return feature_jets(basis, j, points, 0).value

        jet = feature_jets(basis, j, t, 0)
        first = (values(t + h) - values(t - h)) / (2 * h)
        second = (values(t + h) - 2 * values(t) + values(t - h)) / (h * h)
        assert np.allclose(jet.value, values(t), atol=1e-12)
        assert np.allclose(jet.first, first, rtol=1e-5, atol=1e-6)
        assert np.allclose(jet.second, second, rtol=1e-3, atol=1e-3)

    def test_2d_partial_derivatives(self):
        dec = square_dec()
        basis = make(dec, features=3, seed=2)
        j = 4
        mu = np.array([dec.centers[i][dec.multi_index(j)[i]] for i in range(2)])
        pts = mu + 0.3 * dec.half_widths * np.array([[1.0, -1.0], [0.2, 0.5]])
        h = 1e-5
        for axis in (0, 1):
            step = np.zeros(2)
            step[axis] = h

            def values(p):
                return feature_jets(basis, j, p, axis).value

            jet = feature_jets(basis, j, pts, axis)
            first = (values(pts + step) - values(pts - step)) / (2 * h)
            assert np.allclose(jet.first, first, rtol=1e-5, atol=1e-6)

    def test_basis_jets_is_one_column(self):
        dec = interval_dec()
        basis = make(dec)
        t = np.array([[0.4]])
        all_jets = feature_jets(basis, 1, t, 0)
        one = basis_jets(basis, 1, 3, t, 0)
        assert one.value[0] == pytest.approx(all_jets.value[0, 3])
        assert one.first[0] == pytest.approx(all_jets.first[0, 3])
        assert one.second[0] == pytest.approx(all_jets.second[0, 3])

    def test_shapes(self):
        dec = interval_dec()
        basis = make(dec, features=6)
        jet = feature_jets(basis, 0, np.linspace(0, 0.2, 9)[:, None], 0)
        assert jet.value.shape == (9, 6)


class TestSerialization:
    def test_round_trip(self, tmp_path):
        dec = square_dec()
        basis = make(dec, features=5, depth=2, activation="sin", seed=9)
        path = str(tmp_path / "basis.npz")
        save_basis(basis, path)
        loaded = load_basis(path)
        assert loaded.feature_count == 5
        assert loaded.depth == 2
        assert loaded.activation == "sin"
        for a, b in zip(basis.weights, loaded.weights):
            assert np.array_equal(a, b)
        for a, b in zip(basis.biases, loaded.biases):
            assert np.array_equal(a, b)
        assert np.array_equal(loaded.decomposition.centers, dec.centers)

    def test_loaded_basis_evaluates_identically(self, tmp_path):
        dec = interval_dec()
        basis = make(dec, seed=5)
        path = str(tmp_path / "b.npz")
        save_basis(basis, path)
        loaded = load_basis(path)
        t = np.linspace(0.0, 0.3, 7)[:, None]
        assert np.array_equal(feature_jets(basis, 0, t, 0).value,
                              feature_jets(loaded, 0, t, 0).value)
