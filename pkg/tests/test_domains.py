"""Domain decomposition and partition-of-unity window tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from featlsq.domains import (Decomposition, Domain, coverage_counts, decompose,
                             support_mask, window_jets)
from featlsq.errors import (InvalidInputError, UnsupportedDecompositionError)


def unit_interval(count=20, overlap=2.9):
    return decompose(Domain(np.array([[0.0, 1.0]])), count, overlap)


def unit_square(count=5, overlap=2.9):
    return decompose(Domain(np.array([[0.0, 1.0], [0.0, 1.0]])), count, overlap)


class TestDomain:
    def test_widths(self):
        dom = Domain(np.array([[-1.0, 1.0], [0.0, 3.0]]))
        assert np.allclose(dom.widths, [2.0, 3.0])
        assert dom.dim == 2

    def test_rejects_degenerate_bounds(self):
        with pytest.raises(InvalidInputError):
            Domain(np.array([[1.0, 1.0]]))
        with pytest.raises(InvalidInputError):
            Domain(np.array([[2.0, 1.0]]))

    def test_flat_pair_promotes_to_one_dim(self):
        assert Domain(np.array([0.0, 1.0])).bounds.shape == (1, 2)

    def test_rejects_bad_shape(self):
        with pytest.raises(InvalidInputError):
            Domain(np.array([0.0, 1.0, 2.0]))
        with pytest.raises(InvalidInputError):
            Domain(np.array([[0.0], [1.0]]))

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidInputError):
            Domain(np.array([[0.0, np.inf]]))


class TestDecompose:
    def test_centers_span_domain(self):
        dec = unit_interval(count=5, overlap=2.0)
        assert np.allclose(dec.centers[0], [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_half_width_follows_overlap(self):
        # half width = (overlap / 2) * spacing
        dec = unit_interval(count=5, overlap=3.0)
        assert dec.half_widths[0] == pytest.approx(1.5 * 0.25)

    def test_needs_two_per_dim(self):
        with pytest.raises(UnsupportedDecompositionError):
            unit_interval(count=1)

    def test_needs_positive_overlap(self):
        with pytest.raises(UnsupportedDecompositionError):
            unit_interval(overlap=0.0)

    def test_subdomain_count(self):
        assert unit_square(count=4).subdomain_count == 16
        assert unit_interval(count=7).subdomain_count == 7

    def test_multi_index_round_trip(self):
        dec = unit_square(count=3)
        seen = {dec.multi_index(j) for j in range(dec.subdomain_count)}
        assert len(seen) == 9
        assert (0, 0) in seen and (2, 2) in seen

    def test_subdomain_bounds(self):
        dec = unit_interval(count=5, overlap=2.0)
        bounds = dec.subdomain_bounds(2)
        assert bounds[0, 0] == pytest.approx(0.5 - 0.25)
        assert bounds[0, 1] == pytest.approx(0.5 + 0.25)


class TestPartitionOfUnity:
    def test_windows_sum_to_one_1d(self):
        dec = unit_interval()
        x = np.linspace(0.0, 1.0, 801)[:, None]
        total = np.zeros(x.shape[0])
        for j in range(dec.subdomain_count):
            mask = support_mask(dec, j, x)
            total[mask] += window_jets(dec, j, x[mask], axis=0).value
        assert np.allclose(total, 1.0, atol=1e-12)

    def test_windows_sum_to_one_2d(self):
        dec = unit_square()
        rng = np.random.default_rng(0)
        x = rng.uniform(0.0, 1.0, (400, 2))
        total = np.zeros(x.shape[0])
        for j in range(dec.subdomain_count):
            mask = support_mask(dec, j, x)
            total[mask] += window_jets(dec, j, x[mask], axis=0).value
        assert np.allclose(total, 1.0, atol=1e-12)

    def test_window_derivatives_sum_to_zero(self):
        # differentiating sum w_j = 1 along any axis gives zero
        dec = unit_square(count=4)
        rng = np.random.default_rng(1)
        x = rng.uniform(0.05, 0.95, (200, 2))
        for axis in (0, 1):
            d1 = np.zeros(x.shape[0])
            d2 = np.zeros(x.shape[0])
            for j in range(dec.subdomain_count):
                mask = support_mask(dec, j, x)
                jet = window_jets(dec, j, x[mask], axis)
                d1[mask] += jet.first
                d2[mask] += jet.second
            assert np.allclose(d1, 0.0, atol=1e-10)
            assert np.allclose(d2, 0.0, atol=1e-8)

    def test_window_jets_match_finite_differences(self):
        dec = unit_interval(count=6, overlap=2.5)
        j = 3
        mu = dec.centers[0][j]
        half = dec.half_widths[0]
        t = np.linspace(mu - 0.9 * half, mu + 0.9 * half, 41)[:, None]
        h = 1e-6

        def w(points):
            return window_jets(dec, j, points, 0).value

        jet = window_jets(dec, j, t, 0)
        first = (w(t + h) - w(t - h)) / (2 * h)
        second = (w(t + h) - 2 * w(t) + w(t - h)) / (h * h)
        assert np.allclose(jet.first, first, rtol=1e-5, atol=1e-7)
        assert np.allclose(jet.second, second, rtol=1e-3, atol=1e-2)

    def test_support_is_strict(self):
        dec = unit_interval(count=5, overlap=2.0)
        mu = dec.centers[0][2]
        half = dec.half_widths[0]
        pts = np.array([[mu], [mu + half], [mu - half], [mu + 2 * half]])
        mask = support_mask(dec, 2, pts)
        assert mask.tolist() == [True, False, False, False]

    def test_window_vanishes_at_support_edge(self):
        # cosine factor hits zero exactly at mu +- half, quartic contact
        dec = unit_interval(count=5, overlap=2.0)
        mu = dec.centers[0][2]
        half = dec.half_widths[0]
        eps = 1e-9 * half
        inside = np.array([[mu + half - eps]])
        val = window_jets(dec, 2, inside, 0).value
        assert 0.0 <= val[0] < 1e-12


class TestCoverage:
    def test_overlap_below_two_is_pairwise(self):
        dec = unit_interval(count=20, overlap=1.45)
        x = np.linspace(0.0, 1.0, 2001)[:, None]
        counts = coverage_counts(dec, x)
        assert counts.min() >= 1
        assert counts.max() == 2

    def test_baseline_overlap_covers_in_triples(self):
        dec = unit_interval(count=20, overlap=2.9)
        x = np.linspace(0.0, 1.0, 2001)[:, None]
        counts = coverage_counts(dec, x)
        assert counts.min() >= 2
        assert counts.max() == 3

    def test_small_overlap_leaves_gaps(self):
        dec = unit_interval(count=5, overlap=0.5)
        x = np.linspace(0.0, 1.0, 501)[:, None]
        assert (coverage_counts(dec, x) == 0).any()

    @given(st.integers(2, 12), st.floats(1.05, 4.0))
    @settings(max_examples=30, deadline=None)
    def test_any_valid_decomposition_covers_interior(self, count, overlap):
        dec = unit_interval(count=count, overlap=overlap)
        x = np.linspace(0.0, 1.0, 301)[:, None]
        assert coverage_counts(dec, x).min() >= 1


class TestNormalization:
    def test_rejects_point_outside_all_supports(self):
        dec = unit_interval(count=5, overlap=0.5)
        # midway between subdomain supports the normalizer vanishes
        gap_point = np.array([[0.125]])
        assert coverage_counts(dec, gap_point)[0] == 0
        with pytest.raises(InvalidInputError):
            window_jets(dec, 0, gap_point, 0)

    def test_decomposition_fields_consistent(self):
        dec = unit_square(count=3, overlap=2.0)
        assert dec.centers.shape == (2, 3)
        assert dec.half_widths.shape == (2,)
        assert dec.dim == 2
