"""Column filtering and the block right preconditioner."""

import numpy as np
import pytest
import scipy.linalg

from featlsq.assembly import SubdomainBlock, apply, assemble
from featlsq.basis import init_basis
from featlsq.domains import decompose
from featlsq.errors import (CapExceededError, DegenerateSubdomainError,
                            InvalidInputError)
from featlsq.filtering import filter_system, precondition, recover_solution
from featlsq.problems import oscillator_problem


def build_system(omega0=30.0, count=8, features=8, seed=0):
    problem = oscillator_problem(omega0)
    dec = decompose(problem.domain, count, 2.9)
    basis = init_basis(dec, features, 1, "tanh", np.random.default_rng(seed))
    return assemble(problem, dec, basis)


@pytest.fixture(scope="module")
def system():
    return build_system()


@pytest.fixture(scope="module")
def filtered(system):
    # sigma large enough that roughly a third of the columns go
    return filter_system(system, 1e-4)


class TestFilterSystem:
    def test_sigma_zero_keeps_everything(self, system):
        fs = filter_system(system, 0.0)
        assert fs.kept_total == system.column_count
        assert fs.drop_fraction == 0.0
        assert all(b.dropped_columns.size == 0 for b in fs.blocks)
        assert np.array_equal(np.sort(fs.kept_columns),
                              np.arange(system.column_count))

    def test_larger_sigma_drops_more(self, system):
        kept = [filter_system(system, s).kept_total
                for s in (0.0, 1e-4, 1e-2, 0.3)]
        assert kept[0] == system.column_count
        assert kept == sorted(kept, reverse=True)
        assert kept[-1] < kept[0]

    def test_kept_sets_nest_in_pivot_order(self, system):
        # raising sigma truncates the same pivot sequence earlier, so the
        # kept columns at a larger threshold prefix those at a smaller one
        loose = filter_system(system, 1e-4)
        tight = filter_system(system, 1e-2)
        for lo, hi in zip(loose.blocks, tight.blocks):
            assert hi.kept_count <= lo.kept_count
            assert np.array_equal(hi.kept_columns, lo.kept_columns[:hi.kept_count])

    def test_q_blocks_orthonormal(self, filtered):
        for blk in filtered.blocks:
            gram = blk.q_factor.T @ blk.q_factor
            assert np.allclose(gram, np.eye(blk.kept_count), atol=1e-12)

    def test_qr_reproduces_kept_columns(self, filtered):
        for blk, sys_blk in zip(filtered.blocks, filtered.system.blocks):
            local = np.searchsorted(sys_blk.columns, blk.kept_columns)
            assert np.allclose(blk.q_factor @ blk.r_factor,
                               sys_blk.matrix[:, local], atol=1e-12)

    def test_offsets_partition_columns(self, filtered):
        sizes = np.diff(filtered.offsets)
        assert np.array_equal(sizes, [b.kept_count for b in filtered.blocks])
        assert filtered.offsets[0] == 0
        assert filtered.kept_total == filtered.offsets[-1]

    def test_dropped_disjoint_from_kept(self, filtered):
        for blk in filtered.blocks:
            overlap = np.intersect1d(blk.kept_columns, blk.dropped_columns)
            assert overlap.size == 0

    def test_summary(self, filtered):
        s = filtered.summary()
        assert s["sigma"] == 1e-4
        assert s["kept_total"] == filtered.kept_total
        assert s["column_count"] == filtered.system.column_count
        assert s["drop_fraction"] == pytest.approx(filtered.drop_fraction)
        assert sum(s["kept_per_block"]) == filtered.kept_total

    def test_zeroed_block_degenerate(self):
        system = build_system(count=4, features=4)
        blk = system.blocks[0]
        system.blocks[0] = SubdomainBlock(blk.subdomain, blk.rows, blk.columns,
                                          np.zeros_like(blk.matrix))
        with pytest.raises(DegenerateSubdomainError, match="subdomain 0"):
            filter_system(system, 1e-8)

    def test_filtered_matrix_is_column_subset(self, filtered):
        dense = filtered.materialize()
        full = filtered.system.materialize()
        for blk, lo in zip(filtered.blocks, filtered.offsets):
            got = dense[:, lo:lo + blk.kept_count]
            assert np.array_equal(got, full[:, blk.kept_columns])


class TestPreconditioner:
    def test_blocks_become_orthonormal(self, filtered):
        op = precondition(filtered)
        dense = op.materialize()
        for blk, lo in zip(filtered.blocks, filtered.offsets):
            cols = dense[:, lo:lo + blk.kept_count]
            assert np.allclose(cols.T @ cols, np.eye(blk.kept_count), atol=1e-12)

    def test_equals_filtered_times_inverse_r(self, filtered):
        op = precondition(filtered).materialize()
        s_inv = scipy.linalg.block_diag(
            *[np.linalg.inv(b.r_factor) for b in filtered.blocks])
        assert np.allclose(op, filtered.materialize() @ s_inv, atol=1e-10)

    def test_apply_matches_dense(self, filtered):
        op = precondition(filtered)
        dense = op.materialize()
        rng = np.random.default_rng(5)
        y = rng.standard_normal(op.shape[1])
        r = rng.standard_normal(op.shape[0])
        assert np.allclose(op.apply(y), dense @ y, atol=1e-12)
        assert np.allclose(op.apply_transpose(r), dense.T @ r, atol=1e-12)

    def test_shape_checks(self, filtered):
        op = precondition(filtered)
        with pytest.raises(InvalidInputError):
            op.apply(np.zeros(op.shape[1] + 1))
        with pytest.raises(InvalidInputError):
            op.apply_transpose(np.zeros(op.shape[0] + 2))

    def test_size_cap(self, filtered):
        with pytest.raises(CapExceededError):
            precondition(filtered).materialize(size_cap=8)
        with pytest.raises(CapExceededError):
            filtered.materialize(size_cap=8)


class TestRecovery:
    def test_consistent_with_preconditioned_product(self, system, filtered):
        # Q y and M a must be the same vector when a = recover(y)
        op = precondition(filtered)
        rng = np.random.default_rng(6)
        y = rng.standard_normal(filtered.kept_total)
        a = recover_solution(filtered, y)
        assert np.allclose(op.apply(y), apply(system, a), atol=1e-8)

    def test_dropped_coefficients_are_zero(self, system):
        fs = filter_system(system, 1e-2)
        y = np.random.default_rng(7).standard_normal(fs.kept_total)
        a = recover_solution(fs, y)
        dropped = np.concatenate([b.dropped_columns for b in fs.blocks])
        assert dropped.size > 0
        assert np.all(a[dropped] == 0.0)
        kept = fs.kept_columns
        assert np.any(a[kept] != 0.0)

    def test_round_trip_without_drops(self, system):
        # with nothing dropped, recover inverts y = S a exactly
        fs = filter_system(system, 0.0)
        rng = np.random.default_rng(8)
        a_true = rng.standard_normal(system.column_count)
        y = np.empty(fs.kept_total)
        for blk, lo in zip(fs.blocks, fs.offsets):
            y[lo:lo + blk.kept_count] = blk.r_factor @ a_true[blk.kept_columns]
        assert np.allclose(recover_solution(fs, y), a_true, atol=1e-8)

    def test_shape_check(self, filtered):
        with pytest.raises(InvalidInputError):
            recover_solution(filtered, np.zeros(filtered.kept_total + 3))
