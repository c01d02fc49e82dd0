"""LSQR and normal-equation CG against dense reference solutions."""

import numpy as np
import pytest

from featlsq.assembly import assemble
from featlsq.basis import init_basis
from featlsq.domains import decompose
from featlsq.errors import DivergenceError, InvalidInputError
from featlsq.problems import oscillator_problem
from featlsq.solvers import (AdditiveSchwarz, ConvergenceMonitor, Operator,
                             as_operator, as_preconditioner, cg_normal, lsqr)


@pytest.fixture(scope="module")
def tall_problem():
    """Well-conditioned dense 50x20 least-squares problem with known answer."""
    rng = np.random.default_rng(11)
    a = rng.standard_normal((50, 20))
    b = rng.standard_normal(50)
    return a, b, np.linalg.pinv(a) @ b


class TestAsOperator:
    def test_ndarray(self):
        a = np.arange(6.0).reshape(3, 2)
        op = as_operator(a)
        assert op.shape == (3, 2)
        assert np.allclose(op.matvec(np.ones(2)), a @ np.ones(2))
        assert np.allclose(op.rmatvec(np.ones(3)), a.T @ np.ones(3))

    def test_operator_passthrough(self):
        op = Operator(lambda v: v, lambda v: v, (2, 2))
        assert as_operator(op) is op

    def test_global_system(self):
        problem = oscillator_problem(8.0)
        dec = decompose(problem.domain, 4, 2.9)
        basis = init_basis(dec, 4, 1, "tanh", np.random.default_rng(0))
        system = assemble(problem, dec, basis)
        op = as_operator(system)
        x = np.random.default_rng(1).standard_normal(system.column_count)
        assert np.allclose(op.matvec(x), system.csr() @ x)

    def test_rejects_scalar(self):
        with pytest.raises(InvalidInputError):
            as_operator(3.0)


class TestLsqr:
    def test_matches_pinv(self, tall_problem):
        a, b, x_ref = tall_problem
        result = lsqr(a, b, 200)
        assert np.allclose(result.solution, x_ref, atol=1e-8)
        assert not result.breakdown or result.iterations_run <= 200

    def test_residual_estimate_tracks_truth(self, tall_problem):
        a, b, _ = tall_problem
        monitor = ConvergenceMonitor()
        result = lsqr(a, b, 60, monitor)
        final_true = np.linalg.norm(a @ result.solution - b)
        assert result.residual_norm == pytest.approx(final_true, rel=1e-6)

    def test_residuals_monotone(self, tall_problem):
        a, b, _ = tall_problem
        monitor = ConvergenceMonitor()
        lsqr(a, b, 100, monitor)
        res = [r for _, r, _ in monitor.records]
        assert all(r2 <= r1 + 1e-12 for r1, r2 in zip(res, res[1:]))

    def test_zero_rhs(self):
        result = lsqr(np.eye(4), np.zeros(4), 10)
        assert result.iterations_run == 0
        assert result.residual_norm == 0.0
        assert np.array_equal(result.solution, np.zeros(4))

    def test_rhs_orthogonal_to_range(self):
        # rhs in the null space of A^T: alpha = 0 at startup
        a = np.array([[1.0], [0.0]])
        result = lsqr(a, np.array([0.0, 1.0]), 10)
        assert result.breakdown
        assert result.iterations_run == 0
        assert result.residual_norm == pytest.approx(1.0)

    def test_exact_breakdown_on_identity(self):
        b = np.array([1.0, 2.0, 3.0])
        result = lsqr(np.eye(3), b, 50)
        assert result.breakdown
        assert result.iterations_run <= 3
        assert np.allclose(result.solution, b, atol=1e-12)

    def test_divergence_raises(self):
        a = np.full((3, 3), np.nan)
        with pytest.raises(DivergenceError):
            lsqr(Operator(lambda v: a @ v, lambda r: a.T @ r, (3, 3)),
                 np.ones(3), 5)

    def test_rhs_shape_check(self):
        with pytest.raises(InvalidInputError):
            lsqr(np.eye(3), np.ones(4), 5)


class TestCgNormal:
    def test_matches_pinv(self, tall_problem):
        a, b, x_ref = tall_problem
        result = cg_normal(a, b, 200)
        assert np.allclose(result.solution, x_ref, atol=1e-6)

    def test_residual_is_true_least_squares_residual(self, tall_problem):
        a, b, _ = tall_problem
        monitor = ConvergenceMonitor()
        result = cg_normal(a, b, 40, monitor)
        it, res, _ = monitor.records[-1]
        x = result.solution
        if it == result.iterations_run:
            assert res == pytest.approx(np.linalg.norm(a @ x - b), rel=1e-8)

    def test_identity_converges_in_one(self):
        b = np.array([2.0, -1.0, 0.5])
        result = cg_normal(np.eye(3), b, 10)
        assert np.allclose(result.solution, b, atol=1e-12)

    def test_breakdown_on_zero_normal_matrix(self):
        a = np.zeros((3, 2))
        result = cg_normal(a, np.ones(3), 10)
        assert result.breakdown
        assert result.iterations_run == 0

    def test_rhs_shape_check(self):
        with pytest.raises(InvalidInputError):
            cg_normal(np.eye(3), np.ones(2), 5)


class TestMonitor:
    def test_stride_skips(self, tall_problem):
        a, b, _ = tall_problem
        monitor = ConvergenceMonitor(stride=10)
        lsqr(a, b, 35, monitor)
        assert [it for it, _, _ in monitor.records] == [10, 20, 30]

    def test_best_iterate_retained(self):
        # error function that prefers an early iterate: distance to the
        # first Krylov iterate is minimized at iteration 1
        a = np.diag([1.0, 2.0, 3.0])
        b = np.ones(3)
        snapshot = {}

        def error_fn(x):
            if 1 not in snapshot:
                snapshot[1] = x.copy()
            return float(np.linalg.norm(x - snapshot[1]))

        monitor = ConvergenceMonitor(error_fn=error_fn)
        result = lsqr(a, b, 30, monitor)
        assert monitor.best_iteration == 1
        assert np.allclose(result.best_solution, snapshot[1], atol=0)
        assert not np.allclose(result.solution, snapshot[1])

    def test_best_solution_falls_back(self):
        result = lsqr(np.eye(2), np.zeros(2), 5)
        assert result.monitor.best_iterate is not None or \
            result.best_solution is result.solution

    def test_error_fn_recorded(self, tall_problem):
        a, b, x_ref = tall_problem
        monitor = ConvergenceMonitor(error_fn=lambda x: float(np.linalg.norm(x - x_ref)))
        lsqr(a, b, 50, monitor)
        errs = [e for _, _, e in monitor.records]
        assert errs[-1] < errs[0]
        assert monitor.best_error == min(errs)


class TestAdditiveSchwarz:
    def test_block_inverses_are_pseudo_inverses(self):
        problem = oscillator_problem(8.0)
        dec = decompose(problem.domain, 4, 2.9)
        basis = init_basis(dec, 4, 1, "tanh", np.random.default_rng(2))
        system = assemble(problem, dec, basis)
        pre = as_preconditioner(system)
        assert pre.degenerate_blocks == ()
        for blk, inv in zip(system.blocks, pre.block_inverses):
            gram = blk.matrix.T @ blk.matrix
            # Moore-Penrose identities, robust to where the cutoff lands
            assert np.allclose(inv @ gram @ inv, inv,
                               atol=1e-8 * np.abs(inv).max())
            assert np.allclose(gram @ inv @ gram, gram,
                               atol=1e-8 * np.abs(gram).max())

    def test_exact_inverse_preconditioner_converges_immediately(self, tall_problem):
        a, b, x_ref = tall_problem
        pre = AdditiveSchwarz(20, (np.arange(20),),
                              (np.linalg.pinv(a.T @ a),), ())
        result = cg_normal(a, b, 3, preconditioner=pre)
        assert np.allclose(result.solution, x_ref, atol=1e-8)
        rough = cg_normal(a, b, 2).solution
        ref_err = np.linalg.norm(rough - x_ref)
        assert np.linalg.norm(result.solution - x_ref) < 1e-6 * max(ref_err, 1e-6)

    def test_degenerate_block_listed(self):
        inv = (np.eye(2),)
        pre = AdditiveSchwarz(2, (np.arange(2),), inv, (0,))
        assert pre.degenerate_blocks == (0,)

    def test_apply_shape_check(self):
        pre = AdditiveSchwarz(2, (np.arange(2),), (np.eye(2),), ())
        with pytest.raises(InvalidInputError):
            pre.apply(np.ones(3))
