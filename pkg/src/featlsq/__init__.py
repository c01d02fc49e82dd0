"""Domain-decomposed random-feature least-squares PDE solver.

Workflow: decompose the domain into overlapping subdomains carrying frozen
random feature bases, assemble a weighted collocation least-squares system,
filter near-dependent columns per subdomain with a pivoted QR, solve with a
right-preconditioned LSQR (the per-block inverse triangular factors), and
evaluate against exact or finite-difference reference solutions. Analysis
tools bound the preconditioned condition number from adjacent-block coupling
and check the random-matrix statistics behind that bound.
"""

from .analysis import (BlockStatsReport, ConditionEstimate, CouplingReport,
                       chain_coupling, condition_number, coupling_report,
                       haar_block_stats, random_chain, tridiagonal_bound)
from .assembly import (GlobalSystem, TestSet, assemble, evaluate_solution, l1_error,
                       make_test_set, solution_matrix)
from .basis import ACTIVATIONS, FeatureBasis, init_basis, load_basis, save_basis
from .domains import Decomposition, Domain, decompose, window_jets
from .fdwave import ReferenceField, fd_wave_reference, load_reference
from .filtering import (FilteredSystem, PreconditionedOperator, filter_system,
                        precondition, recover_solution)
from .jets import Jet2
from .linalg import (RandomSource, haar_orthogonal, qr_column_pivot,
                     singular_values, spectral_block_bound)
from .problems import (ConstraintRows, LinearOperator2, ProblemSpec,
                       laplace_problem, oscillator_problem, wave_problem)
from .runner import (ExperimentConfig, SeedReport, SolveReport, SuiteSpec,
                     config_hash, kappa_overlap_sweep, rmt_report, run_experiment,
                     run_suite, suite_cells)
from .solvers import (AdditiveSchwarz, ConvergenceMonitor, Operator, SolveResult,
                      as_operator, as_preconditioner, cg_normal, lsqr)

__version__ = "1.0.0"

__all__ = [
    "ACTIVATIONS", "AdditiveSchwarz", "BlockStatsReport", "ConditionEstimate",
    "ConstraintRows", "ConvergenceMonitor", "CouplingReport", "Decomposition",
    "Domain", "ExperimentConfig", "FeatureBasis", "FilteredSystem",
    "GlobalSystem", "Jet2", "LinearOperator2", "Operator",
    "PreconditionedOperator", "ProblemSpec", "RandomSource", "ReferenceField",
    "SeedReport", "SolveReport", "SolveResult", "SuiteSpec", "TestSet",
    "as_operator", "as_preconditioner", "assemble", "cg_normal", "chain_coupling",
    "condition_number", "config_hash", "coupling_report", "decompose",
    "evaluate_solution", "fd_wave_reference", "filter_system", "haar_block_stats",
    "haar_orthogonal", "init_basis", "kappa_overlap_sweep", "l1_error",
    "laplace_problem", "load_basis", "load_reference", "lsqr", "make_test_set",
    "oscillator_problem", "precondition", "qr_column_pivot", "random_chain",
    "recover_solution", "rmt_report", "run_experiment", "run_suite",
    "save_basis", "singular_values", "solution_matrix", "spectral_block_bound",
    "suite_cells", "tridiagonal_bound", "wave_problem", "window_jets",
    "__version__",
]
