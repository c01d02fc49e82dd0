"""Experiment orchestration: single runs, suites, and CSV artifacts.

A run is one (problem, decomposition, basis, solver) configuration executed
over a list of seeds. Per seed we assemble the system, solve it with the
configured method, track test error along the iterations, and keep the
best-error iterate. Per configuration we report the median and range of the
final errors and the mean and standard deviation of the solve times, plus
condition numbers measured on the first seed's matrices.

Artifacts per run: an aggregate CSV row, one convergence CSV per seed,
singular-value spectra when dense decompositions are affordable, the first
seed's solution on the test lattice, and a JSON report. Suites lay the same
artifacts out per cell and add a manifest keyed by config hash. All files
are written atomically (temp file plus rename).
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse

from .analysis import SINGULAR_FLAG_FACTOR, ConditionEstimate, condition_number, \
    haar_block_stats
from .assembly import GlobalSystem, assemble, l1_error, make_test_set, solution_matrix
from .basis import ACTIVATIONS, init_basis
from .domains import decompose
from .errors import ConfigurationError, RunError
from .fdwave import ReferenceField, fd_wave_reference, load_reference
from .filtering import FilteredSystem, filter_system, precondition, recover_solution
from .linalg import DENSE_SIZE_CAP, RandomSource, back_substitute, singular_values
from .problems import laplace_problem, oscillator_problem, wave_problem
from .solvers import ConvergenceMonitor, Operator, as_operator, as_preconditioner, \
    cg_normal, lsqr

PROBLEMS = ("oscillator", "laplace", "wave")
SOLVERS = ("rrqr-lsqr", "lsqr", "cg", "as-cg")

AGGREGATE_COLUMNS = (
    "network", "h", "K", "κ(M)", "κ(M̂)", "κ(M̂S⁻¹)",
    "κ(MᵀM)", "κ(A_AS⁻¹A)", "optimiser", "σ", "drop %",
    "e_L1 median", "e_L1 range", "time mean", "time stddev",
)

CONVERGENCE_COLUMNS = ("iteration", "residual", "e_L1")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one run depends on; hashable to a reproducibility key."""

    problem: str = "oscillator"
    omega0: float = 60.0
    scale_count: int = 3
    wavelength: float = 0.2
    wave_speed: float = 1.0
    count_per_dim: int = 20
    overlap: float = 2.9
    features: int = 8
    depth: int = 1
    activation: str = "tanh"
    sigma: float = 1e-8
    constraint_weight: float = 1.0
    solver: str = "rrqr-lsqr"
    max_iters: int = 10000
    eval_stride: int = 1
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    cond_seeds: int = 1
    size_cap: int = DENSE_SIZE_CAP
    lanczos_iters: int = 200
    points_per_wavelength: int = 10
    interior_per_dim: int | None = None
    label: str = ""


def validate_config(cfg: ExperimentConfig) -> None:
    problems = []
    if cfg.problem not in PROBLEMS:
        problems.append(f"unknown problem {cfg.problem!r}, expected one of {PROBLEMS}")
    if cfg.solver not in SOLVERS:
        problems.append(f"unknown solver {cfg.solver!r}, expected one of {SOLVERS}")
    if cfg.activation not in ACTIVATIONS:
        problems.append(f"unknown activation {cfg.activation!r}")
    if cfg.problem == "oscillator" and cfg.omega0 <= 2.0:
        problems.append("omega0 must exceed 2 for the underdamped oscillator")
    if cfg.problem == "laplace" and cfg.scale_count < 1:
        problems.append("scale_count must be at least 1")
    if cfg.problem == "wave" and cfg.wavelength <= 0.0:
        problems.append("wavelength must be positive")
    if cfg.count_per_dim < 2:
        problems.append("count_per_dim must be at least 2")
    if cfg.overlap <= 0.0:
        problems.append("overlap must be positive")
    if cfg.features < 1 or cfg.depth < 1:
        problems.append("features and depth must be at least 1")
    if cfg.sigma < 0.0:
        problems.append("sigma cannot be negative")
    if cfg.constraint_weight <= 0.0:
        problems.append("constraint_weight must be positive")
    if cfg.max_iters < 1 or cfg.eval_stride < 1:
        problems.append("max_iters and eval_stride must be at least 1")
    if not cfg.seeds:
        problems.append("seed list is empty")
    if cfg.interior_per_dim is not None and cfg.interior_per_dim < 2:
        problems.append("interior_per_dim must be at least 2")
    if cfg.points_per_wavelength < 2:
        problems.append("points_per_wavelength must be at least 2")
    if problems:
        raise ConfigurationError("; ".join(problems))


def config_hash(cfg: ExperimentConfig) -> str:
    payload = json.dumps(dataclasses.asdict(cfg), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def default_label(cfg: ExperimentConfig) -> str:
    parts = [cfg.problem, cfg.solver, f"S{cfg.count_per_dim}", f"K{cfg.features}",
             f"h{cfg.depth}", cfg.activation]
    if cfg.solver == "rrqr-lsqr":
        parts.append(f"sig{cfg.sigma:g}")
    return "-".join(parts)


def make_problem(cfg: ExperimentConfig, fd_cache_dir: str | None = None):
    """Problem spec for a config; the wave problem gets its reference field."""
    if cfg.problem == "oscillator":
        return oscillator_problem(cfg.omega0, constraint_weight=cfg.constraint_weight)
    if cfg.problem == "laplace":
        return laplace_problem(cfg.scale_count)
    reference = ensure_wave_reference(cfg.wavelength, cfg.wave_speed,
                                      cfg.points_per_wavelength, fd_cache_dir)
    return wave_problem(cfg.wavelength, cfg.wave_speed).with_exact(reference)


def ensure_wave_reference(wavelength: float, wave_speed: float,
                          points_per_wavelength: int,
                          cache_dir: str | None = None) -> ReferenceField:
    """Compute the wave reference, or reuse a cached one when a cache exists."""
    base = None
    if cache_dir:
        name = f"fd-wave-wl{wavelength:g}-c{wave_speed:g}-ppw{points_per_wavelength}"
        base = os.path.join(cache_dir, name)
        if os.path.exists(base + ".json"):
            return load_reference(base)
    reference = fd_wave_reference(wavelength, wave_speed, points_per_wavelength)
    if base is not None:
        os.makedirs(cache_dir, exist_ok=True)
        reference.save(base)
    return reference


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class SeedReport:
    seed: int
    error: float
    best_iteration: int
    iterations_run: int
    residual_norm: float
    assemble_time: float
    solve_time: float
    drop_fraction: float | None
    records: tuple


@dataclass(frozen=True)
class ConditionReport:
    kappa_m: ConditionEstimate | None = None
    kappa_mhat: ConditionEstimate | None = None
    kappa_q: ConditionEstimate | None = None
    kappa_normal: ConditionEstimate | None = None
    kappa_as: ConditionEstimate | None = None

    def to_json(self) -> dict:
        out = {}
        for name, est in dataclasses.asdict(self).items():
            out[name] = est  # dataclasses.asdict already dictified estimates
        return out


@dataclass(frozen=True)
class SolveReport:
    config: ExperimentConfig
    config_hash: str
    label: str
    seeds: tuple[SeedReport, ...]
    condition: ConditionReport
    row_count: int
    column_count: int
    kept_count: int | None
    test_count: int
    error_median: float
    error_range: float
    time_mean: float
    time_std: float
    drop_percent: float | None
    run_dir: str | None = None

    def aggregate_row(self) -> list[str]:
        cfg = self.config
        network = "elm" if cfg.activation == "tanh" else f"elm-{cfg.activation}"
        is_rrqr = cfg.solver == "rrqr-lsqr"
        return [
            network, str(cfg.depth), str(cfg.features),
            _format_estimate(self.condition.kappa_m),
            _format_estimate(self.condition.kappa_mhat),
            _format_estimate(self.condition.kappa_q),
            _format_estimate(self.condition.kappa_normal),
            _format_estimate(self.condition.kappa_as),
            cfg.solver,
            f"{cfg.sigma:g}" if is_rrqr else "",
            f"{self.drop_percent:.1f}" if self.drop_percent is not None else "",
            f"{self.error_median:.3e}", f"{self.error_range:.3e}",
            f"{self.time_mean:.3f}", f"{self.time_std:.3f}",
        ]

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "hash": self.config_hash,
            "config": dataclasses.asdict(self.config),
            "rows": self.row_count,
            "columns": self.column_count,
            "kept": self.kept_count,
            "test_points": self.test_count,
            "seeds": [{
                "seed": s.seed, "error": s.error,
                "best_iteration": s.best_iteration,
                "iterations_run": s.iterations_run,
                "residual_norm": s.residual_norm,
                "assemble_time": s.assemble_time, "solve_time": s.solve_time,
                "drop_fraction": s.drop_fraction,
            } for s in self.seeds],
            "aggregate": {
                "error_median": self.error_median, "error_range": self.error_range,
                "time_mean": self.time_mean, "time_std": self.time_std,
                "drop_percent": self.drop_percent,
            },
            "condition": self.condition.to_json(),
        }


def _format_estimate(est: ConditionEstimate | None) -> str:
    if est is None:
        return ""
    prefix = "~" if est.method == "lanczos" else ""
    return f"{prefix}{est.value:.3g}"


# ---------------------------------------------------------------------------
# single experiment

def _error_matrix(filtered: FilteredSystem, phi_test) -> scipy.sparse.csr_matrix:
    """Test-lattice evaluation matrix in preconditioned coordinates.

    Coefficient recovery is a per-block triangular solve; folding the inverse
    factors into the evaluation matrix once makes the per-iteration test
    error a single sparse product T @ y.
    """
    inverse_blocks = [back_substitute(blk.r_factor, np.eye(blk.kept_count))
                      for blk in filtered.blocks]
    s_inverse = scipy.sparse.block_diag(inverse_blocks, format="csc")
    phi_kept = phi_test[:, filtered.kept_columns]
    return (phi_kept @ s_inverse).tocsr()


def _solve_one(cfg: ExperimentConfig, system: GlobalSystem, phi_test, lift,
               test_set):
    """Dispatch on solver kind. Returns (coeffs, result, drop, filtered, precond,
    as_pre); the last three are None where not applicable."""
    if cfg.solver == "rrqr-lsqr":
        filtered = filter_system(system, cfg.sigma)
        precond = precondition(filtered)
        t_matrix = _error_matrix(filtered, phi_test)

        def error_fn(y):
            return l1_error(t_matrix @ y + lift, test_set)

        monitor = ConvergenceMonitor(error_fn, cfg.eval_stride)
        result = lsqr(precond, system.rhs, cfg.max_iters, monitor)
        coeffs = recover_solution(filtered, result.best_solution)
        return coeffs, result, filtered.drop_fraction, filtered, precond, None

    def error_fn(a):
        return l1_error(phi_test @ a + lift, test_set)

    monitor = ConvergenceMonitor(error_fn, cfg.eval_stride)
    if cfg.solver == "lsqr":
        result = lsqr(system, system.rhs, cfg.max_iters, monitor)
        return result.best_solution, result, None, None, None, None
    as_pre = as_preconditioner(system) if cfg.solver == "as-cg" else None
    result = cg_normal(system, system.rhs, cfg.max_iters, monitor, as_pre)
    return result.best_solution, result, None, None, None, as_pre


def _estimate_from_spectrum(svals: np.ndarray) -> ConditionEstimate:
    smax, smin = float(svals[0]), float(svals[-1])
    singular = smin <= SINGULAR_FLAG_FACTOR * np.finfo(float).eps * smax
    value = np.inf if smin == 0.0 else smax / smin
    return ConditionEstimate(value, "dense", bool(singular))


def _cond_of(thing, dense_mat, cfg: ExperimentConfig, want_spectrum: bool):
    """Condition estimate plus the spectrum when a dense SVD was affordable."""
    if dense_mat is not None:
        svals = singular_values(dense_mat, cfg.size_cap)
        est = _estimate_from_spectrum(svals)
        return est, (svals if want_spectrum else None)
    est = condition_number(thing, cfg.size_cap, cfg.lanczos_iters)
    return est, None


def _normal_operator(system: GlobalSystem, as_pre=None) -> Operator:
    op = as_operator(system)
    n = op.shape[1]
    if as_pre is None:
        def mv(vec):
            return op.rmatvec(op.matvec(vec))
        return Operator(mv, mv, (n, n))

    def pmv(vec):
        return as_pre.apply(op.rmatvec(op.matvec(vec)))

    def pmv_t(vec):
        return op.rmatvec(op.matvec(as_pre.apply(vec)))

    return Operator(pmv, pmv_t, (n, n))


def _condition_numbers(cfg: ExperimentConfig, system: GlobalSystem,
                       filtered, precond, as_pre):
    """Per-solver condition columns, measured on the current seed's matrices."""
    cap = cfg.size_cap
    in_cap = max(system.shape) <= cap
    dense_m = system.materialize(cap) if in_cap else None
    kappa_m, spectrum_m = _cond_of(system, dense_m, cfg, want_spectrum=True)

    kappa_mhat = kappa_q = kappa_normal = kappa_as = None
    spectrum_q = None
    if cfg.solver == "rrqr-lsqr":
        if filtered.drop_fraction == 0.0:
            kappa_mhat = kappa_m  # column permutation of M: same spectrum
        else:
            dense = filtered.materialize(cap) if in_cap else None
            kappa_mhat, _ = _cond_of(filtered, dense, cfg, want_spectrum=False)
        dense = precond.materialize(cap) if in_cap else None
        kappa_q, spectrum_q = _cond_of(precond, dense, cfg, want_spectrum=True)
    elif cfg.solver in ("cg", "as-cg"):
        mat = system.csr()
        if system.column_count <= cap:
            gram = (mat.T @ mat).toarray()
            kappa_normal, _ = _cond_of(None, gram, cfg, want_spectrum=False)
            if cfg.solver == "as-cg":
                product = as_pre.materialize() @ gram
                kappa_as, _ = _cond_of(None, product, cfg, want_spectrum=False)
        else:
            kappa_normal, _ = _cond_of(_normal_operator(system), None, cfg, False)
            if cfg.solver == "as-cg":
                kappa_as, _ = _cond_of(_normal_operator(system, as_pre), None,
                                       cfg, False)

    report = ConditionReport(kappa_m, kappa_mhat, kappa_q, kappa_normal, kappa_as)
    spectra = {}
    if spectrum_m is not None:
        spectra["M"] = spectrum_m
    if spectrum_q is not None:
        spectra["Q"] = spectrum_q
    return report, spectra


def run_experiment(cfg: ExperimentConfig, out_dir: str | None = None,
                   fd_cache_dir: str | None = None) -> SolveReport:
    """Run one configuration over its seed list and aggregate the results.

    When out_dir is given, artifacts land in out_dir/<label>/: the config,
    one convergence CSV per seed, a one-row aggregate CSV, spectra and the
    first seed's solution when available, and report.json.
    """
    validate_config(cfg)
    label = cfg.label or default_label(cfg)
    try:
        return _run_validated(cfg, label, out_dir, fd_cache_dir)
    except ConfigurationError:
        raise
    except Exception as err:
        raise RunError(f"run {label!r} ({config_hash(cfg)[:8]}): {err}") from err


def _run_validated(cfg: ExperimentConfig, label: str, out_dir: str | None,
                   fd_cache_dir: str | None) -> SolveReport:
    problem = make_problem(cfg, fd_cache_dir)
    dec = decompose(problem.domain, cfg.count_per_dim, cfg.overlap)
    test_set = make_test_set(problem, dec)

    seed_reports = []
    condition = ConditionReport()
    spectra: dict[str, np.ndarray] = {}
    first_prediction = None
    shape = (0, 0)
    kept_count = None
    for position, seed in enumerate(cfg.seeds):
        rng = RandomSource(seed).generator()
        basis = init_basis(dec, cfg.features, cfg.depth, cfg.activation, rng)
        t0 = time.perf_counter()
        system = assemble(problem, dec, basis, interior_per_dim=cfg.interior_per_dim)
        system.csr()
        assemble_time = time.perf_counter() - t0
        shape = system.shape
        phi_test, lift = solution_matrix(problem, dec, basis, test_set.points)

        t1 = time.perf_counter()
        coeffs, result, drop, filtered, precond, as_pre = _solve_one(
            cfg, system, phi_test, lift, test_set)
        solve_time = time.perf_counter() - t1

        prediction = phi_test @ coeffs + lift
        error = l1_error(prediction, test_set)
        monitor = result.monitor
        seed_reports.append(SeedReport(
            seed=seed, error=error, best_iteration=monitor.best_iteration,
            iterations_run=result.iterations_run,
            residual_norm=result.residual_norm,
            assemble_time=assemble_time, solve_time=solve_time,
            drop_fraction=drop, records=tuple(monitor.records)))
        if position == 0:
            first_prediction = prediction
            if filtered is not None:
                kept_count = filtered.kept_total
            if cfg.cond_seeds > 0:
                condition, spectra = _condition_numbers(
                    cfg, system, filtered, precond, as_pre)

    errors = np.array([s.error for s in seed_reports])
    times = np.array([s.solve_time for s in seed_reports])
    drops = [s.drop_fraction for s in seed_reports if s.drop_fraction is not None]
    report = SolveReport(
        config=cfg, config_hash=config_hash(cfg), label=label,
        seeds=tuple(seed_reports), condition=condition,
        row_count=shape[0], column_count=shape[1], kept_count=kept_count,
        test_count=test_set.points.shape[0],
        error_median=float(np.median(errors)),
        error_range=float(errors.max() - errors.min()),
        time_mean=float(times.mean()), time_std=float(times.std()),
        drop_percent=(100.0 * float(np.median(drops)) if drops else None),
        run_dir=None)

    if out_dir is not None:
        run_dir = os.path.join(out_dir, label)
        _write_run_artifacts(report, run_dir, test_set, first_prediction, spectra)
        report = replace(report, run_dir=run_dir)
    return report


# ---------------------------------------------------------------------------
# artifact writing

def _write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def dump_config(cfg: ExperimentConfig) -> str:
    """Flat key = value text, parseable by config.parse_config."""
    lines = []
    for field in dataclasses.fields(cfg):
        value = getattr(cfg, field.name)
        if field.name == "seeds":
            value = ", ".join(str(s) for s in value)
        elif value is None:
            continue
        lines.append(f"{field.name} = {value}")
    return "\n".join(lines) + "\n"


def _write_run_artifacts(report: SolveReport, run_dir: str, test_set,
                         first_prediction, spectra) -> None:
    os.makedirs(run_dir, exist_ok=True)
    _write_text(os.path.join(run_dir, "config.cfg"), dump_config(report.config))
    _write_text(os.path.join(run_dir, "aggregate.csv"),
                _csv_text(AGGREGATE_COLUMNS, [report.aggregate_row()]))
    for seed_report in report.seeds:
        rows = [(it, f"{res:.9e}", f"{err:.9e}")
                for it, res, err in seed_report.records]
        _write_text(os.path.join(run_dir, f"convergence-seed{seed_report.seed}.csv"),
                    _csv_text(CONVERGENCE_COLUMNS, rows))
    if spectra:
        names = sorted(spectra)
        length = max(s.size for s in spectra.values())
        rows = []
        for i in range(length):
            rows.append([i] + [f"{spectra[n][i]:.9e}" if i < spectra[n].size else ""
                               for n in names])
        header = ["index"] + [f"σ({n})" for n in names]
        _write_text(os.path.join(run_dir, "spectra.csv"), _csv_text(header, rows))
    if first_prediction is not None:
        dim = test_set.points.shape[1]
        header = [f"x{i}" for i in range(dim)] + ["true", "predicted"]
        rows = [[f"{v:.9e}" for v in test_set.points[i]]
                + [f"{test_set.true_values[i]:.9e}", f"{first_prediction[i]:.9e}"]
                for i in range(test_set.points.shape[0])]
        _write_text(os.path.join(run_dir, "solution.csv"), _csv_text(header, rows))
    _write_text(os.path.join(run_dir, "report.json"),
                json.dumps(report.to_json(), indent=2, default=float) + "\n")


# ---------------------------------------------------------------------------
# suites

SUITE_KINDS = ("baseline", "ablation-sigma", "ablation-activation", "ablation-depth",
               "strong-K", "strong-Sdelta", "weak")

_STRONG_K = {"oscillator": (4, 8, 16, 32, 64),
             "laplace": (4, 8, 16, 32, 64),
             "wave": (4, 8, 16, 32)}
_STRONG_S = {"oscillator": (10, 20, 40, 80, 160),
             "laplace": (8, 16, 32),
             "wave": (4, 8, 16)}
_STRONG_DELTA = {"oscillator": (1.45, 2.9, 5.8, 11.6, 23.2),
                 "laplace": (1.45, 2.9, 5.8),
                 "wave": (1.45, 2.9, 5.8)}
_WEAK_OSCILLATOR = ((30.0, 10), (60.0, 20), (120.0, 40), (240.0, 80), (580.0, 160))
_WEAK_LAPLACE = ((1, 2), (2, 4), (3, 8), (4, 16), (5, 32), (6, 64))
_WEAK_WAVE = ((0.4, 4), (0.2, 8), (0.1, 16))


@dataclass(frozen=True)
class SuiteSpec:
    """A named family of runs sharing one base configuration.

    Empty lists mean the built-in defaults for (kind, problem). The weak wave
    suite runs only its smallest cell unless include_slow is set; the larger
    cells take hours of iteration time.
    """

    kind: str
    base: ExperimentConfig
    solvers: tuple[str, ...] = ()
    k_list: tuple[int, ...] = ()
    s_list: tuple[int, ...] = ()
    delta_list: tuple[float, ...] = ()
    omega0_list: tuple[float, ...] = ()
    scale_count_list: tuple[int, ...] = ()
    wavelength_list: tuple[float, ...] = ()
    sigma_list: tuple[float, ...] = ()
    activation_list: tuple[str, ...] = ()
    depth_list: tuple[int, ...] = ()
    include_slow: bool = False


def suite_name(suite: SuiteSpec) -> str:
    return f"{suite.base.problem}-{suite.kind}"


def suite_cells(suite: SuiteSpec) -> list[ExperimentConfig]:
    """Expand a suite into labeled experiment configurations."""
    if suite.kind not in SUITE_KINDS:
        raise ConfigurationError(
            f"unknown suite kind {suite.kind!r}, expected one of {SUITE_KINDS}")
    base = suite.base
    validate_config(base)
    cells: list[ExperimentConfig] = []

    if suite.kind == "baseline":
        for solver in suite.solvers or SOLVERS:
            cells.append(replace(base, solver=solver, label=solver))
    elif suite.kind == "ablation-sigma":
        sigmas = suite.sigma_list or (1e-10, 1e-8, 1e-6, 1e-4, 1e-2)
        for sigma in sigmas:
            cells.append(replace(base, solver="rrqr-lsqr", sigma=sigma,
                                 label=f"sigma{sigma:g}"))
    elif suite.kind == "ablation-activation":
        for act in suite.activation_list or ("tanh", "sigmoid", "sin"):
            cells.append(replace(base, activation=act, label=act))
    elif suite.kind == "ablation-depth":
        for depth in suite.depth_list or (1, 3, 5):
            cells.append(replace(base, depth=depth, label=f"h{depth}"))
    elif suite.kind == "strong-K":
        ks = suite.k_list or _STRONG_K[base.problem]
        solvers = suite.solvers or (base.solver,)
        for solver in solvers:
            for k in ks:
                name = f"K{k}" if len(solvers) == 1 else f"{solver}-K{k}"
                cells.append(replace(base, solver=solver, features=k, label=name))
    elif suite.kind == "strong-Sdelta":
        s_list = suite.s_list or _STRONG_S[base.problem]
        d_list = suite.delta_list or _STRONG_DELTA[base.problem]
        if len(s_list) != len(d_list):
            raise ConfigurationError("s_list and delta_list lengths differ")
        solvers = suite.solvers or (base.solver,)
        for solver in solvers:
            for s, delta in zip(s_list, d_list):
                name = f"S{s}-d{delta:g}"
                if len(solvers) > 1:
                    name = f"{solver}-{name}"
                cells.append(replace(base, solver=solver, count_per_dim=s,
                                     overlap=delta, label=name))
    else:  # weak
        solvers = suite.solvers or (base.solver,)
        pairs: list[tuple[dict, str]] = []
        if base.problem == "oscillator":
            omegas = suite.omega0_list or tuple(p[0] for p in _WEAK_OSCILLATOR)
            s_list = suite.s_list or tuple(p[1] for p in _WEAK_OSCILLATOR)
            if len(omegas) != len(s_list):
                raise ConfigurationError("omega0_list and s_list lengths differ")
            pairs = [({"omega0": w, "count_per_dim": s}, f"w{w:g}-S{s}")
                     for w, s in zip(omegas, s_list)]
        elif base.problem == "laplace":
            ns = suite.scale_count_list or tuple(p[0] for p in _WEAK_LAPLACE)
            s_list = suite.s_list or tuple(p[1] for p in _WEAK_LAPLACE)
            if len(ns) != len(s_list):
                raise ConfigurationError("scale_count_list and s_list lengths differ")
            pairs = [({"scale_count": n, "count_per_dim": s}, f"n{n}-S{s}")
                     for n, s in zip(ns, s_list)]
        else:
            wls = suite.wavelength_list or tuple(p[0] for p in _WEAK_WAVE)
            s_list = suite.s_list or tuple(p[1] for p in _WEAK_WAVE)
            if len(wls) != len(s_list):
                raise ConfigurationError("wavelength_list and s_list lengths differ")
            pairs = [({"wavelength": w, "count_per_dim": s}, f"wl{w:g}-S{s}")
                     for w, s in zip(wls, s_list)]
            if not suite.include_slow:
                pairs = pairs[:1]
        for solver in solvers:
            for overrides, name in pairs:
                if len(solvers) > 1:
                    name = f"{solver}-{name}"
                cells.append(replace(base, solver=solver, label=name, **overrides))

    if not cells:
        raise ConfigurationError("suite expanded to zero cells")
    for cell in cells:
        validate_config(cell)
    return cells


@dataclass(frozen=True)
class SuiteResult:
    suite_dir: str
    reports: tuple[SolveReport | None, ...]
    failures: tuple[tuple[str, str], ...]


def _cell_job(args):
    cfg, cells_dir, fd_cache_dir = args
    report = run_experiment(cfg, cells_dir, fd_cache_dir)
    return report


def run_suite(suite: SuiteSpec, out_dir: str, workers: int = 1,
              fd_cache_dir: str | None = None) -> SuiteResult:
    """Run every cell of a suite, writing one aggregate CSV and a manifest.

    Cell failures are recorded in the manifest and the suite keeps going.
    With workers > 1 the cells run in a process pool; cells are independent
    and each writes only inside its own directory.
    """
    cells = suite_cells(suite)
    suite_dir = os.path.join(out_dir, suite_name(suite))
    cells_dir = os.path.join(suite_dir, "cells")
    os.makedirs(cells_dir, exist_ok=True)
    if fd_cache_dir is None:
        fd_cache_dir = os.path.join(suite_dir, "fd-cache")
    for wavelength, speed, ppw in sorted({
            (c.wavelength, c.wave_speed, c.points_per_wavelength)
            for c in cells if c.problem == "wave"}):
        ensure_wave_reference(wavelength, speed, ppw, fd_cache_dir)

    reports: list[SolveReport | None] = [None] * len(cells)
    failures: list[tuple[str, str]] = []
    if workers > 1:
        jobs = [(cfg, cells_dir, fd_cache_dir) for cfg in cells]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_cell_job, job) for job in jobs]
            for index, future in enumerate(futures):
                try:
                    reports[index] = future.result()
                except Exception as err:
                    failures.append((cells[index].label, str(err)))
    else:
        for index, cfg in enumerate(cells):
            try:
                reports[index] = run_experiment(cfg, cells_dir, fd_cache_dir)
            except Exception as err:
                failures.append((cfg.label, str(err)))

    rows = [r.aggregate_row() for r in reports if r is not None]
    _write_text(os.path.join(suite_dir, "aggregate.csv"),
                _csv_text(AGGREGATE_COLUMNS, rows))
    failed = dict(failures)
    manifest = {
        "suite": suite.kind,
        "problem": suite.base.problem,
        "cells": [{
            "label": cfg.label,
            "hash": config_hash(cfg),
            "dir": os.path.join("cells", cfg.label),
            "status": "error" if cfg.label in failed else "ok",
            "error": failed.get(cfg.label),
        } for cfg in cells],
    }
    _write_text(os.path.join(suite_dir, "manifest.json"),
                json.dumps(manifest, indent=2) + "\n")
    return SuiteResult(suite_dir, tuple(reports), tuple(failures))


# ---------------------------------------------------------------------------
# condition sweep and random-matrix reports

SWEEP_COLUMNS = ("K", "δ", "κ(M)", "κ(M̂S⁻¹)")


def kappa_overlap_sweep(out_dir: str | None = None,
                        k_list: tuple[int, ...] = (4, 8, 16, 32, 64),
                        delta_list: tuple[float, ...] = (1.45, 2.9, 5.8, 11.6, 23.2),
                        omega0: float = 60.0, count_per_dim: int = 20,
                        interior_per_dim: int = 2000, seed: int = 0):
    """Condition numbers of the raw and preconditioned matrices over a
    (basis size, overlap) grid, with filtering disabled and the collocation
    lattice held fixed."""
    problem = oscillator_problem(omega0)
    rows = []
    for features in k_list:
        for delta in delta_list:
            dec = decompose(problem.domain, count_per_dim, delta)
            basis = init_basis(dec, features, 1, "tanh", RandomSource(seed).generator())
            system = assemble(problem, dec, basis, interior_per_dim=interior_per_dim)
            filtered = filter_system(system, 0.0)
            precond = precondition(filtered)
            kappa_m = condition_number(system.materialize())
            kappa_q = condition_number(precond.materialize())
            rows.append((features, delta, kappa_m.value, kappa_q.value))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        text_rows = [(k, f"{d:g}", f"{m:.6g}", f"{q:.6g}") for k, d, m, q in rows]
        _write_text(os.path.join(out_dir, "kappa-sweep.csv"),
                    _csv_text(SWEEP_COLUMNS, text_rows))
    return rows


RMT_COLUMNS = ("quantity", "observed mean", "reference", "kind")


def rmt_report(out_dir: str | None = None, dim: int = 100, block_rows: int = 10,
               block_cols: int = 5, trials: int = 1000, seed: int = 0):
    """Monte Carlo block-norm statistics of Haar orthogonal matrices, written
    as a CSV of observed means against their analytic references."""
    stats = haar_block_stats(dim, block_rows, block_cols, trials,
                             RandomSource(seed).generator())
    rows = [
        ("cross block frobenius", stats.mean_cross_fro, stats.cross_fro_bound,
         "upper bound on the mean"),
        ("single block frobenius", stats.mean_block_fro, stats.block_fro_expected,
         "exact mean of the square"),
        ("single block spectral", stats.mean_block_spectral,
         stats.block_spectral_bound, "upper bound on the mean"),
        ("cross block spectral", stats.mean_cross_spectral,
         stats.cross_spectral_bound, "upper bound on the mean"),
        ("condition estimate (spectral^2 coupling)", stats.kappa_estimate_squared,
         "", "plug-in estimate"),
        ("condition estimate (spectral coupling)", stats.kappa_estimate_linear,
         "", "plug-in estimate"),
    ]
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        text_rows = [(q, f"{m:.6g}", f"{r:.6g}" if r != "" else "", k)
                     for q, m, r, k in rows]
        _write_text(os.path.join(out_dir, "rmt.csv"),
                    _csv_text(RMT_COLUMNS, text_rows))
    return stats
