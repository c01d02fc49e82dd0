"""Canned CSV fixtures, verbatim excerpts of real solver artifacts."""

import json

import pytest

CONVERGENCE = """\
iteration,residual,e_L1
1,9.999932069e-01,7.851360603e-01
2,9.999870794e-01,7.851337572e-01
3,9.999784525e-01,7.851289701e-01
500,2.476501264e-01,3.291084181e-01
2000,1.345665270e-02,1.083798593e-03
10000,9.315702948e-03,4.626182909e-04
"""

# the filtered spectrum is shorter than the raw one, so its column is padded
# with empty cells, exactly as the solver writes it
SPECTRA = """\
index,σ(M),σ(Q)
0,1.226891809e+03,1.730254916e+00
1,1.166450629e+03,1.725243988e+00
2,9.913498698e+02,1.681295363e+00
3,2.310287334e+01,1.440025480e+00
4,8.140514812e-02,9.625239651e-01
5,5.575078221e-08,2.890285644e-06
6,1.462111735e-08,
7,5.031038453e-12,
"""

KAPPA_SWEEP = """\
K,δ,κ(M),κ(M̂S⁻¹)
4,1.45,8.10571e+09,123.447
4,2.9,2.38599e+11,88.1126
4,5.8,9.92483e+12,401.924
8,1.45,3.99485e+12,651.906
8,2.9,2.43924e+14,598624
8,5.8,7.30771e+16,2.40663e+06
"""

AGGREGATE = """\
network,h,K,κ(M),κ(M̂),κ(M̂S⁻¹),κ(MᵀM),κ(A_AS⁻¹A),optimiser,σ,drop %,e_L1 median,e_L1 range,time mean,time stddev
elm,1,8,2.44e+14,3.41e+10,5.99e+05,,,rrqr-lsqr,1e-08,1.2,5.816e-04,6.749e-03,0.870,0.046
elm,1,16,4.81e+14,6.02e+10,7.11e+05,,,rrqr-lsqr,1e-08,2.0,2.417e-04,1.934e-03,1.642,0.083
elm,1,8,2.44e+14,,,,,lsqr,,,5.022e-01,2.113e-01,0.795,0.031
elm,1,16,4.81e+14,,,,,lsqr,,,4.113e-01,1.527e-01,1.513,0.052
"""

SOLUTION_1D = """\
x0,true,predicted
0.000000000e+00,1.000000000e+00,9.915375857e-01
2.500000000e-01,5.403023059e-01,5.401192828e-01
5.000000000e-01,-4.161468365e-01,-4.160034430e-01
7.500000000e-01,-9.899924966e-01,-9.897482465e-01
1.000000000e+00,-6.536436209e-01,-6.535087813e-01
"""


def _lattice_csv(counts):
    """A tiny meshgrid solution table with a known smooth field."""
    lines = [",".join([f"x{i}" for i in range(len(counts))]
                      + ["true", "predicted"])]

    def rec(prefix):
        depth = len(prefix)
        if depth == len(counts):
            value = sum((i + 1) * 0.25 * c for i, c in enumerate(prefix))
            lines.append(",".join([f"{c:.9e}" for c in prefix]
                                  + [f"{value:.9e}", f"{value + 1e-3:.9e}"]))
            return
        for i in range(counts[depth]):
            rec(prefix + [i / (counts[depth] - 1)])

    rec([])
    return "\n".join(lines) + "\n"


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture
def write_spec(tmp_path):
    def _write(name, **fields):
        path = tmp_path / name
        path.write_text(json.dumps(fields), encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture
def convergence_csv(write):
    return write("convergence-seed0.csv", CONVERGENCE)


@pytest.fixture
def spectra_csv(write):
    return write("spectra.csv", SPECTRA)


@pytest.fixture
def kappa_csv(write):
    return write("kappa-sweep.csv", KAPPA_SWEEP)


@pytest.fixture
def aggregate_csv(write):
    return write("aggregate.csv", AGGREGATE)


@pytest.fixture
def solution1d_csv(write):
    return write("solution.csv", SOLUTION_1D)


@pytest.fixture
def solution2d_csv(write):
    return write("solution2d.csv", _lattice_csv((4, 5)))


@pytest.fixture
def solution3d_csv(write):
    return write("solution3d.csv", _lattice_csv((3, 4, 3)))
