"""Acceptance suite: the end-to-end exit criteria of the package.

Each test prints one PASS/FAIL line (run with -s to see them live).  The
parameter grid is the library's default verification grid: degrees 2..25,
Laguerre alpha in {-0.5, 0, 0.5, 2} with shifts {-5, -1, -0.1}, Jacobi
(alpha, beta) in {(0,0), (0.5,1), (2,-0.5)} with shifts {-3, -1.5, 1.5, 3},
masses {0, 1e-3, 0.05, 1, 100}.
"""

import time

import numpy as np
import pytest

from geronimus import verify
from geronimus.ladder import charge_location
from geronimus.measures import jacobi, laguerre
from geronimus.transform import make_context
from geronimus.zeros import (
    minimum_mass,
    minimum_mass_bisection,
    zeros_geronimus,
    zeros_kernel_poly,
)

CHECK_TOL = 5e-6

TABLE1_ROWS = [
    (0.0, [0.296771, 1.794881, 5.327153], -1.27309),
    (0.0125, [0.096936, 1.381317, 4.846199], -0.039345),
    (0.025, [-0.079531, 1.196907, 4.66079], -0.015274),
    (0.05, [-0.324373, 1.050055, 4.50679], -0.156362),
    (5.0, [-0.988481, 0.87094, 4.276644], -0.700057),
]
TABLE2_ROWS = [
    (0.0, [-0.784545, -0.302212, 0.304654, 0.806277], -1.61637),
    (0.0008, [-0.925906, -0.430453, 0.230271, 0.784909], -0.97778),
    (0.002, [-1.080633, -0.488136, 0.19919, 0.776221], -1.04893),
    (0.05, [-1.467364, -0.544057, 0.163585, 0.765818], -1.35837),
    (5.0, [-1.499661, -0.546604, 0.161684, 0.765238], -1.38587),
]


def report(name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {status}  {name}{': ' + detail if detail else ''}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def contexts():
    return verify.grid_contexts()


def _check_table(rows, spec, c, n):
    start = time.perf_counter()
    ctx = make_context(spec, c, 0.0, n + 2)
    worst = 0.0
    for N, zeros_ref, z_ref in rows:
        zs = zeros_geronimus(ctx, n, N).zeros
        worst = max(worst, float(np.max(np.abs(zs - zeros_ref))))
        worst = max(worst, abs(charge_location(ctx, n, N) - z_ref))
    return worst, time.perf_counter() - start


def test_table1_reproduction():
    worst, elapsed = _check_table(TABLE1_ROWS, laguerre(0.0), -1.0, 3)
    report(
        "table 1 zeros and charge column",
        worst <= CHECK_TOL and elapsed < 1.0,
        f"max abs dev {worst:.2e}, {elapsed * 1e3:.0f} ms",
    )


def test_table2_reproduction():
    worst, elapsed = _check_table(TABLE2_ROWS, jacobi(0.5, 1.0), -1.5, 4)
    report(
        "table 2 zeros and charge column",
        worst <= CHECK_TOL and elapsed < 1.0,
        f"max abs dev {worst:.2e}, {elapsed * 1e3:.0f} ms",
    )


def test_kernel_polynomial_limit_points():
    lag = zeros_kernel_poly(make_context(laguerre(0.0), -1.0, 0.0, 5), 2).zeros
    jac = zeros_kernel_poly(make_context(jacobi(0.5, 1.0), -1.5, 0.0, 6), 3).zeros
    d1 = np.max(np.abs(lag - [0.869089, 4.273768]))
    d2 = np.max(np.abs(jac - [-0.546629, 0.161665, 0.765232]))
    report(
        "kernel-polynomial limit points",
        max(d1, d2) <= CHECK_TOL,
        f"max abs dev {max(d1, d2):.2e}",
    )


def test_interlacing_grid(contexts):
    start = time.perf_counter()
    r = verify.run_interlacing(contexts)
    elapsed = time.perf_counter() - start
    report(
        "interlacing chains over the grid",
        not r["failures"] and elapsed < 30.0,
        f"{r['cases']} cases, {len(r['failures'])} violations, {elapsed:.1f} s",
    )


def test_monotonicity_and_limits(contexts):
    r = verify.run_monotonicity(contexts)
    report(
        "mass monotonicity, limit targets, speed constants",
        not r["failures"],
        f"{r['cases']} cases, {len(r['failures'])} failures",
    )


def test_minimum_mass(contexts):
    worst = 0.0
    cases = 0
    for ctx in contexts:
        endpoint = "a" if ctx.orientation > 0 else "b"
        for n in (2, 3, 8, 15):
            closed = minimum_mass(ctx, n, endpoint)
            empirical = minimum_mass_bisection(ctx, n, endpoint)
            worst = max(worst, abs(closed - empirical) / closed)
            cases += 1
    t1 = minimum_mass(make_context(laguerre(0.0), -1.0, 0.0, 5), 3, "a")
    t2 = minimum_mass(make_context(jacobi(0.5, 1.0), -1.5, 0.0, 6), 4, "a")
    straddle = 0.0125 < t1 < 0.025 and 0.0008 < t2 < 0.0020
    report(
        "minimum mass closed form vs bisection",
        worst < 1e-10 and straddle,
        f"{cases} cells, worst rel {worst:.2e}, table brackets {'ok' if straddle else 'BAD'}",
    )


def test_oracle_equivalence():
    r = verify.run_oracle()
    report(
        "Gram-Schmidt oracle vs connection construction",
        not r["failures"],
        f"{r['cases']} polynomial comparisons",
    )


def test_ladder_ode_electrostatics(contexts):
    r_ladder = verify.run_ladder(contexts)
    r_ode = verify.run_ode(contexts)
    r_eq = verify.run_equilibrium(contexts)
    bad = r_ladder["failures"] + r_ode["failures"] + r_eq["failures"]
    report(
        "ladder identities, holonomic equation, equilibrium",
        not bad,
        f"{r_ladder['cases'] + r_ode['cases'] + r_eq['cases']} cases, {len(bad)} failures",
    )


def test_positivity(contexts):
    r = verify.run_positivity(contexts)
    report(
        "connection constant and kernel margin positivity",
        not r["failures"],
        f"{r['cases']} cases",
    )
