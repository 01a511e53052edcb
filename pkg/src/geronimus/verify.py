"""Property suites over the standard parameter grid.

Each runner returns {"suite", "cases", "failures": [...]}; a failure entry
names the cell and what was violated.  The CLI `verify` command and the
acceptance tests drive these directly.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .ladder import (
    eval_QcN_second,
    equilibrium_residual,
    identity_sample_points,
    ladder_coefficients,
    ladder_identity_residuals,
    ode_coefficients,
)
from .measures import MeasureSpec, jacobi, laguerre, monic_coefficients
from .transform import (
    GeronimusContext,
    connection_B,
    connection_lambda,
    gram_schmidt_oracle,
    kernel_connection_coeffs,
    make_context,
)
from .zeros import (
    interlacing_report,
    limit_rates,
    zeros_divided,
    zeros_geronimus,
    zeros_kernel_poly,
)

LAGUERRE_ALPHAS = (-0.5, 0.0, 0.5, 2.0)
LAGUERRE_SHIFTS = (-5.0, -1.0, -0.1)
JACOBI_PARAMS = ((0.0, 0.0), (0.5, 1.0), (2.0, -0.5))
JACOBI_SHIFTS = (-3.0, -1.5, 1.5, 3.0)
GRID_MASSES = (0.0, 1e-3, 0.05, 1.0, 100.0)

INTERLACING_DEGREES = range(2, 26)
LADDER_DEGREES = range(2, 16)

ORACLE_CELLS = (
    (laguerre(0.0), -1.0, 0.05),
    (laguerre(0.5), -2.5, 1.0),
    (jacobi(0.5, 1.0), -1.5, 0.05),
    (jacobi(0.0, 0.0), 1.5, 0.3),
)


def grid_cells() -> list[tuple[MeasureSpec, float]]:
    cells: list[tuple[MeasureSpec, float]] = []
    for alpha in LAGUERRE_ALPHAS:
        for c in LAGUERRE_SHIFTS:
            cells.append((laguerre(alpha), c))
    for alpha, beta in JACOBI_PARAMS:
        for c in JACOBI_SHIFTS:
            cells.append((jacobi(alpha, beta), c))
    return cells


def grid_contexts(n_max: int = 27) -> list[GeronimusContext]:
    return [make_context(spec, c, 0.0, n_max) for spec, c in grid_cells()]


def _cell_id(ctx: GeronimusContext, **extra) -> dict:
    d = {"measure": ctx.spec.describe(), "c": ctx.c}
    d.update(extra)
    return d


def run_interlacing(
    contexts: Iterable[GeronimusContext] | None = None,
    degrees: Iterable[int] = INTERLACING_DEGREES,
    masses: Iterable[float] = GRID_MASSES,
) -> dict:
    contexts = grid_contexts() if contexts is None else contexts
    degrees = list(degrees)
    masses = list(masses)
    cases = 0
    failures = []
    for ctx in contexts:
        for n in degrees:
            yq = zeros_divided(ctx, n).zeros
            xk = zeros_kernel_poly(ctx, n - 1).zeros if n >= 2 else np.empty(0)
            for N in masses:
                cases += 1
                rep = interlacing_report(ctx, n, N, yq=yq, xk=xk)
                if not rep.ok:
                    broken = [ch for ch in rep.checks if not ch[4]]
                    failures.append(
                        _cell_id(ctx, n=n, N=N, violations=broken, outside=rep.n_outside)
                    )
    return {"suite": "interlacing", "cases": cases, "failures": failures}


def run_monotonicity(
    contexts: Iterable[GeronimusContext] | None = None,
    degrees: Iterable[int] = INTERLACING_DEGREES,
    masses: Iterable[float] = GRID_MASSES,
    big_mass: float = 1e6,
    limit_tol: float = 1e-4,
    rate_rel_tol: float = 5e-3,
) -> dict:
    """Strict monotonicity in the mass plus limit targets and speed constants."""
    contexts = grid_contexts() if contexts is None else contexts
    degrees = list(degrees)
    masses = list(masses)
    cases = 0
    failures = []
    for ctx in contexts:
        sign = -1.0 if ctx.orientation > 0 else 1.0  # decreasing left, increasing right
        for n in degrees:
            cases += 1
            rows = np.vstack([zeros_geronimus(ctx, n, N).zeros for N in masses])
            diffs = sign * np.diff(rows, axis=0)
            slack = 1e-12 * (1.0 + np.abs(rows[:-1]))
            problems = []
            if not np.all(diffs > -slack):
                problems.append("monotonicity")
            lr = limit_rates(ctx, n)
            z_big = zeros_geronimus(ctx, n, big_mass).zeros
            gap = np.abs(z_big - lr.limits)
            if not np.all(gap <= limit_tol * (1.0 + np.abs(lr.limits))):
                problems.append("limit")
            # The product N(y - limit) is ~ rate/(N B) away from its limit but
            # carries absolute rounding noise ~ eps N B in zero units, so it is
            # measured at the largest mass keeping N B ~ 1e8; binary64 cannot
            # express the gap at N = 1e6 when B is huge (far shifts, large n).
            B = connection_B(ctx, n)
            n_rate = min(big_mass, 1e8 / B)
            z_rate = z_big if n_rate == big_mass else zeros_geronimus(ctx, n, n_rate).zeros
            emp = n_rate * (z_rate - lr.limits)
            rel = np.abs(emp - lr.rate_signed) / np.abs(lr.rate_signed)
            if not np.all(rel <= rate_rel_tol):
                problems.append(f"rate (max rel {np.max(rel):.2e})")
            if problems:
                failures.append(_cell_id(ctx, n=n, problems=problems))
    return {"suite": "monotonicity", "cases": cases, "failures": failures}


def run_positivity(
    contexts: Iterable[GeronimusContext] | None = None,
    degrees: Iterable[int] = INTERLACING_DEGREES,
) -> dict:
    """B_n > 0 and e_n - gamma_{n+2}^c > 0 across the grid."""
    contexts = grid_contexts() if contexts is None else contexts
    degrees = list(degrees)
    cases = 0
    failures = []
    for ctx in contexts:
        for n in degrees:
            cases += 1
            problems = []
            if not connection_B(ctx, n) > 0.0:
                problems.append("B")
            _, _, margin = kernel_connection_coeffs(ctx, n)
            if not margin > 0.0:
                problems.append("e - gamma")
            if problems:
                failures.append(_cell_id(ctx, n=n, problems=problems))
    return {"suite": "positivity", "cases": cases, "failures": failures}


def run_ladder(
    contexts: Iterable[GeronimusContext] | None = None,
    degrees: Iterable[int] = LADDER_DEGREES,
    masses: Iterable[float] = GRID_MASSES,
    tol: float = 1e-9,
    delta_tol: float = 1e-12,
) -> dict:
    contexts = grid_contexts() if contexts is None else contexts
    cases = 0
    failures = []
    for ctx in contexts:
        for n in degrees:
            for N in masses:
                cases += 1
                x = identity_sample_points(ctx, n, N)
                res = ladder_identity_residuals(ctx, n, x, N)
                problems = [k for k, v in res.items() if v > tol]
                got = ladder_coefficients(ctx, n, x[:1], N).Delta_coeffs
                lam_n = connection_lambda(ctx, n, N)
                lam_prev = connection_lambda(ctx, n - 1, N)
                gamma_prev = float(ctx.recurrence.gamma[n - 1])
                beta_prev = float(ctx.recurrence.beta[n - 1])
                want = (
                    lam_prev / gamma_prev * (-beta_prev + lam_n + gamma_prev / lam_prev),
                    lam_prev / gamma_prev,
                )
                if any(
                    abs(g - w) > delta_tol * max(1.0, abs(w)) for g, w in zip(got, want)
                ):
                    problems.append("Delta form")
                if problems:
                    failures.append(_cell_id(ctx, n=n, N=N, problems=problems))
    return {"suite": "ladder", "cases": cases, "failures": failures}


def run_ode(
    contexts: Iterable[GeronimusContext] | None = None,
    degrees: Iterable[int] = LADDER_DEGREES,
    masses: Iterable[float] = GRID_MASSES,
    tol: float = 1e-8,
    closed_tol: float = 1e-9,
) -> dict:
    contexts = grid_contexts() if contexts is None else contexts
    cases = 0
    failures = []
    for ctx in contexts:
        laguerre_family = ctx.spec.family.value == "laguerre"
        for n in degrees:
            for N in masses:
                cases += 1
                x = identity_sample_points(ctx, n, N)
                ode = ode_coefficients(ctx, n, x, N)
                q = eval_QcN_second(ctx, n, x, N)
                resid = q[2] + ode.R * q[1] + ode.S * q[0]
                scale = np.maximum.reduce(
                    [np.abs(q[2]), np.abs(ode.R * q[1]), np.abs(ode.S * q[0])]
                )
                problems = []
                if np.max(np.abs(resid) / np.maximum(scale, 1e-300)) > tol:
                    problems.append("holonomic residual")
                if laguerre_family:
                    dr = np.max(np.abs(ode.R - ode.R_closed) / (1.0 + np.abs(ode.R_closed)))
                    ds = np.max(np.abs(ode.S - ode.S_closed) / (1.0 + np.abs(ode.S_closed)))
                    if dr > closed_tol or ds > closed_tol:
                        problems.append("closed form")
                if problems:
                    failures.append(_cell_id(ctx, n=n, N=N, problems=problems))
    return {"suite": "ode", "cases": cases, "failures": failures}


def run_equilibrium(
    contexts: Iterable[GeronimusContext] | None = None,
    degrees: Iterable[int] = LADDER_DEGREES,
    masses: Iterable[float] = GRID_MASSES,
    tol: float = 1e-6,
) -> dict:
    contexts = grid_contexts() if contexts is None else contexts
    cases = 0
    failures = []
    for ctx in contexts:
        for n in degrees:
            for N in masses:
                cases += 1
                eq = equilibrium_residual(ctx, n, N)
                worst = max(np.max(np.abs(eq.residual)), np.max(np.abs(eq.residual_ode)))
                if worst > tol:
                    failures.append(_cell_id(ctx, n=n, N=N, residual=float(worst)))
    return {"suite": "equilibrium", "cases": cases, "failures": failures}


def run_oracle(cells=ORACLE_CELLS, n_top: int = 8, tol: float = 1e-8) -> dict:
    """Gram-Schmidt-by-quadrature basis vs the connection construction."""
    cases = 0
    failures = []
    for spec, c, N in cells:
        ctx = make_context(spec, c, N, n_top + 2)
        oracle = gram_schmidt_oracle(ctx, n_top, N)
        for n in range(n_top + 1):
            cases += 1
            direct = monic_coefficients(ctx.recurrence, n).astype(float)
            if n >= 1:
                lam = connection_lambda(ctx, n, N)
                prev = monic_coefficients(ctx.recurrence, n - 1)
                direct[: n] += lam * prev
            scale = np.max(np.abs(direct))
            err = float(np.max(np.abs(oracle[n] - direct)) / scale)
            if err > tol:
                failures.append(
                    {"measure": spec.describe(), "c": c, "N": N, "n": n, "coef_rel_err": err}
                )
    return {"suite": "oracle", "cases": cases, "failures": failures}


SUITES = {
    "interlacing": run_interlacing,
    "monotonicity": run_monotonicity,
    "positivity": run_positivity,
    "ladder": run_ladder,
    "ode": run_ode,
    "equilibrium": run_equilibrium,
    "oracle": run_oracle,
}


def run_suite(name: str) -> dict:
    if name == "all":
        reports = [fn() for fn in SUITES.values()]
        return {
            "suite": "all",
            "cases": sum(r["cases"] for r in reports),
            "failures": [f for r in reports for f in r["failures"]],
            "sub": reports,
        }
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
