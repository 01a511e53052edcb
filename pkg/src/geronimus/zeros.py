"""Zeros of the classical, divided-measure, kernel, and mass-perturbed families.

All four families are linear combinations P_n + lambda P_{n-1} for suitable
lambda, so their zeros are eigenvalues of the order-n symmetric Jacobi matrix
of the base measure with the last diagonal entry beta_{n-1} replaced by
beta_{n-1} - lambda.  Eigenvalues are Newton-polished on the combination
evaluated by the recurrence, with brackets from the eigenvalue midpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (
    NumericalFailureError,
    ParameterDomainError,
    SimplicityViolationError,
)
from .measures import RecurrenceTable, eval_monic_derivs
from .transform import (
    GeronimusContext,
    christoffel_kernel_poly,
    connection_B,
    connection_lambda,
    eval_Qc,
    eval_QcN,
)

__all__ = [
    "ZeroReport",
    "InterlacingReport",
    "LimitRates",
    "SweepTrajectory",
    "zeros_quasi_raw",
    "zeros_orthogonal",
    "zeros_divided",
    "zeros_kernel_poly",
    "zeros_geronimus",
    "interlacing_report",
    "kernel_sign_property",
    "limit_rates",
    "minimum_mass",
    "minimum_mass_bisection",
    "sweep",
]

RESIDUAL_BOUND = 1e-9
SIMPLICITY_TOL = 1e-13
CHAIN_SLACK = 1e-12
BISECT_BRACKET = (1e-8, 1e3)
BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class ZeroReport:
    """Sorted simple zeros with per-zero scaled residuals |p(z)|/(|p'(z)|(1+|z|))."""

    n: int
    zeros: np.ndarray
    family: str
    residuals: np.ndarray

    def __post_init__(self) -> None:
        self.zeros.setflags(write=False)
        self.residuals.setflags(write=False)


def zeros_quasi_raw(table: RecurrenceTable, n: int, lam: float) -> np.ndarray:
    """Eigenvalues giving the zeros of P_n + lam P_{n-1} (always real)."""
    if n < 1 or n > table.n_max:
        raise ParameterDomainError(f"degree {n} outside table range 1..{table.n_max}")
    d = table.beta[:n].copy()
    d[n - 1] -= lam
    e = np.sqrt(table.gamma[1:n])
    try:
        vals = eigh_tridiagonal(d, e, eigvals_only=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalFailureError(f"tridiagonal eigensolve failed: {exc}") from exc
    return np.sort(vals)


def _polish(
    f: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    z0: np.ndarray,
    max_iter: int = 60,
) -> np.ndarray:
    """Safeguarded vectorized Newton started from eigenvalues z0.

    Brackets are the midpoints between neighbouring eigenvalues (extended by
    one gap at the ends); steps leaving the bracket fall back to its midpoint.
    """
    z = z0.astype(float).copy()
    if len(z) == 1:
        lo = np.array([z[0] - 1.0])
        hi = np.array([z[0] + 1.0])
    else:
        mids = 0.5 * (z[1:] + z[:-1])
        gaps = np.diff(z)
        lo = np.concatenate([[z[0] - gaps[0]], mids])
        hi = np.concatenate([mids, [z[-1] + gaps[-1]]])
    for _ in range(max_iter):
        val, der = f(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(der != 0.0, val / der, 0.0)
        z_new = z - step
        out = (z_new < lo) | (z_new > hi)
        z_new = np.where(out, 0.5 * (lo + hi), z_new)
        if np.all(np.abs(z_new - z) <= 1e-15 * (1.0 + np.abs(z))):
            z = z_new
            break
        z = z_new
    return z


def _report(
    f: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    raw: np.ndarray,
    n: int,
    family: str,
) -> ZeroReport:
    zeros = _polish(f, raw)
    order = np.argsort(zeros)
    zeros = zeros[order]
    gaps = np.diff(zeros)
    if np.any(gaps <= SIMPLICITY_TOL * (1.0 + np.abs(zeros[:-1]))):
        raise SimplicityViolationError(
            f"{family}: zeros coincide within {SIMPLICITY_TOL} (n={n})"
        )
    val, der = f(zeros)
    residuals = np.abs(val) / (np.abs(der) * (1.0 + np.abs(zeros)))
    return ZeroReport(n, zeros, family, residuals)


def zeros_orthogonal(table: RecurrenceTable, n: int) -> ZeroReport:
    """Zeros of the classical monic P_n (Gauss nodes of the measure)."""

    def f(x):
        v = eval_monic_derivs(table, n, x, order=1)
        return v[0], v[1]

    raw = zeros_quasi_raw(table, n, 0.0)
    return _report(f, raw, n, "P")


def zeros_divided(ctx: GeronimusContext, n: int) -> ZeroReport:
    """Zeros of Q_n^c (the divided-measure family)."""

    def f(x):
        v = eval_Qc(ctx, n, x)
        return v[0], v[1]

    lam = -ctx.second_kind.ratio(n - 1)
    raw = zeros_quasi_raw(ctx.recurrence, n, lam)
    return _report(f, raw, n, "Qc")


def zeros_kernel_poly(ctx: GeronimusContext, n: int) -> ZeroReport:
    """Zeros of the monic kernel polynomial of degree n.

    Computed as the eigenvalues of the combination P_{n+1} - pi_n P_n, whose
    zero set is those of the kernel polynomial plus the shift c itself; the
    eigenvalue at c is discarded.
    """
    c = np.asarray(ctx.c)
    pn1 = eval_monic_derivs(ctx.recurrence, n + 1, c, order=0)[0]
    pn = eval_monic_derivs(ctx.recurrence, n, c, order=0)[0]
    pi_n = float(pn1 / pn)
    raw = zeros_quasi_raw(ctx.recurrence, n + 1, -pi_n)
    keep = np.argsort(np.abs(raw - ctx.c))
    if abs(raw[keep[0]] - ctx.c) > 1e-6 * (1.0 + abs(ctx.c)):
        raise NumericalFailureError(
            "factored zero of the kernel-polynomial combination is not at the shift"
        )
    raw = np.sort(raw[keep[1:]])
    if n == 0:
        return ZeroReport(0, np.empty(0), "Pc1", np.empty(0))

    def f(x):
        v = christoffel_kernel_poly(ctx, n, x)
        return v[0], v[1]

    return _report(f, raw, n, "Pc1")


def zeros_geronimus(ctx: GeronimusContext, n: int, N: float | None = None) -> ZeroReport:
    """Zeros of the mass-perturbed Q_n^{c,N}; real and simple for all N >= 0."""
    if n < 1:
        raise ParameterDomainError(f"zeros require n >= 1, got {n}")
    N = ctx.mass(N)
    lam = connection_lambda(ctx, n, N)

    def f(x):
        v = eval_QcN(ctx, n, x, N)
        return v[0], v[1]

    raw = zeros_quasi_raw(ctx.recurrence, n, lam)
    return _report(f, raw, n, "QcN")


# ---------------------------------------------------------------------------
# Interlacing chains


@dataclass(frozen=True)
class InterlacingReport:
    """Verdicts for the interlacing chain at one (n, N) cell.

    checks holds (left_label, left, right_label, right, ok) per strict
    inequality.  Exact chain gaps shrink like (speed constant)/N, falling
    below any fixed certification margin at large mass, so an entry is a
    violation only when it crosses by more than
    CHAIN_SLACK * (1 + max(|left|, |right|)), i.e. beyond rounding noise.
    """

    n: int
    N: float
    side: str  # "left" when c < a, "right" when c > b
    checks: tuple
    n_outside: int
    outside_ok: bool
    ok: bool


def _strict(lhs_label, lhs, rhs_label, rhs):
    ok = (rhs - lhs) > -CHAIN_SLACK * (1.0 + max(abs(lhs), abs(rhs)))
    return (lhs_label, float(lhs), rhs_label, float(rhs), bool(ok))


def interlacing_report(
    ctx: GeronimusContext,
    n: int,
    N: float | None = None,
    yq: np.ndarray | None = None,
    xk: np.ndarray | None = None,
) -> InterlacingReport:
    """Check the full strict chain linking c, Q_n^{c,N}, Q_n^c and kernel zeros.

    At N = 0 the perturbed family coincides with Q_n^c, so only the
    degenerate chain (position of c plus kernel interlacing) is checked.
    yq and xk may pass precomputed zeros of Q_n^c and of the degree-(n-1)
    kernel polynomial (both mass-independent) to avoid recomputation in
    sweeps over N.
    """
    N = ctx.mass(N)
    c = ctx.c
    a, b = ctx.spec.support
    side = "left" if c < a else "right"
    if yq is None:
        yq = zeros_divided(ctx, n).zeros
    if xk is None:
        xk = zeros_kernel_poly(ctx, n - 1).zeros if n >= 2 else np.empty(0)
    checks = []
    if N == 0.0:
        if side == "left":
            checks.append(_strict("c", c, "yQc[1]", yq[0]))
        else:
            checks.append(_strict("yQc[n]", yq[-1], "c", c))
        for k in range(n - 1):
            checks.append(_strict(f"yQc[{k+1}]", yq[k], f"xk[{k+1}]", xk[k]))
            checks.append(_strict(f"xk[{k+1}]", xk[k], f"yQc[{k+2}]", yq[k + 1]))
        yqn = yq
    else:
        yqn = zeros_geronimus(ctx, n, N).zeros
        if side == "left":
            checks.append(_strict("c", c, "yQcN[1]", yqn[0]))
            checks.append(_strict("yQcN[1]", yqn[0], "yQc[1]", yq[0]))
            for k in range(n - 1):
                checks.append(_strict(f"yQc[{k+1}]", yq[k], f"xk[{k+1}]", xk[k]))
                checks.append(_strict(f"xk[{k+1}]", xk[k], f"yQcN[{k+2}]", yqn[k + 1]))
                checks.append(_strict(f"yQcN[{k+2}]", yqn[k + 1], f"yQc[{k+2}]", yq[k + 1]))
        else:
            for k in range(n - 1):
                checks.append(_strict(f"yQc[{k+1}]", yq[k], f"yQcN[{k+1}]", yqn[k]))
                checks.append(_strict(f"yQcN[{k+1}]", yqn[k], f"xk[{k+1}]", xk[k]))
            checks.append(_strict(f"yQc[{n}]", yq[-1], f"yQcN[{n}]", yqn[-1]))
            checks.append(_strict(f"yQcN[{n}]", yqn[-1], "c", c))
    inside = (yqn >= a) & (yqn <= b)
    n_outside = int(np.sum(~inside))
    if side == "left":
        outside_ok = n_outside == 0 or (n_outside == 1 and not inside[0])
    else:
        outside_ok = n_outside == 0 or (n_outside == 1 and not inside[-1])
    ok = all(ch[4] for ch in checks) and outside_ok
    return InterlacingReport(n, N, side, tuple(checks), n_outside, outside_ok, ok)


def kernel_sign_property(ctx: GeronimusContext, n: int) -> bool:
    """sign(P_n^[1]) equals sign(Q_n^c) at every zero of Q_{n+1}^c."""
    y = zeros_divided(ctx, n + 1).zeros
    k = christoffel_kernel_poly(ctx, n, y, order=0)[0]
    q = eval_Qc(ctx, n, y, order=0)[0]
    return bool(np.all(np.sign(k) == np.sign(q)))


# ---------------------------------------------------------------------------
# Large-mass limits, speed of convergence, minimum mass


@dataclass(frozen=True)
class LimitRates:
    """Per-zero large-N limit points and speed constants.

    rate_signed[k] = lim N (y_k - limit_k).  printed_constant[k] carries the
    orientation the theorems use: y - limit left of the support, limit - y
    right of it; empirically both match without sign normalization.
    """

    n: int
    side: str
    limits: np.ndarray
    rate_signed: np.ndarray
    printed_constant: np.ndarray


def limit_rates(ctx: GeronimusContext, n: int) -> LimitRates:
    if n < 1:
        raise ParameterDomainError(f"limits require n >= 1, got {n}")
    c = ctx.c
    a, _ = ctx.spec.support
    side = "left" if c < a else "right"
    B = connection_B(ctx, n)
    xk = zeros_kernel_poly(ctx, n - 1).zeros if n >= 2 else np.empty(0)
    if side == "left":
        limits = np.concatenate([[c], xk])
    else:
        limits = np.concatenate([xk, [c]])
    q = eval_Qc(ctx, n, limits, order=0)[0]
    # derivative of g = (x-c) P_{n-1}^[1] at each limit point
    kp = christoffel_kernel_poly(ctx, n - 1, limits, order=1)
    gprime = kp[0] + (limits - c) * kp[1]
    rate = -q / (B * gprime)
    printed = rate.copy() if side == "left" else -rate
    return LimitRates(n, side, limits, rate, printed)


def minimum_mass(ctx: GeronimusContext, n: int, endpoint: str = "a") -> float:
    """Mass at which the extreme zero crosses the support endpoint.

    N0 = -Q_n^c(e) / (K_{n-1}^c(c,c) (e - c) P_{n-1}^[1](e)) with e the
    endpoint adjacent to the shift.
    """
    a, b = ctx.spec.support
    if endpoint == "a":
        if not ctx.c < a:
            raise ParameterDomainError("endpoint 'a' requires the shift left of the support")
        e = a
    elif endpoint == "b":
        if not (math.isfinite(b) and ctx.c > b):
            raise ParameterDomainError("endpoint 'b' requires the shift right of a bounded support")
        e = b
    else:
        raise ParameterDomainError(f"endpoint must be 'a' or 'b', got {endpoint!r}")
    q = float(eval_Qc(ctx, n, np.asarray(e), order=0)[0])
    kv = float(christoffel_kernel_poly(ctx, n - 1, np.asarray(e), order=0)[0])
    B = connection_B(ctx, n)
    return -q / (B * (e - ctx.c) * kv)


def minimum_mass_bisection(ctx: GeronimusContext, n: int, endpoint: str = "a") -> float:
    """Empirical minimum mass: bisection on N -> Q_n^{c,N}(endpoint).

    The default bracket covers the usual range; when the crossing lies
    outside it (far shifts push the minimum mass below 1e-8), the bracket is
    recentred around the closed-form prediction, which the bisection then
    verifies independently.
    """
    a, b = ctx.spec.support
    e = a if endpoint == "a" else b
    if endpoint == "b" and not math.isfinite(b):
        raise ParameterDomainError("endpoint 'b' requires a bounded support")
    ex = np.asarray(e)

    def val(N: float) -> float:
        return float(eval_QcN(ctx, n, ex, N, order=0)[0])

    lo, hi = BISECT_BRACKET
    flo, fhi = val(lo), val(hi)
    if flo * fhi > 0.0:
        guess = minimum_mass(ctx, n, endpoint)
        lo, hi = guess / 100.0, guess * 100.0
        flo, fhi = val(lo), val(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NumericalFailureError(
            f"no sign change of Q_n(endpoint) on the mass bracket ({lo:g}, {hi:g})"
        )
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        fm = val(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if hi - lo <= 1e-16 * lo:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Mass sweeps


@dataclass(frozen=True)
class SweepTrajectory:
    """Zero trajectories over an ascending mass list.

    zeros has shape (len(N_values), n); products holds N * (zero - limit).
    direction is the mandated monotonicity ("decreasing" left of the support,
    "increasing" right of it); verdict is "pass", "fail", or "vacuous" for
    fewer than two masses.
    """

    n: int
    N_values: np.ndarray
    zeros: np.ndarray
    limits: np.ndarray
    rate_signed: np.ndarray
    products: np.ndarray
    direction: str
    column_ok: np.ndarray
    verdict: str


def sweep(ctx: GeronimusContext, n: int, N_values) -> SweepTrajectory:
    N_values = np.asarray(list(N_values), dtype=float)
    if N_values.size == 0:
        raise ParameterDomainError("mass list must not be empty")
    if np.any(N_values < 0):
        raise ParameterDomainError("masses must be nonnegative")
    if np.any(np.diff(N_values) <= 0):
        raise ParameterDomainError("mass list must be strictly ascending")
    rows = np.vstack([zeros_geronimus(ctx, n, N).zeros for N in N_values])
    lr = limit_rates(ctx, n)
    products = N_values[:, None] * (rows - lr.limits[None, :])
    direction = "decreasing" if lr.side == "left" else "increasing"
    if len(N_values) < 2:
        column_ok = np.ones(n, dtype=bool)
        verdict = "vacuous"
    else:
        # Strict in exact arithmetic; consecutive rows can agree to the last
        # bit once the mass has saturated, so only crossings beyond rounding
        # noise count as violations.
        slack = CHAIN_SLACK * (1.0 + np.abs(rows[:-1]))
        diffs = np.diff(rows, axis=0)
        if direction == "decreasing":
            column_ok = np.all(diffs < slack, axis=0)
        else:
            column_ok = np.all(diffs > -slack, axis=0)
        verdict = "pass" if bool(np.all(column_ok)) else "fail"
    return SweepTrajectory(
        n, N_values, rows, lr.limits, lr.rate_signed, products,
        direction, column_ok, verdict,
    )
