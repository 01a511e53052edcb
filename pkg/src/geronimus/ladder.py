"""Ladder operators, the holonomic second-order ODE, and the electrostatic model.

Everything is assembled from the structure relation sigma P_n' = a P_n + b P_{n-1},
the three-term recurrence, and the connection coefficients Lambda_n of the
mass-perturbed family.  Lowering and raising identities read

    [Q_n^{c,N}]'     = xi_1 Q_n^{c,N} + eta_1 Q_{n-1}^{c,N},
    [Q_{n-1}^{c,N}]' = xi_2 Q_n^{c,N} + eta_2 Q_{n-1}^{c,N},

and the ODE coefficients follow by eliminating Q_{n-1}^{c,N}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (
    DomainViolationError,
    NumericalFailureError,
    ParameterDomainError,
    SingularEvaluationError,
)
from .measures import Family, MeasureSpec, eval_monic_derivs, structure_relation
from .transform import GeronimusContext, connection_lambda, eval_QcN

__all__ = [
    "LadderCoefficientSet",
    "OdeCoefficientSet",
    "EquilibriumReport",
    "ladder_coefficients",
    "ladder_identity_residuals",
    "ode_coefficients",
    "external_potential",
    "equilibrium_residual",
    "charge_location",
    "weight_log_deriv",
    "identity_sample_points",
    "selected_variant",
]

log = logging.getLogger(__name__)

SINGULAR_TOL = 1e-8

# Lowering-coefficient variant per family, decided once by testing the
# derivative identity pointwise; both variants stay callable for audit.
_VARIANT_CACHE: dict[Family, str] = {}


class _Rational:
    """p(x)/q(x) with exact polynomial differentiation."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial):
        self.num = num
        self.den = den

    def value(self, x):
        return self.num(x) / self.den(x)

    def value_and_deriv(self, x):
        p, q = self.num(x), self.den(x)
        dp, dq = self.num.deriv()(x), self.den.deriv()(x)
        return p / q, (dp * q - p * dq) / q**2


def _poly_scale(p: Polynomial, x) -> np.ndarray:
    """Coefficient-magnitude bound for |p| near x; used for singularity tests."""
    x = np.abs(np.asarray(x, dtype=float))
    total = np.zeros_like(x)
    for k, coef in enumerate(p.coef):
        total = total + abs(coef) * (1.0 + x) ** k
    return total


@dataclass(frozen=True)
class _LadderPolys:
    """Polynomial-level coefficient bundle for one (n, N)."""

    sigma: Polynomial
    c1: Polynomial  # numerator of C_1 over sigma
    d1: Polynomial
    c2: Polynomial
    d2: Polynomial
    B2: Polynomial
    Delta: Polynomial
    A2: float
    lam_n: float
    lam_prev: float
    gamma_prev: float
    beta_prev: float
    variant: str
    a_n: Polynomial
    b_n: Polynomial
    b_low_prev: Polynomial  # b_{n-1}, variant-independent
    T: Polynomial  # a_{n-1} + b_{n-1}(x - beta_{n-1})/gamma_{n-1}

    def xi(self, k: int) -> _Rational:
        c, d = (self.c1, self.d1) if k == 1 else (self.c2, self.d2)
        num = c * self.B2 * self.gamma_prev + d * self.lam_prev
        return _Rational(num, self.sigma * self.Delta * self.gamma_prev)

    def eta(self, k: int) -> _Rational:
        c, d = (self.c1, self.d1) if k == 1 else (self.c2, self.d2)
        return _Rational(d - c * self.lam_n, self.sigma * self.Delta)

    def ode_rationals(self) -> tuple[_Rational, _Rational]:
        """The ODE coefficients R and S as fully reduced rational functions.

        Termwise assembly of the coefficient sums cancels catastrophically near
        the root of Delta (where R and S are regular) and near sigma roots
        (simple poles built from double-pole intermediates).  Eliminating
        the cancellations algebraically gives

            R = sigma'/sigma - (a_n + T)/sigma - E'/E,
            S = H/(sigma^2 g) + (c1 d1' - c1' d1)/(sigma E),

        with T = a_{n-1} + b_{n-1}(x - beta')/gamma', E the eta_1 numerator
        d1 - c1 Lambda_n, and H = a_n gamma' T + b_{n-1} b_n, which contains
        the factor sigma identically (so S has only a simple sigma pole).
        These forms are stable everywhere away from the genuine poles.
        The reduction uses c1 = (a_n - Lambda_n b_{n-1}/gamma')/sigma, i.e.
        the variant satisfying the derivative identity.
        """
        if self.variant != "bprev":
            raise NumericalFailureError(
                "reduced ODE assembly requires the derivative-consistent variant"
            )
        g = self.gamma_prev
        E = self.d1 - self.c1 * self.lam_n
        sigma = self.sigma
        a_n, T, b_n, b_prev = self.a_n, self.T, self.b_n, self.b_low_prev
        r_num = sigma.deriv() * E - (a_n + T) * E - sigma * E.deriv()
        H = a_n * g * T + b_prev * b_n
        h_red, rem = divmod(H, sigma)
        if float(np.max(np.abs(rem.coef))) > 1e-10 * max(float(np.max(np.abs(H.coef))), 1.0):
            raise NumericalFailureError("sigma does not divide the S numerator; identity violated")
        wronsk = self.c1 * self.d1.deriv() - self.c1.deriv() * self.d1
        s_num = h_red * E + g * wronsk
        den = sigma * g * E
        return _Rational(r_num * g, den), _Rational(s_num, den)


def _build_polys(
    ctx: GeronimusContext, n: int, N: float | None, variant: str
) -> _LadderPolys:
    if n < 2:
        raise ParameterDomainError(f"ladder operators require n >= 2, got {n}")
    N = ctx.mass(N)
    sr = structure_relation(ctx.spec)
    lam_n = connection_lambda(ctx, n, N)
    lam_prev = connection_lambda(ctx, n - 1, N)
    gamma_prev = float(ctx.recurrence.gamma[n - 1])
    beta_prev = float(ctx.recurrence.beta[n - 1])
    a_n, b_n = sr.a_of(n), sr.b_of(n)
    a_prev, b_prev = sr.a_of(n - 1), sr.b_of(n - 1)
    shifted = Polynomial([-beta_prev, 1.0])  # x - beta_{n-1}
    B2 = Polynomial([1.0]) + lam_prev * shifted / gamma_prev
    b_low = b_prev if variant == "bprev" else b_n
    T = a_prev + b_prev * shifted / gamma_prev
    c1 = a_n - lam_n * b_low / gamma_prev
    d1 = b_n + lam_n * T
    c2 = -(lam_prev * a_n + b_prev * B2) / gamma_prev
    d2 = lam_prev * (sr.sigma - b_n) / gamma_prev + T * B2
    delta = B2 + Polynomial([lam_n * lam_prev / gamma_prev])
    return _LadderPolys(
        sr.sigma, c1, d1, c2, d2, B2, delta,
        -lam_prev / gamma_prev, lam_n, lam_prev, gamma_prev, beta_prev, variant,
        a_n, b_n, b_prev, T,
    )


def _select_variant(ctx: GeronimusContext) -> str:
    """Pick the lowering-coefficient variant that satisfies
    [Q_n^{c,N}]' = C_1 P_n + D_1 P_{n-1} pointwise (cached per family)."""
    fam = ctx.spec.family
    if fam in _VARIANT_CACHE:
        return _VARIANT_CACHE[fam]
    a, b = ctx.spec.support
    probe = np.linspace(a + 0.3, min(b - 0.3 if math.isfinite(b) else a + 6.0, a + 6.0), 7)
    n, N = min(4, ctx.n_max), 0.25
    best, best_res = None, math.inf
    for variant in ("bprev", "bcur"):
        polys = _build_polys(ctx, n, N, variant)
        pn = eval_monic_derivs(ctx.recurrence, n, probe, order=0)[0]
        pm = eval_monic_derivs(ctx.recurrence, n - 1, probe, order=0)[0]
        dq = eval_QcN(ctx, n, probe, N)[1]
        rhs = polys.c1(probe) / polys.sigma(probe) * pn + polys.d1(probe) / polys.sigma(probe) * pm
        res = float(np.max(np.abs(dq - rhs) / (1.0 + np.abs(dq))))
        if res < best_res:
            best, best_res = variant, res
    _VARIANT_CACHE[fam] = best
    log.info("lowering-coefficient variant for %s: %s (residual %.2e)", fam.value, best, best_res)
    return best


@dataclass(frozen=True)
class LadderCoefficientSet:
    """Ladder data evaluated at x (scalar or array)."""

    n: int
    N: float
    x: np.ndarray
    C1: np.ndarray
    D1: np.ndarray
    A2: float
    B2: np.ndarray
    C2: np.ndarray
    D2: np.ndarray
    Delta: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    Delta_coeffs: tuple[float, float]
    variant: str


def _resolve_variant(ctx: GeronimusContext, variant: str) -> str:
    if variant == "auto":
        return _select_variant(ctx)
    if variant not in ("bprev", "bcur"):
        raise ParameterDomainError(f"unknown variant {variant!r}")
    return variant


def selected_variant(ctx: GeronimusContext) -> str:
    return _select_variant(ctx)


def ladder_coefficients(
    ctx: GeronimusContext, n: int, x, N: float | None = None, variant: str = "auto"
) -> LadderCoefficientSet:
    variant = _resolve_variant(ctx, variant)
    polys = _build_polys(ctx, n, N, variant)
    x = np.asarray(x, dtype=float)
    sig = polys.sigma(x)
    if np.any(np.abs(sig) < SINGULAR_TOL * _poly_scale(polys.sigma, x)):
        raise SingularEvaluationError("sigma vanishes at a requested point; sample elsewhere")
    dl = polys.Delta(x)
    if np.any(np.abs(dl) < SINGULAR_TOL * _poly_scale(polys.Delta, x)):
        raise SingularEvaluationError("Delta vanishes at a requested point; sample elsewhere")
    coeffs = polys.Delta.coef
    delta_coeffs = (float(coeffs[0]), float(coeffs[1]) if len(coeffs) > 1 else 0.0)
    return LadderCoefficientSet(
        n, ctx.mass(N), x,
        polys.c1(x) / sig, polys.d1(x) / sig,
        polys.A2, polys.B2(x),
        polys.c2(x) / sig, polys.d2(x) / sig,
        dl,
        polys.xi(1).value(x), polys.xi(2).value(x),
        polys.eta(1).value(x), polys.eta(2).value(x),
        delta_coeffs, variant,
    )


def ladder_identity_residuals(
    ctx: GeronimusContext, n: int, x, N: float | None = None, variant: str = "auto"
) -> dict[str, float]:
    """Max relative residuals of the lowering, raising, and inversion identities."""
    N = ctx.mass(N)
    ls = ladder_coefficients(ctx, n, x, N, variant)
    x = ls.x
    qn = eval_QcN(ctx, n, x, N)
    qm = eval_QcN(ctx, n - 1, x, N)
    pn = eval_monic_derivs(ctx.recurrence, n, x, order=0)[0]
    pm = eval_monic_derivs(ctx.recurrence, n - 1, x, order=0)[0]

    def rel(err, *terms):
        scale = np.maximum.reduce([np.abs(t) for t in terms])
        return float(np.max(np.abs(err) / np.maximum(scale, 1e-300)))

    lower = qn[1] - (ls.xi1 * qn[0] + ls.eta1 * qm[0])
    raise_ = qm[1] - (ls.xi2 * qn[0] + ls.eta2 * qm[0])
    rec_n = pn - (ls.B2 * qn[0] - connection_lambda(ctx, n, N) * qm[0]) / ls.Delta
    lam_prev = connection_lambda(ctx, n - 1, N)
    gamma_prev = float(ctx.recurrence.gamma[n - 1])
    rec_m = pm - (lam_prev / gamma_prev * qn[0] + qm[0]) / ls.Delta
    return {
        "lowering": rel(lower, qn[1], ls.xi1 * qn[0], ls.eta1 * qm[0]),
        "raising": rel(raise_, qm[1], ls.xi2 * qn[0], ls.eta2 * qm[0]),
        "reconstruct_n": rel(rec_n, pn, ls.B2 * qn[0] / ls.Delta),
        "reconstruct_prev": rel(rec_m, pm, qm[0] / ls.Delta),
    }


# ---------------------------------------------------------------------------
# Holonomic equation


@dataclass(frozen=True)
class OdeCoefficientSet:
    """Coefficients of Q'' + R Q' + S Q = 0 at x, with the electrostatic
    short-range polynomial u and its real root z."""

    n: int
    N: float
    x: np.ndarray
    R: np.ndarray
    S: np.ndarray
    u: np.ndarray
    z: float
    R_closed: np.ndarray | None
    S_closed: np.ndarray | None


def _u_poly(ctx: GeronimusContext, n: int, lam: float) -> Polynomial:
    """Linear polynomial whose root carries the unit charge of the model."""
    alpha = ctx.spec.alpha
    if ctx.spec.family is Family.LAGUERRE:
        return Polynomial([(n - lam) * (n + alpha - lam), lam])
    beta = ctx.spec.beta
    s = 2.0 * n + alpha + beta
    lead = (s - 1.0) * s * lam
    const = 4.0 * n * (n + alpha) * (n + beta) * (n + alpha + beta) + lead * (
        (alpha + beta) * (alpha - beta) + lead
    )
    return Polynomial([const, lead * s * s])


def ode_coefficients(
    ctx: GeronimusContext, n: int, x, N: float | None = None, variant: str = "auto"
) -> OdeCoefficientSet:
    variant = _resolve_variant(ctx, variant)
    N = ctx.mass(N)
    polys = _build_polys(ctx, n, N, variant)
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(polys.sigma(x)) < SINGULAR_TOL * _poly_scale(polys.sigma, x)):
        raise SingularEvaluationError("sigma vanishes at a requested point; sample elsewhere")
    eta1_num = polys.eta(1).num
    if np.any(np.abs(eta1_num(x)) < SINGULAR_TOL * _poly_scale(eta1_num, x)):
        raise SingularEvaluationError("eta_1 vanishes at a requested point; sample elsewhere")
    r_rat, s_rat = polys.ode_rationals()
    R = r_rat.value(x)
    S = s_rat.value(x)
    lam = polys.lam_n
    u = _u_poly(ctx, n, lam)
    z = float(-u.coef[0] / u.coef[1])
    R_closed = S_closed = None
    if ctx.spec.family is Family.LAGUERRE:
        alpha = ctx.spec.alpha
        uval = u(x)
        R_closed = -lam / uval + (alpha + 1.0) / x - 1.0
        S_closed = (lam * x + (n + alpha) * (n - lam)) / (x * uval) + (n - 1.0) / x
    return OdeCoefficientSet(n, N, x, R, S, u(x), z, R_closed, S_closed)


def charge_location(ctx: GeronimusContext, n: int, N: float | None = None) -> float:
    """Real root z of the short-range polynomial u; the z(N) table column."""
    lam = connection_lambda(ctx, n, ctx.mass(N))
    u = _u_poly(ctx, n, lam)
    return float(-u.coef[0] / u.coef[1])


def weight_log_deriv(spec: MeasureSpec, x):
    """(sigma w)'/(sigma w): logarithmic derivative of the raised weight."""
    x = np.asarray(x, dtype=float)
    if spec.family is Family.LAGUERRE:
        return (spec.alpha + 1.0) / x - 1.0
    return ((spec.beta - spec.alpha) - (spec.alpha + spec.beta + 2.0) * x) / (1.0 - x * x)


def external_potential(
    ctx: GeronimusContext, n: int, x, N: float | None = None
) -> tuple[np.ndarray, np.ndarray, float]:
    """External field of the zero model: V = (1/2) ln u - (1/2) ln(sigma w).

    The short-range part is a unit charge at the root z of u; the long-range
    part depends only on the raised weight exponents, never on the shift.
    Returns (V(x), u(x), z).
    """
    N = ctx.mass(N)
    x = np.asarray(x, dtype=float)
    lam = connection_lambda(ctx, n, N)
    u = _u_poly(ctx, n, lam)
    uval = u(x)
    if np.any(uval <= 0.0):
        raise DomainViolationError("u(x) <= 0: potential undefined at a requested point")
    alpha = ctx.spec.alpha
    if ctx.spec.family is Family.LAGUERRE:
        if np.any(x <= 0.0):
            raise DomainViolationError("Laguerre potential requires x > 0")
        log_weight = (alpha + 1.0) * np.log(x) - x
    else:
        if np.any(np.abs(x) >= 1.0):
            raise DomainViolationError("Jacobi potential requires |x| < 1")
        beta = ctx.spec.beta
        log_weight = (alpha + 1.0) * np.log(1.0 - x) + (beta + 1.0) * np.log(1.0 + x)
    V = 0.5 * np.log(uval) - 0.5 * log_weight
    return V, uval, float(-u.coef[0] / u.coef[1])


@dataclass(frozen=True)
class EquilibriumReport:
    """Electrostatic equilibrium residuals at the zeros of Q_n^{c,N}.

    residual is the explicit gradient (pairwise sum plus field terms) scaled
    by its largest term; residual_ode is the dual route through the ODE
    coefficient R at each zero.
    """

    n: int
    N: float
    zeros: np.ndarray
    residual: np.ndarray
    residual_ode: np.ndarray


def equilibrium_residual(
    ctx: GeronimusContext, n: int, N: float | None = None
) -> EquilibriumReport:
    from .zeros import zeros_geronimus  # local import to avoid a cycle

    N = ctx.mass(N)
    y = zeros_geronimus(ctx, n, N).zeros
    diffs = y[None, :] - y[:, None]
    if n > 1 and np.min(np.abs(diffs[~np.eye(n, dtype=bool)])) < 1e-12:
        raise NumericalFailureError("zero collision: equilibrium sum undefined")
    lam = connection_lambda(ctx, n, N)
    u = _u_poly(ctx, n, lam)
    with np.errstate(divide="ignore"):
        inv = np.where(np.eye(n, dtype=bool), 0.0, 1.0 / np.where(diffs == 0.0, np.inf, diffs))
    # inv[k, j] = 1/(y_j - y_k); row sums give the pairwise field at y_k
    pair = np.sum(inv, axis=1)
    field_u = 0.5 * u.deriv()(y) / u(y)
    field_w = -0.5 * weight_log_deriv(ctx.spec, y)
    total = pair + field_u + field_w
    scale = np.maximum.reduce([np.abs(pair), np.abs(field_u), np.abs(field_w)])
    scale = np.maximum(scale, 1e-300)
    q = eval_QcN_second(ctx, n, y, N)
    if n >= 2:
        R = ode_coefficients(ctx, n, y, N).R
    else:
        # degree 1 has no ladder pair; R follows from the field identity
        R = -u.deriv()(y) / u(y) + weight_log_deriv(ctx.spec, y)
    dual = -0.5 * (q[2] / q[1] + R)
    return EquilibriumReport(n, N, y, total / scale, dual / scale)


def eval_QcN_second(ctx: GeronimusContext, n: int, x, N: float | None = None) -> np.ndarray:
    """(Q, Q', Q'') of the mass-perturbed polynomial by exact recurrence."""
    return eval_QcN(ctx, n, x, N, order=2)


def identity_sample_points(
    ctx: GeronimusContext, n: int, N: float | None = None,
    count: int = 100, variant: str = "auto",
) -> np.ndarray:
    """Chebyshev-distributed sample points over [a, min(b, a+20)] that stay
    clear of the roots of sigma, Delta and eta_1 (relative margin 1e-8)."""
    variant = _resolve_variant(ctx, variant)
    a, b = ctx.spec.support
    hi = min(b, a + 20.0)
    j = np.arange(count)
    x = 0.5 * (a + hi) + 0.5 * (hi - a) * np.cos(np.pi * (2 * j + 1) / (2 * count))
    polys = _build_polys(ctx, n, N, variant)
    eta1 = polys.eta(1)
    roots: list[float] = []
    for poly in (polys.sigma, polys.Delta, eta1.num):
        for r in poly.roots():
            if abs(r.imag) < 1e-12:
                roots.append(float(r.real))
    keep = np.ones_like(x, dtype=bool)
    for r in roots:
        keep &= np.abs(x - r) > SINGULAR_TOL * (1.0 + abs(r))
    return np.sort(x[keep])
