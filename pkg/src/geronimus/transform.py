"""Rational-shift and point-mass transforms of a classical measure.

For a shift c outside the support, the divided measure is taken in its
positive orientation dnu = dmu/|x - c| (equal to dmu/(x-c) left of the
support and to its negative right of it), and the mass-N family is monic
orthogonal with respect to dnu + N delta_c.  This orientation keeps every
norm, confluent kernel value and connection constant B_n positive on both
sides of the support, which is what the monotonicity and interlacing
statements require; quantities defined through ratios are orientation-free.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    IllConditionedError,
    ParameterDomainError,
    SingularEvaluationError,
)
from .measures import (
    CONFLUENT_SWITCH,
    MeasureSpec,
    RecurrenceTable,
    classical_recurrence,
    eval_monic_derivs,
    monic_coefficients,
    quadrature_rule,
)
from .secondkind import SecondKindTable, check_shift, second_kind

__all__ = [
    "GeronimusContext",
    "ConnectionData",
    "make_context",
    "geronimus_recurrence",
    "eval_Qc",
    "eval_Qc_recurrence",
    "christoffel_kernel_poly",
    "kernel_c",
    "kernel_c_sum",
    "kernel_c_confluent",
    "connection_data",
    "connection_lambda",
    "connection_B",
    "connection_B_alt",
    "eval_QcN",
    "eval_QcN_kernel_form",
    "gram_schmidt_oracle",
    "inner_product_nu_N",
    "kernel_connection_coeffs",
]

GRAM_CONDITION_LIMIT = 1e12
ORACLE_QUAD_NODES = 200


@dataclass(frozen=True)
class GeronimusContext:
    """Immutable bundle of tables for one (measure, shift, mass) triple.

    Tables extend two degrees past n_max so that every operation advertised
    for degrees <= n_max has the neighbours it needs.
    """

    spec: MeasureSpec
    c: float
    N: float
    n_max: int
    orientation: float  # +1 if c is left of the support, -1 if right
    recurrence: RecurrenceTable
    second_kind: SecondKindTable
    beta_c: np.ndarray
    gamma_c: np.ndarray  # gamma_c[0] holds the total mass of dnu
    norm_sq_c: np.ndarray  # ||Q_n||^2 under the positively oriented dnu

    def __post_init__(self) -> None:
        for arr in (self.beta_c, self.gamma_c, self.norm_sq_c):
            arr.setflags(write=False)

    def with_mass(self, N: float) -> "GeronimusContext":
        if N < 0:
            raise ParameterDomainError(f"mass N must be nonnegative, got {N}")
        return replace(self, N=float(N))

    def mass(self, N: float | None) -> float:
        return self.N if N is None else float(N)


def geronimus_recurrence(
    recurrence: RecurrenceTable, sk: SecondKindTable, orientation: float
) -> tuple[np.ndarray, np.ndarray]:
    """Recurrence coefficients of the divided measure.

    beta_c[n] = beta_n + r_n - r_{n-1} (beta_c[0] = beta_0 + r_0) and
    gamma_c[n] = gamma_{n-1} r_{n-1}/r_{n-2} for n >= 2, with
    gamma_c[1] = -mu0 r_0 / F_0 and gamma_c[0] = total mass of dnu > 0.
    """
    n_top = sk.n_max
    beta_c = np.empty(n_top + 1)
    gamma_c = np.empty(n_top + 1)
    beta_c[0] = recurrence.beta[0] + sk.ratio(0)
    gamma_c[0] = orientation * sk.F(0)
    for n in range(1, n_top + 1):
        beta_c[n] = recurrence.beta[n] + sk.ratio(n) - sk.ratio(n - 1)
    if n_top >= 1:
        gamma_c[1] = -recurrence.mu0 * sk.ratio(0) / sk.F(0)
    for n in range(2, n_top + 1):
        gamma_c[n] = recurrence.gamma[n - 1] * sk.ratio(n - 1) / sk.ratio(n - 2)
    return beta_c, gamma_c


def make_context(
    spec: MeasureSpec, c: float, N: float = 0.0, n_max: int = 32
) -> GeronimusContext:
    if N < 0:
        raise ParameterDomainError(f"mass N must be nonnegative, got {N}")
    check_shift(spec, c)
    a, _ = spec.support
    orientation = 1.0 if c < a else -1.0
    pad = n_max + 2
    recurrence = classical_recurrence(spec, pad + 1)
    sk = second_kind(spec, c, pad)
    beta_c, gamma_c = geronimus_recurrence(recurrence, sk, orientation)
    norm_sq_c = np.empty(pad + 1)
    norm_sq_c[0] = gamma_c[0]
    norm_sq_c[1:] = gamma_c[0] * np.cumprod(gamma_c[1 : pad + 1])
    return GeronimusContext(
        spec, float(c), float(N), n_max, orientation,
        recurrence, sk, beta_c, gamma_c, norm_sq_c,
    )


# ---------------------------------------------------------------------------
# The divided-measure family Q_n^c and its kernels


def eval_Qc(ctx: GeronimusContext, n: int, x, order: int = 1) -> np.ndarray:
    """Q_n^c = P_n - r_{n-1} P_{n-1}, with derivatives up to `order`."""
    if n == 0:
        x = np.asarray(x, dtype=float)
        out = np.zeros((order + 1,) + x.shape)
        out[0] = 1.0
        return out
    pn = eval_monic_derivs(ctx.recurrence, n, x, order)
    pm = eval_monic_derivs(ctx.recurrence, n - 1, x, order)
    return pn - ctx.second_kind.ratio(n - 1) * pm


def eval_Qc_recurrence(ctx: GeronimusContext, n: int, x) -> np.ndarray:
    """Q_n^c by the modified three-term recurrence; dual path to eval_Qc."""
    x = np.asarray(x, dtype=float)
    prev = np.zeros((2,) + x.shape)
    cur = np.zeros((2,) + x.shape)
    cur[0] = 1.0
    for k in range(n):
        gamma = ctx.gamma_c[k] if k >= 1 else 0.0
        nxt = np.empty_like(cur)
        nxt[0] = (x - ctx.beta_c[k]) * cur[0] - gamma * prev[0]
        nxt[1] = (x - ctx.beta_c[k]) * cur[1] + cur[0] - gamma * prev[1]
        prev, cur = cur, nxt
    return cur


def christoffel_kernel_poly(ctx: GeronimusContext, n: int, x, order: int = 1) -> np.ndarray:
    """Monic kernel polynomial of the polynomial-modified measure (x-c)dmu.

    P_n^[1](x) = (P_{n+1}(x) - pi_n P_n(x)) / (x - c) with
    pi_n = P_{n+1}(c)/P_n(c); the singularity at x = c is removable and is
    evaluated through a Taylor form of the numerator.
    """
    if order > 1:
        raise ParameterDomainError("kernel polynomial derivatives beyond order 1 not supported")
    x = np.asarray(x, dtype=float)
    c = ctx.c
    num = eval_monic_derivs(ctx.recurrence, n + 1, x, order + 3)
    num_c = eval_monic_derivs(ctx.recurrence, n + 1, np.asarray(c), order + 3)
    pn = eval_monic_derivs(ctx.recurrence, n, x, order + 3)
    pn_c = eval_monic_derivs(ctx.recurrence, n, np.asarray(c), order + 3)
    pi_n = num_c[0] / pn_c[0]
    w = num - pi_n * pn          # numerator; w(c) = 0
    w_c = num_c - pi_n * pn_c
    t = x - c
    close = np.abs(t) < CONFLUENT_SWITCH * (1.0 + np.abs(x))
    # The quotient-rule derivative loses accuracy like eps/t^2 approaching
    # the removable point, so its Taylor branch takes over much earlier than
    # the value branch; worst seam error is ~1e-8 relative.
    close_der = np.abs(t) < 4e-4 * (1.0 + np.abs(x))
    out = np.empty((order + 1,) + x.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = w[0] / t
        out[0] = np.where(close, w_c[1] + t * (0.5 * w_c[2] + w_c[3] * t / 6.0), val)
        if order >= 1:
            der = (w[1] * t - w[0]) / t**2
            taylor = 0.5 * w_c[2] + t * (w_c[3] / 3.0 + w_c[4] * t / 8.0)
            out[1] = np.where(close_der, taylor, der)
    return out


def kernel_c_sum(ctx: GeronimusContext, n: int, x, y):
    """Sum form of the divided-measure kernel; oracle for the CD form."""
    total = 0.0
    for k in range(n + 1):
        qx = eval_Qc(ctx, k, x, order=0)[0]
        qy = eval_Qc(ctx, k, y, order=0)[0]
        total = total + qx * qy / ctx.norm_sq_c[k]
    return total


def kernel_c(ctx: GeronimusContext, n: int, x, y):
    """Christoffel-Darboux kernel of the divided measure."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    qnx = eval_Qc(ctx, n, x)
    qn1x = eval_Qc(ctx, n + 1, x)
    qny = eval_Qc(ctx, n, y)
    qn1y = eval_Qc(ctx, n + 1, y)
    close = np.abs(x - y) < CONFLUENT_SWITCH * (1.0 + np.abs(x))
    with np.errstate(divide="ignore", invalid="ignore"):
        cd = (qn1x[0] * qny[0] - qn1y[0] * qnx[0]) / (x - y)
    confluent = qn1x[1] * qnx[0] - qnx[1] * qn1x[0]
    out = np.where(close, confluent, cd) / ctx.norm_sq_c[n]
    return out[()] if out.ndim == 0 else out


def kernel_c_confluent(ctx: GeronimusContext, n: int) -> float:
    """K_n^c(c, c) > 0 by the confluent determinant form."""
    qn = eval_Qc(ctx, n, np.asarray(ctx.c))
    qn1 = eval_Qc(ctx, n + 1, np.asarray(ctx.c))
    return float((qn1[1] * qn[0] - qn[1] * qn1[0]) / ctx.norm_sq_c[n])


# ---------------------------------------------------------------------------
# Connection coefficients of the mass-perturbed family


def connection_B(ctx: GeronimusContext, n: int) -> float:
    """B_n = -Q_n^c(c) P_{n-1}(c) / ||P_{n-1}||^2, positively oriented."""
    qc = eval_Qc(ctx, n, np.asarray(ctx.c), order=0)[0]
    pm = eval_monic_derivs(ctx.recurrence, n - 1, np.asarray(ctx.c), order=0)[0]
    return float(-ctx.orientation * qc * pm / ctx.recurrence.norm_sq[n - 1])


def connection_B_alt(ctx: GeronimusContext, n: int) -> float:
    """Same constant via r_{n-1} P_{n-1}(c)^2 - P_n(c) P_{n-1}(c) over the norm."""
    c = np.asarray(ctx.c)
    pn = eval_monic_derivs(ctx.recurrence, n, c, order=0)[0]
    pm = eval_monic_derivs(ctx.recurrence, n - 1, c, order=0)[0]
    r_prev = ctx.second_kind.ratio(n - 1)
    return float(
        ctx.orientation * (r_prev * pm**2 - pn * pm) / ctx.recurrence.norm_sq[n - 1]
    )


def connection_lambda(ctx: GeronimusContext, n: int, N: float | None = None) -> float:
    """Coefficient of P_{n-1} in Q_n^{c,N} = P_n + Lambda_n P_{n-1}."""
    N = ctx.mass(N)
    c = np.asarray(ctx.c)
    pn = eval_monic_derivs(ctx.recurrence, n, c, order=0)[0]
    pm = eval_monic_derivs(ctx.recurrence, n - 1, c, order=0)[0]
    pi_prev = float(pn / pm)
    r_prev = ctx.second_kind.ratio(n - 1)
    B = connection_B(ctx, n)
    return (pi_prev - r_prev) / (1.0 + N * B) - pi_prev


def connection_lambda_alt(ctx: GeronimusContext, n: int, N: float | None = None) -> float:
    """Dual formula in terms of unperturbed quantities only."""
    N = ctx.mass(N)
    c = np.asarray(ctx.c)
    pn = eval_monic_derivs(ctx.recurrence, n, c, order=0)[0]
    pm = eval_monic_derivs(ctx.recurrence, n - 1, c, order=0)[0]
    pi_prev = float(pn / pm)
    r_prev = ctx.second_kind.ratio(n - 1)
    inner = 1.0 / (pi_prev - r_prev) - (
        ctx.orientation * N * pm**2 / ctx.recurrence.norm_sq[n - 1]
    )
    return 1.0 / inner - pi_prev


@dataclass(frozen=True)
class ConnectionData:
    """Per-degree connection bundle for the mass-perturbed family."""

    n: int
    pi_prev: float
    r_prev: float
    B: float
    Lambda: float
    kappa: float
    QcN_at_c: float


def connection_data(ctx: GeronimusContext, n: int, N: float | None = None) -> ConnectionData:
    if n < 1:
        raise ParameterDomainError(f"connection data requires n >= 1, got {n}")
    N = ctx.mass(N)
    c = np.asarray(ctx.c)
    pn = eval_monic_derivs(ctx.recurrence, n, c, order=0)[0]
    pm = eval_monic_derivs(ctx.recurrence, n - 1, c, order=0)[0]
    if pm == 0.0 or pn == 0.0:
        raise SingularEvaluationError(
            "P_n(c) = 0 encountered; impossible for c outside the support"
        )
    pi_prev = float(pn / pm)
    r_prev = ctx.second_kind.ratio(n - 1)
    B = connection_B(ctx, n)
    kappa = 1.0 + N * B
    lam = (pi_prev - r_prev) / kappa - pi_prev
    qc = float(eval_Qc(ctx, n, c, order=0)[0])
    return ConnectionData(n, pi_prev, r_prev, B, lam, kappa, qc / kappa)


def eval_QcN(
    ctx: GeronimusContext, n: int, x, N: float | None = None, order: int = 1
) -> np.ndarray:
    """Mass-perturbed monic polynomial Q_n^{c,N} = P_n + Lambda_n P_{n-1}."""
    N = ctx.mass(N)
    if n == 0:
        x = np.asarray(x, dtype=float)
        out = np.zeros((order + 1,) + x.shape)
        out[0] = 1.0
        return out
    if N == 0.0:
        return eval_Qc(ctx, n, x, order)
    lam = connection_lambda(ctx, n, N)
    pn = eval_monic_derivs(ctx.recurrence, n, x, order)
    pm = eval_monic_derivs(ctx.recurrence, n - 1, x, order)
    return pn + lam * pm


def eval_QcN_kernel_form(
    ctx: GeronimusContext, n: int, x, N: float | None = None
) -> np.ndarray:
    """Dual path: (Q_n^c + N B_n (x-c) P_{n-1}^[1]) / (1 + N B_n), value only."""
    N = ctx.mass(N)
    x = np.asarray(x, dtype=float)
    qc = eval_Qc(ctx, n, x, order=0)[0]
    if n == 0 or N == 0.0:
        return qc
    B = connection_B(ctx, n)
    k = christoffel_kernel_poly(ctx, n - 1, x, order=0)[0]
    return (qc + N * B * (x - ctx.c) * k) / (1.0 + N * B)


# ---------------------------------------------------------------------------
# Independent Gram-Schmidt oracle under the perturbed inner product


def inner_product_nu_N(
    ctx: GeronimusContext, f_coeffs: np.ndarray, g_coeffs: np.ndarray,
    N: float | None = None, n_nodes: int = ORACLE_QUAD_NODES,
) -> float:
    """<f, g> under dnu + N delta_c by Gauss quadrature plus the point mass.

    f and g are given by ascending monomial coefficients.
    """
    N = ctx.mass(N)
    nodes, weights = quadrature_rule(ctx.spec, n_nodes)
    fx = np.polynomial.polynomial.polyval(nodes, f_coeffs)
    gx = np.polynomial.polynomial.polyval(nodes, g_coeffs)
    integral = ctx.orientation * float(np.sum(weights * fx * gx / (nodes - ctx.c)))
    fc = np.polynomial.polynomial.polyval(ctx.c, f_coeffs)
    gc = np.polynomial.polynomial.polyval(ctx.c, g_coeffs)
    return integral + N * float(fc * gc)


def gram_schmidt_oracle(
    ctx: GeronimusContext, n_max: int, N: float | None = None
) -> list[np.ndarray]:
    """Monic orthogonal basis under dnu + N delta_c, degree by degree.

    Works in the classical orthogonal basis (for conditioning) and returns
    ascending monomial coefficient arrays.  Entirely independent of the
    connection-coefficient construction.
    """
    if n_max > 8:
        raise ParameterDomainError("oracle limited to n_max <= 8 for conditioning")
    N = ctx.mass(N)
    nodes, weights = quadrature_rule(ctx.spec, ORACLE_QUAD_NODES)
    rational = ctx.orientation * weights / (nodes - ctx.c)
    m = n_max + 1
    # Work in the norm-scaled classical basis P_k/||P_k||: the raw monic Gram
    # matrix is badly row-scaled (norms grow like (k!)^2 for Laguerre), which
    # is not genuine ill-conditioning of the projection problem.
    scale = np.sqrt(ctx.recurrence.norm_sq[:m])
    p_vals = np.vstack(
        [eval_monic_derivs(ctx.recurrence, k, nodes, order=0)[0] / scale[k] for k in range(m)]
    )
    p_at_c = np.array(
        [
            float(eval_monic_derivs(ctx.recurrence, k, np.asarray(ctx.c), order=0)[0]) / scale[k]
            for k in range(m)
        ]
    )
    gram = p_vals @ (rational[:, None] * p_vals.T) + N * np.outer(p_at_c, p_at_c)
    cond = np.linalg.cond(gram)
    if cond > GRAM_CONDITION_LIMIT:
        raise IllConditionedError(
            f"Gram matrix condition {cond:.3e} exceeds {GRAM_CONDITION_LIMIT:.0e}"
        )
    basis_coeffs = [monic_coefficients(ctx.recurrence, k) for k in range(m)]
    out: list[np.ndarray] = []
    for n in range(m):
        if n == 0:
            out.append(np.array([1.0]))
            continue
        scaled = np.linalg.solve(gram[:n, :n], -gram[:n, n])
        coeffs = scaled * scale[n] / scale[:n]
        poly = np.zeros(n + 1)
        poly[: len(basis_coeffs[n])] += basis_coeffs[n]
        for k, ck in enumerate(coeffs):
            poly[: k + 1] += ck * basis_coeffs[k]
        out.append(poly)
    return out


# ---------------------------------------------------------------------------
# Connection between kernel polynomials and the divided-measure family


def kernel_connection_coeffs(
    ctx: GeronimusContext, n: int
) -> tuple[float, float, float]:
    """(d_n, e_n, positivity margin) in
    (x-c)^2 P_n^[1] = Q_{n+2}^c - d_n Q_{n+1}^c + e_n Q_n^c.

    The margin is e_n minus the recurrence coefficient multiplying Q_n^c
    when Q_{n+2}^c is expanded one step, i.e. e_n - ||Q_{n+1}^c||^2/||Q_n^c||^2,
    and equals [Q_{n+1}^c(c)]^2 / (||Q_n^c||^2 K_n^c(c,c)) > 0 for every n >= 0.
    """
    c = np.asarray(ctx.c)
    pn = eval_monic_derivs(ctx.recurrence, n, c, order=0)[0]
    pn1 = eval_monic_derivs(ctx.recurrence, n + 1, c, order=0)[0]
    q_n = eval_Qc(ctx, n, c, order=0)[0]
    q_n1 = eval_Qc(ctx, n + 1, c, order=0)[0]
    q_n2 = eval_Qc(ctx, n + 2, c, order=0)[0]
    e = float((pn1 / pn) * (q_n1 / q_n))
    d = float((q_n2 + e * q_n) / q_n1)
    return d, e, e - float(ctx.gamma_c[n + 1])
