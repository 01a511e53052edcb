"""Classical Laguerre and Jacobi measures.

Monic three-term recurrences, norms, structure relations, Christoffel-Darboux
kernels, and Gauss quadrature rules derived from the recurrence coefficients.
All polynomials are monic throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln

from .errors import ParameterDomainError

__all__ = [
    "Family",
    "MeasureSpec",
    "RecurrenceTable",
    "StructureRelation",
    "laguerre",
    "jacobi",
    "classical_recurrence",
    "eval_monic",
    "eval_monic_derivs",
    "monic_coefficients",
    "kernel",
    "kernel_sum",
    "gauss_rule",
    "quadrature_rule",
]

# Switch to the confluent (x = y) form of the Christoffel-Darboux formula
# below this relative separation; avoids catastrophic cancellation.
CONFLUENT_SWITCH = 1e-8


class Family(Enum):
    LAGUERRE = "laguerre"
    JACOBI = "jacobi"


@dataclass(frozen=True)
class MeasureSpec:
    """A classical weight: Laguerre x^alpha e^-x on [0, inf) or Jacobi
    (1-x)^alpha (1+x)^beta on [-1, 1]."""

    family: Family
    alpha: float
    beta: float | None = None

    def __post_init__(self) -> None:
        if self.alpha <= -1.0:
            raise ParameterDomainError(f"alpha must exceed -1, got {self.alpha}")
        if self.family is Family.JACOBI:
            if self.beta is None:
                raise ParameterDomainError("Jacobi requires a beta parameter")
            if self.beta <= -1.0:
                raise ParameterDomainError(f"beta must exceed -1, got {self.beta}")
        elif self.beta is not None:
            raise ParameterDomainError("beta is only meaningful for Jacobi")

    @property
    def support(self) -> tuple[float, float]:
        if self.family is Family.LAGUERRE:
            return (0.0, math.inf)
        return (-1.0, 1.0)

    def describe(self) -> str:
        if self.family is Family.LAGUERRE:
            return f"laguerre(alpha={self.alpha:g})"
        return f"jacobi(alpha={self.alpha:g}, beta={self.beta:g})"


def laguerre(alpha: float) -> MeasureSpec:
    return MeasureSpec(Family.LAGUERRE, float(alpha))


def jacobi(alpha: float, beta: float) -> MeasureSpec:
    return MeasureSpec(Family.JACOBI, float(alpha), float(beta))


@dataclass(frozen=True)
class RecurrenceTable:
    """Monic recurrence x P_n = P_{n+1} + beta_n P_n + gamma_n P_{n-1}.

    gamma[0] is unused by the recurrence and stored as 0; norm_sq[n] is
    ||P_n||^2 = mu0 * prod_{k<=n} gamma[k] with norm_sq[0] = mu0.
    """

    spec: MeasureSpec
    beta: np.ndarray
    gamma: np.ndarray
    norm_sq: np.ndarray
    mu0: float

    def __post_init__(self) -> None:
        for arr in (self.beta, self.gamma, self.norm_sq):
            arr.setflags(write=False)

    @property
    def n_max(self) -> int:
        return len(self.beta) - 1


def _laguerre_tables(alpha: float, n_max: int) -> tuple[np.ndarray, np.ndarray, float]:
    n = np.arange(n_max + 1, dtype=float)
    beta = 2.0 * n + alpha + 1.0
    gamma = n * (n + alpha)
    mu0 = math.exp(math.lgamma(alpha + 1.0))
    return beta, gamma, mu0


def _jacobi_tables(alpha: float, beta_p: float, n_max: int) -> tuple[np.ndarray, np.ndarray, float]:
    a, b = alpha, beta_p
    n = np.arange(n_max + 1, dtype=float)
    s = 2.0 * n + a + b
    beta = np.empty(n_max + 1)
    beta[0] = (b - a) / (a + b + 2.0)  # cancelled form, safe at a + b = 0
    if n_max >= 1:
        beta[1:] = (b * b - a * a) / (s[1:] * (s[1:] + 2.0))
    gamma = np.zeros(n_max + 1)
    if n_max >= 1:
        # gamma_1 in cancelled form: the (1 + a + b) factor is removable.
        gamma[1] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) ** 2 * (3.0 + a + b))
    if n_max >= 2:
        m = n[2:]
        sm = s[2:]
        gamma[2:] = (
            4.0 * m * (m + a) * (m + b) * (m + a + b)
            / ((sm - 1.0) * sm**2 * (sm + 1.0))
        )
    mu0 = math.exp((a + b + 1.0) * math.log(2.0) + betaln(a + 1.0, b + 1.0))
    return beta, gamma, mu0


def classical_recurrence(spec: MeasureSpec, n_max: int) -> RecurrenceTable:
    """Recurrence coefficients, norms and total mass up to degree n_max."""
    if n_max < 0:
        raise ParameterDomainError(f"n_max must be nonnegative, got {n_max}")
    if spec.family is Family.LAGUERRE:
        beta, gamma, mu0 = _laguerre_tables(spec.alpha, n_max)
    else:
        beta, gamma, mu0 = _jacobi_tables(spec.alpha, spec.beta, n_max)
    norm_sq = np.empty(n_max + 1)
    norm_sq[0] = mu0
    if n_max >= 1:
        # Entries overflow to inf for very high degree; the continued-fraction
        # machinery only reads beta and gamma at those depths.
        with np.errstate(over="ignore"):
            norm_sq[1:] = mu0 * np.cumprod(gamma[1:])
    return RecurrenceTable(spec, beta, gamma, norm_sq, mu0)


def eval_monic_derivs(table: RecurrenceTable, n: int, x, order: int = 1) -> np.ndarray:
    """Values and derivatives of the monic polynomial of degree n.

    Returns an array of shape (order+1,) + shape(x) holding P_n, P_n', ...,
    P_n^(order), computed from the differentiated recurrence
    d^j P_{k+1} = (x - beta_k) d^j P_k + j d^{j-1} P_k - gamma_k d^j P_{k-1}.
    """
    if n < 0 or n > table.n_max:
        raise ParameterDomainError(f"degree {n} outside table range 0..{table.n_max}")
    x = np.asarray(x, dtype=float)
    prev = np.zeros((order + 1,) + x.shape)
    cur = np.zeros((order + 1,) + x.shape)
    cur[0] = 1.0
    for k in range(n):
        nxt = np.empty_like(cur)
        for j in range(order, -1, -1):
            nxt[j] = (x - table.beta[k]) * cur[j] - table.gamma[k] * prev[j]
            if j > 0:
                nxt[j] += j * cur[j - 1]
        prev, cur = cur, nxt
    return cur


def eval_monic(table: RecurrenceTable, n: int, x):
    """(P_n(x), P_n'(x)) by forward recurrence."""
    vals = eval_monic_derivs(table, n, x, order=1)
    return vals[0], vals[1]


def monic_coefficients(table: RecurrenceTable, n: int) -> np.ndarray:
    """Monomial coefficients of P_n, ascending; leading coefficient is 1."""
    if n < 0 or n > table.n_max:
        raise ParameterDomainError(f"degree {n} outside table range 0..{table.n_max}")
    prev = np.zeros(n + 1)
    cur = np.zeros(n + 1)
    cur[0] = 1.0
    for k in range(n):
        nxt = np.zeros(n + 1)
        nxt[1 : k + 2] = cur[: k + 1]
        nxt -= table.beta[k] * cur + table.gamma[k] * prev
        prev, cur = cur, nxt
    return cur


def kernel(table: RecurrenceTable, n: int, x, y):
    """Christoffel-Darboux kernel K_n(x, y) = sum_{k<=n} P_k(x)P_k(y)/||P_k||^2.

    Uses the two-point Christoffel-Darboux form, switching to the confluent
    derivative form where |x - y| < CONFLUENT_SWITCH * (1 + |x|).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    pn, dpn = eval_monic(table, n, x)
    pn1, dpn1 = eval_monic(table, n + 1, x)
    qn, dqn = eval_monic(table, n, y)
    qn1, dqn1 = eval_monic(table, n + 1, y)
    close = np.abs(x - y) < CONFLUENT_SWITCH * (1.0 + np.abs(x))
    with np.errstate(divide="ignore", invalid="ignore"):
        cd = (pn1 * qn - qn1 * pn) / (x - y)
    # midpoint evaluation keeps the branch symmetric in (x, y) and is
    # second-order accurate across the removable diagonal
    mid = 0.5 * (x + y)
    mn, dmn = eval_monic(table, n, mid)
    mn1, dmn1 = eval_monic(table, n + 1, mid)
    confluent = dmn1 * mn - dmn * mn1
    out = np.where(close, confluent, cd) / table.norm_sq[n]
    return out[()] if out.ndim == 0 else out


def kernel_sum(table: RecurrenceTable, n: int, x, y):
    """Direct-sum form of K_n(x, y); the oracle for the CD form."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = 0.0
    for k in range(n + 1):
        pk = eval_monic_derivs(table, k, x, order=0)[0]
        qk = eval_monic_derivs(table, k, y, order=0)[0]
        total = total + pk * qk / table.norm_sq[k]
    return total


@dataclass(frozen=True)
class StructureRelation:
    """sigma(x) P_n'(x) = a(x; n) P_n(x) + b(x; n) P_{n-1}(x), degrees fixed in n."""

    spec: MeasureSpec
    sigma: Polynomial
    a_of: Callable[[int], Polynomial] = field(repr=False)
    b_of: Callable[[int], Polynomial] = field(repr=False)


def structure_relation(spec: MeasureSpec) -> StructureRelation:
    if spec.family is Family.LAGUERRE:
        alpha = spec.alpha

        def a_of(n: int) -> Polynomial:
            return Polynomial([float(n)])

        def b_of(n: int) -> Polynomial:
            return Polynomial([n * (n + alpha)])

        return StructureRelation(spec, Polynomial([0.0, 1.0]), a_of, b_of)

    a, b = spec.alpha, spec.beta

    def a_of(n: int) -> Polynomial:
        if n == 0:
            return Polynomial([0.0])
        s = 2.0 * n + a + b
        return Polynomial([n * (a - b) / s, -float(n)])

    def b_of(n: int) -> Polynomial:
        if n == 0:
            return Polynomial([0.0])
        s = 2.0 * n + a + b
        if n == 1:
            # cancelled form of the removable (1 + a + b) factor
            return Polynomial([4.0 * (1.0 + a) * (1.0 + b) / (2.0 + a + b) ** 2])
        return Polynomial([4.0 * n * (n + a) * (n + b) * (n + a + b) / ((s - 1.0) * s**2)])

    return StructureRelation(spec, Polynomial([1.0, 0.0, -1.0]), a_of, b_of)


def gauss_rule(table: RecurrenceTable, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix,
    weights are mu0 times the squared first eigenvector components."""
    if n_nodes < 1 or n_nodes > table.n_max + 1:
        raise ParameterDomainError(
            f"n_nodes {n_nodes} outside table range 1..{table.n_max + 1}"
        )
    d = table.beta[:n_nodes].copy()
    e = np.sqrt(table.gamma[1:n_nodes])
    nodes, vectors = eigh_tridiagonal(d, e)
    weights = table.mu0 * vectors[0, :] ** 2
    return nodes, weights


@lru_cache(maxsize=64)
def quadrature_rule(spec: MeasureSpec, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Cached Gauss rule for a spec; arrays are read-only."""
    nodes, weights = gauss_rule(classical_recurrence(spec, n_nodes), n_nodes)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights
