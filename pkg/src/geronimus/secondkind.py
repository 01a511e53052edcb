"""Second-kind functions F_n(c) = int P_n(x)/(x-c) dmu(x) for c off the support.

Outside the support the F_n are the minimal solution of the three-term
recurrence F_{n+1} = (c - beta_n) F_n - gamma_n F_{n-1} (n >= 1), so the ratio
sequence is evaluated by a backward continued fraction with a zero tail seed,
with the starting depth doubled until two successive ratio tables agree.
F_0 then follows from F_1 = mu0 + (c - beta_0) F_0 and the ratio F_1/F_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailureError, ShiftInsideSupportError
from .measures import MeasureSpec, RecurrenceTable, classical_recurrence

__all__ = ["SecondKindTable", "shift_margin", "check_shift", "f0", "second_kind"]

SHIFT_MARGIN = 1e-10
RATIO_TOL = 1e-14
MAX_DOUBLINGS = 4
BASE_EXTRA_DEPTH = 60
MAX_EXTRA_DEPTH = 30000


def shift_margin(spec: MeasureSpec, c: float) -> float:
    """Signed distance from c to the support; negative means inside."""
    a, b = spec.support
    if c < a:
        return a - c
    if c > b:
        return c - b
    return -min(c - a, b - c) if math.isfinite(b) else -(c - a)


def check_shift(spec: MeasureSpec, c: float) -> None:
    if not (shift_margin(spec, c) > SHIFT_MARGIN):
        a, b = spec.support
        raise ShiftInsideSupportError(
            f"shift c={c} must be outside [{a}, {b}] by more than {SHIFT_MARGIN}"
        )


@dataclass(frozen=True)
class SecondKindTable:
    """F_n(c) for n = -1..n_max+1 (F_{-1} = 1 by convention) and their ratios.

    ratio(n) = F_{n+1}(c)/F_n(c); ratio(-1) = F_0(c).
    """

    spec: MeasureSpec
    c: float
    n_max: int
    _f: np.ndarray  # _f[i] = F_{i-1}(c), i = 0..n_max+2
    _r: np.ndarray  # _r[i] = F_i/F_{i-1}(c), i = 0..n_max+1

    def __post_init__(self) -> None:
        self._f.setflags(write=False)
        self._r.setflags(write=False)

    def F(self, n: int) -> float:
        if n < -1 or n > self.n_max + 1:
            raise IndexError(f"F_{n} outside table range -1..{self.n_max + 1}")
        return float(self._f[n + 1])

    def ratio(self, n: int) -> float:
        if n < -1 or n > self.n_max:
            raise IndexError(f"ratio r_{n} outside table range -1..{self.n_max}")
        return float(self._r[n + 1])


def _backward_ratios(table: RecurrenceTable, c: float, top: int, depth: int) -> np.ndarray:
    """r_{k-1} = gamma_k / ((c - beta_k) - r_k) from a zero tail at index depth.

    Returns out[j] = F_{j+1}/F_j for j = 0..top.
    """
    out = np.empty(top + 1)
    r = 0.0
    beta, gamma = table.beta, table.gamma
    for k in range(depth, 0, -1):
        r = gamma[k] / ((c - beta[k]) - r)
        if k - 1 <= top:
            out[k - 1] = r
    return out


def _extra_depth(spec: MeasureSpec, c: float) -> int:
    """Margin-dependent starting depth for the backward recurrence.

    The tail contamination decays like exp(-4 sqrt(margin * depth)) for
    Laguerre and geometrically with per-step factor 1 - O(sqrt(margin)) for
    Jacobi, so small margins need proportionally deeper tails before the
    doubling certificate can settle.
    """
    margin = shift_margin(spec, c)
    if spec.family.value == "laguerre":
        extra = BASE_EXTRA_DEPTH + math.ceil(60.0 / margin)
    else:
        extra = BASE_EXTRA_DEPTH + math.ceil(20.0 / math.sqrt(margin))
    return min(extra, MAX_EXTRA_DEPTH)


def second_kind(spec: MeasureSpec, c: float, n_max: int) -> SecondKindTable:
    """Second-kind table with F up to n_max+1 and ratios up to r_{n_max}."""
    check_shift(spec, c)
    top = n_max + 1  # highest ratio index needed: r_top-1 ... we need r_0..r_top
    depth = top + _extra_depth(spec, c)
    table = classical_recurrence(spec, depth + 1)
    ratios = _backward_ratios(table, c, top, depth)
    for _ in range(MAX_DOUBLINGS):
        depth *= 2
        table = classical_recurrence(spec, depth + 1)
        refined = _backward_ratios(table, c, top, depth)
        if np.all(np.abs(refined - ratios) <= RATIO_TOL * np.abs(refined)):
            ratios = refined
            break
        ratios = refined
    else:
        raise NumericalFailureError(
            f"continued fraction for second-kind ratios did not converge to "
            f"{RATIO_TOL} after {MAX_DOUBLINGS} depth doublings (c={c})"
        )
    f0_val = -table.mu0 / ((c - table.beta[0]) - ratios[0])
    f = np.empty(n_max + 3)
    f[0] = 1.0  # F_{-1}
    f[1] = f0_val
    for k in range(n_max + 1):
        f[k + 2] = ratios[k] * f[k + 1]
    r = np.empty(n_max + 2)
    r[0] = f0_val  # ratio(-1) = F_0 / F_{-1}
    r[1:] = ratios[: n_max + 1]
    return SecondKindTable(spec, c, n_max, f, r)


def f0(spec: MeasureSpec, c: float) -> float:
    """F_0(c) = int dmu(x)/(x - c); positive when c is left of the support."""
    return second_kind(spec, c, 0).F(0)
