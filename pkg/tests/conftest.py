"""Shared oracles for the test suite.

The second-kind oracle integrates P_n(x) w(x)/(x - c) in 60-digit arithmetic
with recurrence coefficients built from the closed forms in mpmath; float64
tables would perturb the polynomial enough to shift the (heavily cancelling)
integral by ~1e-5 relative at n = 20.
"""

from __future__ import annotations

import mpmath as mp

from geronimus.measures import MeasureSpec

mp.mp.dps = 60


def mp_recurrence(spec: MeasureSpec, n_max: int):
    """(beta, gamma, weight, integration domain) in mpmath arithmetic."""
    if spec.family.value == "laguerre":
        a = mp.mpf(spec.alpha)
        beta = [2 * mp.mpf(k) + a + 1 for k in range(n_max + 1)]
        gamma = [mp.mpf(k) * (mp.mpf(k) + a) for k in range(n_max + 1)]
        return beta, gamma, (lambda x: x**a * mp.e**(-x)), [0, mp.inf]
    a, b = mp.mpf(spec.alpha), mp.mpf(spec.beta)
    beta = [(b - a) / (a + b + 2)] + [
        (b * b - a * a) / ((2 * k + a + b) * (2 * k + a + b + 2))
        for k in range(1, n_max + 1)
    ]
    gamma = [mp.mpf(0)] + [
        4 * mp.mpf(k) * (k + a) * (k + b) * (k + a + b)
        / ((2 * k + a + b - 1) * (2 * k + a + b) ** 2 * (2 * k + a + b + 1))
        for k in range(1, n_max + 1)
    ]
    if n_max >= 1:
        gamma[1] = 4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b))
    return beta, gamma, (lambda x: (1 - x) ** a * (1 + x) ** b), [-1, 1]


def mp_monic(beta, gamma, n, x):
    prev, cur = mp.mpf(0), mp.mpf(1)
    for k in range(n):
        cur, prev = (x - beta[k]) * cur - gamma[k] * prev, cur
    return cur


def second_kind_oracle(spec: MeasureSpec, c: float, n: int) -> mp.mpf:
    """F_n(c) by adaptive quadrature at 60 digits."""
    beta, gamma, weight, domain = mp_recurrence(spec, n)
    cm = mp.mpf(c)
    return mp.quad(lambda x: mp_monic(beta, gamma, n, x) / (x - cm) * weight(x), domain)


def rel_err(got, want) -> float:
    return float(abs(mp.mpf(got) - mp.mpf(want)) / abs(mp.mpf(want)))
