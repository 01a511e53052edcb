import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geronimus.errors import IllConditionedError, ParameterDomainError
from geronimus.measures import (
    eval_monic_derivs,
    jacobi,
    laguerre,
    monic_coefficients,
    quadrature_rule,
)
from geronimus.transform import (
    christoffel_kernel_poly,
    connection_B,
    connection_B_alt,
    connection_data,
    connection_lambda,
    connection_lambda_alt,
    eval_Qc,
    eval_Qc_recurrence,
    eval_QcN,
    eval_QcN_kernel_form,
    gram_schmidt_oracle,
    inner_product_nu_N,
    kernel_c,
    kernel_c_confluent,
    kernel_c_sum,
    kernel_connection_coeffs,
    make_context,
)

LN3 = math.log(3.0)

CTX_LEG = make_context(jacobi(0.0, 0.0), -2.0, 0.0, 27)
CTX_LAG = make_context(laguerre(0.0), -1.0, 0.0, 27)
CTX_JAC = make_context(jacobi(0.5, 1.0), -1.5, 0.0, 27)
CTX_RIGHT = make_context(jacobi(0.0, 0.0), 1.5, 0.0, 27)
ALL_CTX = [CTX_LEG, CTX_LAG, CTX_JAC, CTX_RIGHT]


def _grid(ctx, count=60):
    a, b = ctx.spec.support
    return np.linspace(a + 0.02, min(b - 0.02, a + 18.0), count)


def test_divided_measure_mass():
    assert CTX_LEG.gamma_c[0] == pytest.approx(LN3, rel=1e-14)
    # right of the support the positively oriented mass is |F_0|:
    # int dx/(x-1.5) over [-1,1] = ln(0.5/2.5) = -ln 5
    assert CTX_RIGHT.gamma_c[0] == pytest.approx(math.log(5.0), rel=1e-14)
    assert CTX_RIGHT.second_kind.F(0) == pytest.approx(-math.log(5.0), rel=1e-13)
    sym = make_context(jacobi(0.0, 0.0), 2.0, 0.0, 5)
    assert sym.gamma_c[0] == pytest.approx(LN3, rel=1e-14)


def test_modified_recurrence_initials():
    sk = CTX_LEG.second_kind
    assert CTX_LEG.beta_c[0] == pytest.approx(0.0 + sk.ratio(0), rel=1e-15)
    for ctx in ALL_CTX:
        assert np.all(ctx.gamma_c[1:26] > 0.0)
        assert np.all(ctx.norm_sq_c[:26] > 0.0)


def test_norms_against_quadrature():
    for ctx in ALL_CTX:
        nodes, w = quadrature_rule(ctx.spec, 200)
        for n in range(11):
            q = eval_Qc(ctx, n, nodes, 0)[0]
            direct = ctx.orientation * float(np.sum(w * q * q / (nodes - ctx.c)))
            assert direct == pytest.approx(float(ctx.norm_sq_c[n]), rel=1e-8)


def test_divided_mass_against_quadrature():
    # margin >= 0.5 keeps the 200-node rational quadrature at full accuracy
    for ctx in (CTX_LEG, CTX_LAG, CTX_JAC, CTX_RIGHT):
        nodes, w = quadrature_rule(ctx.spec, 200)
        direct = ctx.orientation * float(np.sum(w / (nodes - ctx.c)))
        assert direct == pytest.approx(float(ctx.gamma_c[0]), rel=1e-11)


def test_eval_Qc_low_degrees():
    x = _grid(CTX_LAG, 7)
    assert np.all(eval_Qc(CTX_LAG, 0, x)[0] == 1.0)
    q1 = eval_Qc(CTX_LAG, 1, x)[0]
    assert np.allclose(q1, x - CTX_LAG.beta_c[0], rtol=1e-14)


@pytest.mark.parametrize("ctx", ALL_CTX, ids=lambda c: c.spec.describe() + f"@{c.c:g}")
def test_eval_Qc_dual_paths(ctx):
    x = _grid(ctx)
    for n in range(1, 26):
        a = eval_Qc(ctx, n, x)
        b = eval_Qc_recurrence(ctx, n, x)
        scale = np.maximum(np.abs(a[0]), 1e-300)
        assert np.max(np.abs(a[0] - b[0]) / scale) < 1e-10


def test_kernel_poly_degree_zero_and_identity():
    x = _grid(CTX_LAG, 50)
    assert np.all(christoffel_kernel_poly(CTX_LAG, 0, x)[0] == pytest.approx(1.0, rel=1e-12))
    for ctx in (CTX_LAG, CTX_JAC, CTX_RIGHT):
        xs = _grid(ctx, 50)
        for n in (1, 4, 9):
            val = christoffel_kernel_poly(ctx, n, xs, 0)[0]
            pn1 = eval_monic_derivs(ctx.recurrence, n + 1, xs, 0)[0]
            pn = eval_monic_derivs(ctx.recurrence, n, xs, 0)[0]
            pi_n = float(
                eval_monic_derivs(ctx.recurrence, n + 1, np.asarray(ctx.c), 0)[0]
                / eval_monic_derivs(ctx.recurrence, n, np.asarray(ctx.c), 0)[0]
            )
            resid = val * (xs - ctx.c) + pi_n * pn - pn1
            scale = np.maximum.reduce([np.abs(pn1), np.abs(pi_n * pn), np.ones_like(xs)])
            assert np.max(np.abs(resid) / scale) < 1e-11


def test_kernel_poly_removable_branch():
    # values and slopes continue through both branch seams without jumps
    c = CTX_LAG.c
    for t, tol in [(1e-8, 1e-7), (4e-4, 1e-5)]:
        below = christoffel_kernel_poly(CTX_LAG, 4, np.asarray(c + 0.99 * t))
        above = christoffel_kernel_poly(CTX_LAG, 4, np.asarray(c + 1.01 * t))
        assert float(below[0]) == pytest.approx(float(above[0]), rel=tol)
        assert float(below[1]) == pytest.approx(float(above[1]), rel=tol)
    # slope at the derivative seam agrees with a wide central difference
    fd = (
        christoffel_kernel_poly(CTX_LAG, 4, np.asarray(c + 4e-4 + 1e-3), 0)[0]
        - christoffel_kernel_poly(CTX_LAG, 4, np.asarray(c + 4e-4 - 1e-3), 0)[0]
    ) / 2e-3
    assert christoffel_kernel_poly(CTX_LAG, 4, np.asarray(c + 4e-4))[1] == pytest.approx(
        float(fd), rel=1e-4
    )


def test_kernel_c_basics():
    for ctx in ALL_CTX:
        assert kernel_c_confluent(ctx, 0) == pytest.approx(1.0 / ctx.gamma_c[0], rel=1e-13)
        for n in (1, 3, 8):
            conf = kernel_c_confluent(ctx, n)
            assert conf > 0.0
            direct = float(kernel_c_sum(ctx, n, np.asarray(ctx.c), np.asarray(ctx.c)))
            assert abs(conf - direct) / direct < 1e-10
        x, y = ctx.c + 0.3 * ctx.orientation * -1.0, ctx.c + 0.9 * ctx.orientation * -1.0
        assert kernel_c(ctx, 5, x, y) == pytest.approx(kernel_c(ctx, 5, y, x), rel=1e-12)


def test_kernel_c_matches_connection_constant():
    for ctx in ALL_CTX:
        for n in (1, 2, 7, 15):
            assert kernel_c_confluent(ctx, n - 1) == pytest.approx(
                connection_B(ctx, n), rel=1e-10
            )


def test_reproducing_property():
    for ctx in ALL_CTX:
        nodes, w = quadrature_rule(ctx.spec, 200)
        for n in (2, 5):
            k = kernel_c(ctx, n, nodes, ctx.c)
            for deg in range(n + 1):
                got = ctx.orientation * float(
                    np.sum(w * k * nodes**deg / (nodes - ctx.c))
                )
                assert got == pytest.approx(ctx.c**deg, rel=1e-9)


def test_connection_data_fields():
    for ctx in ALL_CTX:
        for n in (1, 4, 12):
            cd0 = connection_data(ctx, n, 0.0)
            assert cd0.kappa == 1.0
            assert cd0.B > 0.0
            assert cd0.Lambda == pytest.approx(-cd0.r_prev, rel=1e-13)
            assert connection_B_alt(ctx, n) == pytest.approx(cd0.B, rel=1e-11)
            cd = connection_data(ctx, n, 0.7)
            assert cd.kappa == pytest.approx(1.0 + 0.7 * cd.B, rel=1e-15)
            qc = float(eval_Qc(ctx, n, np.asarray(ctx.c), 0)[0])
            assert cd.QcN_at_c == pytest.approx(qc / cd.kappa, rel=1e-13)
    with pytest.raises(ParameterDomainError):
        connection_data(CTX_LAG, 0)


@pytest.mark.parametrize("ctx", ALL_CTX, ids=lambda c: c.spec.describe() + f"@{c.c:g}")
def test_lambda_alternative_formula(ctx):
    for n in (1, 3, 9):
        for N in (0.0, 1e-3, 0.05, 1.0, 100.0):
            a = connection_lambda(ctx, n, N)
            b = connection_lambda_alt(ctx, n, N)
            assert abs(a - b) / max(abs(a), 1e-300) < 1e-10


@settings(max_examples=30, deadline=None)
@given(
    n=st.integers(1, 12),
    n1=st.floats(0.0, 50.0),
    n2=st.floats(0.0, 50.0),
)
def test_lambda_monotone_between_limits(n, n1, n2):
    ctx = CTX_LAG
    lo, hi = sorted((n1, n2))
    la, lb = connection_lambda(ctx, n, lo), connection_lambda(ctx, n, hi)
    r_prev = ctx.second_kind.ratio(n - 1)
    pi_prev = connection_data(ctx, n, 0.0).pi_prev
    lam0, lam_inf = -r_prev, -pi_prev
    direction = np.sign(lam_inf - lam0)
    if hi > lo:
        assert direction * (lb - la) >= 0.0
    for lam in (la, lb):
        assert min(lam0, lam_inf) - 1e-12 <= lam <= max(lam0, lam_inf) + 1e-12


def test_kappa_at_least_one():
    for ctx in ALL_CTX:
        for n in (1, 5, 20):
            for N in (0.0, 1e-4, 1.0, 1e4):
                assert connection_data(ctx, n, N).kappa >= 1.0


def test_eval_QcN_reduces_at_zero_mass():
    for ctx in ALL_CTX:
        x = _grid(ctx, 25)
        for n in (0, 1, 6):
            a = eval_QcN(ctx, n, x, 0.0)
            b = eval_Qc(ctx, n, x)
            assert np.array_equal(a, b)


@pytest.mark.parametrize("ctx", ALL_CTX, ids=lambda c: c.spec.describe() + f"@{c.c:g}")
def test_eval_QcN_dual_paths(ctx):
    x = _grid(ctx, 100)
    for n in (1, 3, 8, 15):
        for N in (1e-3, 0.05, 5.0):
            direct = eval_QcN(ctx, n, x, N, order=0)[0]
            via_kernel = eval_QcN_kernel_form(ctx, n, x, N)
            scale = np.maximum(np.abs(direct), 1e-300)
            assert np.max(np.abs(direct - via_kernel) / scale) < 1e-10


def test_reference_zero_is_nearly_a_root():
    v, dv = eval_QcN(make_context(laguerre(0.0), -1.0, 5.0, 5), 3, np.asarray(-0.988481), 5.0)
    assert abs(v) / (abs(dv) * (1.0 + 0.988481)) < 1e-5


def test_gram_schmidt_degree_one():
    ctx = make_context(laguerre(0.0), -1.0, 0.05, 10)
    basis = gram_schmidt_oracle(ctx, 1, 0.05)
    one = np.array([1.0])
    x_mono = np.array([0.0, 1.0])
    shift = inner_product_nu_N(ctx, x_mono, one, 0.05) / inner_product_nu_N(ctx, one, one, 0.05)
    assert basis[1][1] == pytest.approx(1.0, abs=0.0)
    assert basis[1][0] == pytest.approx(-shift, rel=1e-12)


def test_gram_schmidt_matches_connection_coefficients():
    ctx = make_context(laguerre(0.0), -1.0, 0.05, 10)
    basis = gram_schmidt_oracle(ctx, 8, 0.05)
    for n in range(1, 9):
        direct = monic_coefficients(ctx.recurrence, n).astype(float)
        direct[:n] += connection_lambda(ctx, n, 0.05) * monic_coefficients(ctx.recurrence, n - 1)
        assert np.max(np.abs(basis[n] - direct)) / np.max(np.abs(direct)) < 1e-8


def test_gram_schmidt_orthogonality():
    ctx = make_context(jacobi(0.5, 1.0), -1.5, 0.05, 10)
    basis = gram_schmidt_oracle(ctx, 6, 0.05)
    norms = [inner_product_nu_N(ctx, b, b, 0.05) for b in basis]
    for i in range(7):
        for j in range(i):
            ip = inner_product_nu_N(ctx, basis[i], basis[j], 0.05)
            assert abs(ip) / math.sqrt(norms[i] * norms[j]) < 1e-9


def test_gram_schmidt_condition_guard():
    ctx = make_context(laguerre(0.0), -1.0, 1e18, 10)
    with pytest.raises(IllConditionedError):
        gram_schmidt_oracle(ctx, 8)


@pytest.mark.parametrize("ctx", ALL_CTX, ids=lambda c: c.spec.describe() + f"@{c.c:g}")
def test_kernel_connection_coeffs(ctx):
    x = _grid(ctx, 50)
    for n in (0, 1, 5, 12):
        d, e, margin = kernel_connection_coeffs(ctx, n)
        assert margin > 0.0
        assert e > 0.0
        lhs = (x - ctx.c) ** 2 * christoffel_kernel_poly(ctx, n, x, 0)[0]
        rhs = (
            eval_Qc(ctx, n + 2, x, 0)[0]
            - d * eval_Qc(ctx, n + 1, x, 0)[0]
            + e * eval_Qc(ctx, n, x, 0)[0]
        )
        scale = np.maximum(np.abs(lhs), 1.0)
        assert np.max(np.abs(lhs - rhs) / scale) < 1e-10
        # dual form of e through norm and confluent-kernel ratios
        alt = (ctx.norm_sq_c[n + 1] / ctx.norm_sq_c[n]) * (
            kernel_c_confluent(ctx, n + 1) / kernel_c_confluent(ctx, n)
        )
        assert e == pytest.approx(alt, rel=1e-10)


def test_mass_validation():
    with pytest.raises(ParameterDomainError):
        make_context(laguerre(0.0), -1.0, -0.5, 8)
    with pytest.raises(ParameterDomainError):
        CTX_LAG.with_mass(-1.0)
