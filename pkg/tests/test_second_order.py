import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.special import airy

from recint.errors import IterationLimitError
from recint.first_order import residual_first_order, solve_integrating_factor
from recint.second_order import (
    SecondOrderProblem,
    alpha_condition_residual,
    beta_condition_residual,
    compute_alpha,
    compute_beta,
    compute_factors,
    compute_h,
    homogeneous_solutions,
    particular_solution,
    reduced_first_order,
    residual_second_order,
    solve,
    wronskian,
)
from recint.series import Series, approx_equal, constant, mul, reciprocal, variable, zero

coef = st.floats(-1.0, 1.0, allow_nan=False, allow_subnormal=False)


def pad(c, order, x0=0.0):
    return Series(list(c) + [0.0] * (order + 1 - len(c)), x0)


def cos_series(order):
    return Series([(-1) ** (k // 2) / math.factorial(k) if k % 2 == 0 else 0.0 for k in range(order + 1)])


def sin_series(order):
    return Series([(-1) ** (k // 2) / math.factorial(k) if k % 2 else 0.0 for k in range(order + 1)])


def hermite(a, order):
    return SecondOrderProblem(pad([0, -2.0], order), constant(a, order), zero(order))


def airy_problem(order):
    return SecondOrderProblem(zero(order), pad([0, -1.0], order), zero(order))


# beta, h, alpha


def test_beta_examples():
    assert compute_beta(zero(6)) == constant(1.0, 6)
    b = compute_beta(pad([0, -2.0], 8))
    assert np.allclose(b.coeffs[:5], [1, 0, -0.5, 0, 0.125], rtol=0, atol=1e-16)
    x = variable(8)
    p = mul(-2.0 * x, reciprocal(1.0 - mul(x, x)))
    b = compute_beta(p)
    assert np.allclose(b.coeffs[:5], [1, 0, -0.5, 0, -0.125], rtol=0, atol=1e-16)


def test_h_examples():
    h = compute_h(pad([0, -2.0], 4), constant(3.0, 4))
    assert h.coeffs[:3].tolist() == [-4.0, 0.0, 1.0]
    assert compute_h(zero(4), pad([0, -1.0], 4)).coeffs.tolist() == [0, 1, 0, 0, 0]
    assert compute_h(zero(4), zero(4)) == zero(4)


def test_alpha_examples():
    alpha, k = compute_alpha(zero(10))
    assert alpha == constant(1.0, 10) and k == 1
    alpha, _ = compute_alpha(pad([0, 1.0], 12))
    want = {0: 1, 3: 1 / 6, 6: 1 / 180, 9: 1 / 12960, 12: 1 / 1710720}
    for d in range(13):
        assert alpha[d] == pytest.approx(want.get(d, 0.0), rel=1e-12, abs=1e-300)
    gamma = 0.7
    alpha, _ = compute_alpha(constant(gamma, 10))
    cosh = [gamma ** (k // 2) / math.factorial(k) if k % 2 == 0 else 0.0 for k in range(11)]
    assert np.allclose(alpha.coeffs, cosh, rtol=1e-14, atol=0)


def test_hermite_alpha():
    fac = compute_factors(pad([0, -2.0], 8), constant(3.0, 8))
    assert np.allclose(fac.alpha.coeffs[:5], [1, 0, -2, 0, 0.75], rtol=1e-15, atol=0)


@pytest.mark.parametrize("order", [4, 5, 17, 32, 64])
def test_alpha_iteration_bound(order):
    _, k = compute_alpha(pad([0.3, 1.0, -0.5], order))
    assert k <= math.ceil(order / 2) + 1


def test_alpha_budget_too_small():
    with pytest.raises(IterationLimitError):
        compute_alpha(pad([0, 1.0], 20), max_iters=3)


# homogeneous and particular solutions


def test_trivial_equation():
    b = solve(SecondOrderProblem(zero(6), zero(6), zero(6)))
    assert b.y1 == constant(1.0, 6)
    assert b.y2 == variable(6)
    assert b.yp == zero(6)
    assert b.abel_reference == constant(1.0, 6)


def test_trivial_equation_shifted_base_point():
    z = zero(5, 2.0)
    b = solve(SecondOrderProblem(z, z, z))
    assert b.y2.coeffs.tolist() == [0, 1, 0, 0, 0, 0]


def test_airy_y2_odd_family():
    y1, y2 = homogeneous_solutions(compute_factors(zero(13), pad([0, -1.0], 13)))
    assert y2[1] == 1.0
    assert y2[4] == pytest.approx(1 / 12, rel=1e-12)
    assert y2[7] == pytest.approx(1 / 504, rel=1e-12)
    assert y2[10] == pytest.approx(1 / 45360, rel=1e-12)
    for d in range(14):
        if d % 3 != 1:
            assert abs(y2[d]) <= 1e-15


def test_hermite_y1():
    b = solve(hermite(3.0, 12))
    assert np.allclose(b.y1.coeffs[:5], [1, 0, -1.5, 0, -0.125], rtol=1e-14, atol=0)


def test_particular_zero_forcing():
    fac = compute_factors(pad([0.5], 8), pad([1.0, 0.2], 8))
    assert particular_solution(fac, zero(8)) == zero(8)


def test_particular_one_minus_cos():
    order = 24
    prob = SecondOrderProblem(zero(order), constant(1.0, order), constant(1.0, order))
    yp = solve(prob).yp
    want = constant(1.0, order) - cos_series(order)
    assert approx_equal(yp, want, 1e-12, 20)
    assert yp[0] == 0.0 and yp[1] == 0.0
    # independent numeric integration from zero initial data
    xs = np.linspace(0.0, 1.0, 6)
    sol = solve_ivp(lambda t, u: [u[1], 1.0 - u[0]], (0, 1), [0.0, 0.0], t_eval=xs, rtol=1e-12, atol=1e-13)
    assert np.allclose(yp(xs), sol.y[0], rtol=0, atol=1e-9)


def test_particular_constant_coefficients():
    # y'' + 3y' + 2y = 2 has yp = 1 + exp(-2x) - 2 exp(-x)
    order = 28
    prob = SecondOrderProblem(constant(3.0, order), constant(2.0, order), constant(2.0, order))
    yp = solve(prob).yp
    assert np.allclose(yp.coeffs[:5], [0, 0, 1, -1, 7 / 12], rtol=1e-14, atol=1e-16)
    xs = np.linspace(0, 1, 5)
    assert np.allclose(yp(xs), 1 + np.exp(-2 * xs) - 2 * np.exp(-xs), rtol=0, atol=1e-10)


def test_constant_coefficients_span_exponentials():
    order = 32
    b = solve(SecondOrderProblem(constant(3.0, order), constant(2.0, order), zero(order)))
    xs = np.linspace(0, 1, 9)
    for r in (-1.0, -2.0):
        c1, c2 = np.linalg.solve([[b.y1[0], b.y2[0]], [b.y1[1], b.y2[1]]], [1.0, r])
        assert np.allclose(c1 * b.y1(xs) + c2 * b.y2(xs), np.exp(r * xs), rtol=0, atol=1e-8)


def test_airy_against_scipy():
    order = 40
    b = solve(airy_problem(order))
    xs = np.linspace(-1, 1, 9)
    ai, aip, bi, bip = airy(xs)
    ai0, aip0, bi0, bip0 = airy(0.0)
    m = [[b.y1[0], b.y2[0]], [b.y1[1], b.y2[1]]]
    for g, v, dv in ((ai, ai0, aip0), (bi, bi0, bip0)):
        c = np.linalg.solve(m, [v, dv])
        assert np.allclose(c[0] * b.y1(xs) + c[1] * b.y2(xs), g, rtol=0, atol=1e-12)


# residuals and Wronskian


def test_airy_residual():
    prob = airy_problem(24)
    b = solve(prob)
    assert residual_second_order(prob, b.y1, 1e-12, homogeneous=True).passed
    assert residual_second_order(prob, b.y2, 1e-12, homogeneous=True).passed


def test_residual_trivial_and_corrupted():
    z = zero(8)
    prob = SecondOrderProblem(z, z, z)
    assert residual_second_order(prob, constant(1.0, 8)).max_residual == 0.0
    prob = airy_problem(16)
    y1 = solve(prob).y1
    c = y1.coeffs.copy()
    c[3] += 1.0
    rep = residual_second_order(prob, Series(c), homogeneous=True)
    assert rep.max_residual >= 1.0 and rep.verified_degree == 14


def test_wronskian_examples():
    assert wronskian(constant(1.0, 6), variable(6)).coeffs[:6].tolist() == [1, 0, 0, 0, 0, 0]
    w = wronskian(cos_series(20), sin_series(20))
    assert approx_equal(w, constant(1.0, 20), 1e-15, 18)


@st.composite
def polynomial_problems(draw, order=24):
    p = draw(st.lists(coef, min_size=1, max_size=3))
    q = draw(st.lists(coef, min_size=1, max_size=3))
    f = draw(st.lists(coef, min_size=1, max_size=3))
    return SecondOrderProblem(pad(p, order), pad(q, order), pad(f, order))


@settings(max_examples=30, deadline=None)
@given(polynomial_problems())
def test_invariants_on_random_polynomial_problems(prob):
    b = solve(prob)
    n = prob.order
    fac = b.factors
    assert beta_condition_residual(fac.beta, prob.p).passed
    assert alpha_condition_residual(fac.alpha, fac.h).passed
    for y, hom in ((b.y1, True), (b.y2, True), (b.yp, False)):
        assert residual_second_order(prob, y, 1e-10, homogeneous=hom).passed
    assert approx_equal(wronskian(b.y1, b.y2), b.abel_reference, 1e-10, n - 2)
    assert b.y1[0] == 1.0 and b.y2[0] == 0.0 and b.y2[1] == 1.0
    assert b.yp[0] == 0.0 and b.yp[1] == 0.0
    assert fac.beta[0] == 1.0 and fac.alpha[0] == 1.0 and fac.alpha[1] == 0.0
    assert fac.alpha_iterations <= math.ceil(n / 2) + 1


def test_combine_weights():
    b = solve(airy_problem(12))
    y = b.combine(c1=2.0, c2=3.0)
    assert y == 3.0 * b.y1 + 2.0 * b.y2 + b.yp


# working precision


def legendre(l, order):
    x = variable(order)
    g = reciprocal(1.0 - mul(x, x))
    return SecondOrderProblem(mul(-2.0 * x, g), l * (l + 1) * g, zero(order))


def test_wide_precision_when_alpha_nearly_vanishes():
    prob = legendre(3.0, 32)
    b = solve(prob)
    assert b.working_precision > 53
    assert b.y1.precision == 53 and b.y2.precision == 53
    assert residual_second_order(prob, b.y2, 1e-10, homogeneous=True).passed
    narrow = solve(prob, precision=53)
    assert not residual_second_order(prob, narrow.y2, 1e-10, homogeneous=True).passed


def test_binary64_kept_for_benign_problems():
    assert solve(airy_problem(32)).working_precision == 53


# first-order reduction


def test_reduced_first_order_reproduces_y2():
    order = 24
    prob = airy_problem(order)
    b = solve(prob)
    red = reduced_first_order(b.factors, prob.f, first_integral=1.0)
    y = solve_integrating_factor(red)
    assert residual_first_order(red, y, 1e-12).passed
    assert residual_second_order(prob, y, 1e-9, homogeneous=True).passed
    assert approx_equal(y, b.y2, 1e-12)
