import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recint.errors import IterationLimitError
from recint.first_order import (
    FirstOrderProblem,
    nested_integral,
    nested_integral_identity_check,
    recursive_iterates,
    residual_first_order,
    solve_integrating_factor,
    solve_recursive,
)
from recint.series import Series, approx_equal, constant, zero

coef = st.floats(-2.0, 2.0, allow_nan=False, allow_subnormal=False)


def pad(c, order):
    return Series(list(c) + [0.0] * (order + 1 - len(c)))


@st.composite
def problems(draw, order=32):
    p = draw(st.lists(coef, min_size=1, max_size=5))
    f = draw(st.lists(coef, min_size=1, max_size=5))
    c1 = draw(st.sampled_from([-1.0, 0.0, 1.0, 2.0]))
    return FirstOrderProblem(pad(p, order), pad(f, order), c1)


def exp_minus_x(order):
    return [(-1.0) ** k / math.factorial(k) for k in range(order + 1)]


def test_integrating_factor_decay():
    y = solve_integrating_factor(FirstOrderProblem(constant(1.0, 10), zero(10), 1.0))
    assert np.allclose(y.coeffs, exp_minus_x(10), rtol=0, atol=1e-16)


def test_integrating_factor_constant():
    y = solve_integrating_factor(FirstOrderProblem(zero(6), zero(6), 5.0))
    assert y == constant(5.0, 6)


def test_integrating_factor_one_minus_decay():
    # y = 1 - exp(-x) solves y' + y = 1, y(0) = 0
    order = 12
    y = solve_integrating_factor(FirstOrderProblem(constant(1.0, order), constant(1.0, order), 0.0))
    want = [1.0 - c if k == 0 else -c for k, c in enumerate(exp_minus_x(order))]
    assert np.allclose(y.coeffs, want, rtol=0, atol=1e-16)
    xs = np.linspace(0.0, 0.5, 6)
    assert np.allclose(y(xs), 1 - np.exp(-xs), rtol=0, atol=1e-12)


def test_recursive_constant_fixed_point_in_one_step():
    y, k = solve_recursive(FirstOrderProblem(zero(8), zero(8), 3.0))
    assert y == constant(3.0, 8) and k == 1


def test_recursive_decay_within_bound():
    prob = FirstOrderProblem(constant(1.0, 8), zero(8), 1.0)
    y, k = solve_recursive(prob)
    assert k <= 9
    assert approx_equal(y, solve_integrating_factor(prob), 1e-15)


def test_recursive_budget_too_small():
    prob = FirstOrderProblem(constant(1.0, 8), zero(8), 1.0)
    with pytest.raises(IterationLimitError):
        solve_recursive(prob, max_iters=3)


@settings(max_examples=40, deadline=None)
@given(problems())
def test_recursive_equals_integrating_factor(prob):
    y, k = solve_recursive(prob)
    assert k <= prob.order + 1
    assert approx_equal(y, solve_integrating_factor(prob), 1e-12)


@settings(max_examples=20, deadline=None)
@given(problems(order=16))
def test_iterates_freeze_one_degree_per_step(prob):
    iterates = []
    for k, y in enumerate(recursive_iterates(prob), start=1):
        iterates.append(y.coeffs.copy())
        if k > prob.order + 2:
            break
    for k, yk in enumerate(iterates, start=1):
        for later in iterates[k:]:
            assert np.array_equal(later[:k], yk[:k])


@settings(max_examples=30, deadline=None)
@given(problems(order=20))
def test_base_point_value_and_residuals(prob):
    y_rec, _ = solve_recursive(prob)
    y_if = solve_integrating_factor(prob)
    for y in (y_rec, y_if):
        assert y.coeffs[0] == prob.c1
        assert residual_first_order(prob, y, 1e-12).passed


def test_residual_zero_for_constant():
    prob = FirstOrderProblem(zero(5), zero(5), 2.0)
    rep = residual_first_order(prob, constant(2.0, 5))
    assert rep.max_residual == 0.0 and rep.verified_degree == 4


def test_residual_detects_corruption():
    prob = FirstOrderProblem(pad([0.5, -1.0], 10), pad([1.0, 0.0, 2.0], 10), 1.0)
    y = solve_integrating_factor(prob)
    c = y.coeffs.copy()
    c[2] += 1.0
    assert residual_first_order(prob, Series(c), 1e-12).max_residual >= 0.5


def test_residual_window_excludes_top_degree():
    prob = FirstOrderProblem(zero(6), zero(6), 0.0)
    c = np.zeros(7)
    c[6] = 1.0  # its derivative lands on degree 5, inside the window
    assert residual_first_order(prob, Series(c)).max_residual == 6.0
    rep = residual_first_order(prob, Series(np.zeros(7)))
    assert len(rep.residual_coeffs) == 7 and rep.verified_degree == 5


def test_nested_integral_examples():
    p = pad([0.3, -1.0, 2.0], 12)
    assert nested_integral_identity_check(p, 1)
    j3 = nested_integral(constant(1.0, 8), 3)
    assert np.allclose(j3.coeffs, [0, 0, 0, 1 / 6, 0, 0, 0, 0, 0], rtol=0, atol=1e-17)
    assert nested_integral_identity_check(pad([1.0, 0.5, -0.25, 2.0], 40), 4)


def test_nested_integral_range():
    p = pad([1.0, 1.0], 10)
    with pytest.raises(ValueError):
        nested_integral_identity_check(p, 0)
    with pytest.raises(ValueError):
        nested_integral_identity_check(p, 6)


@settings(max_examples=30, deadline=None)
@given(st.lists(coef, min_size=1, max_size=4), st.integers(1, 5))
def test_nested_integral_identity_random(p, i):
    assert nested_integral_identity_check(pad(p, 40), i)
