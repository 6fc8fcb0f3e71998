"""
Second-order linear equations ``y'' + p y' + q y = f`` by recursive integrating factors.

Multiplying the equation by ``alpha * beta`` turns it into an exact
derivative when

    beta' = beta * p / 2              (so beta = exp(int p/2))
    alpha'' = h * alpha,   h = -q + p'/2 + p**2/4

``beta`` is a plain exponential. ``alpha`` is found by iterating its double
integral form ``alpha = 1 + int int h alpha`` to a fixed point. The general
solution then follows from a single first-order integration:

    y = (alpha/beta) * [C2 + C1 int 1/alpha**2 + int (1/alpha**2) int alpha beta f]

The solver returns the canonical basis ``y1 = alpha/beta`` and
``y2 = y1 * int 1/alpha**2`` (``y1(x0) = 1``, ``y2(x0) = 0``, ``y2'(x0) = 1``)
plus the particular solution with zero initial data.

When ``alpha`` has a zero close to the base point the coefficients of
``1/alpha**2`` grow like ``R**-k`` while ``y2`` stays moderate, so ``y2`` and
``yp`` come out of heavy cancellation. :func:`solve` measures that growth
and, when binary64 would not survive it, reruns the construction with wider
mpmath coefficients before rounding the results back to binary64.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .errors import IterationLimitError
from .first_order import FirstOrderProblem, ResidualReport, residual_report
from .series import (
    Series,
    antiderivative,
    check_compatible,
    derivative,
    exp_series,
    mul,
    neg,
    one,
    reciprocal,
    scale,
    sub,
    to_float,
    to_precision,
    zero,
)


@dataclass(frozen=True)
class SecondOrderProblem:
    p: Series
    q: Series
    f: Series

    def __post_init__(self):
        check_compatible(self.p, self.q, self.f)

    @property
    def base_point(self) -> float:
        return self.p.base_point

    @property
    def order(self) -> int:
        return self.p.order


@dataclass(frozen=True)
class FactorBundle:
    alpha: Series
    beta: Series
    h: Series
    alpha_iterations: int


@dataclass(frozen=True)
class SolutionBundle:
    y1: Series
    y2: Series
    yp: Series
    abel_reference: Series
    factors: FactorBundle | None = None
    working_precision: int = 53

    def combine(self, c1: float = 0.0, c2: float = 0.0) -> Series:
        """General solution ``c2*y1 + c1*y2 + yp``.

        The weights follow the closed form above: ``c2`` multiplies
        ``alpha/beta`` and ``c1`` its companion.
        """
        return scale(self.y1, c2) + scale(self.y2, c1) + self.yp


def compute_beta(p: Series) -> Series:
    return exp_series(antiderivative(scale(p, 0.5)))


def compute_h(p: Series, q: Series) -> Series:
    """``-q + p'/2 + p**2/4``; the top degree is unreliable (one derivative)."""
    check_compatible(p, q)
    return neg(q) + scale(derivative(p), 0.5) + scale(mul(p, p), 0.25)


def alpha_iterates(h: Series) -> Iterator[Series]:
    """Successive substitutions ``alpha_{k+1} = 1 + int int h alpha_k`` from ``alpha_0 = 1``."""
    unit = one(h.order, h.base_point)
    alpha = unit
    while True:
        alpha = unit + antiderivative(antiderivative(mul(h, alpha)))
        yield alpha


def compute_alpha(h: Series, max_iters: int | None = None) -> tuple[Series, int]:
    """Fixed point of the alpha recursion with ``alpha(x0) = 1``, ``alpha'(x0) = 0``.

    Each pass freezes two more degrees, so ``ceil(order/2) + 1`` passes
    (the default budget) always reach bit-level stability.
    """
    if max_iters is None:
        max_iters = math.ceil(h.order / 2) + 1
    prev = one(h.order, h.base_point)
    for k, alpha in enumerate(alpha_iterates(h), start=1):
        if alpha == prev:
            return alpha, k
        if k >= max_iters:
            break
        prev = alpha
    raise IterationLimitError(
        f"alpha recursion not stable after {max_iters} iterations (order {h.order})"
    )


def compute_factors(p: Series, q: Series, max_iters: int | None = None) -> FactorBundle:
    beta = compute_beta(p)
    h = compute_h(p, q)
    alpha, iters = compute_alpha(h, max_iters)
    return FactorBundle(alpha=alpha, beta=beta, h=h, alpha_iterations=iters)


def homogeneous_solutions(factors: FactorBundle) -> tuple[Series, Series]:
    y1 = mul(factors.alpha, reciprocal(factors.beta))
    v = antiderivative(reciprocal(mul(factors.alpha, factors.alpha)))
    return y1, mul(y1, v)


def particular_solution(factors: FactorBundle, f: Series) -> Series:
    """Particular solution with ``yp(x0) = yp'(x0) = 0``."""
    alpha, beta = factors.alpha, factors.beta
    inner = antiderivative(mul(mul(alpha, beta), f))
    outer = antiderivative(mul(reciprocal(mul(alpha, alpha)), inner))
    y1 = mul(alpha, reciprocal(beta))
    return mul(y1, outer)


# binary64 is kept while 1/alpha**2 stays below this many bits of growth
_FLOAT_HEADROOM_BITS = 8
_GUARD_BITS = 40


def working_precision(alpha: Series) -> int:
    """Bits needed to build ``y2``, ``yp`` from ``alpha`` to about binary64 accuracy.

    Returns 53 when the largest coefficient of ``1/alpha**2`` is modest,
    otherwise 53 plus the bits lost to cancellation plus a guard.
    """
    v = reciprocal(mul(alpha, alpha))
    growth = max(1.0, float(max(abs(c) for c in v.coeffs)))
    lost = math.ceil(math.log2(growth))
    if lost <= _FLOAT_HEADROOM_BITS:
        return 53
    return 53 + lost + _GUARD_BITS


def _solve_at(prob: SecondOrderProblem, max_iters: int | None):
    factors = compute_factors(prob.p, prob.q, max_iters)
    y1, y2 = homogeneous_solutions(factors)
    yp = particular_solution(factors, prob.f)
    return factors, y1, y2, yp


def _round_factors(fac: FactorBundle) -> FactorBundle:
    return FactorBundle(
        alpha=to_float(fac.alpha),
        beta=to_float(fac.beta),
        h=to_float(fac.h),
        alpha_iterations=fac.alpha_iterations,
    )


def solve(
    prob: SecondOrderProblem, max_iters: int | None = None, precision: int | None = None
) -> SolutionBundle:
    """Factors, canonical basis, particular solution and ``exp(-int p)``.

    ``precision`` fixes the working precision in bits; by default it is
    chosen by :func:`working_precision`. Results are always binary64.
    """
    factors, y1, y2, yp = _solve_at(prob, max_iters)
    bits = working_precision(factors.alpha) if precision is None else int(precision)
    if bits > 53:
        wide = SecondOrderProblem(*(to_precision(s, bits) for s in (prob.p, prob.q, prob.f)))
        factors, y1, y2, yp = _solve_at(wide, max_iters)
        factors = _round_factors(factors)
        y1, y2, yp = to_float(y1), to_float(y2), to_float(yp)
    abel = exp_series(neg(antiderivative(prob.p)))
    return SolutionBundle(
        y1=y1, y2=y2, yp=yp, abel_reference=abel, factors=factors, working_precision=max(bits, 53)
    )


def residual_second_order(
    prob: SecondOrderProblem, y: Series, tol: float = 1e-10, *, homogeneous: bool = False
) -> ResidualReport:
    """Residual of ``y'' + p y' + q y - f``; pass ``homogeneous=True`` for y1, y2."""
    check_compatible(prob.p, y)
    dy = derivative(y)
    d2y = derivative(dy)
    py = mul(prob.p, dy)
    qy = mul(prob.q, y)
    rhs = zero(prob.order, prob.base_point) if homogeneous else prob.f
    r = d2y + py + qy - rhs
    return residual_report(r, (d2y, py, qy, rhs), prob.order - 2, tol)


def wronskian(y1: Series, y2: Series) -> Series:
    """``y1 y2' - y1' y2``; valid through degree ``order - 1``."""
    check_compatible(y1, y2)
    return sub(mul(y1, derivative(y2)), mul(derivative(y1), y2))


def beta_condition_residual(beta: Series, p: Series, tol: float = 1e-12) -> ResidualReport:
    """Residual of ``beta' - beta p/2`` on degrees ``0..order-1``."""
    db = derivative(beta)
    bp = scale(mul(beta, p), 0.5)
    return residual_report(db - bp, (db, bp), beta.order - 1, tol)


def alpha_condition_residual(alpha: Series, h: Series, tol: float = 1e-12) -> ResidualReport:
    """Residual of ``alpha'' - h alpha`` on degrees ``0..order-2``."""
    d2a = derivative(derivative(alpha))
    ha = mul(h, alpha)
    return residual_report(d2a - ha, (d2a, ha), alpha.order - 2, tol)


def reduced_first_order(
    factors: FactorBundle,
    f: Series,
    first_integral: float = 1.0,
    initial_value: float = 0.0,
) -> FirstOrderProblem:
    """The first-order equation left after one exact integration.

        y' + (ln(beta/alpha))' y = (C + int alpha beta f) / (alpha beta)

    with ``C = first_integral`` and ``y(x0) = initial_value``. Its solution
    is ``initial_value * y1 + first_integral * y2 + yp``.
    """
    alpha, beta = factors.alpha, factors.beta
    p_red = sub(
        mul(derivative(beta), reciprocal(beta)),
        mul(derivative(alpha), reciprocal(alpha)),
    )
    ab = mul(alpha, beta)
    rhs = mul(first_integral + antiderivative(mul(ab, f)), reciprocal(ab))
    return FirstOrderProblem(p=p_red, f=rhs, c1=initial_value)
