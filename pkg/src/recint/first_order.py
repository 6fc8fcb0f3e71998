"""
First-order linear equations ``y' + p(x) y = f(x)``.

Two independent solvers are provided. :func:`solve_integrating_factor` uses
the classical closed form with ``mu = exp(int p)``. :func:`solve_recursive`
never forms an exponential: it substitutes the integral form
``y = C1 + int (f - p y)`` into itself until the coefficients stop changing.
Agreement between the two is the central check of this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import IterationLimitError
from .series import (
    Series,
    antiderivative,
    approx_equal,
    check_compatible,
    constant,
    derivative,
    exp_series,
    mul,
    neg,
    power,
    scale,
    sub,
)


@dataclass(frozen=True)
class FirstOrderProblem:
    p: Series
    f: Series
    c1: float = 0.0

    def __post_init__(self):
        check_compatible(self.p, self.f)

    @property
    def base_point(self) -> float:
        return self.p.base_point

    @property
    def order(self) -> int:
        return self.p.order


@dataclass(frozen=True)
class ResidualReport:
    """Per-degree residual of a candidate solution substituted into its ODE.

    ``verified_degree`` is the highest degree the report certifies: the order
    minus the number of derivatives in the residual expression. ``scale`` is
    ``max(1, largest coefficient of any term of the residual)`` over the
    certified window, and the check passes when
    ``max_residual <= tolerance_used * scale``.
    """

    residual_coeffs: tuple[float, ...]
    verified_degree: int
    max_residual: float
    tolerance_used: float
    scale: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance_used * self.scale

    def as_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "verified_degree": self.verified_degree,
            "scale": self.scale,
            "tolerance": self.tolerance_used,
            "pass": self.passed,
        }


def residual_report(
    residual: Series, terms: Sequence[Series], verified_degree: int, tol: float
) -> ResidualReport:
    """Build a report for ``residual`` whose constituent series are ``terms``."""
    window = slice(0, verified_degree + 1)
    r = np.abs(residual.coeffs)
    sc = 1.0
    for t in terms:
        sc = max(sc, float(np.max(np.abs(t.coeffs[window]))))
    return ResidualReport(
        residual_coeffs=tuple(r.tolist()),
        verified_degree=verified_degree,
        max_residual=float(np.max(r[window])),
        tolerance_used=tol,
        scale=sc,
    )


def solve_integrating_factor(prob: FirstOrderProblem) -> Series:
    """Closed form ``y = exp(-P) (C1 + int exp(P) f)`` with ``P = int p``."""
    big_p = antiderivative(prob.p)
    mu = exp_series(big_p)
    inv_mu = exp_series(neg(big_p))
    forced = mul(inv_mu, antiderivative(mul(mu, prob.f)))
    return scale(inv_mu, prob.c1) + forced


def recursive_iterates(prob: FirstOrderProblem) -> Iterator[Series]:
    """Yield successive substitutions ``y_{k+1} = C1 + int (f - p y_k)``, from ``y_0 = C1``.

    The generator is infinite; ``y_k`` is exact in degrees ``0..k``.
    """
    start = constant(prob.c1, prob.order, prob.base_point)
    y = start
    while True:
        y = start + antiderivative(sub(prob.f, mul(prob.p, y)))
        yield y


def solve_recursive(prob: FirstOrderProblem, max_iters: int | None = None) -> tuple[Series, int]:
    """Iterate the integral form to its fixed point.

    Returns the first iterate bit-identical to its predecessor, and the number
    of substitutions performed. ``order + 1`` substitutions always suffice,
    which is the default budget.
    """
    if max_iters is None:
        max_iters = prob.order + 1
    prev = constant(prob.c1, prob.order, prob.base_point)
    for k, y in enumerate(recursive_iterates(prob), start=1):
        if y == prev:
            return y, k
        if k >= max_iters:
            break
        prev = y
    raise IterationLimitError(
        f"recursion not stable after {max_iters} iterations (order {prob.order} "
        f"needs up to {prob.order + 1})"
    )


def residual_first_order(prob: FirstOrderProblem, y: Series, tol: float = 1e-12) -> ResidualReport:
    check_compatible(prob.p, y)
    dy = derivative(y)
    py = mul(prob.p, y)
    r = dy + py - prob.f
    return residual_report(r, (dy, py, prob.f), prob.order - 1, tol)


def polynomial_degree(s: Series) -> int:
    nz = np.nonzero(s.coeffs)[0]
    return int(nz[-1]) if nz.size else 0


def nested_integral(p: Series, i: int) -> Series:
    """``J_i`` with ``J_0 = 1`` and ``J_m = int p J_{m-1}``: the i-fold ordered integral of p."""
    j = constant(1.0, p.order, p.base_point)
    for _ in range(i):
        j = antiderivative(mul(p, j))
    return j


def nested_integral_identity_check(p: Series, i: int, tol: float = 1e-10) -> bool:
    """Check that the i-fold ordered integral of p equals ``(int p)**i / i!``.

    Only degrees ``0..order-i`` are compared.
    """
    limit = p.order // (polynomial_degree(p) + 1)
    if not 1 <= i <= limit:
        raise ValueError(f"i must lie in [1, {limit}] for this p, got {i}")
    lhs = nested_integral(p, i)
    rhs = scale(power(antiderivative(p), i), 1.0 / math.factorial(i))
    return approx_equal(lhs, rhs, tol, p.order - i).equal
