"""
Fixed-order truncated power series.

A :class:`Series` holds the coefficients ``c[0..N]`` of

    c[0] + c[1]*(x - x0) + c[2]*(x - x0)**2 + ... + c[N]*(x - x0)**N

about an explicit base point ``x0``. Every operation keeps the order ``N``
fixed: products drop degrees above ``N``, derivatives lose the top degree
(it is set to zero) and antiderivatives drop the input's top coefficient.
Callers that certify results through derivatives must restrict their claims
to the degrees that survive (see the residual reports in the solvers).

Binary operations require both operands to share base point and order;
anything else raises :class:`~recint.errors.SeriesMismatchError`.

Coefficients are binary64 by default. :func:`to_precision` re-expresses a
series with mpmath coefficients at a chosen bit width (each width gets its
own isolated mpmath context) and every operation below works unchanged on
such series; :func:`to_float` rounds back.

    >>> x = variable(4)
    >>> exp_series(x).coeffs.tolist()
    [1.0, 1.0, 0.5, 0.16666666666666666, 0.041666666666666664]
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import mpmath
import numpy as np

from .errors import NumericRangeError, SeriesMismatchError, SingularBasePointError

__all__ = [
    "Series",
    "Comparison",
    "zero",
    "one",
    "constant",
    "variable",
    "resize",
    "check_compatible",
    "add",
    "sub",
    "neg",
    "scale",
    "mul",
    "power",
    "derivative",
    "antiderivative",
    "exp_series",
    "reciprocal",
    "evaluate",
    "approx_equal",
    "to_dict",
    "from_dict",
    "to_precision",
    "to_float",
]


class Series:
    """Immutable truncated power series about ``base_point``.

    The order is ``len(coeffs) - 1``. Coefficients are stored as a read-only
    array (float64, or object holding mpmath numbers) and must all be finite.
    """

    __slots__ = ("_coeffs", "_base_point")

    def __init__(self, coeffs: Iterable[float], base_point: float = 0.0):
        c = np.array(coeffs)
        if c.dtype != object:
            c = c.astype(np.float64)
        c = c.reshape(-1)
        if c.size == 0:
            raise ValueError("a series needs at least one coefficient")
        if not _all_finite(c):
            raise NumericRangeError("series coefficients must be finite")
        base_point = float(base_point)
        if not math.isfinite(base_point):
            raise ValueError("base point must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "_coeffs", c)
        object.__setattr__(self, "_base_point", base_point)

    def __setattr__(self, name, value):
        raise AttributeError("Series is immutable")

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def base_point(self) -> float:
        return self._base_point

    @property
    def order(self) -> int:
        return self._coeffs.size - 1

    @property
    def precision(self) -> int:
        """Working precision of the coefficients in bits (53 for binary64)."""
        if self._coeffs.dtype != object:
            return 53
        return self._coeffs[0].context.prec

    def __len__(self) -> int:
        return self._coeffs.size

    def __getitem__(self, k):
        return self._coeffs[k]

    def __iter__(self):
        return iter(self._coeffs.tolist())

    def __repr__(self) -> str:
        coeffs = [float(c) for c in self._coeffs]
        return f"Series({coeffs!r}, base_point={self._base_point!r})"

    def __eq__(self, other) -> bool:
        # bit-level equality; the fixed-point solvers rely on it
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self._base_point == other._base_point
            and self._coeffs.shape == other._coeffs.shape
            and bool(np.array_equal(self._coeffs, other._coeffs))
        )

    __hash__ = None

    def __call__(self, x):
        return evaluate(self, x)

    def __add__(self, other):
        if isinstance(other, Series):
            return add(self, other)
        return add(self, constant(other, self.order, self.base_point))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Series):
            return sub(self, other)
        return sub(self, constant(other, self.order, self.base_point))

    def __rsub__(self, other):
        return sub(constant(other, self.order, self.base_point), self)

    def __neg__(self):
        return neg(self)

    def __mul__(self, other):
        if isinstance(other, Series):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Series):
            return mul(self, reciprocal(other))
        return scale(self, 1.0 / other)


_FLOAT_MAX = 1.7976931348623157e308


def _all_finite(c: np.ndarray) -> bool:
    if c.dtype != object:
        return bool(np.all(np.isfinite(c)))
    return all(mpmath.isfinite(v) for v in c)


def _like(s: Series, coeffs) -> Series:
    return Series(coeffs, s.base_point)


def _zeros_like(s: Series) -> np.ndarray:
    if s.coeffs.dtype != object:
        return np.zeros(s.order + 1)
    zero_ = s.coeffs[0].context.zero
    return np.array([zero_] * (s.order + 1), dtype=object)


@lru_cache(maxsize=None)
def _context(bits: int) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


def to_precision(s: Series, bits: int) -> Series:
    """Re-express ``s`` with ``bits``-bit mpmath coefficients (exact widening of floats)."""
    ctx = _context(int(bits))
    return _like(s, np.array([ctx.mpf(c) for c in s.coeffs], dtype=object))


def to_float(s: Series) -> Series:
    """Round coefficients to binary64."""
    if s.coeffs.dtype != object:
        return s
    return _like(s, np.array([float(c) for c in s.coeffs]))


def zero(order: int, base_point: float = 0.0) -> Series:
    return Series(np.zeros(order + 1), base_point)


def one(order: int, base_point: float = 0.0) -> Series:
    return constant(1.0, order, base_point)


def constant(value: float, order: int, base_point: float = 0.0) -> Series:
    c = np.zeros(order + 1)
    c[0] = value
    return Series(c, base_point)


def variable(order: int, base_point: float = 0.0) -> Series:
    """The identity function ``x`` expanded about ``base_point``."""
    c = np.zeros(order + 1)
    c[0] = base_point
    if order >= 1:
        c[1] = 1.0
    return Series(c, base_point)


def resize(s: Series, order: int) -> Series:
    """Truncate, or zero-pad, to ``order``.

    Zero padding is only meaningful when ``s`` is known to be a polynomial.
    """
    if order <= s.order:
        return _like(s, s.coeffs[: order + 1])
    pad = _zeros_like(s)[:1].repeat(order - s.order)
    return _like(s, np.concatenate([s.coeffs, pad]))


def check_compatible(*series: Series) -> None:
    first = series[0]
    for s in series[1:]:
        if s.base_point != first.base_point:
            raise SeriesMismatchError(
                f"base points differ: {first.base_point!r} vs {s.base_point!r}"
            )
        if s.order != first.order:
            raise SeriesMismatchError(f"orders differ: {first.order} vs {s.order}")


def add(a: Series, b: Series) -> Series:
    check_compatible(a, b)
    return _like(a, a.coeffs + b.coeffs)


def sub(a: Series, b: Series) -> Series:
    check_compatible(a, b)
    return _like(a, a.coeffs - b.coeffs)


def neg(s: Series) -> Series:
    return _like(s, -s.coeffs)


def scale(s: Series, factor: float) -> Series:
    if not isinstance(factor, mpmath.ctx_mp_python.mpf):
        factor = float(factor)
    return _like(s, s.coeffs * factor)


def mul(a: Series, b: Series) -> Series:
    """Cauchy product truncated at the common order."""
    check_compatible(a, b)
    return _like(a, np.convolve(a.coeffs, b.coeffs)[: a.order + 1])


def power(s: Series, n: int) -> Series:
    if n < 0:
        raise ValueError("negative powers: use reciprocal()")
    result = one(s.order, s.base_point)
    for _ in range(n):
        result = mul(result, s)
    return result


def derivative(s: Series) -> Series:
    """Term-wise derivative; the top coefficient of the result is zero."""
    if s.order < 1:
        raise ValueError("derivative needs order >= 1")
    c = _zeros_like(s)
    k = np.arange(1, s.order + 1)
    c[:-1] = k * s.coeffs[1:]
    return _like(s, c)


def antiderivative(s: Series) -> Series:
    """Definite integral from the base point; the input's top coefficient is dropped."""
    c = _zeros_like(s)
    k = np.arange(1, s.order + 1)
    c[1:] = s.coeffs[:-1] / k
    return _like(s, c)


def exp_series(s: Series) -> Series:
    """Series of ``exp(s)`` from the recurrence implied by ``e' = s' e``."""
    s0 = s.coeffs[0]
    try:
        if s.coeffs.dtype == object:
            e0 = s0.context.exp(s0)
            if not mpmath.isfinite(e0) or abs(e0) > _FLOAT_MAX:
                raise OverflowError
        else:
            e0 = math.exp(s0)
    except OverflowError:
        raise NumericRangeError(
            f"exp of constant term {s.coeffs[0]!r} overflows"
        ) from None
    n = s.order
    js = np.arange(n + 1) * s.coeffs
    e = _zeros_like(s)
    e[0] = e0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n + 1):
            e[k] = np.dot(js[1 : k + 1], e[k - 1 :: -1]) / k
    return _like(s, e)


def reciprocal(s: Series) -> Series:
    """Multiplicative inverse; requires a nonzero value at the base point."""
    s0 = s.coeffs[0]
    if s0 == 0.0:
        raise SingularBasePointError(
            f"series vanishes at base point {s.base_point!r}; no reciprocal exists"
        )
    n = s.order
    r = _zeros_like(s)
    r[0] = 1 / s0
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n + 1):
            r[k] = -np.dot(s.coeffs[1 : k + 1], r[k - 1 :: -1]) / s0
    return _like(s, r)


def evaluate(s: Series, x):
    """Horner evaluation at ``x`` (scalar or array)."""
    t = np.asarray(x, dtype=np.float64) - s.base_point
    acc = np.zeros_like(t)
    for c in to_float(s).coeffs[::-1]:
        acc = acc * t + c
    if acc.ndim == 0:
        return float(acc)
    return acc


@dataclass(frozen=True)
class Comparison:
    """Result of :func:`approx_equal`; truthy iff the series agree."""

    equal: bool
    first_failure: int | None
    max_error: float
    scale: float

    def __bool__(self) -> bool:
        return self.equal


def approx_equal(a: Series, b: Series, tol: float, up_to: int | None = None) -> Comparison:
    """Compare coefficients ``0..up_to`` relative to the operands' magnitude.

    Degree ``k`` passes when ``|a_k - b_k| <= tol * max(1, max|a_i|, max|b_i|)``,
    the maxima taken over the compared window.
    """
    if a.base_point != b.base_point:
        raise SeriesMismatchError("base points differ")
    top = min(a.order, b.order)
    if up_to is None:
        up_to = top
    if up_to > top:
        raise ValueError(f"up_to={up_to} exceeds the common order {top}")
    ca = a.coeffs[: up_to + 1]
    cb = b.coeffs[: up_to + 1]
    sc = max(1.0, float(np.max(np.abs(ca))), float(np.max(np.abs(cb))))
    diff = np.abs(ca - cb).astype(np.float64)
    bad = np.nonzero(diff > tol * sc)[0]
    first = int(bad[0]) if bad.size else None
    return Comparison(first is None, first, float(np.max(diff)), sc)


def to_dict(s: Series) -> dict:
    return {"base_point": s.base_point, "coeffs": [float(c) for c in s.coeffs]}


def from_dict(d: dict) -> Series:
    try:
        return Series(d["coeffs"], d.get("base_point", 0.0))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"not a serialized series: {d!r}") from exc
