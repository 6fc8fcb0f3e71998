"""
Named second-order equations with golden coefficients and closed-form references.

Each constructor returns a :class:`CatalogEntry`: a problem builder for any
order (and base point), the coefficients the recursion is expected to
reproduce, and, where a closed form exists, reference basis functions.
:func:`verify_entry` runs the whole battery of checks on one entry and
collects the outcome as report rows instead of raising.

Reference comparisons never compare raw coefficients against differently
normalized closed forms. The computed basis is first recombined to match the
reference's value and slope at the base point, then compared pointwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InvalidParameterError
from .first_order import ResidualReport
from .series import Series, approx_equal, constant, evaluate, mul, reciprocal, resize, variable, zero
from .second_order import (
    SecondOrderProblem,
    SolutionBundle,
    alpha_condition_residual,
    beta_condition_residual,
    residual_second_order,
    solve,
    wronskian,
)

GOLDEN_TOL = 1e-12
REFERENCE_TOL = 1e-8
POLYNOMIAL_RESIDUAL_TOL = 1e-12
RATIONAL_RESIDUAL_TOL = 1e-10

FSpec = Series | Sequence[float] | None


@dataclass(frozen=True)
class GoldenCoefficient:
    role: str  # one of alpha, beta, h, y1, y2
    degree: int
    value: float
    note: str


@dataclass(frozen=True)
class ReferenceBasis:
    """Two closed-form solutions of the homogeneous equation and their slopes."""

    funcs: tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray]]
    derivs: tuple[Callable[[float], float], Callable[[float], float]]
    note: str


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: Mapping[str, float]
    base_point: float
    interval: tuple[float, float]
    builder: Callable[[int, float], SecondOrderProblem] = field(repr=False)
    golden: tuple[GoldenCoefficient, ...] = ()
    reference: ReferenceBasis | None = None
    residual_tol: float = POLYNOMIAL_RESIDUAL_TOL

    def problem(self, order: int, base_point: float | None = None) -> SecondOrderProblem:
        return self.builder(order, self.base_point if base_point is None else base_point)

    def listing(self) -> dict:
        return {
            "name": self.name,
            "params": dict(self.params),
            "base_point": self.base_point,
            "interval": list(self.interval),
        }


def _forcing(f: FSpec, order: int, base_point: float) -> Series:
    if f is None:
        return zero(order, base_point)
    if isinstance(f, Series):
        if f.base_point != base_point:
            # polynomials re-expand exactly; anything else must be supplied at this point
            raise InvalidParameterError(
                f"forcing term is expanded about {f.base_point}, problem about {base_point}"
            )
        return resize(f, order)
    return resize(Series(f, base_point), order)


def _one_minus_x2_inv(order: int, base_point: float) -> tuple[Series, Series]:
    x = variable(order, base_point)
    return x, reciprocal(1.0 - mul(x, x))


# -- constant coefficients ----------------------------------------------------

def make_constant_coefficients(a: float, b: float, c: float, f: FSpec = None) -> CatalogEntry:
    """``y'' + (b/a) y' + (c/a) y = f`` with an exponential reference basis."""
    if a == 0:
        raise InvalidParameterError("leading coefficient a must be nonzero")
    a, b, c = float(a), float(b), float(c)

    def build(order: int, x0: float) -> SecondOrderProblem:
        return SecondOrderProblem(
            p=constant(b / a, order, x0),
            q=constant(c / a, order, x0),
            f=_forcing(f, order, x0),
        )

    h = (b * b - 4 * a * c) / (4 * a * a)
    golden = (
        GoldenCoefficient("alpha", 2, h / 2, "constant h: alpha = 1 + h x^2/2! + h^2 x^4/4! + ..."),
        GoldenCoefficient("alpha", 4, h * h / 24, "constant h: alpha = 1 + h x^2/2! + h^2 x^4/4! + ..."),
        GoldenCoefficient("beta", 1, b / (2 * a), "beta = exp(b x / 2a)"),
    )
    return CatalogEntry(
        name="constant",
        params={"a": a, "b": b, "c": c},
        base_point=0.0,
        interval=(0.0, 1.0),
        builder=build,
        golden=golden,
        reference=_exponential_basis(a, b, c),
    )


def _exponential_basis(a: float, b: float, c: float) -> ReferenceBasis | None:
    disc = b * b - 4 * a * c
    if disc > 0:
        r1 = (-b + math.sqrt(disc)) / (2 * a)
        r2 = (-b - math.sqrt(disc)) / (2 * a)
        return ReferenceBasis(
            funcs=(lambda x: np.exp(r1 * x), lambda x: np.exp(r2 * x)),
            derivs=(lambda x: r1 * math.exp(r1 * x), lambda x: r2 * math.exp(r2 * x)),
            note=f"exp({r1:g} x), exp({r2:g} x)",
        )
    if disc < 0:
        lam = -b / (2 * a)
        mu = math.sqrt(-disc) / (2 * a)
        return ReferenceBasis(
            funcs=(
                lambda x: np.exp(lam * x) * np.cos(mu * x),
                lambda x: np.exp(lam * x) * np.sin(mu * x),
            ),
            derivs=(
                lambda x: math.exp(lam * x) * (lam * math.cos(mu * x) - mu * math.sin(mu * x)),
                lambda x: math.exp(lam * x) * (lam * math.sin(mu * x) + mu * math.cos(mu * x)),
            ),
            note=f"exp({lam:g} x) cos({mu:g} x), exp({lam:g} x) sin({mu:g} x)",
        )
    return None


# -- Cauchy-Euler ---------------------------------------------------------------

def indicial_roots(a: float, b: float, c: float) -> tuple[complex, complex]:
    """Roots of ``a r(r-1) + b r + c = 0``."""
    disc = (b - a) ** 2 - 4 * a * c
    sq = complex(disc) ** 0.5
    return (-(b - a) + sq) / (2 * a), (-(b - a) - sq) / (2 * a)


def make_cauchy_euler(a: float, b: float, c: float, f: FSpec = None, base_point: float = 1.0) -> CatalogEntry:
    """``y'' + b/(a x) y' + c/(a x^2) y = f/x^2`` expanded about a regular point.

    ``f`` is the numerator of the forcing term; the builder divides it by
    ``x**2``. Expanding about ``x0 = 0`` raises SingularBasePointError.
    """
    if a == 0:
        raise InvalidParameterError("leading coefficient a must be nonzero")
    a, b, c = float(a), float(b), float(c)

    def build(order: int, x0: float) -> SecondOrderProblem:
        x = variable(order, x0)
        inv_x = reciprocal(x)
        inv_x2 = mul(inv_x, inv_x)
        return SecondOrderProblem(
            p=(b / a) * inv_x,
            q=(c / a) * inv_x2,
            f=mul(_forcing(f, order, x0), inv_x2),
        )

    return CatalogEntry(
        name="cauchy_euler",
        params={"a": a, "b": b, "c": c},
        base_point=float(base_point),
        interval=(0.7, 1.3),
        builder=build,
        reference=_power_basis(a, b, c),
        residual_tol=RATIONAL_RESIDUAL_TOL,
    )


def _power_basis(a: float, b: float, c: float) -> ReferenceBasis | None:
    disc = (b - a) ** 2 - 4 * a * c
    r1, r2 = indicial_roots(a, b, c)
    if disc > 0:
        r1, r2 = r1.real, r2.real
        return ReferenceBasis(
            funcs=(lambda x: np.power(x, r1), lambda x: np.power(x, r2)),
            derivs=(lambda x: r1 * x ** (r1 - 1), lambda x: r2 * x ** (r2 - 1)),
            note=f"x^{r1:g}, x^{r2:g}",
        )
    if disc < 0:
        lam, mu = r1.real, abs(r1.imag)
        return ReferenceBasis(
            funcs=(
                lambda x: np.power(x, lam) * np.cos(mu * np.log(x)),
                lambda x: np.power(x, lam) * np.sin(mu * np.log(x)),
            ),
            derivs=(
                lambda x: x ** (lam - 1) * (lam * math.cos(mu * math.log(x)) - mu * math.sin(mu * math.log(x))),
                lambda x: x ** (lam - 1) * (lam * math.sin(mu * math.log(x)) + mu * math.cos(mu * math.log(x))),
            ),
            note=f"x^{lam:g} cos({mu:g} ln x), x^{lam:g} sin({mu:g} ln x)",
        )
    # repeated root: logarithmic companion, residual-only
    return None


# -- Airy -------------------------------------------------------------------------

def make_airy(f: FSpec = None) -> CatalogEntry:
    """``y'' - x y = f``."""

    def build(order: int, x0: float) -> SecondOrderProblem:
        return SecondOrderProblem(
            p=zero(order, x0), q=-variable(order, x0), f=_forcing(f, order, x0)
        )

    alpha_note = "alpha = 1 + x^3/6 + x^6/180 + x^9/12960"
    golden = (
        GoldenCoefficient("alpha", 3, 1 / 6, alpha_note),
        GoldenCoefficient("alpha", 6, 1 / 180, alpha_note),
        GoldenCoefficient("alpha", 9, 1 / 12960, alpha_note),
        GoldenCoefficient("y1", 3, 1 / 6, "beta = 1, so y1 = alpha"),
        GoldenCoefficient("y1", 6, 1 / 180, "beta = 1, so y1 = alpha"),
        GoldenCoefficient("y1", 9, 1 / 12960, "beta = 1, so y1 = alpha"),
        GoldenCoefficient("y2", 4, 1 / 12, "second solution x + x^4/12 + x^7/504 + x^10/45360"),
        GoldenCoefficient("y2", 7, 1 / 504, "second solution x + x^4/12 + x^7/504 + x^10/45360"),
        GoldenCoefficient("y2", 10, 1 / 45360, "second solution x + x^4/12 + x^7/504 + x^10/45360"),
        GoldenCoefficient("h", 1, 1.0, "h = x"),
        GoldenCoefficient("beta", 0, 1.0, "beta = 1"),
    )
    return CatalogEntry(
        name="airy",
        params={},
        base_point=0.0,
        interval=(-1.0, 1.0),
        builder=build,
        golden=golden,
    )


# -- Legendre ---------------------------------------------------------------------

def make_legendre(l: float, f: FSpec = None) -> CatalogEntry:
    """``y'' - 2x/(1-x^2) y' + l(l+1)/(1-x^2) y = f``."""
    l = float(l)
    ll = l * (l + 1)

    def build(order: int, x0: float) -> SecondOrderProblem:
        x, w = _one_minus_x2_inv(order, x0)
        return SecondOrderProblem(p=-2.0 * mul(x, w), q=ll * w, f=_forcing(f, order, x0))

    golden = (
        GoldenCoefficient("beta", 2, -0.5, "beta = sqrt(1 - x^2)"),
        GoldenCoefficient("beta", 4, -0.125, "beta = sqrt(1 - x^2)"),
        GoldenCoefficient("alpha", 2, -(ll + 1) / 2, "alpha = 1 - (l(l+1)+1) x^2/2 + ..."),
        GoldenCoefficient("y1", 2, -ll / 2, "y1 = 1 - l(l+1) x^2/2! + (l-2)l(l+1)(l+3) x^4/4! + ..."),
        GoldenCoefficient(
            "y1", 4, (l - 2) * l * (l + 1) * (l + 3) / 24,
            "y1 = 1 - l(l+1) x^2/2! + (l-2)l(l+1)(l+3) x^4/4! + ...",
        ),
        GoldenCoefficient(
            "y2", 3, -(l - 1) * (l + 2) / 6,
            "y2 = x - (l-1)(l+2) x^3/3! + ...; sign fixed from y1 * int dt/alpha^2",
        ),
        GoldenCoefficient(
            "y2", 5, (l - 3) * (l - 1) * (l + 2) * (l + 4) / 120,
            "y2 x^5 term (l-3)(l-1)(l+2)(l+4)/5!",
        ),
    )
    return CatalogEntry(
        name="legendre",
        params={"l": l},
        base_point=0.0,
        interval=(-0.5, 0.5),
        builder=build,
        golden=golden,
        residual_tol=RATIONAL_RESIDUAL_TOL,
    )


# -- Hermite ----------------------------------------------------------------------

def make_hermite(a: float, f: FSpec = None) -> CatalogEntry:
    """``y'' - 2x y' + a y = f``."""
    a = float(a)

    def build(order: int, x0: float) -> SecondOrderProblem:
        x = variable(order, x0)
        return SecondOrderProblem(
            p=-2.0 * x, q=constant(a, order, x0), f=_forcing(f, order, x0)
        )

    golden = (
        GoldenCoefficient("h", 0, -a - 1, "h = x^2 - a - 1"),
        GoldenCoefficient("h", 2, 1.0, "h = x^2 - a - 1"),
        GoldenCoefficient("beta", 2, -0.5, "beta = exp(-x^2/2)"),
        GoldenCoefficient("beta", 4, 0.125, "beta = exp(-x^2/2)"),
        GoldenCoefficient("alpha", 2, -(1 + a) / 2, "alpha = 1 - (1+a) x^2/2! + (a^2+2a+3) x^4/4! + ..."),
        GoldenCoefficient("alpha", 4, (a * a + 2 * a + 3) / 24, "alpha = 1 - (1+a) x^2/2! + (a^2+2a+3) x^4/4! + ..."),
        GoldenCoefficient("y1", 2, -a / 2, "y1 = 1 - a x^2/2! - (4-a)a x^4/4! - ..."),
        GoldenCoefficient("y1", 4, -(4 - a) * a / 24, "y1 = 1 - a x^2/2! - (4-a)a x^4/4! - ..."),
        GoldenCoefficient("y2", 3, (2 - a) / 6, "y2 = x + (2-a) x^3/3! + (6-a)(2-a) x^5/5! + ..."),
        GoldenCoefficient("y2", 5, (6 - a) * (2 - a) / 120, "y2 = x + (2-a) x^3/3! + (6-a)(2-a) x^5/5! + ..."),
    )
    return CatalogEntry(
        name="hermite",
        params={"a": a},
        base_point=0.0,
        interval=(-1.0, 1.0),
        builder=build,
        golden=golden,
    )


# -- Chebyshev --------------------------------------------------------------------

def make_chebyshev(a: float, f: FSpec = None) -> CatalogEntry:
    """``y'' - x/(1-x^2) y' + a^2/(1-x^2) y = f`` (standard Chebyshev form)."""
    a = float(a)
    if a == 0:
        raise InvalidParameterError("a must be nonzero (y2 is normalized by 1/a)")

    def build(order: int, x0: float) -> SecondOrderProblem:
        x, w = _one_minus_x2_inv(order, x0)
        return SecondOrderProblem(p=-mul(x, w), q=(a * a) * w, f=_forcing(f, order, x0))

    a2 = a * a
    golden = (
        GoldenCoefficient("beta", 2, -0.25, "beta = (1 - x^2)^(1/4)"),
        GoldenCoefficient("alpha", 2, -(a2 / 2 + 0.25), "alpha = 1 - (a^2/2 + 1/4) x^2 + ..."),
        GoldenCoefficient("alpha", 4, a2 * a2 / 24 - a2 / 24 - 3 / 32, "alpha x^4 term a^4/24 - a^2/24 - 3/32"),
        GoldenCoefficient("y1", 2, -a2 / 2, "y1 = 1 - a^2 x^2/2 + (a^4 - 4a^2) x^4/24 + ..."),
        GoldenCoefficient("y1", 4, (a2 * a2 - 4 * a2) / 24, "y1 = 1 - a^2 x^2/2 + (a^4 - 4a^2) x^4/24 + ..."),
        GoldenCoefficient("y2", 3, (1 - a2) / 6, "y2 = x + (1-a^2) x^3/3! + (9-a^2)(1-a^2) x^5/5! + ..."),
        GoldenCoefficient("y2", 5, (9 - a2) * (1 - a2) / 120, "y2 = x + (1-a^2) x^3/3! + (9-a^2)(1-a^2) x^5/5! + ..."),
    )
    reference = ReferenceBasis(
        funcs=(
            lambda x: np.cos(a * np.arcsin(x)),
            lambda x: np.sin(a * np.arcsin(x)) / a,
        ),
        derivs=(
            lambda x: -a * math.sin(a * math.asin(x)) / math.sqrt(1 - x * x),
            lambda x: math.cos(a * math.asin(x)) / math.sqrt(1 - x * x),
        ),
        note="cos(a arcsin x), sin(a arcsin x)/a",
    )
    return CatalogEntry(
        name="chebyshev",
        params={"a": a},
        base_point=0.0,
        interval=(-0.5, 0.5),
        builder=build,
        golden=golden,
        reference=reference,
        residual_tol=RATIONAL_RESIDUAL_TOL,
    )


# -- registry ---------------------------------------------------------------------

REGISTRY: dict[str, tuple[Callable[..., CatalogEntry], dict[str, float]]] = {
    "constant": (make_constant_coefficients, {"a": 1.0, "b": 3.0, "c": 2.0}),
    "cauchy_euler": (make_cauchy_euler, {"a": 1.0, "b": -1.0, "c": -3.0}),
    "airy": (make_airy, {}),
    "legendre": (make_legendre, {"l": 3.0}),
    "hermite": (make_hermite, {"a": 3.0}),
    "chebyshev": (make_chebyshev, {"a": 2.5}),
}


def names() -> list[str]:
    return list(REGISTRY)


def make(name: str, f: FSpec = None, **params: float) -> CatalogEntry:
    """Build a registered entry, filling unspecified parameters with defaults."""
    try:
        factory, defaults = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(REGISTRY)}") from None
    unknown = set(params) - set(defaults)
    if unknown:
        raise InvalidParameterError(f"{name} takes parameters {sorted(defaults)}, got {sorted(unknown)}")
    return factory(**{**defaults, **params}, f=f)


def listing() -> list[dict]:
    return [make(n).listing() for n in REGISTRY]


# -- verification ------------------------------------------------------------------

@dataclass(frozen=True)
class CheckRow:
    check: str
    worst_error: float
    tolerance: float
    passed: bool


@dataclass
class VerificationReport:
    name: str
    order: int
    rows: list[CheckRow] = field(default_factory=list)
    residuals: dict[str, ResidualReport] = field(default_factory=dict)
    solution: SolutionBundle | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def add(self, check: str, worst_error: float, tolerance: float, passed: bool) -> None:
        self.rows.append(CheckRow(check, float(worst_error), tolerance, bool(passed)))


def _role(bundle: SolutionBundle, role: str) -> Series:
    if role in ("alpha", "beta", "h"):
        return getattr(bundle.factors, role)
    return getattr(bundle, role)


def match_reference(
    bundle: SolutionBundle, reference: ReferenceBasis, xs: np.ndarray
) -> list[float]:
    """Worst pointwise error of each reference function after matching initial data.

    For each reference ``g`` the constants solving
    ``c1 y1 + c2 y2 = g`` and ``c1 y1' + c2 y2' = g'`` at the base point are
    found, then ``c1 y1 + c2 y2`` is compared with ``g`` on ``xs``, relative
    to ``max(1, |g|)``.
    """
    y1, y2 = bundle.y1, bundle.y2
    x0 = y1.base_point
    m = np.array([[y1[0], y2[0]], [y1[1], y2[1]]])
    v1, v2 = evaluate(y1, xs), evaluate(y2, xs)
    errors = []
    for g, dg in zip(reference.funcs, reference.derivs):
        c = np.linalg.solve(m, [float(g(np.float64(x0))), dg(x0)])
        approx = c[0] * v1 + c[1] * v2
        exact = g(xs)
        errors.append(float(np.max(np.abs(approx - exact) / np.maximum(1.0, np.abs(exact)))))
    return errors


def verify_entry(entry: CatalogEntry, order: int = 32, tol: float = 1e-10) -> VerificationReport:
    """Run golden, exactness, residual, Abel and reference checks on ``entry``.

    ``tol`` bounds the scale-relative residual and Abel checks; entries with
    polynomial coefficients use the stricter of ``tol`` and their own residual
    tolerance. Golden coefficients use 1e-12 relative, reference agreement
    1e-8, as fixed tolerances.
    """
    if order < 12:
        raise ValueError("verification needs order >= 12")
    prob = entry.problem(order)
    bundle = solve(prob)
    report = VerificationReport(entry.name, order, solution=bundle)
    n = order

    for g in entry.golden:
        got = float(_role(bundle, g.role)[g.degree])
        err = abs(got - g.value)
        tol_g = GOLDEN_TOL * max(1.0, abs(g.value))
        report.add(f"golden {g.role}[{g.degree}]", err, tol_g, err <= tol_g)

    fac = bundle.factors
    for label, rep in (
        ("beta condition", beta_condition_residual(fac.beta, prob.p, 1e-12)),
        ("alpha condition", alpha_condition_residual(fac.alpha, fac.h, 1e-12)),
    ):
        report.residuals[label] = rep
        report.add(label, rep.max_residual / rep.scale, rep.tolerance_used, rep.passed)

    res_tol = min(tol, entry.residual_tol)
    for role, homogeneous in (("y1", True), ("y2", True), ("yp", False)):
        rep = residual_second_order(prob, getattr(bundle, role), res_tol, homogeneous=homogeneous)
        report.residuals[role] = rep
        report.add(f"residual {role}", rep.max_residual / rep.scale, res_tol, rep.passed)

    w = wronskian(bundle.y1, bundle.y2)
    abel = approx_equal(w, bundle.abel_reference, tol, n - 2)
    report.add("abel wronskian", abel.max_error / abel.scale, tol, abel.equal)

    yp = bundle.yp
    report.add("yp initial data", max(abs(yp[0]), abs(yp[1])), 0.0, yp[0] == 0.0 and yp[1] == 0.0)

    if entry.reference is not None:
        xs = np.linspace(entry.interval[0], entry.interval[1], 9)
        for i, err in enumerate(match_reference(bundle, entry.reference, xs), start=1):
            report.add(f"reference g{i}", err, REFERENCE_TOL, err <= REFERENCE_TOL)
    return report
