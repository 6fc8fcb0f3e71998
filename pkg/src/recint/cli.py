"""
Command-line front end.

    recint solve --catalog airy --order 24
    recint solve --p 0,1 --q 2 --f 1 --order 16 --eval 0:1:11 --format csv
    recint solve --kind first-order --p 1 --f 1 --c1 0 --order 12
    recint verify all --order 32 --tol 1e-10
    recint list --format csv

Exit codes: 0 success, 1 a check failed, 2 malformed input, 3 singular
base point.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Sequence

import numpy as np

from . import catalog
from .errors import InvalidParameterError, NumericRangeError, SingularBasePointError
from .first_order import FirstOrderProblem, residual_first_order, solve_integrating_factor, solve_recursive
from .second_order import SecondOrderProblem, residual_second_order, solve, wronskian
from .series import Series, approx_equal, evaluate, from_dict, resize, to_dict

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_SINGULAR = 3

MIN_ORDER, MAX_ORDER = 4, 256
MAX_EVAL_POINTS = 10000


class UsageError(Exception):
    pass


def _num(v: float) -> str:
    return f"{v:.17g}"


def _coefficients(text: str, order: int, base_point: float, flag: str) -> Series:
    """Parse ``--p/--q/--f``: comma-separated coefficients or an inline JSON series."""
    text = text.strip()
    try:
        if text.startswith("{"):
            s = from_dict(json.loads(text))
            if s.base_point != base_point:
                raise UsageError(f"{flag}: series base point {s.base_point} != --base-point {base_point}")
        else:
            s = Series([float(t) for t in text.split(",") if t.strip()] or [0.0], base_point)
    except (ValueError, NumericRangeError) as exc:
        raise UsageError(f"{flag}: cannot parse {text!r} ({exc})") from None
    if s.order > order:
        raise UsageError(f"{flag}: {s.order + 1} coefficients exceed --order {order}")
    return resize(s, order)


def _params(items: Sequence[str]) -> dict[str, float]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise UsageError(f"--param {key}: {value!r} is not a number") from None
    return out


def _grid(text: str | None) -> np.ndarray | None:
    if text is None:
        return None
    try:
        start, stop, count = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise UsageError(f"--eval expects start:stop:count, got {text!r}") from None
    if not 1 <= count <= MAX_EVAL_POINTS:
        raise UsageError(f"--eval count must lie in [1, {MAX_EVAL_POINTS}]")
    return np.linspace(start, stop, count)


def _residual_rows(reports: dict) -> list[tuple[str, float, bool]]:
    return [(name, rep["max_residual"], rep["pass"]) for name, rep in reports.items()]


def _emit(payload: dict, series: dict[str, Series], grid, fmt: str, out) -> None:
    if fmt == "json":
        json.dump(payload, out, indent=2)
        out.write("\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["series", "degree", "coefficient"])
    for name, s in series.items():
        for k, c in enumerate(s.coeffs):
            w.writerow([name, k, _num(float(c))])
    out.write("\n")
    w.writerow(["check", "worst_error", "pass"])
    for name, err, ok in _residual_rows(payload["residuals"]):
        w.writerow([f"residual {name}", _num(err), "PASS" if ok else "FAIL"])
    if grid is not None:
        out.write("\n")
        names = list(payload["eval"])
        w.writerow(names)
        for row in zip(*(payload["eval"][n] for n in names)):
            w.writerow([_num(v) for v in row])


def _eval_table(series: dict[str, Series], grid) -> dict:
    table = {"x": grid.tolist()}
    for name, s in series.items():
        table[name] = np.atleast_1d(evaluate(s, grid)).tolist()
    return table


def cmd_solve(args, out) -> int:
    order = args.order
    if not MIN_ORDER <= order <= MAX_ORDER:
        raise UsageError(f"--order must lie in [{MIN_ORDER}, {MAX_ORDER}]")
    grid = _grid(args.eval)
    if args.kind == "first-order":
        return _solve_first(args, grid, out)

    if args.catalog:
        if args.p or args.q:
            raise UsageError("--catalog cannot be combined with --p/--q")
        params = _params(args.param)
        try:
            entry = catalog.make(args.catalog, **params)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
        base_point = entry.base_point if args.base_point is None else args.base_point
        if args.f:
            entry = catalog.make(args.catalog, f=_coefficients(args.f, order, base_point, "--f"), **params)
        prob = entry.problem(order, base_point)
    else:
        if args.param:
            raise UsageError("--param needs --catalog")
        base_point = 0.0 if args.base_point is None else args.base_point
        prob = SecondOrderProblem(
            p=_coefficients(args.p or "0", order, base_point, "--p"),
            q=_coefficients(args.q or "0", order, base_point, "--q"),
            f=_coefficients(args.f or "0", order, base_point, "--f"),
        )

    bundle = solve(prob)
    series = {"y1": bundle.y1, "y2": bundle.y2, "yp": bundle.yp, "abel_reference": bundle.abel_reference}
    if args.c1 is not None or args.c2 is not None:
        series["y"] = bundle.combine(c1=args.c1 or 0.0, c2=args.c2 or 0.0)
    series.update(alpha=bundle.factors.alpha, beta=bundle.factors.beta)
    if args.verbose:
        series["h"] = bundle.factors.h

    residuals = {
        "y1": residual_second_order(prob, bundle.y1, args.tol, homogeneous=True).as_dict(),
        "y2": residual_second_order(prob, bundle.y2, args.tol, homogeneous=True).as_dict(),
        "yp": residual_second_order(prob, bundle.yp, args.tol).as_dict(),
    }
    if "y" in series:
        residuals["y"] = residual_second_order(prob, series["y"], args.tol).as_dict()
    abel = approx_equal(wronskian(bundle.y1, bundle.y2), bundle.abel_reference, args.tol, order - 2)
    residuals["wronskian"] = {
        "max_residual": abel.max_error,
        "verified_degree": order - 2,
        "scale": abel.scale,
        "tolerance": args.tol,
        "pass": abel.equal,
    }

    payload = {"kind": "second-order", "base_point": prob.base_point, "order": order}
    payload.update({name: to_dict(s) for name, s in series.items()})
    if args.verbose:
        payload["alpha_iterations"] = bundle.factors.alpha_iterations
        payload["working_precision"] = bundle.working_precision
    payload["residuals"] = residuals
    if grid is not None:
        payload["eval"] = _eval_table({k: v for k, v in series.items() if k in ("y1", "y2", "yp", "y")}, grid)
    _emit(payload, series, grid, args.format, out)
    return EXIT_OK if all(r["pass"] for r in residuals.values()) else EXIT_CHECK_FAILED


def _solve_first(args, grid, out) -> int:
    if args.catalog or args.q:
        raise UsageError("first-order problems take only --p, --f and --c1")
    order = args.order
    base_point = 0.0 if args.base_point is None else args.base_point
    prob = FirstOrderProblem(
        p=_coefficients(args.p or "0", order, base_point, "--p"),
        f=_coefficients(args.f or "0", order, base_point, "--f"),
        c1=args.c1 or 0.0,
    )
    y, iterations = solve_recursive(prob)
    y_if = solve_integrating_factor(prob)
    agree = approx_equal(y, y_if, 1e-12)
    res = residual_first_order(prob, y, args.tol)
    series = {"y": y, "y_integrating_factor": y_if}
    payload = {"kind": "first-order", "base_point": base_point, "order": order, "c1": prob.c1}
    payload.update({name: to_dict(s) for name, s in series.items()})
    payload["iterations"] = iterations
    payload["residuals"] = {
        "y": res.as_dict(),
        "agreement": {
            "max_residual": agree.max_error,
            "verified_degree": order,
            "scale": agree.scale,
            "tolerance": 1e-12,
            "pass": agree.equal,
        },
    }
    if grid is not None:
        payload["eval"] = _eval_table({"y": y}, grid)
    _emit(payload, series, grid, args.format, out)
    ok = res.passed and agree.equal
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_verify(args, out) -> int:
    wanted = args.names or ["all"]
    if "all" in wanted:
        wanted = catalog.names()
    unknown = [n for n in wanted if n not in catalog.REGISTRY]
    if unknown:
        raise UsageError(f"unknown catalog entries: {', '.join(unknown)}")
    if args.order < 12:
        raise UsageError("verify needs --order >= 12")
    reports = [catalog.verify_entry(catalog.make(n), args.order, args.tol) for n in wanted]

    if args.format == "json":
        json.dump(
            [
                {
                    "name": r.name,
                    "order": r.order,
                    "pass": r.passed,
                    "checks": [
                        {"check": row.check, "worst_error": row.worst_error,
                         "tolerance": row.tolerance, "pass": row.passed}
                        for row in r.rows
                    ],
                }
                for r in reports
            ],
            out,
            indent=2,
        )
        out.write("\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["name", "check", "worst_error", "pass"])
        for r in reports:
            for row in r.rows:
                w.writerow([r.name, row.check, _num(row.worst_error), "PASS" if row.passed else "FAIL"])
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def cmd_list(args, out) -> int:
    rows = catalog.listing()
    if args.format == "json":
        json.dump(rows, out, indent=2)
        out.write("\n")
        return EXIT_OK
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["name", "params", "base_point", "interval_start", "interval_stop"])
    for r in rows:
        params = ";".join(f"{k}={_num(v)}" for k, v in r["params"].items())
        w.writerow([r["name"], params, _num(r["base_point"]), _num(r["interval"][0]), _num(r["interval"][1])])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recint",
        description="Power-series solutions of linear ODEs by recursion and integrating factors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one problem and print coefficients and residuals")
    s.add_argument("--kind", choices=("second-order", "first-order"), default="second-order")
    s.add_argument("--catalog", help="catalog entry name (see `list`)")
    s.add_argument("--param", action="append", default=[], metavar="K=V", help="catalog parameter, repeatable")
    s.add_argument("--p", help="coefficients of p, comma separated, or a JSON series")
    s.add_argument("--q", help="coefficients of q")
    s.add_argument("--f", help="coefficients of the forcing term f")
    s.add_argument("--base-point", type=float, default=None)
    s.add_argument("--order", type=int, default=16)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--eval", metavar="START:STOP:COUNT", help="evaluation grid")
    s.add_argument("--c1", type=float, default=None,
                   help="second order: weight of y2; first order: y at the base point")
    s.add_argument("--c2", type=float, default=None, help="weight of y1 in the combined solution y")
    s.add_argument("--verbose", action="store_true", help="also print h, the alpha iteration count and the working precision")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="run the catalog checks")
    v.add_argument("names", nargs="*", help="entry names or 'all' (default)")
    v.add_argument("--order", type=int, default=32)
    v.add_argument("--tol", type=float, default=1e-10)
    v.add_argument("--format", choices=("csv", "json"), default="csv")
    v.set_defaults(func=cmd_verify)

    ls = sub.add_parser("list", help="list catalog entries")
    ls.add_argument("--format", choices=("json", "csv"), default="json")
    ls.set_defaults(func=cmd_list)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except SingularBasePointError as exc:
        print(f"recint: singular base point: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (UsageError, InvalidParameterError, NumericRangeError) as exc:
        print(f"recint: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
