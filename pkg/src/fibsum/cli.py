"""Command-line front end.

Exit status: 0 everything checked out, 1 a verification failed, 2 bad usage or
unparsable input, 3 a domain error (vanishing denominator, divergence, ...).
Negative values must be attached to their flag, e.g. ``--x=-1/5``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import catalog as cat
from .arith import format_rat, parse_rat
from .errors import FibsumError
from .expr import canonical
from .identities import IDENTITY_NAMES, run_identity_grid
from .miner import MinerProblem, mine, terms_from_expr
from .sequences import FIB, LUCAS, Seed, gen_at
from .series import SeriesSpec, cubic_gf, quad_series
from .sums import CubicSumSpec, QuadSumSpec, cubic_sum_brute, cubic_sum_closed, quad_sum, quad_sum_brute

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


def int_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers in {text!r}") from None


def rational(text: str) -> Fraction:
    try:
        return parse_rat(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def seed(text: str) -> Seed:
    try:
        return Seed.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_fib(args) -> int:
    s = LUCAS if args.lucas else args.seed
    value = gen_at(s, args.n)
    emit(args, {"n": args.n, "seed": [s.g0, s.g1], "value": str(value)}, str(value))
    return EXIT_OK


def cmd_identities(args) -> int:
    reports = run_identity_grid(args.name or None, args.grid, workers=args.workers)
    lines = []
    for r in reports:
        status = "PASS" if r.ok else "FAIL"
        lines.append(f"{r.name:18s} {status}  points={r.points} skipped={r.skipped} failures={len(r.failures)}")
    payload = {
        "grid": args.grid,
        "ok": all(r.ok for r in reports),
        "results": [{"name": r.name, "ok": r.ok, "points": r.points, "skipped": r.skipped, "failures": len(r.failures)} for r in reports],
    }
    emit(args, payload, "\n".join(lines))
    return EXIT_OK if payload["ok"] else EXIT_FAIL


def _route_report(args, closed_fn, brute_fn, extra: dict) -> int:
    routes = {"closed": [closed_fn], "brute": [brute_fn], "both": [closed_fn, brute_fn]}[args.route]
    values = {fn.__name__: fn() for fn in routes}
    agree = len(set(values.values())) == 1
    payload = dict(extra, values={k: format_rat(v) for k, v in values.items()}, agree=agree)
    text = "\n".join(f"{k}: {format_rat(v)}" for k, v in values.items())
    if len(values) > 1:
        text += "\n" + ("agree" if agree else "DISAGREE")
    emit(args, payload, text)
    return EXIT_OK if agree else EXIT_FAIL


def cmd_sum_quad(args) -> int:
    spec = QuadSumSpec(args.a, args.b, args.c, args.d, args.x, args.m, args.n, args.gseed, args.hseed)

    def closed():
        return quad_sum(spec)

    def brute():
        return quad_sum_brute(spec)

    return _route_report(args, closed, brute, {"kind": "quad", "x": format_rat(spec.x), "m": spec.m, "n": spec.n})


def cmd_sum_cubic(args) -> int:
    spec = CubicSumSpec(args.p, args.q, args.r, args.variant, args.x, args.n, args.gseed, args.hseed, args.kseed)

    def closed():
        return cubic_sum_closed(spec)

    def brute():
        return cubic_sum_brute(spec)

    return _route_report(args, closed, brute, {"kind": "cubic", "variant": args.variant, "x": format_rat(args.x), "n": args.n})


def _gf_report(args, value: Fraction, partial_fn) -> int:
    payload = {"x": format_rat(args.x), "value": format_rat(value)}
    text = format_rat(value)
    if args.check is not None:
        residual = value - partial_fn(args.check)
        payload["check_n"] = args.check
        payload["residual"] = format_rat(residual)
        payload["residual_float"] = float(residual)
        text += f"\nresidual at n={args.check}: {float(residual):.3e}"
    emit(args, payload, text)
    return EXIT_OK


def cmd_gf_quad(args) -> int:
    spec = SeriesSpec(args.a, args.b, args.c, args.d, args.x, args.m, args.gseed, args.hseed)
    return _gf_report(args, quad_series(spec), lambda n: quad_sum_brute(spec.partial(n)))


def cmd_gf_cubic(args) -> int:
    value = cubic_gf(args.variant, args.p, args.q, args.r, args.x, args.gseed, args.hseed, args.kseed)

    def partial(n):
        return cubic_sum_brute(CubicSumSpec(args.p, args.q, args.r, args.variant, args.x, n, args.gseed, args.hseed, args.kseed))

    return _gf_report(args, value, partial)


def cmd_catalog_verify(args) -> int:
    records = cat.load_catalog(args.file) if args.file else cat.shipped_catalog()
    if args.id:
        records = [cat.find_record(i, records) for i in args.id]
    report = cat.catalog_verify(records, args.grid, workers=args.workers)
    summary = f"{len(report.results)} records, {len(report.failing)} failing"
    emit(args, report.to_json(), "\n".join(report.lines() + [summary]))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_catalog_list(args) -> int:
    records = cat.load_catalog(args.file) if args.file else cat.shipped_catalog()
    payload = {"records": [r.to_json() for r in records]}
    emit(args, payload, "\n".join(f"{r.id}  {r.lhs}  =  {r.rhs}" for r in records))
    return EXIT_OK


def cmd_mine(args) -> int:
    problem = MinerProblem(
        p=args.p,
        lhs_terms=terms_from_expr(args.lhs, args.p),
        budget=args.budget,
        offsets=args.offsets,
        grid=args.grid,
        mode=args.mode,
        coeffs=args.coeffs,
        samples=args.samples,
        rng_seed=args.rng_seed,
    )
    solutions = mine(problem, workers=args.workers)
    payload = {
        "count": len(solutions),
        "solutions": [dict(s.to_json(), text=s.to_text(args.p)) for s in solutions],
    }
    text = "\n".join(s.to_text(args.p) for s in solutions) or "no solution in range"
    emit(args, payload, text)
    return EXIT_OK if solutions else EXIT_FAIL


def cmd_parse(args) -> int:
    text = canonical(args.text)
    emit(args, {"ok": True, "canonical": text}, text)
    return EXIT_OK


def _json_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="machine-readable output")


def _quad_args(p: argparse.ArgumentParser, with_n: bool) -> None:
    for name in ("a", "b", "c", "d"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--x", type=rational, required=True)
    p.add_argument("--m", type=int, default=0)
    if with_n:
        p.add_argument("--n", type=int, required=True)
    p.add_argument("--gseed", type=seed, default=FIB)
    p.add_argument("--hseed", type=seed, default=FIB)


def _cubic_args(p: argparse.ArgumentParser, with_n: bool) -> None:
    p.add_argument("--variant", required=True, help="+k+k+k, +k+k-k, +k-k-k, +2k+2k+2k or 1..4")
    for name in ("p", "q", "r"):
        p.add_argument(f"--{name}", type=int, default=0)
    p.add_argument("--x", type=rational, required=True)
    if with_n:
        p.add_argument("--n", type=int, required=True)
    for name in ("gseed", "hseed", "kseed"):
        p.add_argument(f"--{name}", type=seed, default=FIB)


def _route_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--closed", dest="route", action="store_const", const="closed")
    g.add_argument("--brute", dest="route", action="store_const", const="brute")
    g.add_argument("--both", dest="route", action="store_const", const="both")
    p.set_defaults(route="both")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fibsum", description="Exact weighted sums of Fibonacci-like products.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("fib", help="generalized Fibonacci number")
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=seed, default=FIB, help="g0,g1 (default 0,1)")
    p.add_argument("--lucas", action="store_true")
    _json_flag(p)
    p.set_defaults(func=cmd_fib)

    p = sub.add_parser("identities", help="check the core identity library on a grid")
    p.add_argument("--name", action="append", choices=IDENTITY_NAMES)
    p.add_argument("--grid", type=int, default=4)
    p.add_argument("--workers", type=int, default=None)
    _json_flag(p)
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("sum", help="finite weighted sums")
    kinds = p.add_subparsers(dest="kind", required=True)
    q = kinds.add_parser("quad")
    _quad_args(q, with_n=True)
    _route_args(q)
    _json_flag(q)
    q.set_defaults(func=cmd_sum_quad)
    c = kinds.add_parser("cubic")
    _cubic_args(c, with_n=True)
    _route_args(c)
    _json_flag(c)
    c.set_defaults(func=cmd_sum_cubic)

    p = sub.add_parser("gf", help="infinite series / generating functions")
    kinds = p.add_subparsers(dest="kind", required=True)
    q = kinds.add_parser("quad")
    _quad_args(q, with_n=False)
    q.add_argument("--check", type=int, metavar="N", help="report the residual against the partial sum to N")
    _json_flag(q)
    q.set_defaults(func=cmd_gf_quad)
    c = kinds.add_parser("cubic")
    _cubic_args(c, with_n=False)
    c.add_argument("--check", type=int, metavar="N", help="report the residual against the partial sum to N")
    _json_flag(c)
    c.set_defaults(func=cmd_gf_cubic)

    p = sub.add_parser("catalog", help="identity catalog")
    acts = p.add_subparsers(dest="action", required=True)
    v = acts.add_parser("verify")
    v.add_argument("--file")
    v.add_argument("--grid", type=int, default=3)
    v.add_argument("--id", action="append", help="SECTION.ORDINAL, repeatable")
    v.add_argument("--workers", type=int, default=None)
    _json_flag(v)
    v.set_defaults(func=cmd_catalog_verify)
    ls = acts.add_parser("list")
    ls.add_argument("--file")
    _json_flag(ls)
    ls.set_defaults(func=cmd_catalog_list)

    p = sub.add_parser("mine", help="search for a shorter right-hand side")
    p.add_argument("--p", type=int, required=True, help="factors per term")
    p.add_argument("--lhs", required=True, help="e.g. 'F[q+2] - F[q+1]' or 'F[q1+2]*F[q2]'")
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--offsets", type=int_range, default=(-2, 2))
    p.add_argument("--grid", type=int_range, default=(-2, 2))
    p.add_argument("--mode", choices=("solve", "enum"), default="solve")
    p.add_argument("--coeffs", type=int_range, default=(-2, 2))
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _json_flag(p)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("parse", help="parse and print an expression in canonical form")
    p.add_argument("--check", action="store_true", help="syntax validation only (the default behaviour)")
    p.add_argument("text")
    _json_flag(p)
    p.set_defaults(func=cmd_parse)
    return parser


def main(argv=None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FibsumError as exc:
        code = exc.exit_code if exc.exit_code != EXIT_FAIL else EXIT_DOMAIN
        _report_error(args, exc, code)
        return code
    except ZeroDivisionError as exc:
        _report_error(args, exc, EXIT_DOMAIN)
        return EXIT_DOMAIN
    except ValueError as exc:
        _report_error(args, exc, EXIT_USAGE)
        return EXIT_USAGE


def _report_error(args, exc: Exception, code: int) -> None:
    if getattr(args, "json", False):
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": code}))
    else:
        print(f"error: {exc}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
