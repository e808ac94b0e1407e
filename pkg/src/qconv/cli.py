"""Command line front end: ``qconv {eval,verify,moments,classify,convolve,fourier}``.

Exit codes: 0 success, 1 a verification check failed, 2 bad input,
3 numeric failure (a series diverged or hit its cap).
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys

from .convolution import convolve_at
from .errors import InputError, NumericFailure
from .fourier import fourier_integral, fourier_series
from .lattice import LatticeFunction, LatticePoint, Status, locate, read_table_csv
from .moments import TypeKind, classify_type, moment_sequence
from .qcore import QContext
from .special import hermite_II, make_function, parse_function_name

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


def parse_complex(text: str) -> complex:
    """Parse ``1.5``, ``i``, ``-2i``, ``1+0.5i`` or Python's ``1+0.5j``."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("i", "j")
    s = re.sub(r"(?<![0-9.eE])j", "1j", s)
    try:
        return complex(s)
    except ValueError:
        raise InputError(f"cannot parse {text!r} as a number") from None


def _fmt(v: complex) -> str:
    v = complex(v)
    return f"{v.real:.17g} {v.imag:.17g}"


def _num(v: complex) -> dict:
    v = complex(v)
    return {"re": v.real, "im": v.imag}


def _ctx(args) -> QContext:
    kw = {}
    if getattr(args, "tol", None) is not None:
        kw["tail_rel_tol"] = args.tol
    if getattr(args, "max_terms", None) is not None:
        kw["max_terms"] = args.max_terms
    return QContext(args.q, **kw)


def _function(spec: str | None, table: str | None, gamma: float, ctx: QContext) -> LatticeFunction:
    """A built-in ``name[:param]``, ``csv:PATH`` or the ``--table`` CSV file."""
    if table:
        return read_table_csv(table, gamma, name=table)
    if not spec:
        raise InputError("give a function with --fn (or a CSV with --table)")
    if spec.startswith("csv:"):
        return read_table_csv(spec[4:], gamma, name=spec[4:])
    return make_function(parse_function_name(spec), gamma, ctx)


def _point(x: complex, gamma: float, ctx: QContext):
    """Lattice points become exact :class:`LatticePoint` objects."""
    if x.imag == 0 and x.real != 0:
        loc = locate(x.real, gamma, ctx)
        if loc is not None:
            return LatticePoint(loc[0], loc[1], gamma, ctx.q)
    return x if x.imag else x.real


def _finite(v: float):
    return v if math.isfinite(v) else None


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2, allow_nan=False))


def _check_status(status: Status, what: str) -> None:
    if status in (Status.DIVERGENT, Status.CAPPED):
        raise NumericFailure(f"{what}: {status.value}")


# -- subcommands --------------------------------------------------------------------

def cmd_eval(args) -> int:
    ctx = _ctx(args)
    xs = [parse_complex(x) for x in args.x]
    if args.fn == "hermite2":
        if args.k is None:
            raise InputError("hermite2 needs --k")
        for x in xs:
            print(_fmt(hermite_II(args.k, x if x.imag else x.real, ctx)))
        return EXIT_OK
    f = _function(args.fn, args.table, args.gamma, ctx)
    for x in xs:
        print(_fmt(f(_point(x, args.gamma, ctx))))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suite

    ctx = _ctx(args)
    report = run_suite(args.q, args.gamma, ctx, only=args.only)
    lines = [f"{c['id']:28s} {c['status']:4s}  error={c['error']!s:24s} tol={c['tolerance']}"
             for c in report["checks"]]
    lines.append(f"overall: {report['overall']}")
    table = "\n".join(lines)
    if args.table:
        print(table)
    else:
        _emit(report)
        print(table, file=sys.stderr)
    return EXIT_OK if report["overall"] == "PASS" else EXIT_FAIL


def cmd_moments(args) -> int:
    ctx = _ctx(args)
    f = _function(args.fn, args.table, args.gamma, ctx)
    ms = moment_sequence(f, args.E, args.gamma, ctx)
    out = ms.to_dict()
    out["function"] = f.name
    _emit(out)
    for en in ms.entries:
        _check_status(en.status, f"moment {en.e}")
    return EXIT_OK


def cmd_classify(args) -> int:
    ctx = _ctx(args)
    f = _function(args.fn, args.table, args.gamma, ctx)
    ms = moment_sequence(f, args.E, args.gamma, ctx)
    kind = TypeKind.STRICT_LEFT if args.strict else TypeKind.LEFT
    tc = classify_type(ms, kind)
    out = tc.to_dict()
    out.update(function=f.name, gamma=args.gamma, q=args.q, E=args.E)
    _emit(out)
    return EXIT_OK


def cmd_convolve(args) -> int:
    ctx = _ctx(args)
    f = _function(args.f, None, args.gamma, ctx)
    g = _function(args.g, args.table, args.gamma, ctx)
    fm = moment_sequence(f, args.E, args.gamma, ctx)
    rows = []
    worst = Status.CONVERGED
    for xs in args.x:
        x = parse_complex(xs)
        res = convolve_at(fm, g, _point(x, args.gamma, ctx), ctx)
        rows.append({"x": _num(x), "value": _num(res.value), "status": res.status.value,
                     "terms_used": res.terms_used, "tail_bound": _finite(res.tail_bound)})
        if res.status in (Status.DIVERGENT, Status.CAPPED):
            worst = res.status
    _emit({"f": f.name, "g": g.name, "gamma": args.gamma, "q": args.q, "values": rows})
    _check_status(worst, "convolution")
    return EXIT_OK


def cmd_fourier(args) -> int:
    ctx = _ctx(args)
    f = _function(args.fn, args.table, args.gamma, ctx)
    fm = moment_sequence(f, args.E, args.gamma, ctx) if args.form in ("series", "both") else None
    rows = []
    worst = Status.CONVERGED
    for ys in args.y:
        y = parse_complex(ys)
        row = {"y": _num(y)}
        results = []
        if args.form in ("integral", "both"):
            results.append(("integral", fourier_integral(f, args.gamma, y, ctx)))
        if fm is not None:
            results.append(("series", fourier_series(fm, y, ctx)))
        for name, r in results:
            row[name] = {"value": _num(r.value), "status": r.status.value,
                         "terms_used": r.terms_used}
            if r.status in (Status.DIVERGENT, Status.CAPPED):
                worst = r.status
        rows.append(row)
    _emit({"function": f.name, "gamma": args.gamma, "q": args.q, "values": rows})
    _check_status(worst, "transform")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, gamma_default: float = 1.0) -> None:
    p.add_argument("--q", type=float, default=0.5, help="base q in (0, 1)")
    p.add_argument("--gamma", type=float, default=gamma_default, help="lattice parameter")
    p.add_argument("--tol", type=float, default=None, help="relative tail tolerance")
    p.add_argument("--max-terms", type=int, default=None, help="cap on series terms")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qconv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a special function")
    _common(p)
    p.add_argument("--fn", required=True, help="name[:param], csv:PATH, or hermite2")
    p.add_argument("--table", help="CSV table instead of a built-in function")
    p.add_argument("--k", type=int, help="degree for hermite2")
    p.add_argument("--x", nargs="+", required=True, help="points, e.g. 1 -0.5 i 1+2i")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="run the identity verification suite")
    _common(p)
    p.add_argument("--only", action="append", help="check id glob (repeatable)")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report on stdout (default)")
    fmt.add_argument("--table", action="store_true", help="human table on stdout instead")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("moments", help="moments and strict moments as JSON")
    _common(p)
    p.add_argument("--fn", help="name[:param] or csv:PATH")
    p.add_argument("--table", help="CSV table")
    p.add_argument("--E", type=int, default=12, help="highest order")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("classify", help="fit the left type from the moments")
    _common(p)
    p.add_argument("--fn", help="name[:param] or csv:PATH")
    p.add_argument("--table", help="CSV table")
    p.add_argument("--E", type=int, default=30, help="highest order used in the fit")
    p.add_argument("--strict", action="store_true", help="fit the strict moments")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("convolve", help="evaluate f * g at points")
    _common(p)
    p.add_argument("--f", required=True, help="left factor, name[:param] or csv:PATH")
    p.add_argument("--g", help="right factor, name[:param] or csv:PATH")
    p.add_argument("--table", help="CSV table for the right factor")
    p.add_argument("--E", type=int, default=30, help="moments computed up front")
    p.add_argument("--x", nargs="+", required=True)
    p.set_defaults(func=cmd_convolve)

    p = sub.add_parser("fourier", help="q-Fourier transform at points")
    _common(p)
    p.add_argument("--fn", help="name[:param] or csv:PATH")
    p.add_argument("--table", help="CSV table")
    p.add_argument("--E", type=int, default=30, help="moments computed up front (series form)")
    p.add_argument("--form", choices=("integral", "series", "both"), default="both")
    p.add_argument("--y", nargs="+", required=True)
    p.set_defaults(func=cmd_fourier)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "convolve" and not (args.g or args.table):
        parser.error("convolve needs --g or --table")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericFailure as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
