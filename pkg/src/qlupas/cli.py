"""
Command-line front end.

    qlupas eval --op lupas --q 0.5 --n 2 --fn quad --x 0.5
    qlupas table --q 0.5 --n 1..10 --fn quad
    qlupas verify --suite all
    qlupas voronovskaja --fn cubic --q 0.5 --n 1..32 --x 0.5

Exit codes: 0 success, 1 verification failure, 2 argument error,
3 domain error, 4 I/O error.
"""

import argparse
import csv
import io
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .functions import REGISTRY, reflect
from .moduli import modulus, modulus2
from .operators import DEFAULT_TOL, OperatorKind, eval_difference, eval_operator, v_transform
from .qcalc import QParam, q_integer
from .verify import (
    CSV_HEADER,
    SCHEDULES,
    SUITES,
    build_suite,
    classical_scaled,
    run_checks,
    x_grid,
)

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_FAIL", "EXIT_USAGE", "EXIT_DOMAIN", "EXIT_IO"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4

TABLE_HEADER = ["n", "q", "sup_error", "bound_omega1", "bound_omega2", "ratio"]
VORONOVSKAJA_HEADER = ["n", "x", "scaled_difference", "target", "residual", "bound"]


class DomainError(Exception):
    """Arguments are well formed but the requested quantity is undefined."""


def _num(v):
    return format(float(v), ".17g")


def _positive_q(text):
    try:
        return QParam(float(text)).q
    except ValueError:
        raise argparse.ArgumentTypeError(f"q must be a finite positive number, got {text!r}") from None


def _unit(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"x must lie in [0, 1], got {text!r}")
    return x


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0.0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _n_range(text):
    """``7``, ``1..10``, ``1:10`` (inclusive) or ``1,2,4``."""
    try:
        if ".." in text or ":" in text:
            lo, hi = text.replace(":", "..").split("..")
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n range {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"n values must be positive integers, got {text!r}")
    return values


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads (default: all cores)")
    common.add_argument("--out", default=None, help="write CSV here instead of stdout")

    parser = argparse.ArgumentParser(prog="qlupas", description="Lupaş q-Bernstein operators")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate one operator value")
    p.add_argument("--op", choices=[k.value for k in OperatorKind], default="lupas")
    p.add_argument("--q", type=_positive_q, required=True)
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--fn", choices=sorted(REGISTRY), required=True)
    p.add_argument("--x", type=_unit, required=True)
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)

    p = sub.add_parser("table", parents=[common], help="convergence table of R_n - R_inf")
    p.add_argument("--q", type=_positive_q, required=True)
    p.add_argument("--n", type=_n_range, default=_n_range("1..10"))
    p.add_argument("--fn", choices=sorted(REGISTRY), required=True)
    p.add_argument("--grid", type=_positive_int, default=65)

    p = sub.add_parser("verify", parents=[common], help="run verification checks")
    p.add_argument("--suite", default="all",
                   help=f"suite ({', '.join(SUITES)}) or a single check id")
    p.add_argument("--q", type=_positive_q, default=None,
                   help="restrict the q sets to this value and its reciprocal")

    p = sub.add_parser("voronovskaja", parents=[common], help="scaled differences against f''")
    p.add_argument("--fn", choices=sorted(REGISTRY), required=True)
    p.add_argument("--q", type=_positive_q, default=None, help="fixed q != 1")
    p.add_argument("--schedule", choices=sorted(SCHEDULES), default=None,
                   help="q_n schedule for the classical limit instead of a fixed q")
    p.add_argument("--n", type=_n_range, default=_n_range("1,2,4,8,16,32"))
    p.add_argument("--x", type=_unit, default=None, help="single point (default: a grid)")
    p.add_argument("--grid", type=_positive_int, default=65)
    return parser


def _map(fn, items, threads):
    if threads == 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads or os.cpu_count()) as pool:
        return list(pool.map(fn, items))


def _write_csv(header, rows, out):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="", encoding="ascii") as fh:
            fh.write(text)


# -- subcommands -------------------------------------------------------------

def run_eval(args):
    kind = OperatorKind(args.op)
    if kind is OperatorKind.LIMIT and args.q >= 1.0:
        raise DomainError("--op limit needs 0 < q < 1")
    if kind is OperatorKind.PHILLIPS and args.q > 1.0:
        raise DomainError("--op phillips needs 0 < q <= 1")
    if kind is not OperatorKind.LIMIT and args.n is None:
        raise argparse.ArgumentTypeError("--n is required for this operator")
    value = eval_operator(kind, args.q, args.n or 1, REGISTRY[args.fn], args.x, args.tol)
    print(_num(value))
    return EXIT_OK


def _table_row(q, f, n, x):
    err = float(np.max(np.abs(eval_difference(q, n, f, x))))
    if q < 1.0:
        a = float(x[-1])
        b1 = 2.0 / ((1.0 - q) * (1.0 - a)) * modulus(f, q ** n)
        b2 = modulus2(f, math.sqrt(q ** n))
    else:
        a = float(x[0])
        g = reflect(f)
        b1 = 2.0 * q / ((q - 1.0) * a) * modulus(g, q ** (-n))
        b2 = modulus2(g, math.sqrt(q ** (-n)))
    if b2 > 0.0:
        ratio = err / b2
    else:
        ratio = 0.0 if err == 0.0 else math.inf
    return [str(n), _num(q), _num(err), _num(b1), _num(b2), _num(ratio)]


def run_table(args):
    if args.q == 1.0:
        raise DomainError("the limit operator is undefined at q = 1")
    f = REGISTRY[args.fn]
    x = x_grid(args.q, args.grid)
    rows = _map(lambda n: _table_row(args.q, f, n, x), args.n, args.threads)
    _write_csv(TABLE_HEADER, rows, args.out)
    return EXIT_OK


def run_verify(args):
    try:
        items = build_suite(args.suite, args.q)
    except KeyError as exc:
        raise argparse.ArgumentTypeError(exc.args[0]) from None
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    reports = run_checks(items, args.threads)
    for r in reports:
        print(r.line())
    if args.out is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(r.row() for r in reports)
        with open(args.out, "w", newline="", encoding="ascii") as fh:
            fh.write(buf.getvalue())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _omega_d2(f, t):
    return float(f.omega_d2(t)) if f.omega_d2 is not None else modulus(f.d2, t)


def _voronovskaja_rows(f, n, x, q=None, schedule=None):
    if schedule is not None:
        qn = SCHEDULES[schedule](n)
        scaled, target = classical_scaled(f, n, schedule, x)
        # remainder scale of the fixed-q estimate, evaluated at q = q_n
        N = q_integer(qn if qn <= 1.0 else 1.0 / qn, n)
        if qn <= 1.0:
            weight = x * (1.0 - v_transform(qn, x))
        else:
            weight = v_transform(qn, x) * (1.0 - x)
        bound = weight * _omega_d2(f, N ** -0.5)
    else:
        diff = np.asarray(eval_difference(q, n, f, x), dtype=float)
        if q < 1.0:
            N = q_integer(q, n)
            scaled = N / q ** n * diff
            weight = x * (1.0 - v_transform(q, x))
        else:
            N = q_integer(1.0 / q, n)
            scaled = q ** n * N * diff
            weight = v_transform(q, x) * (1.0 - x)
        # f''(x) in both regimes: for q > 1 it is g''(1 - x) with g = f(1 - .)
        target = 0.5 * f.d2(x) * weight
        bound = weight * _omega_d2(f, N ** -0.5)
    residual = np.abs(scaled - target)
    return [[str(n), _num(xi), _num(s), _num(t), _num(r), _num(b)]
            for xi, s, t, r, b in zip(x, scaled, target, residual, np.broadcast_to(bound, x.shape))]


def run_voronovskaja(args):
    f = REGISTRY[args.fn]
    if f.d2 is None:
        raise DomainError(f"{f.id} has no analytic second derivative")
    if (args.q is None) == (args.schedule is None):
        raise argparse.ArgumentTypeError("give exactly one of --q and --schedule")
    if args.q is not None and args.q == 1.0:
        raise DomainError("fixed q must differ from 1")
    if args.x is not None:
        x = np.array([args.x])
    elif args.schedule is not None:
        x = np.linspace(0.0, 1.0, args.grid)
    else:
        x = x_grid(args.q, args.grid)
    blocks = _map(lambda n: _voronovskaja_rows(f, n, x, args.q, args.schedule), args.n, args.threads)
    _write_csv(VORONOVSKAJA_HEADER, [row for block in blocks for row in block], args.out)
    return EXIT_OK


COMMANDS = {"eval": run_eval, "table": run_table, "verify": run_verify,
            "voronovskaja": run_voronovskaja}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return COMMANDS[args.subcommand](args)
    except argparse.ArgumentTypeError as exc:
        print(f"qlupas: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError) as exc:
        print(f"qlupas: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"qlupas: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
