"""Command-line entry point.

Exit status: 0 on success, 1 on a domain or dimension error, 2 on an I/O or
file-format error (argparse usage errors also exit 2).
"""

import argparse
import sys
import warnings

from . import fileio
from .errors import DimensionError, DomainError, FormatError
from .gf2poly import ORDER_DEGREE_CAP, char_poly_mod2, check_condition, order
from .matrix import BlockParams, matpow, mul_blocked, mul_naive
from .recurrence import RecurrenceSpec
from .schedule import ScheduleParams, cost_model, simulate, staggered_selftest
from .sequence import companion, generate, select_uniform
from .strassen import StrassenConfig, mul_strassen


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="z4mat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mul", help="multiply two matrix files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--algo", choices=("naive", "blocked", "strassen"), default="blocked")
    p.add_argument("--threshold", type=_positive, default=64)
    p.add_argument("--n", type=_positive, default=28)
    p.add_argument("--block", type=_positive, default=20)

    p = sub.add_parser("pow", help="raise a matrix file to a power")
    p.add_argument("m")
    p.add_argument("-o", "--output", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--exp", type=_nonneg)
    g.add_argument("--exp-uniform-test", type=_positive, metavar="D",
                   help="use the exponent 2**(D+1) - 2")

    p = sub.add_parser("find-uniform", help="identity test on the four candidate recurrences")
    p.add_argument("--coeffs", type=_int_list, required=True)
    p.add_argument("--s", type=_positive, default=2)
    p.add_argument("--emit-matrix", metavar="FILE",
                   help="write the companion matrix of the first survivor")

    p = sub.add_parser("check-poly", help="admissibility of recurrence coefficients")
    p.add_argument("--coeffs", type=_int_list, required=True)

    p = sub.add_parser("gen", help="emit terms of a recurrence")
    p.add_argument("--coeffs", type=_int_list, required=True)
    p.add_argument("--s", type=_positive, default=2)
    p.add_argument("--init", type=_int_list, required=True)
    p.add_argument("--count", type=_nonneg, required=True)

    p = sub.add_parser("schedule", help="memory/compute overlap model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--z", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--block", type=int, default=20)
    p.add_argument("--simulate", action="store_true")
    p.add_argument("--trace", metavar="FILE", help="write the per-step trace (implies --simulate)")

    p = sub.add_parser("selftest", help="staggered subject/examiner check of the dot kernel")
    p.add_argument("--width", type=_positive, required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--inject-fault", action="store_true")
    return parser


def _cmd_mul(args, out):
    a = fileio.read_matrix(args.a)
    b = fileio.read_matrix(args.b)
    if args.algo == "naive":
        c = mul_naive(a, b)
    elif args.algo == "blocked":
        c = mul_blocked(a, b, BlockParams(block=args.block, n=args.n))
    else:
        c = mul_strassen(a, b, StrassenConfig(threshold=args.threshold))
    fileio.write_matrix(args.output, c)


def _cmd_pow(args, out):
    m = fileio.read_matrix(args.m)
    e = args.exp if args.exp is not None else 2 ** (args.exp_uniform_test + 1) - 2
    fileio.write_matrix(args.output, matpow(m, e))


def _cmd_find_uniform(args, out):
    spec = RecurrenceSpec(args.coeffs, args.s)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = select_uniform(spec)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    print(f"exponent {report.exponent}", file=out)
    print(report.table(), file=out)
    if args.emit_matrix:
        if not report.survivors:
            raise DomainError("no candidate survived the identity test; nothing to emit")
        fileio.write_matrix(args.emit_matrix, companion(report.survivors[0].spec))


def _cmd_check_poly(args, out):
    spec = RecurrenceSpec(args.coeffs)
    f = char_poly_mod2(spec)
    print(f"{'char_poly':<12}{f}", file=out)
    rep = check_condition(spec)
    print(f"{'remainder':<12}{rep.remainder}", file=out)
    print(f"{'admissible':<12}{str(rep.admissible).lower()}", file=out)
    if rep.admissible:
        print(f"{'P':<12}{rep.P}", file=out)
        if rep.P.degree <= ORDER_DEGREE_CAP:
            e = order(rep.P)
            print(f"{'order':<12}{e}", file=out)
            print(f"{'maximal':<12}{str(e == 2 ** rep.P.degree - 1).lower()}", file=out)


def _cmd_gen(args, out):
    spec = RecurrenceSpec(args.coeffs, args.s)
    for v in generate(spec, args.init, args.count):
        print(v, file=out)


def _cmd_schedule(args, out):
    params = ScheduleParams(args.n, args.depth, args.k, args.z, args.delta, args.block)
    if args.simulate or args.trace:
        report = simulate(params)
        if args.trace:
            with open(args.trace, "w", newline="\n") as fh:
                for rec in report.trace:
                    fh.write(rec.line() + "\n")
    else:
        report = cost_model(params)
    print(report.table(), file=out)


def _cmd_selftest(args, out):
    rep = staggered_selftest(args.width, args.rounds, inject_fault=args.inject_fault)
    print(f"{'width':<8}{rep.width:>12}", file=out)
    print(f"{'rounds':<8}{rep.rounds:>12}", file=out)
    print(f"{'errors':<8}{rep.errors:>12}", file=out)
    return 1 if rep.errors else 0


COMMANDS = {
    "mul": _cmd_mul,
    "pow": _cmd_pow,
    "find-uniform": _cmd_find_uniform,
    "check-poly": _cmd_check_poly,
    "gen": _cmd_gen,
    "schedule": _cmd_schedule,
    "selftest": _cmd_selftest,
}


def run(argv=None, out=None):
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return COMMANDS[args.command](args, out) or 0
    except FormatError as exc:
        print(f"z4mat: format error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"z4mat: I/O error: {exc}", file=sys.stderr)
        return 2
    except (DimensionError, DomainError) as exc:
        print(f"z4mat: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
