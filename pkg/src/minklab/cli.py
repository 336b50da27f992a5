"""Command-line entry point: ``minklab <command> ...``.

Every JSON output is canonical (sorted keys, rational strings) so identical
inputs give byte-identical files. Wall-clock data goes to ``<out>.meta.json``.
"""
from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
import time
from pathlib import Path

from . import harness
from .exact import Q, RationalParseError, fmt, parse_rational
from .measures import DEFAULT_TOL, UnsupportedMeasure, measure_all
from .serialize import SetFormatError, dumps, dumps_set, loads_set
from .sets import GALLERY, BudgetExceeded, average, gallery

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CLAIMS = ("counterexample", "thm2", "thm3", "mono1d", "superadd", "supermod",
          "triple-c", "gallery")

RATES_HELP = """\
CSV columns, one row per k = 1..kmax (all values exact rationals p/q):
  k                    averaging order
  delta_lo, delta_hi   bounds on Vol(conv A(k) minus A(k))
  d_lo, d_hi           bounds on the Hausdorff distance of A(k) to its hull
  d_square             exact square of that distance when known, else empty
  c_lo, c_hi           bounds on Schneider's non-convexity index of A(k)
  k_<m>_lo, k_<m>_hi   the same bounds multiplied by k (flat columns = O(1/k))
"""


class CliError(Exception):
    """Reported on stderr with exit code 2."""


def _rational_arg(text: str) -> Q:
    try:
        return parse_rational(text)
    except RationalParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_rational(text: str) -> Q:
    q = _rational_arg(text)
    if q <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return q


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _read_set(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return loads_set(text)
    except SetFormatError as exc:
        raise CliError(f"{path}: {exc}") from None


def _emit(text: str, out: str | None, meta: dict | None = None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text)
    if meta is not None:
        meta = dict(meta, written_at=datetime.datetime.now(datetime.timezone.utc).isoformat())
        Path(out + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _meta(args, t0: float) -> dict:
    return {"command": args.command, "seed": getattr(args, "seed", None),
            "runtime_ms": int((time.perf_counter() - t0) * 1000)}


# ---------------------------------------------------------------------------


def cmd_avg(args) -> int:
    t0 = time.perf_counter()
    a = _read_set(args.set)
    try:
        avg = average(a, args.k, budget=args.budget)
    except BudgetExceeded as exc:
        raise CliError(f"{exc}; raise --budget or MINKLAB_BUDGET") from None
    _emit(dumps_set(avg), args.out, _meta(args, t0))
    print(f"A({args.k}): {len(avg)} {avg.rep}", file=sys.stderr if args.out is None else sys.stdout)
    return EXIT_OK


def cmd_measure(args) -> int:
    t0 = time.perf_counter()
    a = _read_set(args.set)
    try:
        results = measure_all(a, args.which, tol=args.tol, seed=args.seed)
    except UnsupportedMeasure as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_USAGE
    doc = {"seed": args.seed, "tol": fmt(args.tol), "which": args.which,
           "dim": a.dim, "rep": a.rep,
           "results": {k: r.to_dict() for k, r in results.items()}}
    _emit(dumps(doc), args.out, _meta(args, t0))
    return EXIT_OK


def _run_claim(args) -> harness.Report:
    c = args.claim
    if c == "counterexample":
        if args.n is None or args.p is None:
            raise CliError("verify counterexample needs --n and --p")
        if args.n < 2 or not 1 <= args.p <= args.n - 1:
            raise CliError("need n >= 2 and 1 <= p <= n-1")
        return harness.verify_counterexample(args.n, args.p)
    trials = args.trials
    if c == "thm2":
        return harness.check_theorem2(trials or 200, args.kmax or 4, args.seed, tol=args.tol)
    if c == "thm3":
        return harness.check_theorem3(trials or 200, args.kmax or 4, args.seed)
    if c == "mono1d":
        return harness.check_1d_monotonicity(trials or 200, args.kmax or 6, args.seed)
    if c == "superadd":
        return harness.superadditivity_suite(trials or 100, args.seed)
    if c == "supermod":
        return harness.supermodularity_suite(trials or 100, args.seed)
    if c == "triple-c":
        return harness.check_triple_c(trials or 200, args.seed)
    return harness.check_gallery(tol=args.tol)


def _claim_exit(args, report: harness.Report) -> int:
    if args.claim != "counterexample":
        return EXIT_FAIL if report.violations else EXIT_OK
    if not report.details["agree"]:
        return EXIT_FAIL
    expected = args.n >= 12 and args.p == math.ceil(args.n / 2)
    if expected and not report.violations:
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    report = _run_claim(args)
    doc = report.to_dict()
    doc["seed"] = args.seed
    text = dumps(doc)
    if args.json:
        sys.stdout.write(text)
    if args.out is not None:
        _emit(text, args.out, {"command": "verify", "claim": args.claim, "seed": args.seed,
                               "runtime_ms": report.runtime_ms})
    summary = (f"{report.claim_id}: {report.instances} instances, "
               f"{report.violations} violations")
    if report.worst_margin is not None:
        summary += f", worst margin {fmt(report.worst_margin)}"
    print(report.message or summary, file=sys.stderr if args.json else sys.stdout)
    if report.message:
        print(summary, file=sys.stderr if args.json else sys.stdout)
    return _claim_exit(args, report)


def cmd_rates(args) -> int:
    t0 = time.perf_counter()
    a = _read_set(args.set)
    try:
        table = harness.rates(a, args.kmax, tol=args.tol, seed=args.seed)
    except UnsupportedMeasure as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(table.to_csv(), args.out, _meta(args, t0))
    return EXIT_OK


def cmd_search(args) -> int:
    report = harness.search_violation(args.dim, args.trials, args.kmax, args.seed,
                                      budget=args.budget)
    if args.out is not None:
        doc = report.to_dict()
        doc["seed"] = args.seed
        _emit(dumps(doc), args.out, {"command": "search", "seed": args.seed,
                                     "runtime_ms": report.runtime_ms})
    print(report.message)
    return EXIT_OK


def cmd_gallery(args) -> int:
    try:
        a = gallery(args.family, args.param, dim=args.dim)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    _emit(dumps_set(a), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _search_dim(text: str) -> int:
    v = _positive_int(text)
    if not 2 <= v <= 11:
        raise argparse.ArgumentTypeError(
            f"dim must be in 2..11 (got {v}); use 'verify counterexample' for n >= 12")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minklab",
                                description="Exact Minkowski averages and non-convexity measures.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True, tol=False, out=True):
        if seed:
            sp.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        if tol:
            sp.add_argument("--tol", type=_positive_rational, default=DEFAULT_TOL,
                            help="bisection tolerance as p/q (default 1/1048576)")
        if out:
            sp.add_argument("--out", help="output file (default stdout)")

    sp = sub.add_parser("avg", help="write the Minkowski average A(k) of a set")
    sp.add_argument("set", help="set JSON file, or - for stdin")
    sp.add_argument("--k", type=_positive_int, required=True)
    sp.add_argument("--budget", type=_positive_int, default=None,
                    help="max boxes in intermediate sums (default $MINKLAB_BUDGET or 5000)")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_avg)

    sp = sub.add_parser("measure", help="compute Delta, d and/or c with certificates")
    sp.add_argument("set")
    sp.add_argument("--which", choices=("delta", "d", "c", "all"), default="all")
    common(sp, tol=True)
    sp.set_defaults(func=cmd_measure)

    sp = sub.add_parser("verify", help="run one claim check and report violations")
    sp.add_argument("claim", choices=CLAIMS)
    sp.add_argument("--n", type=_positive_int)
    sp.add_argument("--p", type=_positive_int)
    sp.add_argument("--trials", type=_positive_int)
    sp.add_argument("--kmax", type=_positive_int)
    sp.add_argument("--json", action="store_true", help="print the report JSON to stdout")
    common(sp, tol=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("rates", help="CSV of the measures of A(k), k = 1..kmax",
                        epilog=RATES_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sp.add_argument("--set", required=True, help="set JSON file")
    sp.add_argument("--kmax", type=_positive_int, default=10)
    common(sp, tol=True)
    sp.set_defaults(func=cmd_rates)

    sp = sub.add_parser("search", help="random search for Vol(A(k+1)) < Vol(A(k)) in R^2..R^11")
    sp.add_argument("--dim", type=_search_dim, required=True)
    sp.add_argument("--trials", type=_positive_int, default=100)
    sp.add_argument("--kmax", type=_positive_int, default=4)
    sp.add_argument("--budget", type=_positive_int, default=None)
    common(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("gallery", help="write a gallery set as JSON")
    sp.add_argument("family", choices=GALLERY)
    sp.add_argument("param", type=_positive_rational, help="t, h = 1/N or eps, as p/q")
    sp.add_argument("--dim", type=_positive_int, default=1,
                    help="ambient dimension for scaled_segment_pair")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_gallery)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"minklab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
