"""Command line entry point.

Exit codes: 0 when every check passed, 1 when a check failed (the report
is still written), 2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import fol
from .groups import classify
from .harness import SUITES, SuiteConfig, UnknownSuite, run_all
from .linalg import SingularMap, parse_matrix_file
from .scalar import ScalarError, format_scalar, parse_scalar

SEED_ENV = "KIN_GAP_SEED"


class UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kingap", description="Exact checks of spacetime automorphism lemmas.")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run verification suites")
    verify.add_argument("--suite", required=True, help="suite name or 'all'")
    verify.add_argument("--samples", type=int, default=200)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--format", choices=("json", "text"), default="json")
    verify.add_argument("--grid", action="store_true", help="exhaustive {-1,0,1} grid for formula suites")

    cls = sub.add_parser("classify", help="classify an affine map read from a matrix file")
    cls.add_argument("--matrix", required=True)

    ev = sub.add_parser("eval", help="evaluate a formula file under an assignment")
    ev.add_argument("--formula", required=True)
    ev.add_argument("--assign", default="", help="comma separated vN=SCALAR pairs")

    sub.add_parser("list-suites", help="print the registered suite names")
    return parser


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def parse_assignment(text: str) -> dict[int, object]:
    val = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or not name.startswith("v") or not name[1:].isdigit() or int(name[1:]) < 1:
            raise UsageError(f"bad assignment {item!r}; expected vN=SCALAR")
        try:
            val[int(name[1:])] = parse_scalar(value)
        except (ValueError, ScalarError) as exc:
            raise UsageError(str(exc)) from None
    return val


def _verify(args, out) -> int:
    seed = args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} is not an integer: {env!r}") from None
    try:
        config = SuiteConfig(args.suite, args.samples, seed, args.format, args.grid)
    except UnknownSuite:
        raise UsageError(f"unknown suite {args.suite!r}; see list-suites") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ok = True
    for report in run_all(config):
        ok = ok and report.passed
        out.write((report.dumps() if args.format == "json" else report.to_text()) + "\n")
        out.flush()
    return 0 if ok else 1


def _classify(args, out) -> int:
    try:
        A = parse_matrix_file(_read(args.matrix))
        report = classify(A)
    except (ValueError, ScalarError, SingularMap) as exc:
        raise UsageError(f"{args.matrix}: {exc}") from None
    for flag in report.ordered_flags():
        out.write(flag + "\n")
    if report.scal_poi_factor is not None:
        out.write(f"scal_poi_factor {format_scalar(report.scal_poi_factor)}\n")
    if report.scal_triv_factor is not None:
        out.write(f"scal_triv_factor {format_scalar(report.scal_triv_factor)}\n")
    return 0


def _eval(args, out) -> int:
    try:
        phi = fol.parse(_read(args.formula))
        result = fol.evaluate(phi, parse_assignment(args.assign))
    except fol.FormulaError as exc:
        raise UsageError(f"{args.formula}: {exc}") from None
    out.write(("true" if result else "false") + "\n")
    return 0


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.command == "verify":
            return _verify(args, out)
        if args.command == "classify":
            return _classify(args, out)
        if args.command == "eval":
            return _eval(args, out)
        for name in SUITES:
            out.write(name + "\n")
        return 0
    except UsageError as exc:
        err.write(f"kingap: error: {exc}\n")
        return 2
