"""Command-line front end: ``gen``, ``dist``, ``diag`` and ``report``.

Exit codes: 0 success, 1 usage error, 2 contract violation, 3 internal
consistency error.  Every rational on the command line and in files is a
``"p/q"`` (or ``"p"``) string.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .diagnostics import (
    ReportConfig,
    SequenceSpec,
    build_trace,
    convergence_report,
    trace_csv,
)
from .errors import ConsistencyError, ContractViolation
from .generators import FamilyId, family
from .measure import SignedMeasure, TestFunction, cdf
from .metric import almost_basic_distance
from .stepfn import StepFunction, parse_scalar

EXIT_OK, EXIT_USAGE, EXIT_CONTRACT, EXIT_CONSISTENCY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return parse_scalar(text)
    except ContractViolation as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive_rational(text: str) -> Fraction:
    x = _rational(text)
    if x <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return x


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _family_name(text: str) -> FamilyId:
    try:
        return FamilyId(text)
    except ValueError:
        known = ", ".join(f.value for f in FamilyId)
        raise argparse.ArgumentTypeError(f"unknown family {text!r} (known: {known})")


def _n_range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}")
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vagueconv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def source(p: argparse.ArgumentParser, allow_input: bool = True) -> None:
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--family", type=_family_name)
        if allow_input:
            group.add_argument("--input", type=Path, help="JSON sequence file")
        idx = p.add_mutually_exclusive_group()
        idx.add_argument("--n", type=int)
        idx.add_argument("--n-range", type=_n_range)
        p.add_argument("--out", type=Path)

    gen = sub.add_parser("gen", help="write family members as JSON")
    source(gen, allow_input=False)

    dist = sub.add_parser("dist", help="certified almost-basic distance of two files")
    dist.add_argument("--f", type=Path, required=True)
    dist.add_argument("--g", type=Path, required=True)
    dist.add_argument("--tol", type=_positive_rational, default=Fraction(1, 10**6))
    dist.add_argument("--out", type=Path)

    for name, text in (("diag", "per-index CSV trace"), ("report", "JSON convergence verdict")):
        p = sub.add_parser(name, help=text)
        source(p)
        p.add_argument("--tol", type=_positive_rational, default=Fraction(1, 10**6))
        p.add_argument("--radii", type=_rational_list, default=[Fraction(1), Fraction(2)])
        p.add_argument("--eps", type=_positive_rational, default=Fraction(1, 2),
                       help="tightness level")
        p.add_argument("--phis", type=Path, help="JSON list of test functions")
        p.add_argument("--grid", type=_rational_list)
        p.add_argument("--exclude", type=_rational_list, default=[])
    return parser


# -- file helpers -------------------------------------------------------------

def _read_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}")


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def load_distribution(data: dict) -> StepFunction:
    """A step function file, or a measure file (converted to its distribution function)."""
    if isinstance(data, dict) and "atoms" in data:
        return cdf(SignedMeasure.from_json(data))
    if isinstance(data, dict) and "breakpoints" in data:
        return StepFunction.from_json(data)
    raise ContractViolation("expected a measure ({'atoms': ...}) or step function ({'breakpoints': ...})")


def sequence_to_json(spec: SequenceSpec) -> dict:
    out: dict = {}
    if spec.family is not None:
        out["family"] = spec.family.value
    out["n_from"] = spec.indices[0]
    out["measures"] = [mu.to_json() for mu in spec.measures]
    out["limit"] = spec.limit.to_json()
    return out


def sequence_from_json(data: dict) -> SequenceSpec:
    try:
        measures = [SignedMeasure.from_json(m) for m in data["measures"]]
    except (KeyError, TypeError) as exc:
        raise ContractViolation(f"sequence JSON needs 'measures': {exc}")
    limit = SignedMeasure.from_json(data["limit"]) if "limit" in data else SignedMeasure.zero()
    if not measures:
        raise ContractViolation("sequence JSON has no measures")
    return SequenceSpec.explicit(measures, limit, int(data.get("n_from", 1)))


def _spec_from_args(args) -> SequenceSpec:
    if args.input is not None:
        return sequence_from_json(_read_json(args.input))
    prof = family(args.family)
    if args.n is not None:
        lo = hi = args.n
    elif args.n_range is not None:
        lo, hi = args.n_range
    else:
        lo, hi = prof.default_range
    return SequenceSpec.from_family(args.family, lo, hi)


def _config_from_args(args) -> ReportConfig:
    cfg = ReportConfig.for_family(args.family) if args.family else ReportConfig()
    cfg.tol = args.tol
    cfg.radii = list(args.radii)
    cfg.tight_eps = args.eps
    if args.phis is not None:
        raw = _read_json(args.phis)
        if not isinstance(raw, list):
            raise UsageError("--phis file must hold a JSON list")
        cfg.test_functions = [TestFunction.from_json(d) for d in raw]
    if args.grid is not None:
        cfg.grid = list(args.grid)
    cfg.exclude = list(args.exclude)
    return cfg


# -- commands -------------------------------------------------------------------

def _cmd_gen(args) -> int:
    prof = family(args.family)
    if args.n is not None:
        obj = prof.generator(args.n)
        _emit(_dumps(obj.to_json()), args.out)
        return EXIT_OK
    lo, hi = args.n_range if args.n_range is not None else prof.default_range
    _emit(_dumps(sequence_to_json(SequenceSpec.from_family(args.family, lo, hi))), args.out)
    return EXIT_OK


def _cmd_dist(args) -> int:
    f = load_distribution(_read_json(args.f))
    g = load_distribution(_read_json(args.g))
    bracket = almost_basic_distance(f, g, args.tol)
    _emit(_dumps(bracket.to_json()), args.out)
    return EXIT_OK


def _cmd_diag(args) -> int:
    spec = _spec_from_args(args)
    cfg = _config_from_args(args)
    _emit(trace_csv(build_trace(spec, cfg), cfg.radii), args.out)
    return EXIT_OK


def _cmd_report(args) -> int:
    spec = _spec_from_args(args)
    cfg = _config_from_args(args)
    try:
        report = convergence_report(spec, cfg)
    except ConsistencyError as exc:
        if exc.report is not None:
            _emit(_dumps(exc.report.to_json()), args.out)
        print(f"vagueconv: consistency error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    _emit(_dumps(report.to_json()), args.out)
    return EXIT_OK


COMMANDS = {"gen": _cmd_gen, "dist": _cmd_dist, "diag": _cmd_diag, "report": _cmd_report}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"vagueconv: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ContractViolation as exc:
        print(f"vagueconv: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
