"""Command-line entry point.

Exit codes: 0 success, 1 domain failure (violations, infeasible, solver
limits), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Sequence

from .core import validate_structure
from .errors import (
    IterationLimitExceededError,
    NodeLimitExceededError,
    ScenarioError,
    TooLargeForOracleError,
    VodError,
)
from .flow import FlowAssignment, check_all
from .report import FORMATS, Report, oracle_report, read_path_flows, synthesis_report, validation_report, write_report
from .scenario import Scenario, parse_scenario
from .synthesis import brute_force_optimum, synthesize
from .demand import augment_all
from .validation import ValidationReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _UsageError(f"{path}: {exc.strerror}") from None


def _load(path: str) -> Scenario:
    try:
        return parse_scenario(_read(path))
    except ScenarioError as exc:
        raise _UsageError(f"{path}: {exc}") from None


def _emit(report: Report, args: argparse.Namespace) -> None:
    text = write_report(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_validate(args: argparse.Namespace) -> int:
    scn = _load(args.scenario)
    g = scn.graph()
    findings = validate_structure(g)
    if args.flows:
        try:
            paths = read_path_flows(_read(args.flows))
        except ValueError as exc:
            raise _UsageError(f"{args.flows}: {exc}") from None
        commodities = scn.commodities()
        augmented = augment_all(g.physical, commodities)
        findings = ValidationReport.merge(findings, check_all(FlowAssignment.from_paths(paths), commodities, scn.roles(), augmented))
    report = validation_report(findings)
    _emit(report, args)
    return EXIT_OK if findings.ok else EXIT_FAIL


def _cmd_synthesize(args: argparse.Namespace) -> int:
    scn = _load(args.scenario)
    overrides = {k: v for k, v in (("iteration_limit", args.iteration_limit), ("node_limit", args.node_limit), ("pricing", args.pricing)) if v is not None}
    opts = replace(scn.options, **overrides)
    g = scn.graph()
    structure = validate_structure(g)
    if not structure.ok:
        _emit(replace(validation_report(structure), command="synthesize"), args)
        return EXIT_FAIL
    run = synthesize(g, scn.commodities(), opts.milp())
    report = synthesis_report(run)
    _emit(report, args)
    return EXIT_OK if report.ok else EXIT_FAIL


def _cmd_oracle(args: argparse.Namespace) -> int:
    scn = _load(args.scenario)
    g = scn.graph()
    commodities = scn.commodities()
    result = brute_force_optimum(augment_all(g.physical, commodities), commodities, scn.roles())
    _emit(oracle_report(result), args)
    return EXIT_OK if result.feasible else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vodmlg", description="Multi-layer VoD topology validation and synthesis.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("scenario", help="scenario JSON file")
        p.add_argument("--format", choices=FORMATS, default="table", help="report format (default: table)")
        p.add_argument("--out", metavar="PATH", help="write the report here instead of standard output")

    p = sub.add_parser("validate", help="check structure, and flows when given")
    common(p)
    p.add_argument("--flows", metavar="FILE", help="path flows to check: a machine report or a {\"flows\": [...]} file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("synthesize", help="choose links and routes at minimum occupied bandwidth")
    common(p)
    p.add_argument("--iteration-limit", type=int, help="simplex pivots per LP")
    p.add_argument("--node-limit", type=int, help="branch-and-bound nodes")
    p.add_argument("--pricing", choices=("dantzig", "bland"), help="simplex entering-variable rule")
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("oracle", help="brute-force optimum over link subsets (small instances)")
    common(p)
    p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for flag in ("iteration_limit", "node_limit"):
        if getattr(args, flag, None) is not None and getattr(args, flag) <= 0:
            print(f"vodmlg: --{flag.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"vodmlg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IterationLimitExceededError, NodeLimitExceededError, TooLargeForOracleError) as exc:
        print(f"vodmlg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (VodError, ValueError) as exc:
        print(f"vodmlg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def run_cli(argv: Sequence[str]) -> int:
    """Alias of :func:`main` for programmatic use."""
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
