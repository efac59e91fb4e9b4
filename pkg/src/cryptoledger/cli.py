"""Command-line driver.

Exit codes: 0 success with no invariant flags, 1 operation error,
2 parse error, 3 invariant flags or mismatched checkpoint cells.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import fixtures
from .report import export_csv, render_report_tables, summary
from .scenario import (
    RunOptions,
    RunReport,
    ScenarioError,
    ScenarioRunError,
    parse_scenario,
    run_scenario,
)

EXIT_OK, EXIT_OPERATION, EXIT_PARSE, EXIT_FLAGS = 0, 1, 2, 3


def _load(source: str) -> str:
    """File contents, or a built-in scenario's source when ``source`` names one."""
    p = Path(source)
    if p.exists():
        return p.read_text(encoding="utf-8")
    if source in fixtures.BUILTIN_NAMES:
        return fixtures.builtin_source(source)
    raise FileNotFoundError(source)


def _emit(report: RunReport, fmt: str, out: Optional[str], scale: Optional[int],
          many: bool) -> str:
    text = summary(report)
    if fmt == "table":
        text += "\n" + render_report_tables(report, scale)
    elif fmt == "csv":
        target = Path(out or ".")
        if many:
            target = target / report.scenario
        files = export_csv(report, target)
        text += "".join(f"  wrote {f}\n" for f in files)
    return text


def _run_one(job: tuple) -> tuple[int, str, str]:
    """Run one scenario; returns (exit code, stdout text, stderr text)."""
    source, seed, check, fmt, out, scale, many = job
    try:
        sc = parse_scenario(_load(source))
    except FileNotFoundError:
        return EXIT_PARSE, "", f"{source}: no such file or built-in scenario\n"
    except ScenarioError as e:
        return EXIT_PARSE, "", f"{source}: {type(e).__name__}: {e}\n"
    try:
        report = run_scenario(sc, RunOptions(seed=seed, check_invariants=check))
    except ScenarioRunError as e:
        return EXIT_OPERATION, "", f"{source}: {e}\n"
    text = _emit(report, fmt, out, scale, many)
    code = EXIT_FLAGS if (report.flags or report.mismatches) else EXIT_OK
    return code, text, ""


def cmd_run(args: argparse.Namespace) -> int:
    many = len(args.files) > 1
    jobs = [(f, args.seed, args.check_invariants, args.report, args.out, args.scale, many)
            for f in args.files]
    if args.jobs > 1 and many:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    for _, out, err in results:
        sys.stdout.write(out)
        sys.stderr.write(err)
    codes = [c for c, _, _ in results]
    # the most severe failure wins: parse, then operation, then flags
    for code in (EXIT_PARSE, EXIT_OPERATION, EXIT_FLAGS):
        if code in codes:
            return code
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    if args.name not in fixtures.BUILTIN_NAMES:
        sys.stderr.write(f"unknown built-in scenario {args.name!r}; choose from "
                         f"{', '.join(fixtures.BUILTIN_NAMES)}\n")
        return EXIT_PARSE
    code, out, err = _run_one((args.name, None, True, args.report, args.out, args.scale, False))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        sc = parse_scenario(_load(args.file))
    except FileNotFoundError:
        sys.stderr.write(f"{args.file}: no such file or built-in scenario\n")
        return EXIT_PARSE
    except ScenarioError as e:
        sys.stderr.write(f"{args.file}: {type(e).__name__}: {e}\n")
        return EXIT_PARSE
    sys.stdout.write(f"{sc.name}: {len(sc.agents)} agents, {len(sc.instruments)} instruments, "
                     f"{len(sc.events)} events; initial state consistent\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cryptoledger",
                                description="Balance-sheet simulator for cryptocurrencies.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run scenario files (or built-in scenario names)")
    run.add_argument("files", nargs="+")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--check-invariants", action="store_true")
    run.add_argument("--report", choices=("table", "csv"), default=None)
    run.add_argument("--out", default=None, help="directory for CSV output")
    run.add_argument("--scale", type=int, choices=(1, 1000), default=None)
    run.add_argument("--jobs", type=int, default=1)
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("replay", help="replay a built-in scenario with invariant checks")
    rep.add_argument("name")
    rep.add_argument("--report", choices=("table", "csv"), default=None)
    rep.add_argument("--out", default=None)
    rep.add_argument("--scale", type=int, choices=(1, 1000), default=None)
    rep.set_defaults(func=cmd_replay)

    ver = sub.add_parser("verify", help="parse a scenario and check its initial state")
    ver.add_argument("file")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
