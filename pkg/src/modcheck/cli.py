"""Command-line interface.

Exit codes: 0 Pass/VacuousPass/Refines, 1 Violation/Bug, 2 usage or input
errors, 3 solver failure or an inconclusive result.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .design import DesignError, load_design, load_interface, load_pair
from .dsl.ast import DslError
from .elaborate import ElaborationError, build_tree, check_scopes
from .ground import dump
from .litmus import LitmusError, load_litmus
from .verify import (
    BUG, DEFAULT_INTERFACE_BOUND, DEFAULT_LITMUS_BOUND, INCONCLUSIVE, REFINES, VIOLATION, Backend,
    VerificationError, interface_query, litmus_query, load_pair_design, run_suite, verify_interface,
    verify_litmus, write_dot,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with 2, as argparse does, but say so plainly
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return n


def _nonneg_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected seconds, got {text!r}") from None
    if x < 0:
        raise argparse.ArgumentTypeError(f"expected non-negative seconds, got {text!r}")
    return x


def _add_design(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--design", required=required, metavar="ROOT",
                   help="root .mdef file, or the name of a bundled fixture")
    p.add_argument("--include", "-I", action="append", default=[], metavar="DIR",
                   help="extra directory searched for <Type>.mdef/.uax/.iface (repeatable)")
    p.add_argument("--drop-axiom", action="append", default=[], metavar="TYPE.AXIOM",
                   help="remove an axiom before checking (repeatable)")


def _add_solver(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver", default=None,
                   help='"native" (default) or an SMT-LIB2 command such as "z3 -in"; '
                        "overrides $MODCHECK_SOLVER")
    p.add_argument("--timeout", type=_nonneg_float, default=0.0, metavar="SECONDS",
                   help="per-query solver time limit (0: none)")
    p.add_argument("--no-symmetry", action="store_true",
                   help="disable symmetry breaking among interchangeable operations")


def _add_report(p: argparse.ArgumentParser) -> None:
    p.add_argument("--report", nargs=2, metavar=("FORMAT", "PATH"),
                   help="machine-readable report; FORMAT must be json")
    p.add_argument("--dot-out", metavar="DIR", help="write witness graphs as <name>.<verdict>.dot")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modcheck", description="Check modular microarchitectural ordering specifications.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check-litmus", help="is a litmus outcome observable on a design?")
    _add_design(p, required=True)
    p.add_argument("tests", nargs="+", metavar="TEST", help=".test files")
    p.add_argument("--bound", type=_positive, default=DEFAULT_LITMUS_BOUND,
                   help=f"operations per non-core module (default {DEFAULT_LITMUS_BOUND})")
    _add_solver(p)
    _add_report(p)
    p.add_argument("--dump-formula", metavar="PATH", help="write the ground formula as s-expressions")

    p = sub.add_parser("check-interface", help="does an implementation refine its interface?")
    p.add_argument("pair", metavar="PAIR", help=".pair file (or the name of a bundled one)")
    _add_design(p, required=False)
    p.add_argument("--bound", type=_positive, default=DEFAULT_INTERFACE_BOUND,
                   help=f"operations per module (default {DEFAULT_INTERFACE_BOUND})")
    _add_solver(p)
    _add_report(p)
    p.add_argument("--dump-formula", metavar="PATH", help="write the ground formula as s-expressions")

    p = sub.add_parser("run-suite", help="check every .test file under a directory")
    _add_design(p, required=True)
    p.add_argument("directory", metavar="DIR")
    p.add_argument("--bound", type=_positive, default=DEFAULT_LITMUS_BOUND)
    p.add_argument("--jobs", "-j", type=_positive, default=1, help="parallel queries")
    _add_solver(p)
    _add_report(p)

    p = sub.add_parser("lint", help="parse and scope-check a design")
    _add_design(p, required=False)
    p.add_argument("--pair", help="also check an interface pair file")

    p = sub.add_parser("emit-smt", help="write the SMT-LIB2 query without solving")
    _add_design(p, required=False)
    p.add_argument("test", nargs="?", metavar="TEST", help=".test file (litmus query)")
    p.add_argument("--pair", help=".pair file (interface query) instead of a test")
    p.add_argument("--bound", type=_positive, default=None)
    p.add_argument("--no-symmetry", action="store_true")
    p.add_argument("-o", "--output", metavar="PATH", help="output file (default stdout)")
    return parser


def _backend(args) -> Backend:
    return Backend.resolve(args.solver, timeout=args.timeout, symmetry=not args.no_symmetry)


def _check_report(args) -> None:
    if getattr(args, "report", None) and args.report[0] != "json":
        raise _Usage(f"unsupported report format {args.report[0]!r}; use json")


class _Usage(Exception):
    pass


def _write_report(args, rows: list[dict]) -> None:
    if getattr(args, "report", None):
        Path(args.report[1]).write_text(json.dumps(rows, indent=2) + "\n")


def cmd_check_litmus(args) -> int:
    _check_report(args)
    design = load_design(args.design, args.include, args.drop_axiom)
    backend = _backend(args)
    rows = []
    code = EXIT_OK
    for path in args.tests:
        test = load_litmus(path)
        if args.dump_formula:
            q = litmus_query(design, test, args.bound, backend.symmetry)
            Path(args.dump_formula).write_text(dump(q.formula) + "\n")
        v = verify_litmus(design, test, args.bound, backend)
        extra = f" ({v.reason})" if v.reason else ""
        print(f"{test.name}: {v.verdict}, expected {test.expected.value}: {v.conformance}"
              f" [{v.millis:.0f} ms]{extra}")
        if args.dot_out and v.witness is not None:
            write_dot(v.witness, args.dot_out, test.name, v.verdict)
        rows.append({"name": test.name, "verdict": v.verdict, "conformance": v.conformance,
                     "millis": round(v.millis, 3)})
        if v.conformance == VIOLATION:
            code = EXIT_FAIL
        elif v.conformance == INCONCLUSIVE and code == EXIT_OK:
            code = EXIT_SOLVER
    _write_report(args, rows)
    return code


def cmd_check_interface(args) -> int:
    _check_report(args)
    pair = load_pair(args.pair)
    design, impl_path = load_pair_design(pair, args.design, args.include, args.drop_axiom)
    backend = _backend(args)
    if args.dump_formula:
        q = interface_query(pair, design, args.bound, impl_path, backend.symmetry)
        Path(args.dump_formula).write_text(dump(q.formula) + "\n")
    v = verify_interface(pair, design, args.bound, backend, impl_path)
    name = f"{pair.implementation}_{pair.interface}"
    extra = f" ({v.reason})" if v.reason else ""
    print(f"{v.implementation} vs {v.interface} at bound {v.bound}: {v.result} [{v.millis:.0f} ms]{extra}")
    if args.dot_out and v.witness is not None:
        path = write_dot(v.witness, args.dot_out, name, v.result)
        print(f"witness written to {path}")
    _write_report(args, [{"name": name, "verdict": v.result, "conformance": v.result,
                          "millis": round(v.millis, 3)}])
    return {REFINES: EXIT_OK, BUG: EXIT_FAIL}.get(v.result, EXIT_SOLVER)


def cmd_run_suite(args) -> int:
    _check_report(args)
    if not Path(args.directory).is_dir():
        raise _Usage(f"not a directory: {args.directory}")
    load_design(args.design, args.include, args.drop_axiom)  # fail early on a bad design
    report = run_suite(args.design, args.directory, args.bound, args.jobs, _backend(args),
                       args.include, args.drop_axiom, args.dot_out)
    width = max([len(e.name) for e in report.entries] + [4])
    for e in report.entries:
        tail = f"  {e.error}" if e.error else ""
        print(f"{e.name:<{width}}  {e.verdict:<12}  {e.conformance:<12}  {e.millis:9.1f} ms{tail}")
    n = len(report.entries)
    print(f"{n} test(s), {sum(e.conformance in ('Pass', 'VacuousPass') for e in report.entries)} passed, "
          f"{len(report.violations)} violation(s)")
    for e in report.violations:
        print(f"violation: {e.name}")
    if args.report:
        Path(args.report[1]).write_text(report.to_json() + "\n")
    return report.exit_code()


def cmd_lint(args) -> int:
    if args.design is None and args.pair is None:
        raise _Usage("lint needs --design or --pair")
    diags = []
    if args.pair:
        pair = load_pair(args.pair)
        design, impl_path = load_pair_design(pair, args.design, args.include, args.drop_axiom)
        interface = load_interface(pair.interface, design)
        tree = build_tree(design.root_def, design.modules)
        impl = tree.find(impl_path or ".")
        if impl is None:
            raise _Usage(f"no instance {impl_path!r} in design {tree.name!r}")
        diags = check_scopes(tree, interface, impl)
    else:
        design = load_design(args.design, args.include, args.drop_axiom)
        tree = build_tree(design.root_def, design.modules)
        diags = check_scopes(tree)
    for d in diags:
        print(d)
    return EXIT_FAIL if diags else EXIT_OK


def cmd_emit_smt(args) -> int:
    from .solver import attribute_domains
    from .solver.smtlib import emit_smtlib

    if (args.test is None) == (args.pair is None):
        raise _Usage("emit-smt needs exactly one of TEST or --pair")
    if args.pair:
        pair = load_pair(args.pair)
        design, impl_path = load_pair_design(pair, args.design, args.include, args.drop_axiom)
        q = interface_query(pair, design, args.bound or DEFAULT_INTERFACE_BOUND, impl_path,
                            not args.no_symmetry)
    else:
        if args.design is None:
            raise _Usage("emit-smt with a litmus test needs --design")
        design = load_design(args.design, args.include, args.drop_axiom)
        test = load_litmus(args.test)
        q = litmus_query(design, test, args.bound or DEFAULT_LITMUS_BOUND, not args.no_symmetry)
    text = emit_smtlib(q.lowered(), attribute_domains(q.elab))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "check-litmus": cmd_check_litmus,
    "check-interface": cmd_check_interface,
    "run-suite": cmd_run_suite,
    "lint": cmd_lint,
    "emit-smt": cmd_emit_smt,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (_Usage, DesignError, DslError, LitmusError, VerificationError, ElaborationError) as exc:
        print(f"modcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"modcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
