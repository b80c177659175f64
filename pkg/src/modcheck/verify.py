"""The two verification modes and the litmus suite runner.

Litmus mode asks whether a design can produce a test's outcome.  Interface
mode asks whether an implementation subtree can violate an interface's
axioms within a bound on the number of operations per module.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .design import Design, DesignError, load_design, load_interface
from .dsl.ast import PairSpec
from .elaborate import (
    ElaborationError, assign_interface, assign_litmus, build_tree, check_scopes,
)
from .graph import UhbGraph, extract_graph
from .ground import GroundingError, Query, build_interface_query, build_litmus_query, evaluate
from .litmus import Expectation, LitmusError, LitmusTest, load_litmus
from .solver import SAT, UNKNOWN, UNSAT, SolveResult, attribute_domains, solve_native

OBSERVABLE = "Observable"
UNOBSERVABLE = "Unobservable"
INCONCLUSIVE = "Inconclusive"
PASS = "Pass"
VIOLATION = "Violation"
VACUOUS_PASS = "VacuousPass"
REFINES = "Refines"
BUG = "Bug"

DEFAULT_LITMUS_BOUND = 11
DEFAULT_INTERFACE_BOUND = 4


class VerificationError(Exception):
    """A problem with the inputs: the design, the test or the pair file."""


@dataclass
class Backend:
    """Which solver decides queries, and how."""

    solver: str = "native"  # "native" or an SMT-LIB2 command line
    timeout: float = 0.0
    kernel: Optional[str] = None
    symmetry: bool = True

    @property
    def is_native(self) -> bool:
        return self.solver == "native"

    @classmethod
    def resolve(cls, solver: Optional[str] = None, **kw) -> "Backend":
        """``solver`` if given, else ``$MODCHECK_SOLVER``, else native."""
        chosen = solver or os.environ.get("MODCHECK_SOLVER") or "native"
        return cls(chosen.strip(), **kw)


def solve_query(query: Query, backend: Backend) -> SolveResult:
    """Decide a query; a model that fails re-evaluation counts as a solver failure."""
    f = query.lowered()
    domains = attribute_domains(query.elab)
    if backend.is_native:
        res = solve_native(f, domains, timeout=backend.timeout, kernel=backend.kernel)
    else:
        from .solver.smtlib import solve_external
        res = solve_external(f, domains, backend.solver, backend.timeout)
    if res.status == SAT and not evaluate(f, res.model):
        return SolveResult(UNKNOWN, None, "model failed re-evaluation", res.stats, res.millis)
    return res


def conformance(observable: Optional[bool], expected: Expectation) -> str:
    if observable is None:
        return INCONCLUSIVE
    if observable:
        return VIOLATION if expected is Expectation.FORBIDDEN else PASS
    return VACUOUS_PASS if expected is Expectation.PERMITTED else PASS


@dataclass
class LitmusVerdict:
    test: str
    expected: Expectation
    observable: Optional[bool]
    conformance: str
    bound: int
    millis: float = 0.0
    witness: Optional[UhbGraph] = None
    reason: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        if self.observable is None:
            return INCONCLUSIVE
        return OBSERVABLE if self.observable else UNOBSERVABLE


@dataclass
class InterfaceVerdict:
    implementation: str
    interface: str
    bound: int
    result: str  # Refines, Bug or Inconclusive
    millis: float = 0.0
    witness: Optional[UhbGraph] = None
    reason: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return self.result


def _check_clean(design: Design, tree, interface=None, impl=None) -> None:
    diags = check_scopes(tree, interface, impl)
    if diags:
        raise VerificationError("design has errors:\n" + "\n".join(f"  {d}" for d in diags))


def litmus_query(design: Design, test: LitmusTest, bound: int, symmetry: bool = True) -> Query:
    tree = build_tree(design.root_def, design.modules)
    _check_clean(design, tree)
    try:
        elab = assign_litmus(tree, test, bound)
        return build_litmus_query(elab, symmetry=symmetry)
    except (ElaborationError, GroundingError) as exc:
        raise VerificationError(str(exc)) from None


def verify_litmus(design: Design, test: LitmusTest, bound: int = DEFAULT_LITMUS_BOUND,
                  backend: Optional[Backend] = None, witness: bool = True) -> LitmusVerdict:
    """Is the outcome of ``test`` observable on ``design`` with ``bound`` operations per module?"""
    backend = backend or Backend.resolve()
    start = time.perf_counter()
    query = litmus_query(design, test, bound, backend.symmetry)
    res = solve_query(query, backend)
    observable = None if res.status == UNKNOWN else res.status == SAT
    graph = extract_graph(query, res.model, test.name) if witness and res.status == SAT else None
    return LitmusVerdict(test.name, test.expected, observable, conformance(observable, test.expected),
                         bound, (time.perf_counter() - start) * 1000, graph, res.reason, res.stats)


def interface_query(pair: PairSpec, design: Design, bound: int, impl_path: Optional[str] = None,
                    symmetry: bool = True) -> Query:
    interface = load_interface(pair.interface, design)
    tree = build_tree(design.root_def, design.modules)
    path = impl_path or "."
    impl = tree.find(path)
    if impl is None:
        raise VerificationError(f"no instance {path!r} in design {tree.name!r}")
    _check_clean(design, tree, interface, impl)
    mapping = pair.interface_to_impl()
    impl_events = {e.name for e in impl.definition.events}
    for ev in interface.events:
        if ev.name not in mapping:
            raise VerificationError(f"interface event {ev.name!r} of {interface.name} is not mapped")
    for iface_ev, impl_ev in mapping.items():
        if iface_ev not in {e.name for e in interface.events}:
            raise VerificationError(f"{interface.name} has no event {iface_ev!r}")
        if impl_ev not in impl_events:
            raise VerificationError(f"{impl.definition.name} has no event {impl_ev!r}")
    try:
        elab = assign_interface(tree, path, interface, bound)
        return build_interface_query(elab, mapping, symmetry=symmetry)
    except (ElaborationError, GroundingError) as exc:
        raise VerificationError(str(exc)) from None


def verify_interface(pair: PairSpec, design: Design, bound: int = DEFAULT_INTERFACE_BOUND,
                     backend: Optional[Backend] = None, impl_path: Optional[str] = None,
                     witness: bool = True) -> InterfaceVerdict:
    """Can the implementation violate the interface with ``bound`` operations per module?"""
    backend = backend or Backend.resolve()
    start = time.perf_counter()
    query = interface_query(pair, design, bound, impl_path, backend.symmetry)
    res = solve_query(query, backend)
    result = {SAT: BUG, UNSAT: REFINES}.get(res.status, INCONCLUSIVE)
    title = f"{pair.implementation}_{pair.interface}"
    graph = extract_graph(query, res.model, title) if witness and res.status == SAT else None
    return InterfaceVerdict(query.elab.scope.path, pair.interface, bound, result,
                            (time.perf_counter() - start) * 1000, graph, res.reason, res.stats)


def load_pair_design(pair: PairSpec, design_root=None, include_paths: Iterable = (),
                     drop_axioms: Iterable[str] = ()) -> tuple[Design, Optional[str]]:
    """The design a pair file is checked in, and the implementation's instance path.

    With an explicit design root, the pair's implementation names an instance
    path inside it; otherwise it names a module type loaded as the root.
    """
    if design_root is not None:
        return load_design(design_root, include_paths, drop_axioms), pair.implementation
    return load_design(pair.implementation, include_paths, drop_axioms), None


# -- suites ----------------------------------------------------------------


@dataclass
class SuiteEntry:
    name: str
    verdict: str
    conformance: str
    millis: float
    error: str = ""


@dataclass
class SuiteReport:
    entries: list[SuiteEntry] = field(default_factory=list)

    @property
    def violations(self) -> list[SuiteEntry]:
        return [e for e in self.entries if e.conformance == VIOLATION]

    def exit_code(self) -> int:
        if self.violations:
            return 1
        if any(e.error for e in self.entries):
            return 2
        if any(e.conformance == INCONCLUSIVE for e in self.entries):
            return 3
        return 0

    def to_json(self) -> str:
        rows = [{k: v for k, v in asdict(e).items() if k != "error" or v} for e in self.entries]
        return json.dumps(rows, indent=2)


@dataclass
class _Job:
    design_root: str
    include_paths: tuple
    drop_axioms: tuple
    test_path: str
    bound: int
    backend: Backend
    dot_out: Optional[str] = None


def _run_one(job: _Job) -> SuiteEntry:
    start = time.perf_counter()
    name = Path(job.test_path).stem
    try:
        test = load_litmus(job.test_path)
        name = test.name
        design = load_design(job.design_root, job.include_paths, job.drop_axioms)
        v = verify_litmus(design, test, job.bound, job.backend, witness=job.dot_out is not None)
    except (LitmusError, DesignError, VerificationError, OSError) as exc:
        return SuiteEntry(name, "Error", INCONCLUSIVE, (time.perf_counter() - start) * 1000, str(exc))
    if job.dot_out and v.witness is not None:
        write_dot(v.witness, job.dot_out, test.name, v.verdict)
    return SuiteEntry(test.name, v.verdict, v.conformance, round(v.millis, 3))


def write_dot(graph: UhbGraph, directory, name: str, verdict: str) -> Path:
    from .graph import to_dot
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.{verdict}.dot"
    path.write_text(to_dot(graph))
    return path


def run_suite(design_root, test_dir, bound: int = DEFAULT_LITMUS_BOUND, jobs: int = 1,
              backend: Optional[Backend] = None, include_paths: Iterable = (),
              drop_axioms: Iterable[str] = (), dot_out=None) -> SuiteReport:
    """Check every ``.test`` file under ``test_dir``; errors are recorded per test."""
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    backend = backend or Backend.resolve()
    paths = sorted(str(p) for p in Path(test_dir).rglob("*.test"))
    todo = [_Job(str(design_root), tuple(map(str, include_paths)), tuple(drop_axioms), p, bound, backend,
                 str(dot_out) if dot_out else None) for p in paths]
    if jobs == 1 or len(todo) <= 1:
        entries = [_run_one(j) for j in todo]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_run_one, todo))
    return SuiteReport(entries)
