"""SMT-LIB2 output and the external-solver adapter.

The emitted problem uses QF_LIA: a Bool per node existence flag, non-null
flag and free relation atom, an Int timestamp per node, and a bounded Int
per symbolic attribute.  Attribute values are numbered through one table
per attribute name (``kind``, ``addr``, ``data``), listed in a comment
header so that a model can be read back by hand.
"""

from __future__ import annotations

import re
import shlex
import signal
import subprocess
import time
from dataclasses import dataclass, field
from typing import Optional

from ..ground import (
    And, AttrEq, AttrSame, Assignment, Const, Exists, G, NonNull, Not, Or, PredVar, SameNodeT,
    Strict, iter_atoms,
)
from . import SAT, UNKNOWN, UNSAT, SolveResult

_SIMPLE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")


def _sym(text: str) -> str:
    return text if _SIMPLE.match(text) else "|" + text.replace("|", "_").replace("\\", "_") + "|"


def _node_name(prefix: str, node) -> str:
    uid, ev = node
    return _sym(f"{prefix}_{uid}_{ev}")


@dataclass
class SmtProblem:
    text: str
    # symbol -> ("ex"|"ts", node) | ("nn", uid) | ("pred", (name, uids)) | ("attr", (uid, attr))
    symbols: dict[str, tuple] = field(default_factory=dict)
    tables: dict[str, list] = field(default_factory=dict)


def _value_key(v):
    return (type(v).__name__, v)


def build_smtlib(f: G, domains: Optional[dict] = None) -> SmtProblem:
    """Encode a lowered NNF formula; see :func:`emit_smtlib`."""
    domains = domains or {}
    prob = SmtProblem("")
    atoms = list(iter_atoms(f))
    for a in atoms:
        if isinstance(a, SameNodeT):
            raise ValueError("lower SameNode before emitting")

    nodes = set()
    bools: dict[G, str] = {}
    attr_keys = set()
    for a in atoms:
        if isinstance(a, Exists):
            nodes.add(a.node)
            bools[a] = _node_name("ex", a.node)
            prob.symbols[bools[a]] = ("ex", a.node)
        elif isinstance(a, Strict):
            nodes.update((a.a, a.b))
        elif isinstance(a, NonNull):
            bools[a] = _sym(f"nn_{a.uid}")
            prob.symbols[bools[a]] = ("nn", a.uid)
        elif isinstance(a, PredVar):
            bools[a] = _sym(f"{a.name}_" + "_".join(map(str, a.uids)))
            prob.symbols[bools[a]] = ("pred", (a.name, a.uids))
        elif isinstance(a, AttrEq):
            attr_keys.add((a.uid, a.attr))
        elif isinstance(a, AttrSame):
            attr_keys.add((a.u1, a.attr))
            attr_keys.add((a.u2, a.attr))

    # one value table per attribute name, shared by every operation
    tables: dict[str, list] = {}
    for uid, attr in attr_keys:
        tables.setdefault(attr, [])
        for v in domains[(uid, attr)]:
            if v not in tables[attr]:
                tables[attr].append(v)
    for attr in tables:
        tables[attr].sort(key=_value_key)
    prob.tables = tables
    index = {attr: {v: k for k, v in enumerate(vals)} for attr, vals in tables.items()}

    def attr_name(uid: int, attr: str) -> str:
        return _sym(f"{attr}_{uid}")

    def ts(node) -> str:
        return _node_name("ts", node)

    lines = ["(set-logic QF_LIA)", "(set-option :produce-models true)"]
    for attr in sorted(tables):
        shown = " ".join(f"{k}={v}" for k, v in enumerate(tables[attr]))
        lines.append(f"; {attr}: {shown}")
    for a in sorted(bools, key=lambda x: bools[x]):
        lines.append(f"(declare-const {bools[a]} Bool)")
    for node in sorted(nodes):
        name = ts(node)
        prob.symbols[name] = ("ts", node)
        lines.append(f"(declare-const {name} Int)")
    for uid, attr in sorted(attr_keys):
        name = attr_name(uid, attr)
        prob.symbols[name] = ("attr", (uid, attr))
        lines.append(f"(declare-const {name} Int)")
        allowed = [f"(= {name} {index[attr][v]})" for v in domains[(uid, attr)]]
        lines.append(f"(assert {_or(allowed)})")

    def atom_text(a: G) -> str:
        if isinstance(a, Const):
            return "true" if a.value else "false"
        if isinstance(a, Strict):
            return f"(< {ts(a.a)} {ts(a.b)})"
        if isinstance(a, AttrEq):
            k = index[a.attr].get(a.value)
            if k is None or a.value not in domains[(a.uid, a.attr)]:
                return "false"
            return f"(= {attr_name(a.uid, a.attr)} {k})"
        if isinstance(a, AttrSame):
            return f"(= {attr_name(a.u1, a.attr)} {attr_name(a.u2, a.attr)})"
        return bools[a]

    # name every connective that is shared, so the text stays linear in the DAG
    refs: dict[int, int] = {}
    order: list[G] = []  # post-order: children before parents
    stack: list[tuple[G, bool]] = [(f, False)]
    while stack:
        x, expanded = stack.pop()
        if isinstance(x, Not):
            stack.append((x.arg, False))
        elif not isinstance(x, (And, Or)):
            continue
        elif expanded:
            order.append(x)
        else:
            refs[id(x)] = refs.get(id(x), 0) + 1
            if refs[id(x)] == 1:
                stack.append((x, True))
                stack.extend((c, False) for c in x.args)
    names: dict[int, str] = {}
    text_of: dict[int, str] = {}

    def render(x: G) -> str:
        if isinstance(x, (And, Or)):
            if id(x) in names:
                return names[id(x)]
            return text_of[id(x)]
        if isinstance(x, Not):
            return f"(not {render(x.arg)})"
        return atom_text(x)

    defs = []
    for x in order:
        op = "and" if isinstance(x, And) else "or"
        body = f"({op} {' '.join(render(c) for c in x.args)})"
        if refs[id(x)] > 1 and x is not f:
            name = f"d{len(names)}"
            names[id(x)] = name
            defs.append(f"(define-fun {name} () Bool {body})")
        else:
            text_of[id(x)] = body
    lines.extend(defs)

    if isinstance(f, And):
        for c in f.args:
            lines.append(f"(assert {render(c)})")
    elif not (isinstance(f, Const) and f.value):
        lines.append(f"(assert {render(f)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    prob.text = "\n".join(lines) + "\n"
    return prob


def _or(parts: list[str]) -> str:
    if not parts:
        return "false"
    if len(parts) == 1:
        return parts[0]
    return "(or " + " ".join(parts) + ")"


def emit_smtlib(f: G, domains: Optional[dict] = None) -> str:
    """SMT-LIB2 text (QF_LIA) deciding a lowered NNF ground formula."""
    return build_smtlib(f, domains).text


# -- reading solver output -------------------------------------------------


def _tokens(text: str):
    return re.findall(r"\|[^|]*\||\(|\)|[^\s()]+", text)


def _parse_sexprs(text: str) -> list:
    out: list = []
    stack: list[list] = [out]
    for tok in _tokens(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise ValueError("unbalanced parenthesis")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unbalanced parenthesis")
    return out


def _value(expr):
    if isinstance(expr, list):
        if len(expr) == 2 and expr[0] == "-":
            return -_value(expr[1])
        raise ValueError(f"unsupported value {expr!r}")
    if expr == "true":
        return True
    if expr == "false":
        return False
    return int(expr)


def parse_model(text: str) -> dict[str, object]:
    """``define-fun`` constants of a ``(get-model)`` answer, by symbol."""
    values: dict[str, object] = {}

    def visit(e) -> None:
        if not isinstance(e, list):
            return
        if len(e) == 5 and e[0] == "define-fun" and e[2] == []:
            values[e[1]] = _value(e[4])
            return
        for c in e:
            visit(c)

    for e in _parse_sexprs(text):
        visit(e)
    return values


def decode_model(prob: SmtProblem, values: dict[str, object]) -> Assignment:
    env = Assignment()
    for sym, (kind, key) in prob.symbols.items():
        v = values.get(sym, values.get(sym.strip("|")))
        if kind == "ex":
            env.exists[key] = bool(v)
        elif kind == "ts":
            env.ts[key] = int(v or 0)
        elif kind == "nn":
            env.nonnull[key] = bool(v)
        elif kind == "pred":
            env.preds[key] = bool(v)
        elif kind == "attr" and v is not None:
            env.attrs[key] = prob.tables[key[1]][int(v)]
    return env


def run_external(smt_text: str, command, timeout: float = 0.0) -> tuple[str, dict, str]:
    """Run an SMT-LIB2 solver on ``smt_text``.

    Returns ``(status, model values, reason)``; failures of any kind give
    ``unknown`` with the reason (timeout, signal, exit status, stderr).
    """
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    try:
        proc = subprocess.run(argv, input=smt_text, capture_output=True, text=True,
                              timeout=timeout or None)
    except subprocess.TimeoutExpired:
        return UNKNOWN, {}, f"timeout after {timeout:g}s"
    except OSError as exc:
        return UNKNOWN, {}, f"cannot run {argv[0]!r}: {exc}"
    if proc.returncode < 0:
        try:
            name = signal.Signals(-proc.returncode).name
        except ValueError:
            name = str(-proc.returncode)
        return UNKNOWN, {}, f"solver killed by signal {name}"
    lines = proc.stdout.strip().splitlines()
    head = lines[0].strip() if lines else ""
    if head == UNSAT:
        return UNSAT, {}, ""
    if head == SAT:
        try:
            return SAT, parse_model("\n".join(lines[1:])), ""
        except ValueError as exc:
            return UNKNOWN, {}, f"unparseable model: {exc}"
    reason = (proc.stderr.strip() or proc.stdout.strip() or f"exit status {proc.returncode}")
    if head == UNKNOWN:
        reason = "solver answered unknown"
    return UNKNOWN, {}, reason


def solve_external(f: G, domains: Optional[dict], command, timeout: float = 0.0) -> SolveResult:
    """Decide a lowered NNF formula with an external SMT-LIB2 solver."""
    start = time.perf_counter()
    prob = build_smtlib(f, domains)
    status, values, reason = run_external(prob.text, command, timeout)
    model = decode_model(prob, values) if status == SAT else None
    stats = {"backend": "external", "command": command if isinstance(command, str) else " ".join(command)}
    return SolveResult(status, model, reason, stats, (time.perf_counter() - start) * 1000)
