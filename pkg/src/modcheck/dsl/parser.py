"""Recursive-descent parser for module definitions, axiom files and pair files.

Concrete syntax summary::

    formula  := quant | implies
    quant    := ("forall" | "exists") TYPE STRING ["in" STRING] "," formula
    implies  := or (("=>" | "<=>") formula)?          # right associative
    or       := and ("\\/" and)*
    and      := unary ("/\\" unary)*
    unary    := "~" unary | quant | atom
    atom     := "(" formula ")" | "True" | "False" | IDENT "=" INT | predicate

Statements in axiom and pair files end with ``.``; ``%`` starts a comment.
"""

from __future__ import annotations

import re
from typing import Optional

from . import ast as A
from .ast import DslError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<string>"[^"\n]*")
  | (?P<op><=>|=>|/\\|\\/)
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[()\[\]{},;.:=~])
    """,
    re.VERBOSE,
)

KEYWORDS = {"forall", "exists", "in", "True", "False"}


class Token:
    __slots__ = ("kind", "value", "line", "column")

    def __init__(self, kind: str, value: str, line: int, column: int):
        self.kind = kind
        self.value = value
        self.line = line
        self.column = column

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.value!r}, {self.line}:{self.column})"


def tokenize(text: str, source: str = "") -> list[Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        value = m.group(kind)
        if kind not in ("ws", "comment"):
            if kind == "string":
                value = value[1:-1]
            tokens.append(Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n") if kind in ("ws",) else 0
        if newlines:
            line += newlines
            line_start = pos + m.group(kind).rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, text: str, source: str = ""):
        self.source = source
        self.tokens = tokenize(text, source)
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        idx = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[idx]

    def error(self, message: str, tok: Optional[Token] = None) -> DslError:
        tok = tok or self.tok
        return DslError(message, tok.line, tok.column, self.source)

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def at_word(self, value: str) -> bool:
        return self.at("ident", value)

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, kind: str, value: Optional[str] = None) -> Token:
        if not self.at(kind, value):
            want = value if value is not None else kind
            got = self.tok.value or self.tok.kind
            raise self.error(f"expected {want!r}, found {got!r}")
        return self.advance()

    def expect_word(self, value: str) -> Token:
        return self.expect("ident", value)

    def ident(self) -> str:
        if not self.at("ident"):
            raise self.error(f"expected identifier, found {self.tok.value or self.tok.kind!r}")
        return self.advance().value

    def string(self) -> str:
        return self.expect("string").value

    def integer(self) -> int:
        return int(self.expect("int").value)

    def punct(self, value: str) -> Token:
        return self.expect("punct", value)

    def at_punct(self, value: str) -> bool:
        return self.at("punct", value)

    def expect_eof(self) -> None:
        if not self.at("eof"):
            raise self.error(f"unexpected trailing input {self.tok.value!r}")

    # -- formulas ----------------------------------------------------------

    def formula(self) -> A.Formula:
        if self.at_word("forall") or self.at_word("exists"):
            return self.quantifier()
        return self.implication()

    def quantifier(self) -> A.Formula:
        word = self.ident()
        op_type = self.ident()
        var = self.string()
        domains = None
        if self.at_word("in"):
            self.advance()
            raw = self.string()
            domains = tuple(d.strip() for d in raw.split(";") if d.strip())
            if not domains:
                raise self.error("empty quantifier domain list")
        self.punct(",")
        body = self.formula()
        cls = A.Forall if word == "forall" else A.Exists
        return cls(var, op_type, domains, body)

    def implication(self) -> A.Formula:
        left = self.disjunction()
        if self.at("op", "=>"):
            self.advance()
            return A.Implies(left, self.formula())
        if self.at("op", "<=>"):
            self.advance()
            return A.Iff(left, self.formula())
        return left

    def disjunction(self) -> A.Formula:
        left = self.conjunction()
        while self.at("op", "\\/"):
            self.advance()
            left = A.Or(left, self.conjunction())
        return left

    def conjunction(self) -> A.Formula:
        left = self.unary()
        while self.at("op", "/\\"):
            self.advance()
            left = A.And(left, self.unary())
        return left

    def unary(self) -> A.Formula:
        if self.at_punct("~"):
            self.advance()
            return A.Not(self.unary())
        if self.at_word("forall") or self.at_word("exists"):
            return self.quantifier()
        return self.atom()

    def atom(self) -> A.Formula:
        if self.at_punct("("):
            self.advance()
            f = self.formula()
            self.punct(")")
            return f
        if not self.at("ident"):
            raise self.error(f"expected formula, found {self.tok.value or self.tok.kind!r}")
        tok = self.tok
        name = tok.value
        if name == "True":
            self.advance()
            return A.Const(True)
        if name == "False":
            self.advance()
            return A.Const(False)
        if self.peek().kind == "punct" and self.peek().value == "=":
            self.advance()
            self.advance()
            return A.ParamEq(name, self.integer())
        if name in A.OPERATION_PREDICATES:
            self.advance()
            arity, has_flavor = A.OPERATION_PREDICATES[name]
            flavor = self.string() if has_flavor else None
            args = tuple(self.variable() for _ in range(arity))
            return A.PredicateApp(name, args, flavor)
        if name == "NodeExists":
            self.advance()
            return A.NodeExists(self.node_ref())
        if name == "NodesExist":
            self.advance()
            refs = self.bracket_list(self.node_ref)
            return A.conjoin([A.NodeExists(r) for r in refs])
        if name == "AddEdge":
            self.advance()
            src, dst, label = self.edge()
            return A.AddEdge(src, dst, label)
        if name == "AddEdges":
            self.advance()
            edges = self.bracket_list(self.edge)
            return A.conjoin([A.AddEdge(*e) for e in edges])
        if name == "EdgeExists":
            self.advance()
            src, dst, label = self.edge()
            return A.EdgeExists(src, dst, label)
        if name == "SameNode":
            self.advance()
            a = self.node_ref()
            b = self.node_ref()
            return A.SameNode(a, b)
        raise self.error(f"unknown predicate {name!r}", tok)

    def variable(self) -> str:
        if not self.at("ident") or self.tok.value in KEYWORDS:
            raise self.error(f"expected operation variable, found {self.tok.value or self.tok.kind!r}")
        return self.advance().value

    def node_ref(self) -> A.NodeRef:
        self.punct("(")
        var = self.variable()
        self.punct(",")
        event = self.ident()
        self.punct(")")
        return A.NodeRef(var, event)

    def edge(self) -> tuple[A.NodeRef, A.NodeRef, str]:
        self.punct("(")
        src = self.node_ref()
        self.punct(",")
        dst = self.node_ref()
        label = ""
        if self.at_punct(","):
            self.advance()
            label = self.string()
        self.punct(")")
        return src, dst, label

    def bracket_list(self, item):
        self.punct("[")
        out = []
        if not self.at_punct("]"):
            out.append(item())
            while self.at_punct(";"):
                self.advance()
                out.append(item())
        self.punct("]")
        return out

    # -- declarations ------------------------------------------------------

    def axiom(self) -> A.Axiom:
        self.expect_word("Axiom")
        name = self.string()
        self.punct(":")
        body = self.formula()
        self.punct(".")
        return A.Axiom(name, body)

    def axiom_file(self) -> A.AxiomFile:
        self.expect_word("ModuleID")
        module_type = self.string()
        self.punct(".")
        events: list[A.EventDecl] = []
        axioms: list[A.Axiom] = []
        while not self.at("eof"):
            if self.at_word("DefineEvent"):
                tok = self.advance()
                external = False
                if self.at_word("External"):
                    self.advance()
                    external = True
                index = self.integer()
                name = self.string()
                self.punct(".")
                if any(e.name == name for e in events):
                    raise self.error(f"duplicate event {name!r}", tok)
                if index != len(events):
                    raise self.error(
                        f"event {name!r} has index {index}; expected {len(events)} "
                        "(indices must be contiguous from 0)", tok)
                events.append(A.EventDecl(index, name, external))
            elif self.at_word("Axiom"):
                axioms.append(self.axiom())
            else:
                raise self.error(f"expected DefineEvent or Axiom, found {self.tok.value or self.tok.kind!r}")
        names = [a.name for a in axioms]
        for i, n in enumerate(names):
            if n in names[:i]:
                raise DslError(f"duplicate axiom name {n!r}", source=self.source)
        return A.AxiomFile(module_type, tuple(events), tuple(axioms))

    def module_definition(self) -> A.ModuleDef:
        if self.at_word("Interface"):
            is_interface = True
        elif self.at_word("Module"):
            is_interface = False
        else:
            raise self.error("expected 'Module' or 'Interface'")
        self.advance()
        name = self.ident()
        self.punct("(")
        params: list[str] = []
        if not self.at_punct(")"):
            params.append(self.ident())
            while self.at_punct(","):
                self.advance()
                params.append(self.ident())
        self.punct(")")
        if len(set(params)) != len(params):
            raise self.error(f"duplicate parameter in module {name!r}")
        self.punct("{")
        mdef = A.ModuleDef(name=name, params=tuple(params), is_interface=is_interface)
        seen: set[str] = set()
        while not self.at_punct("}"):
            tok = self.tok
            section = self.ident()
            if section in seen:
                raise self.error(f"duplicate section {section!r}", tok)
            seen.add(section)
            if section == "OperationType":
                mdef.operation_type = self.ident()
            elif section == "Properties":
                self.punct("{")
                while not self.at_punct("}"):
                    key = self.ident()
                    if self.at("int"):
                        value = self.advance().value
                    else:
                        value = self.ident()
                    mdef.properties[key] = value
                self.punct("}")
                core = mdef.properties.get("IsCore")
                if core is not None and core not in ("yes", "no"):
                    raise self.error(f"IsCore must be 'yes' or 'no', not {core!r}", tok)
            elif section == "Submodules":
                self.punct("{")
                while not self.at_punct("}"):
                    mdef.submodules.append(self.submodule(mdef))
                self.punct("}")
                if is_interface and mdef.submodules:
                    raise self.error(f"interface {name!r} cannot have submodules", tok)
            elif section == "ConnectionAxioms":
                self.punct("{")
                while not self.at_punct("}"):
                    mdef.connection_axioms.append(self.axiom())
                self.punct("}")
                if is_interface and mdef.connection_axioms:
                    raise self.error(f"interface {name!r} cannot have connection axioms", tok)
            else:
                raise self.error(f"unknown section {section!r}", tok)
        self.punct("}")
        if "OperationType" not in seen:
            raise self.error(f"module {name!r} is missing OperationType")
        return mdef

    def submodule(self, parent: A.ModuleDef) -> A.SubmoduleDecl:
        tok = self.tok
        module_type = self.ident()
        inst = self.ident()
        if any(s.name == inst for s in parent.submodules):
            raise self.error(f"duplicate submodule instance name {inst!r}", tok)
        if inst == "this":
            raise self.error("'this' cannot name a submodule instance", tok)
        self.punct("(")
        bindings: list[tuple[str, int]] = []
        if not self.at_punct(")"):
            bindings.append(self.binding())
            while self.at_punct(","):
                self.advance()
                bindings.append(self.binding())
        self.punct(")")
        names = [b[0] for b in bindings]
        if len(set(names)) != len(names):
            raise self.error(f"duplicate parameter binding for {inst!r}", tok)
        return A.SubmoduleDecl(module_type, inst, tuple(bindings))

    def binding(self) -> tuple[str, int]:
        key = self.ident()
        self.punct(":")
        return key, self.integer()

    def pair_file(self) -> A.PairSpec:
        impl = iface = None
        mappings: list[tuple[str, str]] = []
        while not self.at("eof"):
            tok = self.tok
            word = self.ident()
            if word == "Implementation":
                impl = self.string()
            elif word == "Interface":
                iface = self.string()
            elif word == "MapNode":
                mappings.append((self.string(), self.string()))
            else:
                raise self.error(f"unknown pair statement {word!r}", tok)
            self.punct(".")
        if impl is None or iface is None:
            raise DslError("pair file needs both Implementation and Interface", source=self.source)
        seen = [m[1] for m in mappings]
        for i, n in enumerate(seen):
            if n in seen[:i]:
                raise DslError(f"interface event {n!r} mapped twice", source=self.source)
        return A.PairSpec(impl, iface, tuple(mappings))


def parse_formula(text: str, source: str = "") -> A.Formula:
    p = Parser(text, source)
    f = p.formula()
    p.expect_eof()
    return f


def parse_axiom_file(text: str, source: str = "") -> A.AxiomFile:
    p = Parser(text, source)
    out = p.axiom_file()
    p.expect_eof()
    return out


def parse_module_definition(text: str, source: str = "") -> A.ModuleDef:
    p = Parser(text, source)
    out = p.module_definition()
    p.expect_eof()
    return out


def parse_pair_file(text: str, source: str = "") -> A.PairSpec:
    p = Parser(text, source)
    return p.pair_file()
