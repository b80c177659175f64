"""Abstract syntax for the ordering-specification language.

Formulas are immutable trees.  Binary connectives are kept binary so that
printing and re-parsing is structurally exact.  List forms such as
``AddEdges [...]`` and ``NodesExist [...]`` are desugared by the parser into
conjunctions of their singular forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


class DslError(Exception):
    """Raised for malformed specification input."""

    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        if line:
            where += f"{line}:{column}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


# -- formula nodes ---------------------------------------------------------


@dataclass(frozen=True)
class NodeRef:
    var: str
    event: str


@dataclass(frozen=True)
class Forall:
    var: str
    op_type: str
    domains: Optional[tuple[str, ...]]
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    op_type: str
    domains: Optional[tuple[str, ...]]
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class PredicateApp:
    """Operation predicate such as ``SameAddress i j``.

    ``flavor`` is only used by ``IsFenceKind "<flavor>" i``.
    """

    name: str
    args: tuple[str, ...]
    flavor: Optional[str] = None


@dataclass(frozen=True)
class AddEdge:
    src: NodeRef
    dst: NodeRef
    label: str = ""


@dataclass(frozen=True)
class EdgeExists:
    src: NodeRef
    dst: NodeRef
    label: str = ""


@dataclass(frozen=True)
class NodeExists:
    node: NodeRef


@dataclass(frozen=True)
class SameNode:
    a: NodeRef
    b: NodeRef


@dataclass(frozen=True)
class ParamEq:
    """Comparison of an instance parameter with an integer literal."""

    name: str
    value: int


@dataclass(frozen=True)
class Const:
    value: bool


Formula = Union[
    Forall, Exists, And, Or, Not, Implies, Iff, PredicateApp,
    AddEdge, EdgeExists, NodeExists, SameNode, ParamEq, Const,
]

QUANTIFIERS = (Forall, Exists)

# predicate name -> (number of operation arguments, takes a flavor string)
OPERATION_PREDICATES: dict[str, tuple[int, bool]] = {
    "IsAnyRead": (1, False),
    "IsAnyWrite": (1, False),
    "IsFence": (1, False),
    "IsFenceKind": (1, True),
    "IsNotNull": (1, False),
    "DataFromInitialState": (1, False),
    "SameAddress": (2, False),
    "SameData": (2, False),
    "ProgramOrder": (2, False),
    "SameOp": (2, False),
    "Mapped": (2, False),
}

NODE_PREDICATES = ("NodeExists", "NodesExist", "EdgeExists", "AddEdge", "AddEdges", "SameNode")

FENCE_PREDICATES = ("IsFence", "IsFenceKind")


# -- declarations ----------------------------------------------------------


@dataclass(frozen=True)
class Axiom:
    name: str
    body: Formula


@dataclass(frozen=True)
class EventDecl:
    index: int
    name: str
    external: bool = False


@dataclass(frozen=True)
class SubmoduleDecl:
    module_type: str
    name: str
    params: tuple[tuple[str, int], ...] = ()


@dataclass
class ModuleDef:
    name: str
    params: tuple[str, ...] = ()
    operation_type: str = "none"
    properties: dict[str, str] = field(default_factory=dict)
    submodules: list[SubmoduleDecl] = field(default_factory=list)
    connection_axioms: list[Axiom] = field(default_factory=list)
    implementation_axioms: list[Axiom] = field(default_factory=list)
    events: list[EventDecl] = field(default_factory=list)
    is_interface: bool = False

    @property
    def is_core(self) -> bool:
        return self.properties.get("IsCore", "no") == "yes"

    def event(self, name: str) -> Optional[EventDecl]:
        for ev in self.events:
            if ev.name == name:
                return ev
        return None

    def event_index(self, name: str) -> int:
        ev = self.event(name)
        return ev.index if ev is not None else -1


@dataclass(frozen=True)
class AxiomFile:
    module_type: str
    events: tuple[EventDecl, ...]
    axioms: tuple[Axiom, ...]


@dataclass(frozen=True)
class PairSpec:
    """An implementation/interface pair with its event mapping.

    ``node_mappings`` maps implementation event names to interface event
    names, in declaration order.
    """

    implementation: str
    interface: str
    node_mappings: tuple[tuple[str, str], ...]

    def interface_to_impl(self) -> dict[str, str]:
        return {iface: impl for impl, iface in self.node_mappings}


# -- helpers ---------------------------------------------------------------


def conjoin(parts: list[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``Const(True)``."""
    if not parts:
        return Const(True)
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Forall, Exists)):
        return (f.body,)
    if isinstance(f, (And, Or, Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, Not):
        return (f.body,)
    return ()


def walk(f: Formula):
    """Pre-order iterator over all sub-formulas."""
    stack = [f]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(children(cur)))


def node_refs(f: Formula) -> list[NodeRef]:
    out = []
    for sub in walk(f):
        if isinstance(sub, (AddEdge, EdgeExists)):
            out.extend((sub.src, sub.dst))
        elif isinstance(sub, NodeExists):
            out.append(sub.node)
        elif isinstance(sub, SameNode):
            out.extend((sub.a, sub.b))
    return out


def mentions_fences(f: Formula) -> bool:
    return any(isinstance(s, PredicateApp) and s.name in FENCE_PREDICATES for s in walk(f))


def fence_flavors(f: Formula) -> set[str]:
    return {
        s.flavor for s in walk(f)
        if isinstance(s, PredicateApp) and s.name == "IsFenceKind" and s.flavor
    }
