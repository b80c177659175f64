"""Instance-tree construction, operation assignment and scope checking."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .dsl import ast as A
from .dsl.ast import ModuleDef
from .litmus import LitmusInstruction, LitmusTest

READ = "R"
WRITE = "W"
GENERIC_FENCE = "F"


class ElaborationError(Exception):
    pass


@dataclass(frozen=True)
class Operation:
    """One operation of a module instance.

    A concrete operation carries the litmus instruction it stands for.  A
    symbolic one carries the finite domains of its kind, address and data
    attributes; kinds are ``R``, ``W`` or ``F.<flavor>`` (``F`` for a fence of
    unspecified flavor).
    """

    uid: int
    owner: str
    op_type: str
    index: int
    concrete: Optional[LitmusInstruction] = None
    kinds: tuple[str, ...] = ()
    addresses: tuple[str, ...] = ()
    values: tuple[int, ...] = ()

    @property
    def is_concrete(self) -> bool:
        return self.concrete is not None

    @property
    def name(self) -> str:
        if self.concrete is not None:
            return self.concrete.id
        return f"{self.owner}#{self.index}"

    @property
    def kind(self) -> Optional[str]:
        c = self.concrete
        if c is None:
            return None
        if c.is_fence:
            return f"F.{c.fence}"
        return c.kind.value

    def attr_domain(self, attr: str) -> tuple:
        return {"kind": self.kinds, "addr": self.addresses, "data": self.values}[attr]


@dataclass
class ModuleInstance:
    path: str
    name: str
    definition: ModuleDef
    params: dict[str, int]
    parent: Optional["ModuleInstance"] = None
    children: list["ModuleInstance"] = field(default_factory=list)
    operations: list[Operation] = field(default_factory=list)

    @property
    def op_type(self) -> str:
        return self.definition.operation_type

    def child(self, name: str) -> Optional["ModuleInstance"]:
        for c in self.children:
            if c.name == name:
                return c
        return None

    def walk(self) -> Iterator["ModuleInstance"]:
        yield self
        for c in self.children:
            yield from c.walk()

    def find(self, path: str) -> Optional["ModuleInstance"]:
        """Look up a descendant by a path relative to this instance."""
        if path in ("", ".", self.name, self.path):
            return self
        parts = path.split("/")
        if parts[0] == self.name:
            parts = parts[1:]
        cur = self
        for p in parts:
            cur = cur.child(p)
            if cur is None:
                return None
        return cur


@dataclass(frozen=True)
class Diagnostic:
    path: str
    axiom: str
    message: str

    def __str__(self) -> str:
        where = f"{self.path}: axiom {self.axiom!r}" if self.axiom else self.path
        return f"{where}: {self.message}"


# -- tree construction ---------------------------------------------------


def build_tree(root_def: ModuleDef, registry: dict[str, ModuleDef],
               params: Optional[dict[str, int]] = None) -> ModuleInstance:
    # an unbound root is elaborated with every parameter set to 0
    params = dict(params) if params is not None else {p: 0 for p in root_def.params}
    if set(params) != set(root_def.params):
        raise ElaborationError(
            f"module {root_def.name!r} expects parameters {list(root_def.params)}, got {sorted(params)}")
    root = ModuleInstance(root_def.name, root_def.name, root_def, params)
    _expand(root, registry, (root_def.name,))
    return root


def _expand(inst: ModuleInstance, registry: dict[str, ModuleDef], stack: tuple[str, ...]) -> None:
    for sub in inst.definition.submodules:
        d = registry.get(sub.module_type)
        if d is None:
            raise ElaborationError(f"{inst.path}: unknown module type {sub.module_type!r}")
        if sub.module_type in stack:
            cycle = " -> ".join(stack + (sub.module_type,))
            raise ElaborationError(f"recursive module instantiation: {cycle}")
        bound = dict(sub.params)
        if set(bound) != set(d.params):
            raise ElaborationError(
                f"{inst.path}/{sub.name}: {d.name} expects parameters {list(d.params)}, "
                f"got {[k for k, _ in sub.params]}")
        child = ModuleInstance(f"{inst.path}/{sub.name}", sub.name, d, bound, parent=inst)
        inst.children.append(child)
        _expand(child, registry, stack + (sub.module_type,))


def core_instances(tree: ModuleInstance) -> list[ModuleInstance]:
    """IsCore instances in the order litmus core indices are assigned to them."""
    cores = [i for i in tree.walk() if i.definition.is_core]
    if all("c" in i.params for i in cores):
        return sorted(cores, key=lambda i: i.params["c"])
    return cores


# -- operation assignment --------------------------------------------------


@dataclass
class Elaboration:
    """An instance tree with operations assigned.

    ``scope`` is the subtree whose axioms take part in the query; in
    interface mode it is the implementation root.
    """

    tree: ModuleInstance
    mode: str
    bound: int
    test: Optional[LitmusTest] = None
    scope: Optional[ModuleInstance] = None
    interface: Optional[ModuleDef] = None
    operations: list[Operation] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.scope is None:
            self.scope = self.tree
        self._by_uid = {op.uid: op for op in self.operations}
        self._inst = {i.path: i for i in self.tree.walk()}

    def op(self, uid: int) -> Operation:
        return self._by_uid[uid]

    def instance(self, path: str) -> ModuleInstance:
        return self._inst[path]

    def instances(self) -> list[ModuleInstance]:
        return list(self.scope.walk())

    def event_index(self, uid: int, event: str) -> int:
        return self._inst[self._by_uid[uid].owner].definition.event_index(event)


def _axiom_sets_for(inst: ModuleInstance, interface: Optional[ModuleDef],
                    scope: ModuleInstance) -> list[list[A.Axiom]]:
    """Axiom lists whose quantifiers can range over ``inst``'s operations."""
    sets = [inst.definition.implementation_axioms, inst.definition.connection_axioms]
    if inst.parent is not None and inst is not scope:
        sets.append(inst.parent.definition.connection_axioms)
    if interface is not None and inst is scope:
        sets.append(interface.implementation_axioms)
    return sets


def _kind_domain(inst: ModuleInstance, interface: Optional[ModuleDef], scope: ModuleInstance) -> tuple[str, ...]:
    flavors: set[str] = set()
    fences = False
    for axioms in _axiom_sets_for(inst, interface, scope):
        for ax in axioms:
            if A.mentions_fences(ax.body):
                fences = True
                flavors |= A.fence_flavors(ax.body)
    kinds = [READ, WRITE]
    if fences and flavors:
        kinds.extend(f"F.{f}" for f in sorted(flavors))
    elif fences:
        kinds.append(GENERIC_FENCE)
    return tuple(kinds)


def mentions_program_order(inst: ModuleInstance, interface: Optional[ModuleDef] = None,
                           scope: Optional[ModuleInstance] = None) -> bool:
    scope = scope or inst
    for axioms in _axiom_sets_for(inst, interface, scope):
        for ax in axioms:
            for sub in A.walk(ax.body):
                if isinstance(sub, A.PredicateApp) and sub.name == "ProgramOrder":
                    return True
    return False


def assign_litmus(tree: ModuleInstance, test: LitmusTest, bound: int) -> Elaboration:
    if bound < 1:
        raise ElaborationError("bound must be at least 1")
    cores = core_instances(tree)
    used = test.cores
    if used and max(used) >= len(cores):
        raise ElaborationError(
            f"test {test.name!r} uses core {max(used)} but the design has {len(cores)} core instance(s)")
    core_of = {inst.path: n for n, inst in enumerate(cores)}
    addresses = tuple(test.addresses)
    values = sorted(set(test.values) | {0})
    values = tuple(values + [values[-1] + 1])
    ops: list[Operation] = []
    for inst in tree.walk():
        inst.operations = []
        if inst.op_type == "none":
            continue
        if inst.path in core_of:
            for k, ins in enumerate(test.core_instructions(core_of[inst.path])):
                op = Operation(len(ops), inst.path, inst.op_type, k, concrete=ins)
                inst.operations.append(op)
                ops.append(op)
            continue
        kinds = _kind_domain(inst, None, tree)
        for k in range(bound):
            op = Operation(len(ops), inst.path, inst.op_type, k, None, kinds, addresses, values)
            inst.operations.append(op)
            ops.append(op)
    return Elaboration(tree, "litmus", bound, test=test, operations=ops)


def interface_domains(k: int = 2) -> tuple[tuple[str, ...], tuple[int, ...]]:
    return tuple(f"a{n}" for n in range(k)), tuple(range(k + 1))


def assign_interface(tree: ModuleInstance, impl_path: str, interface: ModuleDef, bound: int,
                     domain_size: int = 2) -> Elaboration:
    if bound < 1:
        raise ElaborationError("bound must be at least 1")
    scope = tree.find(impl_path)
    if scope is None:
        raise ElaborationError(f"no instance {impl_path!r} in design {tree.name!r}")
    if scope.op_type == "none":
        raise ElaborationError(
            f"implementation {scope.path} has operation type none; it shares no operations with an interface")
    if interface.operation_type != scope.op_type:
        raise ElaborationError(
            f"interface {interface.name} has operation type {interface.operation_type}, "
            f"implementation {scope.path} has {scope.op_type}")
    addresses, values = interface_domains(domain_size)
    ops: list[Operation] = []
    for inst in tree.walk():
        inst.operations = []
    for inst in scope.walk():
        if inst.op_type == "none":
            continue
        kinds = _kind_domain(inst, interface, scope)
        for k in range(bound):
            op = Operation(len(ops), inst.path, inst.op_type, k, None, kinds, addresses, values)
            inst.operations.append(op)
            ops.append(op)
    return Elaboration(tree, "interface", bound, scope=scope, interface=interface, operations=ops)


# -- scope and type checking -----------------------------------------------


def check_scopes(tree: ModuleInstance, interface: Optional[ModuleDef] = None,
                 impl: Optional[ModuleInstance] = None) -> list[Diagnostic]:
    """Visibility and typing diagnostics for every axiom in the tree.

    With ``interface`` and ``impl`` given, the interface's axioms are also
    checked against the interface definition itself.
    """
    out: list[Diagnostic] = []
    for inst in tree.walk():
        d = inst.definition
        names = [e.name for e in d.events]
        for n in set(names):
            if names.count(n) > 1:
                out.append(Diagnostic(inst.path, "", f"event {n!r} declared twice"))
        if d.operation_type == "none":
            if any(_quantifiers(ax.body) for ax in d.implementation_axioms):
                out.append(Diagnostic(inst.path, "", "module with operation type none cannot quantify "
                                                     "over its own operations in implementation axioms"))
        for ax in d.implementation_axioms:
            out.extend(_check_axiom(inst, ax, connection=False))
        for ax in d.connection_axioms:
            out.extend(_check_axiom(inst, ax, connection=True))
    if interface is not None:
        out.extend(check_interface_def(interface, impl))
    return out


def check_interface_def(interface: ModuleDef, impl: Optional[ModuleInstance] = None) -> list[Diagnostic]:
    path = f"interface {interface.name}"
    out: list[Diagnostic] = []
    if interface.submodules or interface.connection_axioms:
        out.append(Diagnostic(path, "", "interfaces cannot have submodules or connection axioms"))
    fake = ModuleInstance(path, interface.name, interface, {})
    for ax in interface.implementation_axioms:
        out.extend(_check_axiom(fake, ax, connection=False))
    return out


def _quantifiers(f: A.Formula) -> list:
    return [s for s in A.walk(f) if isinstance(s, A.QUANTIFIERS)]


def _check_axiom(inst: ModuleInstance, ax: A.Axiom, connection: bool) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    def report(msg: str) -> None:
        diags.append(Diagnostic(inst.path, ax.name, msg))

    def visit(f: A.Formula, env: dict[str, list[ModuleInstance]]) -> None:
        if isinstance(f, A.QUANTIFIERS):
            if f.var in env:
                report(f"variable {f.var!r} is bound twice")
            domain = _domain_instances(f, inst, connection, report)
            for target in domain:
                if target.op_type == "none":
                    report(f"quantifier {f.var!r} ranges over {target.path}, which has no operations")
                elif target.op_type != f.op_type:
                    report(f"type error: quantifier {f.var!r} is over {f.op_type} but "
                           f"{target.path} has operations of type {target.op_type}")
            visit(f.body, {**env, f.var: domain})
            return
        if isinstance(f, A.PredicateApp):
            for v in f.args:
                if v not in env:
                    report(f"unbound operation variable {v!r} in {f.name}")
            return
        if isinstance(f, A.ParamEq):
            if f.name not in inst.params:
                report(f"unknown parameter {f.name!r}")
            return
        refs = A.node_refs(f) if not A.children(f) else []
        for r in refs:
            if r.var not in env:
                report(f"unbound operation variable {r.var!r} in node ({r.var}, {r.event})")
                continue
            for target in env[r.var]:
                ev = target.definition.event(r.event)
                if ev is None:
                    report(f"event {r.event!r} is not declared by {target.definition.name} ({target.path})")
                elif target is not inst and not ev.external:
                    report(f"event {r.event!r} of {target.path} is internal and not visible from {inst.path}")
        for c in A.children(f):
            visit(c, env)

    visit(ax.body, {})
    return diags


def _domain_instances(q, inst: ModuleInstance, connection: bool, report) -> list[ModuleInstance]:
    if q.domains is None:
        if connection:
            report(f"quantifier {q.var!r} in a connection axiom needs a domain list")
        return [inst]
    out = []
    for name in q.domains:
        if name == "this":
            out.append(inst)
            continue
        if not connection:
            report(f"implementation axioms may only quantify over 'this', not {name!r}")
            continue
        child = inst.child(name)
        if child is None:
            report(f"quantifier domain {name!r} is not a direct submodule of {inst.path}")
            continue
        out.append(child)
    return out


def quantifier_domain(q, inst: ModuleInstance) -> list[ModuleInstance]:
    """Instances a quantifier ranges over, assuming the axiom passed scope checks."""
    if q.domains is None:
        return [inst]
    out = []
    for name in q.domains:
        out.append(inst if name == "this" else inst.child(name))
    return out
