"""Quantifier elimination and the quantifier-free constraint language.

A ground formula is built from ``And``/``Or``/``Not`` over these literals:

* ``Exists(node)``: the µhb node exists;
* ``Strict(a, b)``: timestamp of ``a`` is less than that of ``b``; its
  negation is the weak edge ``ts(b) <= ts(a)``;
* ``NonNull(uid)``: a symbolic operation is present;
* ``PredVar(name, uids)``: a free relation, used for ``Mapped``;
* ``AttrEq(uid, attr, value)`` and ``AttrSame(u1, u2, attr)``: constraints on
  the kind/address/data attributes of symbolic operations;
* ``SameNodeT(a, b)``: node merging, removed by :func:`lower_same_node`.

Nodes are ``(uid, event)`` pairs.  Timestamp atoms constrain timestamps
whether or not the nodes exist; node existence is stated separately, so
``AddEdge`` grounds to ``Exists(a) /\\ Exists(b) /\\ Strict(a, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from .dsl import ast as A
from .elaborate import Elaboration, ModuleInstance, Operation, READ, WRITE, quantifier_domain

Node = tuple[int, str]


class GroundingError(Exception):
    pass


class G:
    __slots__ = ("_h",)

    def __hash__(self) -> int:
        return self._h


class Const(G):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = bool(value)
        self._h = hash(("const", self.value))

    def __eq__(self, other) -> bool:
        return isinstance(other, Const) and other.value == self.value

    def __repr__(self) -> str:
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


class Exists(G):
    __slots__ = ("node",)

    def __init__(self, node: Node):
        self.node = node
        self._h = hash(("ex", node))

    def __eq__(self, other) -> bool:
        return isinstance(other, Exists) and other.node == self.node

    def __repr__(self) -> str:
        return f"(exists {_n(self.node)})"


class Strict(G):
    """``ts(a) < ts(b)``.  The label is carried for graph output only."""

    __slots__ = ("a", "b", "label")

    def __init__(self, a: Node, b: Node, label: str = ""):
        self.a = a
        self.b = b
        self.label = label
        self._h = hash(("lt", a, b))

    def __eq__(self, other) -> bool:
        return isinstance(other, Strict) and other.a == self.a and other.b == self.b

    def __repr__(self) -> str:
        return f"(before {_n(self.a)} {_n(self.b)})"


class NonNull(G):
    __slots__ = ("uid",)

    def __init__(self, uid: int):
        self.uid = uid
        self._h = hash(("nn", uid))

    def __eq__(self, other) -> bool:
        return isinstance(other, NonNull) and other.uid == self.uid

    def __repr__(self) -> str:
        return f"(nonnull {self.uid})"


class PredVar(G):
    __slots__ = ("name", "uids")

    def __init__(self, name: str, uids: tuple[int, ...]):
        self.name = name
        self.uids = tuple(uids)
        self._h = hash(("pred", name, self.uids))

    def __eq__(self, other) -> bool:
        return isinstance(other, PredVar) and other.name == self.name and other.uids == self.uids

    def __repr__(self) -> str:
        return f"({self.name} {' '.join(map(str, self.uids))})"


class AttrEq(G):
    __slots__ = ("uid", "attr", "value")

    def __init__(self, uid: int, attr: str, value):
        self.uid = uid
        self.attr = attr
        self.value = value
        self._h = hash(("attr", uid, attr, value))

    def __eq__(self, other) -> bool:
        return (isinstance(other, AttrEq) and other.uid == self.uid and other.attr == self.attr
                and other.value == self.value)

    def __repr__(self) -> str:
        return f"(= {self.attr}_{self.uid} {self.value})"


class AttrSame(G):
    __slots__ = ("u1", "u2", "attr")

    def __init__(self, u1: int, u2: int, attr: str):
        if u2 < u1:
            u1, u2 = u2, u1
        self.u1 = u1
        self.u2 = u2
        self.attr = attr
        self._h = hash(("same", u1, u2, attr))

    def __eq__(self, other) -> bool:
        return (isinstance(other, AttrSame) and other.u1 == self.u1 and other.u2 == self.u2
                and other.attr == self.attr)

    def __repr__(self) -> str:
        return f"(= {self.attr}_{self.u1} {self.attr}_{self.u2})"


class SameNodeT(G):
    __slots__ = ("a", "b")

    def __init__(self, a: Node, b: Node):
        self.a = a
        self.b = b
        self._h = hash(("samenode", a, b))

    def __eq__(self, other) -> bool:
        return isinstance(other, SameNodeT) and other.a == self.a and other.b == self.b

    def __repr__(self) -> str:
        return f"(samenode {_n(self.a)} {_n(self.b)})"


class Not(G):
    __slots__ = ("arg",)

    def __init__(self, arg: G):
        self.arg = arg
        self._h = hash(("not", arg))

    def __eq__(self, other) -> bool:
        return isinstance(other, Not) and other.arg == self.arg

    def __repr__(self) -> str:
        return f"(not {self.arg!r})"


class And(G):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[G]):
        self.args = tuple(args)
        self._h = hash(("and", self.args))

    def __eq__(self, other) -> bool:
        return isinstance(other, And) and other.args == self.args

    def __repr__(self) -> str:
        return "(and " + " ".join(map(repr, self.args)) + ")"


class Or(G):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[G]):
        self.args = tuple(args)
        self._h = hash(("or", self.args))

    def __eq__(self, other) -> bool:
        return isinstance(other, Or) and other.args == self.args

    def __repr__(self) -> str:
        return "(or " + " ".join(map(repr, self.args)) + ")"


ATOMS = (Exists, Strict, NonNull, PredVar, AttrEq, AttrSame, SameNodeT)

# defining __eq__ clears the inherited __hash__
for _cls in (Const, Not, And, Or) + ATOMS:
    _cls.__hash__ = G.__hash__


def _n(node: Node) -> str:
    return f"{node[1]}@{node[0]}"


def dump(f: G) -> str:
    """S-expression text of a ground formula."""
    return repr(f)


# -- smart constructors ----------------------------------------------------


def conj(args: Iterable[G], fold: bool = True) -> G:
    out: list[G] = []
    for a in args:
        if isinstance(a, And):
            out.extend(a.args)
        elif fold and isinstance(a, Const):
            if not a.value:
                return FALSE
        else:
            out.append(a)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(out)


def disj(args: Iterable[G], fold: bool = True) -> G:
    out: list[G] = []
    for a in args:
        if isinstance(a, Or):
            out.extend(a.args)
        elif fold and isinstance(a, Const):
            if a.value:
                return TRUE
        else:
            out.append(a)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(out)


def neg(a: G, fold: bool = True) -> G:
    if isinstance(a, Const) and fold:
        return FALSE if a.value else TRUE
    if isinstance(a, Not):
        return a.arg
    return Not(a)


def implies(a: G, b: G, fold: bool = True) -> G:
    return disj([neg(a, fold), b], fold)


def iff(a: G, b: G, fold: bool = True) -> G:
    return conj([disj([neg(a, fold), b], fold), disj([a, neg(b, fold)], fold)], fold)


def edge(a: Node, b: Node, label: str = "", fold: bool = True) -> G:
    if a == b and fold:
        return FALSE
    return conj([Exists(a), Exists(b), Strict(a, b, label)], fold)


# -- predicate semantics ---------------------------------------------------


def _is_access(op: Operation, fold: bool) -> G:
    if all(k in (READ, WRITE) for k in op.kinds):
        return TRUE
    return disj([AttrEq(op.uid, "kind", READ), AttrEq(op.uid, "kind", WRITE)], fold)


def _concrete_attr(op: Operation, attr: str):
    c = op.concrete
    return c.address if attr == "addr" else c.data


def _same_attr(x: Operation, y: Operation, attr: str, fold: bool) -> G:
    if x.is_concrete and y.is_concrete:
        vx, vy = _concrete_attr(x, attr), _concrete_attr(y, attr)
        return Const(vx is not None and vx == vy)
    if x.is_concrete or y.is_concrete:
        conc, sym = (x, y) if x.is_concrete else (y, x)
        v = _concrete_attr(conc, attr)
        if v is None or v not in sym.attr_domain(attr):
            return FALSE
        return conj([_is_access(sym, fold), AttrEq(sym.uid, attr, v)], fold)
    if x.uid == y.uid:
        return _is_access(x, fold)
    return conj([_is_access(x, fold), _is_access(y, fold), AttrSame(x.uid, y.uid, attr)], fold)


def _kind_is(op: Operation, kind: str) -> G:
    if op.is_concrete:
        return Const(op.kind == kind)
    return AttrEq(op.uid, "kind", kind) if kind in op.kinds else FALSE


def predicate_ground(name: str, args: tuple[Operation, ...], flavor: Optional[str] = None,
                     fold: bool = True) -> G:
    """Ground one operation predicate applied to operations."""
    if name == "IsAnyRead":
        return _kind_is(args[0], READ)
    if name == "IsAnyWrite":
        return _kind_is(args[0], WRITE)
    if name == "IsFence":
        op = args[0]
        if op.is_concrete:
            return Const(op.concrete.is_fence)
        return disj([AttrEq(op.uid, "kind", k) for k in op.kinds if k.startswith("F")], fold)
    if name == "IsFenceKind":
        return _kind_is(args[0], f"F.{flavor}")
    if name == "IsNotNull":
        op = args[0]
        return TRUE if op.is_concrete else NonNull(op.uid)
    if name == "DataFromInitialState":
        op = args[0]
        if op.is_concrete:
            return Const(op.concrete.is_read and op.concrete.data == 0)
        if 0 not in op.values:
            return FALSE
        return conj([_kind_is(op, READ), AttrEq(op.uid, "data", 0)], fold)
    if name == "SameAddress":
        return _same_attr(args[0], args[1], "addr", fold)
    if name == "SameData":
        return _same_attr(args[0], args[1], "data", fold)
    if name == "ProgramOrder":
        x, y = args
        return Const(x.owner == y.owner and x.index < y.index)
    if name == "SameOp":
        return Const(args[0].uid == args[1].uid)
    if name == "Mapped":
        return PredVar("Mapped", (args[0].uid, args[1].uid))
    raise GroundingError(f"unknown predicate {name!r}")


# -- grounding -------------------------------------------------------------


class Grounder:
    """Grounds axioms over an elaboration.

    ``event_map`` renames events while grounding, which is how interface
    axioms are expressed in terms of implementation events.
    """

    def __init__(self, elab: Elaboration, fold: bool = True):
        self.elab = elab
        self.fold = fold

    def ops_of(self, inst: ModuleInstance) -> list[Operation]:
        return inst.operations

    def ground_axiom(self, ax: A.Axiom, inst: ModuleInstance,
                     event_map: Optional[dict[str, str]] = None) -> G:
        return self._g(ax.body, inst, {}, event_map)

    def _node(self, ref: A.NodeRef, env: dict[str, Operation], event_map) -> Node:
        op = env.get(ref.var)
        if op is None:
            raise GroundingError(f"unbound operation variable {ref.var!r}")
        ev = ref.event
        if event_map is not None:
            if ev not in event_map:
                raise GroundingError(f"interface event {ev!r} has no node mapping")
            ev = event_map[ev]
        if self.elab.event_index(op.uid, ev) < 0:
            raise GroundingError(f"event {ev!r} is not declared for operations of {op.owner}")
        return (op.uid, ev)

    def _g(self, f: A.Formula, inst: ModuleInstance, env: dict[str, Operation], event_map) -> G:
        fold = self.fold
        if isinstance(f, A.QUANTIFIERS):
            ops: list[Operation] = []
            for target in quantifier_domain(f, inst):
                if target is None:
                    raise GroundingError(f"bad quantifier domain in {inst.path}")
                ops.extend(target.operations)
            parts = []
            for op in ops:
                body = self._g(f.body, inst, {**env, f.var: op}, event_map)
                nn = TRUE if op.is_concrete else NonNull(op.uid)
                if isinstance(f, A.Forall):
                    parts.append(disj([neg(nn, fold), body], fold))
                else:
                    parts.append(conj([nn, body], fold))
            if isinstance(f, A.Forall):
                return conj(parts, fold) if parts else TRUE
            return disj(parts, fold) if parts else FALSE
        if isinstance(f, A.And):
            return conj([self._g(f.left, inst, env, event_map), self._g(f.right, inst, env, event_map)], fold)
        if isinstance(f, A.Or):
            return disj([self._g(f.left, inst, env, event_map), self._g(f.right, inst, env, event_map)], fold)
        if isinstance(f, A.Not):
            return neg(self._g(f.body, inst, env, event_map), fold)
        if isinstance(f, A.Implies):
            return implies(self._g(f.left, inst, env, event_map), self._g(f.right, inst, env, event_map), fold)
        if isinstance(f, A.Iff):
            return iff(self._g(f.left, inst, env, event_map), self._g(f.right, inst, env, event_map), fold)
        if isinstance(f, A.PredicateApp):
            try:
                args = tuple(env[v] for v in f.args)
            except KeyError as exc:
                raise GroundingError(f"unbound operation variable {exc.args[0]!r}") from None
            return predicate_ground(f.name, args, f.flavor, fold)
        if isinstance(f, A.NodeExists):
            return Exists(self._node(f.node, env, event_map))
        if isinstance(f, (A.AddEdge, A.EdgeExists)):
            a = self._node(f.src, env, event_map)
            b = self._node(f.dst, env, event_map)
            return edge(a, b, f.label, fold)
        if isinstance(f, A.SameNode):
            a = self._node(f.a, env, event_map)
            b = self._node(f.b, env, event_map)
            if a == b and fold:
                return TRUE
            return SameNodeT(a, b)
        if isinstance(f, A.ParamEq):
            if f.name not in inst.params:
                raise GroundingError(f"{inst.path} has no parameter {f.name!r}")
            return Const(inst.params[f.name] == f.value)
        if isinstance(f, A.Const):
            return Const(f.value)
        raise GroundingError(f"cannot ground {f!r}")


def ground(axiom: A.Axiom, inst: ModuleInstance, elab: Elaboration, fold: bool = True,
           event_map: Optional[dict[str, str]] = None) -> G:
    return Grounder(elab, fold).ground_axiom(axiom, inst, event_map)


# -- transformations -------------------------------------------------------


def map_formula(f: G, leaf: Callable[[G], G], fold: bool = True) -> G:
    """Rebuild ``f`` bottom-up, replacing every atom ``x`` by ``leaf(x)``."""
    memo: dict[int, G] = {}

    def go(x: G) -> G:
        key = id(x)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(x, And):
            r = conj([go(a) for a in x.args], fold)
        elif isinstance(x, Or):
            r = disj([go(a) for a in x.args], fold)
        elif isinstance(x, Not):
            r = neg(go(x.arg), fold)
        elif isinstance(x, Const):
            r = x
        else:
            r = leaf(x)
        memo[key] = r
        return r

    return go(f)


def same_node_definition(a: Node, b: Node, fold: bool = True) -> G:
    """Merged nodes: equal existence and equal timestamps."""
    return conj([iff(Exists(a), Exists(b), fold), neg(Strict(a, b), fold), neg(Strict(b, a), fold)], fold)


def lower_same_node(f: G, fold: bool = True) -> G:
    def leaf(x: G) -> G:
        if isinstance(x, SameNodeT):
            return same_node_definition(x.a, x.b, fold)
        return x

    return map_formula(f, leaf, fold)


def normalize(f: G, fold: bool = True) -> G:
    """Negation normal form: ``Not`` only directly above atoms."""
    memo: dict[tuple[int, bool], G] = {}

    def go(x: G, positive: bool) -> G:
        key = (id(x), positive)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(x, Not):
            r = go(x.arg, not positive)
        elif isinstance(x, And):
            parts = [go(a, positive) for a in x.args]
            r = conj(parts, fold) if positive else disj(parts, fold)
        elif isinstance(x, Or):
            parts = [go(a, positive) for a in x.args]
            r = disj(parts, fold) if positive else conj(parts, fold)
        elif isinstance(x, Const):
            r = x if positive else Const(not x.value)
        else:
            r = x if positive else Not(x)
        memo[key] = r
        return r

    return go(f, True)


def iter_atoms(f: G) -> Iterator[G]:
    seen: set[int] = set()
    stack = [f]
    while stack:
        x = stack.pop()
        if id(x) in seen:
            continue
        seen.add(id(x))
        if isinstance(x, (And, Or)):
            stack.extend(x.args)
        elif isinstance(x, Not):
            stack.append(x.arg)
        elif not isinstance(x, Const):
            yield x


def nodes_of(f: G) -> set[Node]:
    out: set[Node] = set()
    for a in iter_atoms(f):
        if isinstance(a, Exists):
            out.add(a.node)
        elif isinstance(a, (Strict, SameNodeT)):
            out.add(a.a)
            out.add(a.b)
    return out


def size(f: G) -> int:
    n = 0
    stack = [f]
    while stack:
        x = stack.pop()
        n += 1
        if isinstance(x, (And, Or)):
            stack.extend(x.args)
        elif isinstance(x, Not):
            stack.append(x.arg)
    return n


# -- evaluation ------------------------------------------------------------


@dataclass
class Assignment:
    """Values for every kind of literal; used for model checking."""

    exists: dict[Node, bool] = field(default_factory=dict)
    ts: dict[Node, int] = field(default_factory=dict)
    nonnull: dict[int, bool] = field(default_factory=dict)
    preds: dict[tuple[str, tuple[int, ...]], bool] = field(default_factory=dict)
    attrs: dict[tuple[int, str], object] = field(default_factory=dict)

    def atom(self, x: G) -> bool:
        if isinstance(x, Exists):
            return self.exists.get(x.node, False)
        if isinstance(x, Strict):
            return self.ts.get(x.a, 0) < self.ts.get(x.b, 0)
        if isinstance(x, NonNull):
            return self.nonnull.get(x.uid, False)
        if isinstance(x, PredVar):
            return self.preds.get((x.name, x.uids), False)
        if isinstance(x, AttrEq):
            return self.attrs.get((x.uid, x.attr)) == x.value
        if isinstance(x, AttrSame):
            return self.attrs.get((x.u1, x.attr)) == self.attrs.get((x.u2, x.attr))
        if isinstance(x, SameNodeT):
            return (self.exists.get(x.a, False) == self.exists.get(x.b, False)
                    and self.ts.get(x.a, 0) == self.ts.get(x.b, 0))
        raise TypeError(f"not an atom: {x!r}")


def evaluate(f: G, env: Assignment) -> bool:
    memo: dict[int, bool] = {}

    def go(x: G) -> bool:
        key = id(x)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(x, And):
            r = all(go(a) for a in x.args)
        elif isinstance(x, Or):
            r = any(go(a) for a in x.args)
        elif isinstance(x, Not):
            r = not go(x.arg)
        elif isinstance(x, Const):
            r = x.value
        else:
            r = env.atom(x)
        memo[key] = r
        return r

    return go(f)


# -- whole queries ---------------------------------------------------------


@dataclass
class Query:
    """The formula of one verification query, before lowering.

    ``formula`` is kept with ``SameNodeT`` intact so that witness extraction
    can recover merge classes; :meth:`lowered` gives the solver input.
    """

    elab: Elaboration
    formula: G
    fold: bool = True
    parts: list[tuple[str, G]] = field(default_factory=list)

    def lowered(self) -> G:
        return normalize(lower_same_node(self.formula, self.fold), self.fold)

    def unlowered_nnf(self) -> G:
        return normalize(self.formula, self.fold)


def _instance_axioms(grounder: Grounder, inst: ModuleInstance, parts: list[tuple[str, G]]) -> None:
    d = inst.definition
    for ax in d.implementation_axioms:
        parts.append((f"{inst.path}:{ax.name}", grounder.ground_axiom(ax, inst)))
    for ax in d.connection_axioms:
        parts.append((f"{inst.path}:{ax.name}", grounder.ground_axiom(ax, inst)))


def side_constraints(elab: Elaboration, mentioned: set[Node], preds: set[PredVar],
                     fold: bool = True, symmetry: bool = True) -> list[tuple[str, G]]:
    """Structural constraints on symbolic operations.

    Null operations own no nodes; symbolic writes store nonzero data (zero is
    the initial value); present operations of an instance form a prefix.
    With ``symmetry`` on, interchangeable operations (those of instances
    whose axioms never use program order) are additionally ordered.
    """
    out: list[tuple[str, G]] = []
    by_uid: dict[int, list[str]] = {}
    for uid, ev in sorted(mentioned):
        by_uid.setdefault(uid, []).append(ev)
    for op in elab.operations:
        if op.is_concrete:
            continue
        for ev in by_uid.get(op.uid, ()):
            out.append(("null_no_nodes", disj([NonNull(op.uid), neg(Exists((op.uid, ev)), fold)], fold)))
        if WRITE in op.kinds and 0 in op.values:
            out.append(("write_nonzero", neg(conj([AttrEq(op.uid, "kind", WRITE),
                                                   AttrEq(op.uid, "data", 0)], fold), fold)))
    for inst in elab.instances():
        ops = [op for op in inst.operations if not op.is_concrete]
        for x, y in zip(ops, ops[1:]):
            out.append(("nonnull_prefix", disj([NonNull(x.uid), neg(NonNull(y.uid), fold)], fold)))
    if symmetry:
        out.extend(_lex_leader(elab, preds, fold))
    return out


def _lex_leader(elab: Elaboration, preds: set[PredVar], fold: bool) -> list[tuple[str, G]]:
    """Lex-leader constraints for swapping adjacent symbolic operations.

    Variables are ordered globally: non-null flags by uid, then ``Mapped``
    atoms by their uid pair.  For a swap of operations x and y, the
    assignment must be at least its image, compared on that order.  Any
    solution can be permuted into one meeting all of these at once, since
    they all follow from being the lex-largest member of its orbit.
    """
    from .elaborate import mentions_program_order

    out: list[tuple[str, G]] = []
    by_uid: dict[int, list[PredVar]] = {}
    for pv in preds:
        for u in set(pv.uids):
            by_uid.setdefault(u, []).append(pv)
    for inst in elab.instances():
        ops = [op for op in inst.operations if not op.is_concrete]
        if len(ops) < 2 or mentions_program_order(inst, elab.interface, elab.scope):
            continue
        constraints = []
        for x, y in zip(ops, ops[1:]):
            swap = {x.uid: y.uid, y.uid: x.uid}
            xs: list[G] = [NonNull(x.uid)]
            ys: list[G] = [NonNull(y.uid)]
            pairs = []
            ok = True
            for pv in set(by_uid.get(x.uid, [])) | set(by_uid.get(y.uid, [])):
                image = PredVar(pv.name, tuple(swap.get(u, u) for u in pv.uids))
                if image == pv:
                    continue
                if image not in preds:
                    ok = False
                    break
                if (pv.name, pv.uids) < (image.name, image.uids):
                    pairs.append(((pv.name, pv.uids), pv, image))
            if not ok:
                constraints = []
                break
            for _, pv, image in sorted(pairs, key=lambda t: t[0]):
                xs.append(pv)
                ys.append(image)
            constraints.append(("symmetry", lex_geq(xs, ys, fold)))
        out.extend(constraints)
    return out


def lex_geq(xs: list[G], ys: list[G], fold: bool = True) -> G:
    """``xs >= ys`` lexicographically, with true > false."""
    acc: G = TRUE
    for a, b in reversed(list(zip(xs, ys))):
        # position k: a > b, or a == b and the rest is >=
        gt = conj([a, neg(b, fold)], fold)
        ge = disj([a, neg(b, fold)], fold)
        acc = disj([gt, conj([ge, acc], fold)], fold)
    return acc


def build_litmus_query(elab: Elaboration, fold: bool = True, symmetry: bool = True) -> Query:
    grounder = Grounder(elab, fold)
    parts: list[tuple[str, G]] = []
    for inst in elab.tree.walk():
        _instance_axioms(grounder, inst, parts)
    return _finish(elab, parts, fold, symmetry)


def build_interface_query(elab: Elaboration, event_map: dict[str, str], fold: bool = True,
                          symmetry: bool = True) -> Query:
    """Implementation axioms of the scope subtree and the negated interface."""
    grounder = Grounder(elab, fold)
    parts: list[tuple[str, G]] = []
    for inst in elab.scope.walk():
        _instance_axioms(grounder, inst, parts)
    iface_parts = [grounder.ground_axiom(ax, elab.scope, event_map)
                   for ax in elab.interface.implementation_axioms]
    parts.append((f"not {elab.interface.name}", neg(conj(iface_parts, fold), fold)))
    return _finish(elab, parts, fold, symmetry)


def _finish(elab: Elaboration, parts: list[tuple[str, G]], fold: bool, symmetry: bool) -> Query:
    body = conj([g for _, g in parts], fold)
    preds = {a for a in iter_atoms(body) if isinstance(a, PredVar)}
    extra = side_constraints(elab, nodes_of(body), preds, fold, symmetry)
    formula = conj([body] + [g for _, g in extra], fold)
    return Query(elab, formula, fold, parts + extra)
