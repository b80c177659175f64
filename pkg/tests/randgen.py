"""Random axioms, operation sets and interpretations for property tests.

The design is a two-level tree: ``Top`` (parameter ``p``) with one child
``sub``; both have operation type ``microop`` and events ``E0..E2``.  The
design holds at most four operations, a random mix of concrete litmus
instructions and symbolic operations.
"""

from __future__ import annotations

import random

from modcheck.dsl import ast as A
from modcheck.elaborate import Elaboration, Operation, build_tree
from modcheck.ground import Assignment
from modcheck.litmus import Kind, LitmusInstruction

EVENTS = ("E0", "E1", "E2")
KINDS = ("R", "W", "F.mfence")
ADDRS = ("x", "y")
VALUES = (0, 1, 2)
UNARY = ("IsAnyRead", "IsAnyWrite", "IsFence", "IsFenceKind", "IsNotNull", "DataFromInitialState")
BINARY = ("SameAddress", "SameData", "ProgramOrder", "SameOp", "Mapped")


def _module(name: str, params=(), subs=()) -> A.ModuleDef:
    return A.ModuleDef(name, tuple(params), "microop", {"IsCore": "no"}, list(subs),
                       events=[A.EventDecl(k, e) for k, e in enumerate(EVENTS)])


def make_tree():
    sub = _module("Sub")
    top = _module("Top", ("p",), [A.SubmoduleDecl("Sub", "sub")])
    return build_tree(top, {"Top": top, "Sub": sub}, {"p": 1})


def _instruction(rng: random.Random, uid: int) -> LitmusInstruction:
    kind = rng.choice((Kind.READ, Kind.WRITE, Kind.FENCE))
    if kind is Kind.FENCE:
        return LitmusInstruction(f"i{uid}", 0, uid, kind, fence=rng.choice(("mfence", "sync")))
    return LitmusInstruction(f"i{uid}", 0, uid, kind, rng.choice(ADDRS), rng.choice(VALUES))


def random_elaboration(rng: random.Random, max_ops: int = 4) -> Elaboration:
    """Between one and ``max_ops`` operations spread over the two instances."""
    tree = make_tree()
    insts = list(tree.walk())
    for inst in insts:
        inst.operations = []
    ops: list[Operation] = []
    for uid in range(rng.randint(1, max_ops)):
        inst = tree if uid == 0 else rng.choice(insts)
        k = len(inst.operations)
        if rng.random() < 0.3:
            op = Operation(uid, inst.path, "microop", k, concrete=_instruction(rng, uid))
        else:
            op = Operation(uid, inst.path, "microop", k, None, KINDS, ADDRS, VALUES)
        inst.operations.append(op)
        ops.append(op)
    return Elaboration(tree, "interface", max_ops, operations=ops)


def random_formula(rng: random.Random, depth: int, bound: list[str]) -> A.Formula:
    """A closed formula when ``bound`` is empty; quantifiers come first more often."""
    def ref() -> A.NodeRef:
        return A.NodeRef(rng.choice(bound), rng.choice(EVENTS))

    if depth <= 0 or (bound and rng.random() < 0.25):
        choices = ["const", "param"]
        if bound:
            choices += ["unary", "binary", "edge", "edge", "exists", "same"]
        c = rng.choice(choices)
        if c == "const":
            return A.Const(rng.random() < 0.5)
        if c == "param":
            return A.ParamEq("p", rng.randint(0, 2))
        if c == "unary":
            name = rng.choice(UNARY)
            flavor = rng.choice(("mfence", "sync")) if name == "IsFenceKind" else None
            return A.PredicateApp(name, (rng.choice(bound),), flavor)
        if c == "binary":
            return A.PredicateApp(rng.choice(BINARY), (rng.choice(bound), rng.choice(bound)))
        if c == "edge":
            cls = rng.choice((A.AddEdge, A.EdgeExists))
            return cls(ref(), ref(), "e")
        if c == "exists":
            return A.NodeExists(ref())
        return A.SameNode(ref(), ref())
    if not bound or (len(bound) < 3 and rng.random() < 0.4):
        var = f"v{len(bound)}"
        cls = rng.choice((A.Forall, A.Exists))
        domains = rng.choice((None, ("this",), ("sub",), ("this", "sub")))
        return cls(var, "microop", domains, random_formula(rng, depth - 1, bound + [var]))
    c = rng.choice(("and", "or", "not", "implies", "iff"))
    if c == "not":
        return A.Not(random_formula(rng, depth - 1, bound))
    cls = {"and": A.And, "or": A.Or, "implies": A.Implies, "iff": A.Iff}[c]
    return cls(random_formula(rng, depth - 1, bound), random_formula(rng, depth - 1, bound))


def random_interpretation(rng: random.Random, elab: Elaboration, max_ts: int = 3):
    """A world for the direct evaluator and the matching literal assignment."""
    from oracles import World

    env = Assignment()
    ops_by_inst: dict[str, list[dict]] = {}
    owner = {}
    nodes, ts = {}, {}
    for op in elab.operations:
        if op.is_concrete:
            c = op.concrete
            d = {"uid": op.uid, "kind": op.kind, "addr": c.address, "data": c.data, "nonnull": True}
        else:
            d = {"uid": op.uid, "kind": rng.choice(KINDS), "addr": rng.choice(ADDRS),
                 "data": rng.choice(VALUES), "nonnull": rng.random() < 0.75}
            env.nonnull[op.uid] = d["nonnull"]
            for attr in ("kind", "addr", "data"):
                env.attrs[(op.uid, attr)] = d[attr]
        d["index"] = op.index
        ops_by_inst.setdefault(op.owner, []).append(d)
        owner[op.uid] = op.owner
        for ev in EVENTS:
            n = (op.uid, ev)
            nodes[n] = env.exists[n] = rng.random() < 0.7
            ts[n] = env.ts[n] = rng.randint(0, max_ts)
    mapped = set()
    for a in elab.operations:
        for b in elab.operations:
            v = rng.random() < 0.3
            env.preds[("Mapped", (a.uid, b.uid))] = v
            if v:
                mapped.add((a.uid, b.uid))
    world = World(ops_by_inst, nodes, ts, mapped, owner, params={"p": 1})
    return world, env
