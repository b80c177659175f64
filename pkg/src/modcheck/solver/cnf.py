"""Clausal encoding of ground formulas for the native search."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..ground import (
    And, AttrEq, AttrSame, Const, Exists, G, NonNull, Not, Or, PredVar, SameNodeT, Strict,
    iter_atoms,
)


@dataclass
class Encoding:
    num_vars: int = 0
    clauses: list[list[int]] = field(default_factory=list)
    atom_var: dict[G, int] = field(default_factory=dict)
    # (uid, attr) -> [(value, var)]
    attr_vars: dict[tuple[int, str], list[tuple[object, int]]] = field(default_factory=dict)
    nodes: list = field(default_factory=list)
    node_index: dict = field(default_factory=dict)
    edges: list[tuple[int, int, int]] = field(default_factory=list)

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars


def _atom_order(a: G):
    # deterministic variable numbering: by uid, then event index within kind
    if isinstance(a, NonNull):
        return (0, a.uid)
    if isinstance(a, Exists):
        return (1, a.node)
    if isinstance(a, Strict):
        return (2, a.a, a.b)
    if isinstance(a, PredVar):
        return (3, a.name, a.uids)
    if isinstance(a, AttrSame):
        return (5, a.u1, a.u2, a.attr)
    raise TypeError(a)


def encode(f: G, domains: dict[tuple[int, str], tuple], event_rank=None) -> Encoding:
    """Encode an NNF formula without ``SameNodeT``.

    ``domains`` gives the finite domain of each symbolic attribute;
    ``event_rank(node)`` orders nodes (defaults to the node itself).
    """
    enc = Encoding()
    atoms = list(iter_atoms(f))
    for a in atoms:
        if isinstance(a, SameNodeT):
            raise ValueError("lower SameNode before encoding")
    rank = event_rank or (lambda n: n)

    def key(a: G):
        k = _atom_order(a)
        if k[0] == 1:
            return (1, rank(a.node))
        if k[0] == 2:
            return (2, rank(a.a), rank(a.b))
        return k

    attr_keys = set()
    plain = []
    for a in atoms:
        if isinstance(a, AttrEq):
            attr_keys.add((a.uid, a.attr))
        elif isinstance(a, AttrSame):
            attr_keys.add((a.u1, a.attr))
            attr_keys.add((a.u2, a.attr))
            plain.append(a)
        else:
            plain.append(a)
    plain.sort(key=key)
    for a in plain:
        if isinstance(a, AttrSame):
            continue
        enc.atom_var[a] = enc.new_var()

    # one-hot attribute variables, exactly one value each
    for uid, attr in sorted(attr_keys, key=lambda k: (k[0], k[1])):
        dom = domains[(uid, attr)]
        vs = []
        for val in dom:
            v = enc.new_var()
            vs.append((val, v))
        enc.attr_vars[(uid, attr)] = vs
        enc.clauses.append([v for _, v in vs])
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                enc.clauses.append([-vs[i][1], -vs[j][1]])
    for a in plain:
        if not isinstance(a, AttrSame):
            continue
        s = enc.new_var()
        enc.atom_var[a] = s
        left = dict(enc.attr_vars[(a.u1, a.attr)])
        right = dict(enc.attr_vars[(a.u2, a.attr)])
        for val, x in left.items():
            y = right.get(val)
            if y is None:
                enc.clauses.append([-s, -x])
                continue
            enc.clauses.append([-x, -y, s])
            enc.clauses.append([-s, -x, y])
        for val, y in right.items():
            if val not in left:
                enc.clauses.append([-s, -y])
            else:
                enc.clauses.append([-s, -y, left[val]])

    # timestamp nodes and edge atoms
    strict_atoms = [a for a in plain if isinstance(a, Strict)]
    for a in strict_atoms:
        for n in (a.a, a.b):
            if n not in enc.node_index:
                enc.node_index[n] = len(enc.nodes)
                enc.nodes.append(n)
        enc.edges.append((enc.atom_var[a], enc.node_index[a.a], enc.node_index[a.b]))

    true_var = 0

    def const_lit(value: bool) -> int:
        nonlocal true_var
        if true_var == 0:
            true_var = enc.new_var()
            enc.clauses.append([true_var])
        return true_var if value else -true_var

    def atom_lit(a: G) -> int:
        if isinstance(a, AttrEq):
            for val, v in enc.attr_vars[(a.uid, a.attr)]:
                if val == a.value:
                    return v
            return const_lit(False)
        return enc.atom_var[a]

    memo: dict[int, int] = {}

    def lit(x: G) -> int:
        hit = memo.get(id(x))
        if hit is not None:
            return hit
        if isinstance(x, Const):
            r = const_lit(x.value)
        elif isinstance(x, Not):
            if isinstance(x.arg, Const):
                r = const_lit(not x.arg.value)
            else:
                r = -atom_lit(x.arg)
        elif isinstance(x, And):
            r = enc.new_var()
            for c in x.args:
                enc.clauses.append([-r, lit(c)])
        elif isinstance(x, Or):
            r = enc.new_var()
            enc.clauses.append([-r] + [lit(c) for c in x.args])
        else:
            r = atom_lit(x)
        memo[id(x)] = r
        return r

    def assert_(x: G) -> None:
        if isinstance(x, And):
            for c in x.args:
                assert_(c)
        elif isinstance(x, Or):
            enc.clauses.append([lit(c) for c in x.args])
        elif isinstance(x, Const):
            if not x.value:
                enc.clauses.append([const_lit(False)])
        else:
            enc.clauses.append([lit(x)])

    assert_(f)
    return enc
