"""Independent reference implementations used by the tests.

* ``sc_observable`` / ``tso_observable``: exhaustive operational search of
  a litmus outcome under sequential consistency and under x86-TSO (per-core
  FIFO store buffers with forwarding; a fence waits for an empty buffer).
* ``direct_eval``: evaluates a DSL formula by substituting operations for
  variables and recursing over the syntax tree, with no grounding step.
* ``timestamp_sat``: brute force over all timestamp maps of a small graph.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from modcheck.dsl import ast as A
from modcheck.litmus import LitmusTest


# -- operational memory models ---------------------------------------------


def _programs(test: LitmusTest):
    return tuple(tuple(test.core_instructions(c)) for c in test.cores)


def sc_observable(test: LitmusTest) -> bool:
    """Is there an interleaving in which every read returns its value?"""
    progs = _programs(test)

    @lru_cache(maxsize=None)
    def go(pcs: tuple[int, ...], mem: tuple[tuple[str, int], ...]) -> bool:
        if all(pc == len(p) for pc, p in zip(pcs, progs)):
            return True
        m = dict(mem)
        for k, p in enumerate(progs):
            if pcs[k] == len(p):
                continue
            ins = p[pcs[k]]
            nxt = pcs[:k] + (pcs[k] + 1,) + pcs[k + 1:]
            if ins.is_read:
                if m.get(ins.address, 0) != ins.data:
                    continue
                if go(nxt, mem):
                    return True
            elif ins.is_write:
                m2 = dict(m)
                m2[ins.address] = ins.data
                if go(nxt, tuple(sorted(m2.items()))):
                    return True
            elif go(nxt, mem):
                return True
        return False

    return go(tuple(0 for _ in progs), ())


def tso_observable(test: LitmusTest) -> bool:
    """The same question on the x86-TSO abstract machine."""
    progs = _programs(test)
    n = len(progs)

    @lru_cache(maxsize=None)
    def go(pcs, bufs, mem) -> bool:
        if all(pc == len(p) for pc, p in zip(pcs, progs)) and not any(bufs):
            return True
        m = dict(mem)
        for k in range(n):
            # drain the oldest buffered store of core k
            if bufs[k]:
                (addr, val), rest = bufs[k][0], bufs[k][1:]
                m2 = dict(m)
                m2[addr] = val
                if go(pcs, bufs[:k] + (rest,) + bufs[k + 1:], tuple(sorted(m2.items()))):
                    return True
            if pcs[k] == len(progs[k]):
                continue
            ins = progs[k][pcs[k]]
            nxt = pcs[:k] + (pcs[k] + 1,) + pcs[k + 1:]
            if ins.is_read:
                fwd = [v for a, v in bufs[k] if a == ins.address]
                seen = fwd[-1] if fwd else m.get(ins.address, 0)
                if seen == ins.data and go(nxt, bufs, mem):
                    return True
            elif ins.is_write:
                buf = bufs[k] + ((ins.address, ins.data),)
                if go(nxt, bufs[:k] + (buf,) + bufs[k + 1:], mem):
                    return True
            elif not bufs[k] and go(nxt, bufs, mem):
                return True
        return False

    return go(tuple(0 for _ in progs), tuple(() for _ in progs), ())


def observable_under(test: LitmusTest, mcm: str) -> bool:
    if mcm == "SC":
        return sc_observable(test)
    if mcm == "TSO":
        return tso_observable(test)
    raise ValueError(mcm)


# -- direct-substitution evaluation of formulas ----------------------------


class World:
    """A concrete interpretation of operations, nodes and relations.

    ``ops`` maps each instance path to its operations, each a dict with
    ``uid``, ``kind``, ``addr``, ``data``, ``index``, ``nonnull``,
    ``concrete``.  ``nodes`` maps ``(uid, event)`` to existence, ``ts`` to a
    timestamp, ``mapped`` is a set of uid pairs and ``params`` the
    parameters of the instance the formula belongs to.
    """

    def __init__(self, ops, nodes, ts, mapped, owner, params=None):
        self.params = params or {}
        self.ops = ops
        self.nodes = nodes
        self.ts = ts
        self.mapped = mapped
        self.owner = owner


def _kind(op) -> str:
    return op["kind"]


def _pred(w: World, name: str, args, flavor):
    a = args[0]
    if name == "IsAnyRead":
        return _kind(a) == "R"
    if name == "IsAnyWrite":
        return _kind(a) == "W"
    if name == "IsFence":
        return _kind(a).startswith("F")
    if name == "IsFenceKind":
        return _kind(a) == f"F.{flavor}"
    if name == "IsNotNull":
        return a["nonnull"]
    if name == "DataFromInitialState":
        return _kind(a) == "R" and a["data"] == 0
    b = args[1]
    access = ("R", "W")
    if name == "SameAddress":
        return _kind(a) in access and _kind(b) in access and a["addr"] == b["addr"]
    if name == "SameData":
        return _kind(a) in access and _kind(b) in access and a["data"] == b["data"]
    if name == "ProgramOrder":
        return w.owner[a["uid"]] == w.owner[b["uid"]] and a["index"] < b["index"]
    if name == "SameOp":
        return a["uid"] == b["uid"]
    if name == "Mapped":
        return (a["uid"], b["uid"]) in w.mapped
    raise ValueError(name)


def direct_eval(f: A.Formula, w: World, env: dict, domain_of) -> bool:
    """Evaluate ``f`` with variables bound to operation dicts in ``env``.

    ``domain_of(quantifier)`` lists the operations a quantifier ranges over;
    null operations are skipped, as quantifiers range over present ones.
    """
    def node(ref):
        return (env[ref.var]["uid"], ref.event)

    def exists(n):
        return w.nodes.get(n, False)

    def before(a, b):
        return w.ts.get(a, 0) < w.ts.get(b, 0)

    if isinstance(f, A.Const):
        return f.value
    if isinstance(f, A.Not):
        return not direct_eval(f.body, w, env, domain_of)
    if isinstance(f, A.And):
        return direct_eval(f.left, w, env, domain_of) and direct_eval(f.right, w, env, domain_of)
    if isinstance(f, A.Or):
        return direct_eval(f.left, w, env, domain_of) or direct_eval(f.right, w, env, domain_of)
    if isinstance(f, A.Implies):
        return (not direct_eval(f.left, w, env, domain_of)) or direct_eval(f.right, w, env, domain_of)
    if isinstance(f, A.Iff):
        return direct_eval(f.left, w, env, domain_of) == direct_eval(f.right, w, env, domain_of)
    if isinstance(f, (A.Forall, A.Exists)):
        results = (direct_eval(f.body, w, {**env, f.var: op}, domain_of)
                   for op in domain_of(f) if op["nonnull"])
        return all(results) if isinstance(f, A.Forall) else any(results)
    if isinstance(f, A.ParamEq):
        return w.params.get(f.name) == f.value
    if isinstance(f, A.PredicateApp):
        return _pred(w, f.name, [env[x] for x in f.args], f.flavor)
    if isinstance(f, A.NodeExists):
        return exists(node(f.node))
    if isinstance(f, (A.AddEdge, A.EdgeExists)):
        a, b = node(f.src), node(f.dst)
        return a != b and exists(a) and exists(b) and before(a, b)
    if isinstance(f, A.SameNode):
        a, b = node(f.a), node(f.b)
        return exists(a) == exists(b) and w.ts.get(a, 0) == w.ts.get(b, 0)
    raise TypeError(f)


# -- timestamps ------------------------------------------------------------


def timestamp_sat(num_nodes: int, strict, weak, values: int | None = None) -> bool:
    """Do integer timestamps in ``0..values-1`` satisfy every edge?"""
    values = num_nodes if values is None else values
    for ts in itertools.product(range(values), repeat=num_nodes):
        if all(ts[a] < ts[b] for a, b in strict) and all(ts[a] <= ts[b] for a, b in weak):
            return True
    return False


def timestamp_masks(num_nodes: int, pairs, values: int):
    """Edge masks satisfied by each timestamp map in ``0..values-1``, deduplicated.

    Bits ``2k`` and ``2k+1`` belong to ``pairs[k] = (a, b)``: bit ``2k`` is set
    when a strict edge a -> b holds (``ts[a] < ts[b]``), bit ``2k+1`` when a
    weak one does (``ts[a] <= ts[b]``).
    """
    import numpy as np

    out = set()
    for ts in itertools.product(range(values), repeat=num_nodes):
        m = 0
        for k, (a, b) in enumerate(pairs):
            if ts[a] < ts[b]:
                m |= 1 << (2 * k)
            if ts[a] <= ts[b]:
                m |= 2 << (2 * k)
        out.add(m)
    return np.array(sorted(out), dtype=np.uint64)


def masks_satisfiable(graphs, sat_masks):
    """A graph is satisfiable iff some timestamp map satisfies all of its edges."""
    import numpy as np

    ok = np.zeros(len(graphs), dtype=bool)
    for m in sat_masks:
        ok |= (graphs & ~m) == 0
    return ok


def edge_masks(num_pairs: int, max_edges: int, chunk: int = 1 << 20):
    """Every graph with at most ``max_edges`` edges over ``num_pairs`` ordered pairs.

    Each pair carries no edge, a strict edge (1) or a weak edge (2).  Yields
    uint64 arrays of at most about ``chunk`` masks.
    """
    import numpy as np

    for k in range(max_edges + 1):
        combos = list(itertools.combinations(range(num_pairs), k))
        kinds = list(itertools.product((1, 2), repeat=k))
        combos = np.array(combos, dtype=np.uint64).reshape(len(combos), k)
        kinds = np.array(kinds, dtype=np.uint64).reshape(len(kinds), k)
        shifts = combos * np.uint64(2)
        step = max(1, chunk // len(kinds))
        for start in range(0, len(combos), step):
            part = shifts[start:start + step]
            masks = (kinds[None, :, :] << part[:, None, :]).sum(axis=2, dtype=np.uint64)
            yield masks.reshape(-1)
