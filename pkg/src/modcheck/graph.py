"""Witness µhb graphs: extraction from a model and Graphviz output.

Edges come from the axioms, not from the total order of timestamps: the
query formula is walked under the model, descending into every conjunct
and into the first satisfied disjunct, and each true positive ordering
atom met on the way becomes an edge carrying its axiom label.  Node
merges are collected the same way from satisfied ``SameNode`` atoms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from networkx.utils import UnionFind

from .ground import And, Assignment, Const, Exists, G, Not, Or, Query, SameNodeT, Strict

Node = tuple[int, str]


class GraphError(Exception):
    pass


@dataclass(frozen=True)
class GraphNode:
    node: Node
    ts: int
    column: int
    row: tuple


@dataclass(frozen=True)
class GraphEdge:
    src: Node
    dst: Node
    label: str
    kind: str  # "strict" or "merged"


@dataclass
class UhbGraph:
    nodes: list[GraphNode] = field(default_factory=list)
    edges: list[GraphEdge] = field(default_factory=list)
    merge_classes: list[tuple[Node, ...]] = field(default_factory=list)
    # column index -> title
    columns: dict[int, str] = field(default_factory=dict)
    names: dict[Node, str] = field(default_factory=dict)
    title: str = "witness"

    def node(self, n: Node) -> GraphNode:
        for g in self.nodes:
            if g.node == n:
                return g
        raise KeyError(n)

    def timestamps(self) -> dict[Node, int]:
        return {g.node: g.ts for g in self.nodes}


def _asserted(f: G, env: Assignment) -> tuple[list[Strict], list[SameNodeT]]:
    """True positive ordering and merge atoms along the satisfied part of ``f``."""
    strict: list[Strict] = []
    merges: list[SameNodeT] = []
    memo: dict[int, bool] = {}

    def truth(x: G) -> bool:
        hit = memo.get(id(x))
        if hit is None:
            if isinstance(x, And):
                hit = all(truth(c) for c in x.args)
            elif isinstance(x, Or):
                hit = any(truth(c) for c in x.args)
            elif isinstance(x, Not):
                hit = not truth(x.arg)
            elif isinstance(x, Const):
                hit = x.value
            else:
                hit = env.atom(x)
            memo[id(x)] = hit
        return hit

    done: set[int] = set()
    stack = [f]
    while stack:
        x = stack.pop()
        if id(x) in done:
            continue
        done.add(id(x))
        if isinstance(x, And):
            stack.extend(reversed(x.args))
        elif isinstance(x, Or):
            for c in x.args:
                if truth(c):
                    stack.append(c)
                    break
        elif isinstance(x, Strict):
            if env.atom(x):
                strict.append(x)
        elif isinstance(x, SameNodeT):
            if env.atom(x):
                merges.append(x)
    return strict, merges


def _dense(values: dict[Node, int]) -> dict[Node, int]:
    ranks = {v: k for k, v in enumerate(sorted(set(values.values())))}
    return {n: ranks[v] for n, v in values.items()}


def _op_title(op, env: Assignment) -> str:
    if op.is_concrete:
        c = op.concrete
        parts = [f"{c.id}:", op.owner, op.kind]
        if c.address is not None:
            parts += [c.address, str(c.data)]
        return " ".join(parts)
    kind = env.attrs.get((op.uid, "kind"), op.kinds[0] if len(op.kinds) == 1 else "?")
    parts = [op.name, str(kind)]
    if kind in ("R", "W"):
        parts += [str(env.attrs.get((op.uid, "addr"), "?")), str(env.attrs.get((op.uid, "data"), "?"))]
    return " ".join(parts)


def extract_graph(query: Query, model: Assignment, title: str = "witness") -> UhbGraph:
    """The witness graph of a satisfying model of ``query``."""
    elab = query.elab
    f = query.unlowered_nnf()
    for a in _iter_exists(f):
        if a.node not in model.exists:
            raise GraphError(f"model has no value for node {a.node}")
    strict, merges = _asserted(f, model)
    present = sorted(n for n, e in model.exists.items() if e)
    present_set = set(present)

    # operations joined by a true mapping share a column
    ops = UnionFind()
    for op in elab.operations:
        ops[op.uid]
    for (name, uids), val in sorted(model.preds.items()):
        if val and name == "Mapped":
            ops.union(*uids)
    uses = {uid for uid, _ in present}
    groups = []
    for members in ops.to_sets():
        members = sorted(members)
        if not uses.intersection(members):
            continue
        # title the column after its concrete instruction, if any
        lead = next((u for u in members if elab.op(u).is_concrete), members[0])
        groups.append((lead, members))
    groups.sort()
    column_of = {}
    g = UhbGraph(title=title)
    for k, (lead, members) in enumerate(groups):
        g.columns[k] = _op_title(elab.op(lead), model)
        for u in members:
            column_of[u] = k

    merged = UnionFind()
    for n in present:
        merged[n]
    for m in merges:
        if m.a in present_set and m.b in present_set:
            merged.union(m.a, m.b)
    g.merge_classes = sorted(tuple(sorted(s)) for s in merged.to_sets() if len(s) > 1)

    ts = _dense({n: model.ts.get(n, 0) for n in present})
    for n in present:
        op = elab.op(n[0])
        inst = elab.instance(op.owner)
        row = (inst.path.count("/"), inst.definition.name, elab.event_index(n[0], n[1]), n[1])
        g.nodes.append(GraphNode(n, ts[n], column_of[n[0]], row))
        g.names[n] = f"{n[1]}@{op.name}"

    seen = set()
    for s in strict:
        key = (s.a, s.b, s.label)
        if key in seen or s.a not in present_set or s.b not in present_set:
            continue
        seen.add(key)
        g.edges.append(GraphEdge(s.a, s.b, s.label, "strict"))
    for cls in g.merge_classes:
        for other in cls[1:]:
            g.edges.append(GraphEdge(cls[0], other, "", "merged"))
    g.edges.sort(key=lambda e: (e.kind, e.src, e.dst, e.label))
    return g


def _iter_exists(f: G):
    done: set[int] = set()
    stack = [f]
    while stack:
        x = stack.pop()
        if id(x) in done:
            continue
        done.add(id(x))
        if isinstance(x, (And, Or)):
            stack.extend(x.args)
        elif isinstance(x, Not):
            stack.append(x.arg)
        elif isinstance(x, Exists):
            yield x


def _dot_id(n: Node) -> str:
    return f'"n{n[0]}_{n[1]}"'


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: UhbGraph) -> str:
    """Graphviz text: a cluster per column, a row per event, merged nodes drawn once."""
    rep: dict[Node, Node] = {}
    for cls in g.merge_classes:
        for n in cls:
            rep[n] = cls[0]
    lines = [f"digraph {_quote(g.title)} {{", "  newrank=true;", "  node [shape=ellipse, fontsize=10];",
             "  edge [fontsize=9];"]
    by_col: dict[int, list[GraphNode]] = {}
    for n in sorted(g.nodes, key=lambda x: (x.column, x.row, x.node)):
        if rep.get(n.node, n.node) != n.node:
            continue
        by_col.setdefault(n.column, []).append(n)
    for col in sorted(by_col):
        lines.append(f"  subgraph cluster_{col} {{")
        lines.append(f"    label={_quote(g.columns.get(col, str(col)))};")
        for n in by_col[col]:
            cls = next((c for c in g.merge_classes if c[0] == n.node), None)
            if cls:
                label = " = ".join(g.names[m] for m in cls)
                lines.append(f"    {_dot_id(n.node)} [label={_quote(label + f' ({n.ts})')}, peripheries=2];")
            else:
                lines.append(f"    {_dot_id(n.node)} [label={_quote(g.names[n.node] + f' ({n.ts})')}];")
        lines.append("  }")
    rows: dict[tuple, list[Node]] = {}
    for col in by_col.values():
        for n in col:
            rows.setdefault(n.row[:3], []).append(n.node)
    for key in sorted(rows):
        if len(rows[key]) > 1:
            lines.append("  { rank=same; " + " ".join(_dot_id(n) for n in sorted(rows[key])) + "; }")
    drawn = set()
    for e in g.edges:
        if e.kind != "strict":
            continue
        a, b = rep.get(e.src, e.src), rep.get(e.dst, e.dst)
        key = (a, b, e.label)
        if key in drawn:
            continue
        drawn.add(key)
        attr = f" [label={_quote(e.label)}]" if e.label else ""
        lines.append(f"  {_dot_id(a)} -> {_dot_id(b)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
