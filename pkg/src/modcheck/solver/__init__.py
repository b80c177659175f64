"""Satisfiability of ground formulas.

Two backends: the native search (a compiled kernel when the extension is
built, otherwise the pure-Python one) and any SMT-LIB2 solver run as a
child process.  Set ``MODCHECK_KERNEL=python`` to force the fallback kernel.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from ..ground import AttrEq, AttrSame, Assignment, Exists, G, NonNull, PredVar, Strict, iter_atoms
from . import _pykernel
from .cnf import Encoding, encode

try:
    if os.environ.get("MODCHECK_KERNEL", "").lower() == "python":
        raise ImportError("fallback kernel requested")
    from . import _ckernel as _kernel
    KERNEL = "compiled"
except ImportError:
    _kernel = _pykernel
    KERNEL = "python"

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

_STATUS = {_pykernel.SAT: SAT, _pykernel.UNSAT: UNSAT, _pykernel.UNKNOWN: UNKNOWN}


@dataclass
class SolveResult:
    status: str
    model: Optional[Assignment] = None
    reason: str = ""
    stats: dict = field(default_factory=dict)
    millis: float = 0.0

    @property
    def is_sat(self) -> bool:
        return self.status == SAT


def kernel_module(name: Optional[str] = None):
    """The kernel to use: ``"python"``, ``"compiled"`` or the default."""
    if name is None:
        return _kernel
    if name == "python":
        return _pykernel
    if name == "compiled":
        from . import _ckernel
        return _ckernel
    raise ValueError(f"unknown kernel {name!r}")


def compiled_available() -> bool:
    try:
        from . import _ckernel  # noqa: F401
    except ImportError:
        return False
    return True


def timestamps(num_nodes: int, edges: list[tuple[int, int, bool]]) -> list[int]:
    """Smallest non-negative integers satisfying acyclic strict/weak edges.

    Nodes of one strongly connected component share a timestamp; a strict
    edge between components adds one.
    """
    g = nx.DiGraph()
    g.add_nodes_from(range(num_nodes))
    g.add_edges_from((a, b) for a, b, _ in edges)
    cond = nx.condensation(g)
    comp = cond.graph["mapping"]
    succ: dict[int, list[tuple[int, int]]] = {c: [] for c in cond.nodes}
    for a, b, strict in edges:
        ca, cb = comp[a], comp[b]
        if ca != cb:
            succ[ca].append((cb, int(strict)))
        elif strict:
            raise ValueError("strict edge inside a strongly connected component")
    level = dict.fromkeys(cond.nodes, 0)
    for c in nx.topological_sort(cond):
        for d, w in succ[c]:
            level[d] = max(level[d], level[c] + w)
    return [level[comp[n]] for n in range(num_nodes)]


def attribute_domains(elab) -> dict[tuple[int, str], tuple]:
    out = {}
    for op in elab.operations:
        if op.is_concrete:
            continue
        out[(op.uid, "kind")] = op.kinds
        out[(op.uid, "addr")] = op.addresses
        out[(op.uid, "data")] = op.values
    return out


def decode(enc: Encoding, bits: list[int]) -> Assignment:
    env = Assignment()
    for atom, v in enc.atom_var.items():
        val = bits[v] == 1
        if isinstance(atom, Exists):
            env.exists[atom.node] = val
        elif isinstance(atom, NonNull):
            env.nonnull[atom.uid] = val
        elif isinstance(atom, PredVar):
            env.preds[(atom.name, atom.uids)] = val
    for (uid, attr), vs in enc.attr_vars.items():
        for val, v in vs:
            if bits[v] == 1:
                env.attrs[(uid, attr)] = val
    edges = []
    for v, a, b in enc.edges:
        if bits[v] == 1:
            edges.append((a, b, True))
        else:
            edges.append((b, a, False))
    ts = timestamps(len(enc.nodes), edges)
    for k, node in enumerate(enc.nodes):
        env.ts[node] = ts[k]
    return env


def solve_native(f: G, domains: Optional[dict] = None, timeout: float = 0.0,
                 max_conflicts: int = 0, kernel: Optional[str] = None,
                 event_rank=None) -> SolveResult:
    """Decide a lowered NNF ground formula with the native search."""
    start = time.perf_counter()
    enc = encode(f, domains or {}, event_rank)
    mod = kernel_module(kernel)
    status, bits, stats = mod.solve(enc.num_vars, enc.clauses, enc.edges, len(enc.nodes),
                                    max_conflicts, timeout)
    stats = dict(stats, vars=enc.num_vars, clauses=len(enc.clauses), edges=len(enc.edges),
                 kernel=mod.__name__.rsplit(".", 1)[-1])
    status = _STATUS[status]
    model = decode(enc, bits) if status == SAT else None
    reason = "" if status != UNKNOWN else "resource limit reached"
    return SolveResult(status, model, reason, stats, (time.perf_counter() - start) * 1000)


def atoms_summary(f: G) -> dict[str, int]:
    counts: dict[str, int] = {}
    for a in iter_atoms(f):
        counts[type(a).__name__] = counts.get(type(a).__name__, 0) + 1
    return counts


__all__ = [
    "KERNEL", "SAT", "UNSAT", "UNKNOWN", "SolveResult", "attribute_domains", "compiled_available",
    "decode", "kernel_module", "solve_native", "timestamps", "AttrEq", "AttrSame", "Strict",
]
