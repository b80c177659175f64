"""Pure-Python CDCL search with an acyclicity theory over edge variables.

Input is CNF over variables ``1..num_vars`` in DIMACS sign convention plus a
list of edge variables ``(var, a, b)`` over nodes ``0..num_nodes-1``.  An
edge variable set true asserts ``ts(a) < ts(b)``; set false it asserts
``ts(b) <= ts(a)``.  A partial assignment is theory-consistent iff no cycle
of asserted edges contains a strict edge.

This module is the fallback for the compiled kernel and mirrors it
step for step: two watched literals, first-UIP learning, VSIDS with ties
broken by variable index, phase saving and Luby restarts.
"""

from __future__ import annotations

import heapq
import time
from collections import deque

SAT = 1
UNSAT = 0
UNKNOWN = -1

_VAR_DECAY = 1 / 0.95
_RESTART_UNIT = 100


def luby(i: int) -> int:
    """The i-th element (from 0) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class Solver:
    def __init__(self, num_vars: int, clauses, edges, num_nodes: int):
        n = num_vars
        self.n = n
        # literal encoding: 2*v for v, 2*v+1 for -v
        self.value = [0] * (2 * n + 2)  # 1 true, -1 false, 0 unassigned
        self.level = [0] * (n + 1)
        self.reason = [-1] * (n + 1)
        self.phase = [False] * (n + 1)
        self.activity = [0.0] * (n + 1)
        self.var_inc = 1.0
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.clauses: list[list[int]] = []
        self.watches: list[list[int]] = [[] for _ in range(2 * n + 2)]
        self.heap: list[tuple[float, int]] = [(0.0, v) for v in range(1, n + 1)]
        heapq.heapify(self.heap)
        self.ok = True
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.theory_conflicts = 0

        # theory state
        self.num_nodes = num_nodes
        self.edge_of = [None] * (n + 1)
        for var, a, b in edges:
            self.edge_of[var] = (a, b)
        self.out: list[list[tuple[int, bool, int]]] = [[] for _ in range(num_nodes)]
        self.edge_added = [False] * (n + 1)

        for c in clauses:
            if not self.add_clause([self._lit(x) for x in c]):
                self.ok = False
                break

    @staticmethod
    def _lit(x: int) -> int:
        return 2 * x if x > 0 else -2 * x + 1

    def lit_value(self, lit: int) -> int:
        return self.value[lit]

    # -- clause database -------------------------------------------------

    def add_clause(self, lits: list[int]) -> bool:
        """Add an input clause at level 0, simplified against current values."""
        seen = set()
        out = []
        for lit in lits:
            if lit ^ 1 in seen or self.value[lit] == 1:
                return True  # tautology or satisfied
            if self.value[lit] == -1:
                continue
            if lit not in seen:
                seen.add(lit)
                out.append(lit)
        if not out:
            return False
        if len(out) == 1:
            v = self.value[out[0]]
            if v == -1:
                return False
            if v == 0:
                self._assign(out[0], -1)
                if self._propagate() >= 0:
                    return False
            return True
        idx = len(self.clauses)
        self.clauses.append(out)
        self.watches[out[0]].append(idx)
        self.watches[out[1]].append(idx)
        return True

    # -- assignment ------------------------------------------------------

    def _assign(self, lit: int, reason: int) -> None:
        v = lit >> 1
        self.value[lit] = 1
        self.value[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        value = self.value
        for i in range(len(self.trail) - 1, stop - 1, -1):
            lit = self.trail[i]
            v = lit >> 1
            if self.edge_added[v]:
                a, b = self.edge_of[v]
                src = a if value[2 * v] == 1 else b
                self.out[src].pop()
                self.edge_added[v] = False
            self.phase[v] = (lit & 1) == 0
            value[lit] = 0
            value[lit ^ 1] = 0
            self.reason[v] = -1
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, stop)

    # -- theory ----------------------------------------------------------

    def _theory_add(self, lit: int):
        """Add the edge for a newly true edge literal; return a conflict clause or None."""
        v = lit >> 1
        a, b = self.edge_of[v]
        if lit & 1 == 0:
            src, dst, strict = a, b, True
        else:
            src, dst, strict = b, a, False
        cycle = self._find_path(dst, src, strict)
        self.out[src].append((dst, strict, v))
        self.edge_added[v] = True
        if cycle is None:
            return None
        # every edge on the cycle is currently true; the clause forbids the combination
        clause = [lit ^ 1]
        for ev in cycle:
            clause.append(self._edge_true_lit(ev) ^ 1)
        return clause

    def _edge_true_lit(self, v: int) -> int:
        return 2 * v if self.value[2 * v] == 1 else 2 * v + 1

    def _find_path(self, start: int, goal: int, strict0: bool):
        """Edge variables of a path start ~> goal making a strict cycle, or None."""
        if start == goal and strict0:
            return []
        s0 = (start, strict0)
        parent = {s0: None}
        queue = deque([s0])
        out = self.out
        while queue:
            state = queue.popleft()
            node, flag = state
            if node == goal and flag and state != s0:
                path = []
                while parent[state] is not None:
                    prev, ev = parent[state]
                    path.append(ev)
                    state = prev
                return path
            for dst, strict, ev in out[node]:
                nxt = (dst, flag or strict)
                if nxt not in parent:
                    parent[nxt] = (state, ev)
                    if dst == goal and nxt[1]:
                        path = [ev]
                        while parent[state] is not None:
                            prev, pev = parent[state]
                            path.append(pev)
                            state = prev
                        return path
                    queue.append(nxt)
        return None

    # -- propagation -----------------------------------------------------

    def _propagate(self) -> int:
        """Unit propagation with theory checks; returns a conflict clause index or -1."""
        value = self.value
        watches = self.watches
        clauses = self.clauses
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            v = lit >> 1
            if self.edge_of[v] is not None:
                conflict = self._theory_add(lit)
                if conflict is not None:
                    self.theory_conflicts += 1
                    idx = len(self.clauses)
                    clauses.append(conflict)
                    if len(conflict) >= 2:
                        watches[conflict[0]].append(idx)
                        watches[conflict[1]].append(idx)
                    return idx
            false_lit = lit ^ 1
            ws = watches[false_lit]
            i = j = 0
            nws = len(ws)
            while i < nws:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if value[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    if value[c[k]] != -1:
                        c[1], c[k] = c[k], false_lit
                        watches[c[1]].append(ci)
                        found = True
                        break
                if found:
                    continue
                ws[j] = ci
                j += 1
                if value[first] == -1:
                    while i < nws:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    return ci
                self._assign(first, ci)
            del ws[j:]
        return -1

    # -- conflict analysis -----------------------------------------------

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for k in range(1, self.n + 1):
                self.activity[k] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[k], k) for k in range(1, self.n + 1) if self.value[2 * k] == 0]
            heapq.heapify(self.heap)
        elif self.value[2 * v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = [False] * (self.n + 1)
        learnt = [0]
        counter = 0
        p = -1
        idx = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        clause = self.clauses[confl]
        while True:
            # a reason clause holds its implied literal p first
            for q in clause if p == -1 else clause[1:]:
                v = q >> 1
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            v = p >> 1
            seen[v] = False
            counter -= 1
            if counter <= 0:
                break
            clause = self.clauses[self.reason[v]]
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause
        keep = [learnt[0]]
        marked = {q >> 1 for q in learnt}
        for q in learnt[1:]:
            r = self.reason[q >> 1]
            if r == -1 or any((x >> 1) not in marked and self.level[x >> 1] > 0
                              for x in self.clauses[r] if x != q ^ 1):
                keep.append(q)
        learnt = keep
        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for k in range(2, len(learnt)):
            if self.level[learnt[k] >> 1] > self.level[learnt[best] >> 1]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[learnt[1] >> 1]

    # -- search ----------------------------------------------------------

    def _pick(self) -> int:
        heap = self.heap
        value = self.value
        while heap:
            act, v = heapq.heappop(heap)
            if value[2 * v] == 0 and -act == self.activity[v]:
                return v
        for v in range(1, self.n + 1):
            if value[2 * v] == 0:
                return v
        return 0

    def solve(self, max_conflicts: int = 0, deadline: float = 0.0) -> int:
        if not self.ok:
            return UNSAT
        if self._propagate() >= 0:
            return UNSAT
        restarts = 0
        budget = luby(restarts) * _RESTART_UNIT
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl >= 0:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    return UNSAT
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], -1)
                else:
                    idx = len(self.clauses)
                    self.clauses.append(learnt)
                    self.watches[learnt[0]].append(idx)
                    self.watches[learnt[1]].append(idx)
                    self._assign(learnt[0], idx)
                self.var_inc *= _VAR_DECAY
                if max_conflicts and self.conflicts >= max_conflicts:
                    return UNKNOWN
                if deadline and (self.conflicts & 63) == 0 and time.monotonic() > deadline:
                    return UNKNOWN
                continue
            if since_restart >= budget:
                restarts += 1
                budget = luby(restarts) * _RESTART_UNIT
                since_restart = 0
                self._cancel_until(0)
                continue
            v = self._pick()
            if v == 0:
                return SAT
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._assign(2 * v if self.phase[v] else 2 * v + 1, -1)

    def model(self) -> list[int]:
        return [0] + [1 if self.value[2 * v] == 1 else 0 for v in range(1, self.n + 1)]

    def stats(self) -> dict:
        return {
            "conflicts": self.conflicts,
            "decisions": self.decisions,
            "propagations": self.propagations,
            "theory_conflicts": self.theory_conflicts,
        }


def solve(num_vars: int, clauses, edges, num_nodes: int, max_conflicts: int = 0,
          timeout: float = 0.0):
    """Return ``(status, model, stats)``; ``model[v]`` is 0 or 1 for ``v >= 1``."""
    deadline = time.monotonic() + timeout if timeout else 0.0
    s = Solver(num_vars, clauses, edges, num_nodes)
    status = s.solve(max_conflicts, deadline)
    return status, (s.model() if status == SAT else None), s.stats()


def graph_consistent(num_nodes: int, strict_edges, weak_edges) -> bool:
    """Theory check of a fixed edge set, through the same search."""
    edges = []
    clauses = []
    v = 0
    for a, b in strict_edges:
        v += 1
        edges.append((v, a, b))
        clauses.append([v])
    for a, b in weak_edges:
        # ts(a) <= ts(b) is the false polarity of the atom ts(b) < ts(a)
        v += 1
        edges.append((v, b, a))
        clauses.append([-v])
    status, _, _ = solve(v, clauses, edges, num_nodes)
    return status == SAT


def check_masks(masks, num_nodes: int, pairs):
    """Satisfiability of many small graphs given as 2-bit-per-pair masks.

    Bits ``2k`` and ``2k+1`` of a mask describe ``pairs[k] = (a, b)``: 1 is a
    strict edge a -> b, 2 a weak edge a -> b, 0 no edge.
    """
    import numpy as np

    out = np.zeros(len(masks), dtype=np.uint8)
    for i, mask in enumerate(masks):
        mask = int(mask)
        states = [(mask >> (2 * k)) & 3 for k in range(len(pairs))]
        strict = [p for p, s in zip(pairs, states) if s == 1]
        weak = [p for p, s in zip(pairs, states) if s == 2]
        out[i] = graph_consistent(num_nodes, strict, weak)
    return out
