# distutils: language = c++
# cython: language_level = 3
"""Compiled kernel: the C++ search behind the same interface as ``_pykernel``."""

import time

from libc.stdint cimport int8_t, uint8_t, uint64_t
from libcpp cimport bool as cbool
from libcpp.vector cimport vector

import numpy as np

SAT = 1
UNSAT = 0
UNKNOWN = -1


cdef extern from "kernel.hpp" namespace "modcheck":
    cdef cppclass Stats:
        long conflicts
        long decisions
        long propagations
        long theory_conflicts

    cdef cppclass Solver:
        Solver(int num_vars, int num_nodes) except +
        void reset(int num_vars, int num_nodes) except +
        void add_edge(int var, int a, int b)
        cbool add_clause(const vector[int]& dimacs) except +
        int solve(long max_conflicts, double timeout_seconds) except +
        vector[int8_t] model()
        Stats stats

    long luby(long i)


cdef dict _stats(Solver* s):
    return {
        "conflicts": s.stats.conflicts,
        "decisions": s.stats.decisions,
        "propagations": s.stats.propagations,
        "theory_conflicts": s.stats.theory_conflicts,
    }


def solve(int num_vars, clauses, edges, int num_nodes, long max_conflicts=0, double timeout=0.0):
    """Return ``(status, model, stats)``; ``model[v]`` is 0 or 1 for ``v >= 1``."""
    cdef double start = time.monotonic()
    cdef Solver* s = new Solver(num_vars, num_nodes)
    cdef vector[int] buf
    cdef int status
    cdef vector[int8_t] m
    try:
        for var, a, b in edges:
            s.add_edge(var, a, b)
        for c in clauses:
            buf.clear()
            for x in c:
                buf.push_back(x)
            if not s.add_clause(buf):
                break
        remaining = 0.0
        if timeout > 0:
            remaining = max(timeout - (time.monotonic() - start), 1e-6)
        status = s.solve(max_conflicts, remaining)
        model = None
        if status == SAT:
            m = s.model()
            model = [int(m[k]) for k in range(m.size())]
        return status, model, _stats(s)
    finally:
        del s


def graph_consistent(int num_nodes, strict_edges, weak_edges):
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


def check_masks(masks, int num_nodes, pairs):
    """Satisfiability of many small graphs given as 2-bit-per-pair masks.

    Bits ``2k`` and ``2k+1`` of a mask describe ``pairs[k] = (a, b)``: 1 is a
    strict edge a -> b, 2 a weak edge a -> b, 0 no edge.  Strict edges are
    added before weak ones, as in :func:`graph_consistent`.
    """
    cdef uint64_t[::1] arr = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef Py_ssize_t count = arr.shape[0]
    out_np = np.zeros(count, dtype=np.uint8)
    cdef uint8_t[::1] out = out_np
    cdef int num_pairs = len(pairs)
    cdef vector[int] pa, pb
    for a, b in pairs:
        pa.push_back(a)
        pb.push_back(b)
    cdef Solver* s = new Solver(0, num_nodes)
    cdef vector[int] unit
    unit.resize(1)
    cdef Py_ssize_t i
    cdef int k, v, nv, state
    cdef uint64_t mask
    cdef cbool ok
    try:
        for i in range(count):
            mask = arr[i]
            nv = 0
            for k in range(num_pairs):
                if (mask >> (2 * k)) & 3:
                    nv += 1
            s.reset(nv, num_nodes)
            v = 0
            ok = True
            for state in (1, 2):
                for k in range(num_pairs):
                    if ((mask >> (2 * k)) & 3) != <uint64_t>state:
                        continue
                    v += 1
                    if state == 1:
                        s.add_edge(v, pa[k], pb[k])
                        unit[0] = v
                    else:
                        s.add_edge(v, pb[k], pa[k])
                        unit[0] = -v
                    if ok and not s.add_clause(unit):
                        ok = False
            out[i] = 1 if ok and s.solve(0, 0.0) == SAT else 0
    finally:
        del s
    return out_np
