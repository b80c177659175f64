"""Compare the compiled search kernel with the pure-Python fallback.

Two workloads: complete solves of encoded litmus queries, and the batch
graph-consistency check over every graph of up to K edges on four nodes.

    python3 benchmarks/bench_kernel.py [--repeat N] [--max-edges K]
"""

from __future__ import annotations

import argparse
import itertools
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from modcheck.design import load_design
from modcheck.elaborate import assign_litmus, build_tree
from modcheck.ground import build_litmus_query
from modcheck.litmus import load_litmus
from modcheck.solver import attribute_domains, compiled_available, kernel_module
from modcheck.solver.cnf import encode

LITMUS = Path(__file__).resolve().parent.parent / "tests" / "litmus"
QUERIES = [("SC", "simpleProc", "sb", 11), ("TSO", "simpleProcTSO", "sb", 11),
           ("SC", "simpleProc", "iriw", 11), ("TSO", "simpleProcTSO", "mp", 11),
           ("TSO", "simpleProcTSO", "wrc_ok", 8)]


def _encoded(mcm: str, root: str, name: str, bound: int):
    design = load_design(root)
    test = load_litmus(LITMUS / mcm / f"{name}.test")
    elab = assign_litmus(build_tree(design.root_def, design.modules), test, bound)
    enc = encode(build_litmus_query(elab).lowered(), attribute_domains(elab))
    return enc.num_vars, enc.clauses, enc.edges, len(enc.nodes)


def _time(fn, repeat: int) -> float:
    samples = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def _all_masks(num_pairs: int, max_edges: int) -> np.ndarray:
    out = []
    for k in range(max_edges + 1):
        for combo in itertools.combinations(range(num_pairs), k):
            for kinds in itertools.product((1, 2), repeat=k):
                m = 0
                for p, kind in zip(combo, kinds):
                    m |= kind << (2 * p)
                out.append(m)
    return np.array(out, dtype=np.uint64)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-edges", type=int, default=4)
    args = ap.parse_args(argv)
    if not compiled_available():
        print("compiled kernel not built; run: python3 setup.py build_ext --inplace", file=sys.stderr)
        return 1
    py, cc = kernel_module("python"), kernel_module("compiled")

    print(f"{'workload':<28} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for mcm, root, name, bound in QUERIES:
        problem = _encoded(mcm, root, name, bound)
        assert py.solve(*problem) == cc.solve(*problem)
        tp = _time(lambda: py.solve(*problem), args.repeat)
        tc = _time(lambda: cc.solve(*problem), args.repeat)
        print(f"{f'{name} {mcm} bound {bound}':<28} {tp:>10.3f} {tc:>11.4f} {tp / tc:>7.0f}x")

    pairs = [(a, b) for a in range(4) for b in range(4) if a != b]
    masks = _all_masks(len(pairs), args.max_edges)
    assert (py.check_masks(masks, 4, pairs) == cc.check_masks(masks, 4, pairs)).all()
    tp = _time(lambda: py.check_masks(masks, 4, pairs), args.repeat)
    tc = _time(lambda: cc.check_masks(masks, 4, pairs), args.repeat)
    label = f"{len(masks)} graphs, 4 nodes"
    print(f"{label:<28} {tp:>10.3f} {tc:>11.4f} {tp / tc:>7.0f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
