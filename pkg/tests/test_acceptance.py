"""Acceptance criteria, one test each.

Every test prints a ``criterion N [PASS|FAIL|SKIP]`` line; the run summary
repeats them.  Run alone with ``pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import random
import shutil
import time

import pytest

from corpus import DESIGN_FOR, corpus_path, corpus_paths, design, litmus, native_verdict
from criteria_log import criterion
from modcheck.design import fixture_path, load_pair
from modcheck.dsl import ast as A
from modcheck.elaborate import quantifier_domain
from modcheck.ground import Grounder, evaluate
from modcheck.litmus import Expectation
from modcheck.solver import kernel_module
from modcheck.verify import (
    BUG, OBSERVABLE, PASS, REFINES, UNOBSERVABLE, VACUOUS_PASS, Backend, load_pair_design,
    verify_interface, verify_litmus,
)
from oracles import direct_eval, edge_masks, masks_satisfiable, observable_under, timestamp_masks
from randgen import random_elaboration, random_formula, random_interpretation

Z3 = shutil.which("z3")


def test_criterion_1_store_buffering():
    with criterion(1, "sb at bound 11: SC forbids, TSO permits with a witness") as notes:
        sc = litmus(corpus_path("SC", "sb"))
        tso = litmus(corpus_path("TSO", "sb"))
        start = time.perf_counter()
        v = verify_litmus(design("simpleProc"), sc, 11)
        t_sc = time.perf_counter() - start
        start = time.perf_counter()
        w = verify_litmus(design("simpleProcTSO"), tso, 11)
        t_tso = time.perf_counter() - start
        notes.append(f"simpleProc {v.verdict}/{v.conformance} in {t_sc:.2f}s")
        notes.append(f"simpleProcTSO {w.verdict}/{w.conformance} in {t_tso:.2f}s")
        assert (v.verdict, v.conformance) == (UNOBSERVABLE, PASS)
        assert (w.verdict, w.conformance) == (OBSERVABLE, PASS)
        assert w.witness is not None and w.witness.nodes
        assert t_sc < 30 and t_tso < 30


def test_criterion_2_corpus():
    with criterion(2, "corpus of >=30 oracle-checked tests, no violations, TSO-only outcomes") as notes:
        paths = corpus_paths()
        assert len(paths) >= 30, f"only {len(paths)} tests"
        mismatched = []
        for p in paths:
            t = litmus(str(p))
            if observable_under(t, t.mcm) != (t.expected is Expectation.PERMITTED):
                mismatched.append(f"{p.parent.name}/{p.stem}")
        assert not mismatched, f"expectations disagree with the oracle: {mismatched}"
        violations = []
        for p in paths:
            t = litmus(str(p))
            v = native_verdict(DESIGN_FOR[t.mcm], str(p))
            if v.conformance not in (PASS, VACUOUS_PASS):
                violations.append(f"{p.parent.name}/{p.stem}: {v.conformance}")
        tso_only = []
        for p in corpus_paths("SC"):
            if (native_verdict("simpleProcTSO", corpus_path("TSO", p.stem)).verdict == OBSERVABLE
                    and native_verdict("simpleProc", str(p)).verdict == UNOBSERVABLE):
                tso_only.append(p.stem)
        notes.append(f"{len(paths)} tests, {len(violations)} violation(s), TSO-only: {', '.join(tso_only)}")
        assert not violations, violations
        assert len(tso_only) >= 3


def _pair_bug(pair_name: str, bound: int, drop: tuple[str, ...] = ()):
    pair = load_pair(fixture_path(pair_name))
    des, impl = load_pair_design(pair, drop_axioms=drop)
    start = time.perf_counter()
    v = verify_interface(pair, des, bound, Backend("native"), impl)
    return v, time.perf_counter() - start


def test_criterion_3_bug_finding():
    with criterion(3, "seeded bugs found, clean hierarchy refines") as notes:
        a, ta = _pair_bug("L1Hier_AtomicMemory.pair", 3, ("L1.Single_Value",))
        notes.append(f"no Single_Value @3: {a.result} {ta:.2f}s")
        b, tb = _pair_bug("L1Hier_AtomicMemory.pair", 4, ("L1.No_Dirty_Drop",))
        notes.append(f"no No_Dirty_Drop @4: {b.result} {tb:.2f}s")
        first, tc = None, 0.0
        for bound in range(1, 16):
            c, t = _pair_bug("sbCore_inOrderInt.pair", bound)
            tc += t
            if c.result == BUG:
                first = bound
                break
        notes.append(f"sbCore first Bug @{first} {tc:.2f}s")
        d, td = _pair_bug("L1Hier_AtomicMemory.pair", 4)
        notes.append(f"clean L1Hier @4: {d.result} {td:.2f}s")
        assert a.result == BUG and ta < 60
        assert b.result == BUG and tb < 60
        assert first is not None and first <= 15 and tc < 60
        assert d.result == REFINES and td < 60


def test_criterion_4_graph_enumeration():
    with criterion(4, "every graph on <=5 nodes, <=8 edges: kernel == timestamp brute force") as notes:
        kernel = kernel_module()
        checked, disagree, sat = 0, 0, 0
        pairs = [(a, b) for a in range(5) for b in range(5) if a != b]
        oracle = timestamp_masks(5, pairs, 5)
        for masks in edge_masks(len(pairs), 8):
            mine = kernel.check_masks(masks, 5, pairs).astype(bool)
            ref = masks_satisfiable(masks, oracle)
            disagree += int((mine != ref).sum())
            sat += int(ref.sum())
            checked += len(masks)
        # self-loops, on four nodes
        loops = [(a, b) for a in range(4) for b in range(4)]
        oracle4 = timestamp_masks(4, loops, 5)
        looped = 0
        for masks in edge_masks(len(loops), 8):
            mine = kernel.check_masks(masks, 4, loops).astype(bool)
            disagree += int((mine != masks_satisfiable(masks, oracle4)).sum())
            looped += len(masks)
        notes.append(f"{checked} graphs ({sat} satisfiable) + {looped} with self-loops, "
                     f"{disagree} disagreement(s), kernel {kernel.__name__.rsplit('.', 1)[-1]}")
        assert checked == 45235089
        assert disagree == 0


def test_criterion_5_grounding_vs_direct_evaluation():
    with criterion(5, "1000 random (axiom, domain<=4) pairs: grounding == direct evaluation") as notes:
        rng = random.Random(20240501)
        bad = []
        evaluations = 0
        for k in range(1000):
            elab = random_elaboration(rng, max_ops=4)
            body = random_formula(rng, rng.randint(1, 5), [])
            ax = A.Axiom(f"r{k}", body)
            for fold in (True, False):
                g = Grounder(elab, fold).ground_axiom(ax, elab.tree)
                for _ in range(3):
                    world, env = random_interpretation(rng, elab)
                    by_uid = {d["uid"]: d for ds in world.ops.values() for d in ds}

                    def domain_of(q):
                        return [by_uid[op.uid] for inst in quantifier_domain(q, elab.tree)
                                for op in inst.operations]

                    evaluations += 1
                    if evaluate(g, env) != direct_eval(body, world, {}, domain_of):
                        bad.append(k)
        notes.append(f"{evaluations} evaluations, {len(bad)} disagreement(s)")
        assert not bad, sorted(set(bad))[:10]


def test_criterion_6_native_vs_z3():
    with criterion(6, "native and z3 agree on the corpus") as notes:
        if Z3 is None:
            pytest.skip("z3 not installed")
        z3 = Backend(f"{Z3} -in")
        diff = []
        for p in corpus_paths():
            t = litmus(str(p))
            mine = native_verdict(DESIGN_FOR[t.mcm], str(p))
            theirs = verify_litmus(design(DESIGN_FOR[t.mcm]), t, 11, z3, witness=False)
            if mine.verdict != theirs.verdict:
                diff.append(f"{p.parent.name}/{p.stem}: native {mine.verdict}, z3 {theirs.verdict}")
        notes.append(f"{len(corpus_paths())} queries, {len(diff)} disagreement(s)")
        assert not diff, diff


def test_criterion_7_cache_abstraction():
    with criterion(7, "cacheProc and cacheProcAbs give the same verdicts") as notes:
        diff = []
        times = {"cacheProc": 0.0, "cacheProcAbs": 0.0}
        for p in corpus_paths("SC"):
            verdicts = {}
            for name in times:
                v = native_verdict(name, str(p))
                times[name] += v.millis / 1000
                verdicts[name] = v.verdict
            if len(set(verdicts.values())) != 1:
                diff.append(f"{p.stem}: {verdicts}")
        notes.append(f"{len(corpus_paths('SC'))} tests, {len(diff)} difference(s); "
                     f"cacheProc {times['cacheProc']:.1f}s, cacheProcAbs {times['cacheProcAbs']:.1f}s")
        assert not diff, diff


MONOTONE_TESTS = ("sb", "sb_rfi", "mp_ok", "iriw_ok", "wrc_ok")


def test_criterion_8_bound_monotonicity():
    with criterion(8, "observable at bound b implies observable at b+1 (b in 2..10)") as notes:
        broken = []
        first = {}
        for name in MONOTONE_TESTS:
            path = corpus_path("TSO", name)
            seen = {b: native_verdict("simpleProcTSO", path, b).verdict == OBSERVABLE for b in range(2, 12)}
            first[name] = min((b for b in seen if seen[b]), default=None)
            broken += [f"{name}@{b}" for b in range(2, 11) if seen[b] and not seen[b + 1]]
        notes.append("first observable bound: " + ", ".join(f"{k}={v}" for k, v in first.items()))
        assert all(v is not None for v in first.values())
        assert not broken, broken
