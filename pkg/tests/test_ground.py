import random

import pytest
from hypothesis import given, settings, strategies as st

from corpus import DESIGN_FOR, corpus_path, design, litmus, native_verdict
from modcheck.dsl import ast as A
from modcheck.elaborate import assign_litmus, build_tree, quantifier_domain
from modcheck.ground import (
    FALSE, TRUE, And, Assignment, Exists, Grounder, NonNull, Not, Or, SameNodeT, Strict, build_litmus_query,
    conj, disj, dump, edge, evaluate, iter_atoms, lex_geq, lower_same_node, neg, normalize, size,
)
from modcheck.solver import attribute_domains, solve_native
from oracles import direct_eval
from randgen import random_elaboration, random_formula, random_interpretation

A0, A1, B0 = (0, "A"), (1, "A"), (0, "B")


def test_folding():
    assert conj([]) is TRUE and disj([]) is FALSE
    assert conj([TRUE, Exists(A0)]) == Exists(A0)
    assert conj([FALSE, Exists(A0)]) is FALSE
    assert disj([TRUE, Exists(A0)]) is TRUE
    assert neg(neg(Exists(A0))) == Exists(A0)
    assert isinstance(conj([Exists(A0), Exists(A1)], fold=False), And)


def test_self_edge_is_false_and_edges_require_existence():
    assert edge(A0, A0) is FALSE
    e = edge(A0, A1, "po")
    assert isinstance(e, And) and set(e.args) == {Exists(A0), Exists(A1), Strict(A0, A1, "po")}


def test_structural_equality_and_hashing():
    assert Strict(A0, A1, "x") == Strict(A0, A1, "y")  # labels do not change meaning
    assert len({Exists(A0), Exists(A0), NonNull(3), NonNull(3)}) == 2
    assert SameNodeT(A0, A1) == SameNodeT(A0, A1)


def test_evaluation_of_atoms():
    env = Assignment(exists={A0: True, A1: True}, ts={A0: 1, A1: 1})
    assert not evaluate(Strict(A0, A1), env)
    assert evaluate(SameNodeT(A0, A1), env)
    env.ts[A1] = 2
    assert evaluate(Strict(A0, A1), env) and not evaluate(SameNodeT(A0, A1), env)


def test_lex_geq_matches_tuple_order():
    xs = [NonNull(k) for k in range(3)]
    ys = [NonNull(k) for k in range(3, 6)]
    for bits in range(64):
        env = Assignment(nonnull={k: bool(bits >> k & 1) for k in range(6)})
        left = tuple(env.nonnull[k] for k in range(3))
        right = tuple(env.nonnull[k] for k in range(3, 6))
        assert evaluate(lex_geq(xs, ys), env) == (left >= right)


def _assert_nnf(f):
    stack = [f]
    while stack:
        x = stack.pop()
        if isinstance(x, Not):
            assert not isinstance(x.arg, (And, Or, Not))
        elif isinstance(x, (And, Or)):
            stack.extend(x.args)


def _random_ground(rng: random.Random):
    elab = random_elaboration(rng)
    f = random_formula(rng, rng.randint(1, 5), [])
    return elab, f, Grounder(elab).ground_axiom(A.Axiom("r", f), elab.tree)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_nnf_and_lowering_preserve_truth(seed):
    rng = random.Random(seed)
    elab, _, g = _random_ground(rng)
    nnf = normalize(g)
    low = normalize(lower_same_node(g))
    _assert_nnf(nnf)
    _assert_nnf(low)
    assert not any(isinstance(a, SameNodeT) for a in iter_atoms(low))
    for _ in range(4):
        _, env = random_interpretation(rng, elab)
        assert evaluate(g, env) == evaluate(nnf, env) == evaluate(low, env)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_grounding_agrees_with_direct_evaluation(seed):
    rng = random.Random(seed)
    elab, f, g = _random_ground(rng)
    world, env = random_interpretation(rng, elab)
    by_uid = {d["uid"]: d for ds in world.ops.values() for d in ds}

    def domain_of(q):
        return [by_uid[op.uid] for inst in quantifier_domain(q, elab.tree) for op in inst.operations]

    assert evaluate(g, env) == direct_eval(f, world, {}, domain_of)


def test_nnf_has_negation_only_on_atoms():
    f = neg(conj([Exists(A0), disj([Strict(A0, A1), neg(Exists(B0))])]))
    n = normalize(f)
    _assert_nnf(n)
    env = Assignment(exists={A0: True, B0: True}, ts={A0: 0, A1: 1})
    assert evaluate(n, env) == evaluate(f, env)


def _query(name, mcm="SC", bound=2, symmetry=True):
    d = design(DESIGN_FOR[mcm])
    elab = assign_litmus(build_tree(d.root_def, d.modules), litmus(corpus_path(mcm, name)), bound)
    return build_litmus_query(elab, symmetry=symmetry)


def test_query_parts_are_labelled():
    q = _query("sb")
    labels = {name.split(":")[-1] for name, _ in q.parts}
    assert {"PO_Fetch", "Read_From_Write", "instr_has_tran", "null_no_nodes", "nonnull_prefix",
            "write_nonzero"} <= labels
    assert size(q.lowered()) > 0


def test_dump_is_deterministic():
    assert dump(_query("mp").formula) == dump(_query("mp").formula)


def test_unfolded_grounding_is_equivalent_on_models():
    folded = _query("sb", "TSO", 4)
    d = design("simpleProcTSO")
    elab = assign_litmus(build_tree(d.root_def, d.modules), litmus(corpus_path("TSO", "sb")), 4)
    plain = build_litmus_query(elab, fold=False)
    res = solve_native(folded.lowered(), attribute_domains(folded.elab))
    assert res.is_sat
    assert evaluate(plain.lowered(), res.model)


@pytest.mark.parametrize("name", ["sb", "mp", "iriw_ok", "sb_rfi", "corr", "n5"])
@pytest.mark.parametrize("mcm", ["SC", "TSO"])
def test_symmetry_breaking_keeps_verdicts(mcm, name):
    path = corpus_path(mcm, name)
    on = native_verdict(DESIGN_FOR[mcm], path, 6, True)
    off = native_verdict(DESIGN_FOR[mcm], path, 6, False)
    assert on.verdict == off.verdict
