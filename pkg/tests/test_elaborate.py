import shutil

import pytest

from corpus import corpus_path, design, litmus
from modcheck.design import FIXTURES_DIR, DesignError, load_design, load_interface
from modcheck.elaborate import (
    ElaborationError, assign_interface, assign_litmus, build_tree, check_scopes, core_instances,
    mentions_program_order,
)
from modcheck.litmus import parse_litmus


def _tree(name: str):
    d = design(name)
    return build_tree(d.root_def, d.modules)


def test_tree_paths_and_parameters():
    tree = _tree("simpleProc")
    assert [i.path for i in tree.walk()] == [
        "simpleProc", "simpleProc/c0", "simpleProc/c1", "simpleProc/c2", "simpleProc/c3", "simpleProc/mem"]
    assert tree.find("c2").params == {"c": 2}
    assert tree.find("simpleProc/mem").op_type == "transaction"
    assert tree.find("nope") is None


def test_cores_are_ordered_by_their_parameter():
    assert [i.name for i in core_instances(_tree("simpleProcTSO"))] == ["c0", "c1", "c2", "c3"]


def test_litmus_assignment():
    tree = _tree("simpleProc")
    test = litmus(corpus_path("SC", "sb"))
    elab = assign_litmus(tree, test, 3)
    c0 = tree.find("c0").operations
    assert [op.name for op in c0] == ["i1", "i2"] and all(op.is_concrete for op in c0)
    assert tree.find("c2").operations == []
    mem = tree.find("mem").operations
    assert len(mem) == 3 and not any(op.is_concrete for op in mem)
    assert mem[0].kinds == ("R", "W")
    assert mem[0].addresses == ("x", "y") and mem[0].values == (0, 1, 2)
    assert [op.uid for op in elab.operations] == list(range(len(elab.operations)))
    assert elab.event_index(mem[0].uid, "Perf") == 1


def test_fence_kinds_only_where_fences_are_mentioned():
    tree = _tree("simpleProcTSO")
    elab = assign_litmus(tree, litmus(corpus_path("TSO", "sb_mfences")), 2)
    mem = [op for op in elab.operations if op.owner.endswith("mem")]
    assert mem and all(op.kinds == ("R", "W") for op in mem)


def test_too_few_cores():
    tree = _tree("simpleProc")
    text = "test t mcm SC expect permitted\n" + "".join(f"i{c}: {c} W x 1\n" for c in range(5))
    with pytest.raises(ElaborationError, match="core 4"):
        assign_litmus(tree, parse_litmus(text), 2)


def test_interface_assignment():
    d = design("sbCore")
    tree = build_tree(d.root_def, d.modules)
    iface = load_interface("inOrderInt", d)
    elab = assign_interface(tree, ".", iface, 3)
    assert len(elab.operations) == 3 and elab.scope is tree
    assert elab.operations[0].addresses == ("a0", "a1") and elab.operations[0].values == (0, 1, 2)
    assert mentions_program_order(tree, iface)


def test_bound_must_be_positive():
    with pytest.raises(ElaborationError):
        assign_litmus(_tree("simpleProc"), litmus(corpus_path("SC", "sb")), 0)


@pytest.mark.parametrize("name", ["simpleProc", "simpleProcTSO", "cacheProc", "cacheProcAbs", "L1Hier",
                                  "sbCore", "inOrderCore"])
def test_bundled_designs_are_clean(name):
    assert check_scopes(_tree(name)) == []


# Each mutation seeds one scope or typing mistake into a copy of the bundled
# designs: (file, original text, replacement, expected message fragment).
MUTATIONS = [
    ("simpleProc.mdef", 'forall transaction "j" in "mem",\n      exists',
     'forall transaction "j",\n      exists', "needs a domain list"),
    ("simpleProc.mdef", 'exists transaction "j" in "mem"', 'exists transaction "j" in "memory"',
     "not a direct submodule"),
    ("simpleProc.mdef", "SameNode (i, MemResp) (j, Resp)", "SameNode (i, MemResp) (j, Perf)",
     "internal and not visible"),
    ("simpleProc.mdef", "NodeExists (i, MemReq) =>\n      exists", "NodeExists (i, Bogus) =>\n      exists",
     "not declared by inOrderCore"),
    ("simpleProc.mdef", 'exists transaction "j" in "mem"', 'exists microop "j" in "mem"', "type error"),
    ("simpleProc.mdef", "Mapped i j.\n\n    Axiom \"tran_has_instr\"", "Mapped i k.\n\n    Axiom \"tran_has_instr\"",
     "unbound operation variable 'k'"),
    ("simpleProc.mdef", 'forall transaction "j2" in "mem",\n    Mapped i j1 /\\ Mapped i j2',
     'forall transaction "j1" in "mem",\n    Mapped i j1 /\\ Mapped i j1', "bound twice"),
    ("simpleProc.mdef", "Mapped i j => NodeExists (i, MemReq).", "Mapped i j /\\ k = 1 => NodeExists (i, MemReq).",
     "unknown parameter 'k'"),
    ("inOrderCore.uax", 'Axiom "Path":\nforall microop "i",', 'Axiom "Path":\nforall microop "i" in "mem",',
     "may only quantify over 'this'"),
    ("simpleProc.mdef", 'forall microop "i" in "c0;c1;c2;c3",\n    forall transaction "j" in "mem",\n    Mapped i j =>\n',
     'forall microop "i" in "c0;c1;c2;c3;mem",\n    forall transaction "j" in "mem",\n    Mapped i j =>\n',
     "type error"),
    ("simpleProc.mdef", "Mapped i j => NodeExists (i, MemReq).", "Mapped i j => NodeExists (k, MemReq).",
     "unbound operation variable 'k' in node"),
]


@pytest.mark.parametrize("file, old, new, message", MUTATIONS, ids=[f"m{k}" for k in range(len(MUTATIONS))])
def test_seeded_scope_violations_are_reported(tmp_path, file, old, new, message):
    for name in ("simpleProc.mdef", "inOrderCore.mdef", "inOrderCore.uax"):
        shutil.copy(FIXTURES_DIR / name, tmp_path / name)
    text = (tmp_path / file).read_text()
    assert text.count(old) == 1, "mutation anchor must be unique"
    (tmp_path / file).write_text(text.replace(old, new))
    d = load_design(tmp_path / "simpleProc.mdef")
    diags = check_scopes(build_tree(d.root_def, d.modules))
    assert any(message in str(x) for x in diags), [str(x) for x in diags]


def test_duplicate_events_are_rejected_when_loading(tmp_path):
    for name in ("simpleProc.mdef", "inOrderCore.mdef", "inOrderCore.uax"):
        shutil.copy(FIXTURES_DIR / name, tmp_path / name)
    uax = tmp_path / "inOrderCore.uax"
    uax.write_text(uax.read_text().replace('DefineEvent 2 "WB".', 'DefineEvent 2 "WB".\nDefineEvent 5 "IF".'))
    with pytest.raises(DesignError, match="duplicate event 'IF'"):
        load_design(tmp_path / "simpleProc.mdef")


def test_none_typed_modules_cannot_quantify_over_themselves(tmp_path):
    shutil.copy(FIXTURES_DIR / "simpleProc.mdef", tmp_path / "simpleProc.mdef")
    (tmp_path / "simpleProc.uax").write_text('ModuleID "simpleProc".\nAxiom "a":\nforall microop "i", True.\n')
    d = load_design(tmp_path / "simpleProc.mdef")
    diags = check_scopes(build_tree(d.root_def, d.modules))
    assert any("operation type none" in str(x) for x in diags)


def test_interface_axioms_are_checked_against_the_interface(tmp_path):
    (tmp_path / "badInt.mdef").write_text("Interface badInt () {\n  OperationType microop\n  Properties { }\n}\n")
    (tmp_path / "badInt.iface").write_text(
        'ModuleID "badInt".\nDefineEvent External 0 "MemReq".\n'
        'Axiom "x":\nforall microop "i", NodeExists (i, Nope).\n')
    d = load_design("sbCore", include_paths=[tmp_path])
    iface = load_interface("badInt", d)
    tree = build_tree(d.root_def, d.modules)
    diags = check_scopes(tree, iface, tree)
    assert any("'Nope' is not declared" in str(x) for x in diags)
