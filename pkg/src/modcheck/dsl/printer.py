"""Pretty printer whose output re-parses to an equal AST."""

from __future__ import annotations

from . import ast as A

# binding strength; higher binds tighter
_PREC = {A.Implies: 1, A.Iff: 1, A.Or: 2, A.And: 3, A.Not: 4}
_ATOMIC = 5


def _prec(f: A.Formula) -> int:
    if isinstance(f, (A.Forall, A.Exists)):
        return 0
    return _PREC.get(type(f), _ATOMIC)


def _node(r: A.NodeRef) -> str:
    return f"({r.var}, {r.event})"


def _edge(src: A.NodeRef, dst: A.NodeRef, label: str) -> str:
    return f"({_node(src)}, {_node(dst)}, \"{label}\")"


def format_formula(f: A.Formula) -> str:
    if isinstance(f, (A.Forall, A.Exists)):
        word = "forall" if isinstance(f, A.Forall) else "exists"
        dom = f' in "{";".join(f.domains)}"' if f.domains else ""
        return f'{word} {f.op_type} "{f.var}"{dom}, {format_formula(f.body)}'
    if isinstance(f, (A.Implies, A.Iff)):
        op = "=>" if isinstance(f, A.Implies) else "<=>"
        # right associative: the left operand needs parens at equal precedence
        left = _wrap(f.left, 2)
        right = format_formula(f.right) if _prec(f.right) in (0, 1) else _wrap(f.right, 1)
        return f"{left} {op} {right}"
    if isinstance(f, A.Or):
        return f"{_wrap(f.left, 2)} \\/ {_wrap(f.right, 3)}"
    if isinstance(f, A.And):
        return f"{_wrap(f.left, 3)} /\\ {_wrap(f.right, 4)}"
    if isinstance(f, A.Not):
        return f"~{_wrap(f.body, 4)}"
    if isinstance(f, A.PredicateApp):
        parts = [f.name]
        if f.flavor is not None:
            parts.append(f'"{f.flavor}"')
        parts.extend(f.args)
        return " ".join(parts)
    if isinstance(f, A.AddEdge):
        return "AddEdge " + _edge(f.src, f.dst, f.label)
    if isinstance(f, A.EdgeExists):
        return "EdgeExists " + _edge(f.src, f.dst, f.label)
    if isinstance(f, A.NodeExists):
        return "NodeExists " + _node(f.node)
    if isinstance(f, A.SameNode):
        return f"SameNode {_node(f.a)} {_node(f.b)}"
    if isinstance(f, A.ParamEq):
        return f"{f.name} = {f.value}"
    if isinstance(f, A.Const):
        return "True" if f.value else "False"
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f: A.Formula, min_prec: int) -> str:
    text = format_formula(f)
    if _prec(f) < min_prec:
        return f"({text})"
    return text


def format_axiom(ax: A.Axiom) -> str:
    return f'Axiom "{ax.name}":\n{format_formula(ax.body)}.'


def format_axiom_file(af: A.AxiomFile) -> str:
    lines = [f'ModuleID "{af.module_type}".', ""]
    for ev in af.events:
        ext = "External " if ev.external else ""
        lines.append(f'DefineEvent {ext}{ev.index} "{ev.name}".')
    for ax in af.axioms:
        lines.append("")
        lines.append(format_axiom(ax))
    return "\n".join(lines) + "\n"


def format_module_definition(m: A.ModuleDef) -> str:
    word = "Interface" if m.is_interface else "Module"
    out = [f"{word} {m.name} ({', '.join(m.params)}) {{", f"  OperationType {m.operation_type}"]
    props = " ".join(f"{k} {v}" for k, v in m.properties.items())
    out.append(f"  Properties {{ {props} }}" if props else "  Properties { }")
    if not m.is_interface:
        out.append("  Submodules {")
        for s in m.submodules:
            binds = ", ".join(f"{k} : {v}" for k, v in s.params)
            out.append(f"    {s.module_type} {s.name} ({binds})")
        out.append("  }")
        out.append("  ConnectionAxioms {")
        for ax in m.connection_axioms:
            out.extend("    " + line for line in format_axiom(ax).splitlines())
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"
