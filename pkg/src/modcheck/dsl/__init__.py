from .ast import (
    AxiomFile,
    Axiom,
    DslError,
    EventDecl,
    ModuleDef,
    NodeRef,
    PairSpec,
    SubmoduleDecl,
)
from .parser import (
    parse_axiom_file,
    parse_formula,
    parse_module_definition,
    parse_pair_file,
)
from .printer import (
    format_axiom,
    format_axiom_file,
    format_formula,
    format_module_definition,
)

__all__ = [
    "Axiom",
    "AxiomFile",
    "DslError",
    "EventDecl",
    "ModuleDef",
    "NodeRef",
    "PairSpec",
    "SubmoduleDecl",
    "format_axiom",
    "format_axiom_file",
    "format_formula",
    "format_module_definition",
    "parse_axiom_file",
    "parse_formula",
    "parse_module_definition",
    "parse_pair_file",
]
