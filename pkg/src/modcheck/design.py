"""Loading a design bundle from disk.

A design is one root ``.mdef`` file.  Every module type it mentions is looked
up by file name, ``<Type>.mdef`` plus ``<Type>.uax`` (implementation axioms)
or ``<Type>.iface`` (interface axioms), first next to the root file, then in
the include paths, then in the fixtures bundled with the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .dsl import parse_axiom_file, parse_module_definition, parse_pair_file
from .dsl.ast import DslError, ModuleDef, PairSpec

FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"


class DesignError(Exception):
    pass


@dataclass
class Design:
    root: str
    modules: dict[str, ModuleDef]
    search_path: list[Path] = field(default_factory=list)
    dropped: tuple[str, ...] = ()

    @property
    def root_def(self) -> ModuleDef:
        return self.modules[self.root]


def fixture_path(name: str) -> Path:
    return FIXTURES_DIR / name


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DesignError(f"cannot read {path}: {exc.strerror or exc}") from None


def _find(name: str, search: Sequence[Path]) -> Optional[Path]:
    for d in search:
        p = d / name
        if p.is_file():
            return p
    return None


def load_module(type_name: str, search: Sequence[Path], mdef_path: Optional[Path] = None) -> ModuleDef:
    """Load one module type: its definition plus its axiom file, if any."""
    mdef_path = mdef_path or _find(f"{type_name}.mdef", search)
    if mdef_path is None:
        raise DesignError(f"unknown module type {type_name!r}: no {type_name}.mdef on the search path")
    mdef = parse_module_definition(_read(mdef_path), str(mdef_path))
    if mdef.name != type_name:
        raise DesignError(f"{mdef_path} defines {mdef.name!r}, expected {type_name!r}")
    ext = ".iface" if mdef.is_interface else ".uax"
    other = ".uax" if mdef.is_interface else ".iface"
    ax_path = _find(f"{type_name}{ext}", search)
    if ax_path is None and _find(f"{type_name}{other}", search) is not None:
        kind = "interface" if mdef.is_interface else "module"
        raise DesignError(f"{type_name} is declared as an {kind} but only a {other} file exists")
    if ax_path is not None:
        af = parse_axiom_file(_read(ax_path), str(ax_path))
        if af.module_type != type_name:
            raise DesignError(f"{ax_path} declares ModuleID {af.module_type!r}, expected {type_name!r}")
        mdef.events = list(af.events)
        mdef.implementation_axioms = list(af.axioms)
    return mdef


def build_search_path(root_file: Optional[Path], include_paths: Iterable) -> list[Path]:
    search: list[Path] = []
    if root_file is not None:
        search.append(Path(root_file).resolve().parent)
    search.extend(Path(p) for p in include_paths)
    search.append(FIXTURES_DIR)
    return search


def _resolve_root(root) -> Path:
    p = Path(root)
    if p.suffix == "" and not p.exists():
        p = p.with_suffix(".mdef")
    if not p.is_file():
        bundled = FIXTURES_DIR / p.name
        if bundled.is_file():
            return bundled
        raise DesignError(f"design file not found: {root}")
    return p


def load_design(root, include_paths: Iterable = (), drop_axioms: Iterable[str] = ()) -> Design:
    """Load a root module definition and every module type reachable from it.

    ``root`` is a path to a ``.mdef`` file, or the bare name of a bundled
    fixture such as ``simpleProc``.  ``drop_axioms`` holds ``Type.Axiom``
    names to remove, which is how seeded bugs are produced.
    """
    root_path = _resolve_root(root)
    search = build_search_path(root_path, include_paths)
    try:
        root_def = parse_module_definition(_read(root_path), str(root_path))
        modules = {root_def.name: load_module(root_def.name, search, root_path)}
        pending = [root_def.name]
        while pending:
            cur = modules[pending.pop()]
            for sub in cur.submodules:
                if sub.module_type not in modules:
                    modules[sub.module_type] = load_module(sub.module_type, search)
                    pending.append(sub.module_type)
    except DslError as exc:
        raise DesignError(str(exc)) from None
    design = Design(root_def.name, modules, search)
    drop_axioms = tuple(drop_axioms)
    for spec in drop_axioms:
        drop_axiom(design, spec)
    design.dropped = drop_axioms
    return design


def drop_axiom(design: Design, spec: str) -> None:
    if "." not in spec:
        raise DesignError(f"--drop-axiom expects Type.AxiomName, got {spec!r}")
    type_name, axiom = spec.split(".", 1)
    mdef = design.modules.get(type_name)
    if mdef is None:
        raise DesignError(f"cannot drop {spec!r}: module type {type_name!r} is not in the design")
    for lst in (mdef.implementation_axioms, mdef.connection_axioms):
        for i, ax in enumerate(lst):
            if ax.name == axiom:
                del lst[i]
                return
    raise DesignError(f"cannot drop {spec!r}: {type_name} has no axiom named {axiom!r}")


def load_interface(name: str, design: Design) -> ModuleDef:
    try:
        mdef = load_module(name, design.search_path)
    except DslError as exc:
        raise DesignError(str(exc)) from None
    if not mdef.is_interface:
        raise DesignError(f"{name!r} is a module, not an interface")
    return mdef


def load_pair(path) -> PairSpec:
    p = Path(path)
    if not p.is_file():
        bundled = FIXTURES_DIR / p.name
        if not bundled.is_file():
            raise DesignError(f"pair file not found: {path}")
        p = bundled
    try:
        return parse_pair_file(_read(p), str(p))
    except DslError as exc:
        raise DesignError(str(exc)) from None
