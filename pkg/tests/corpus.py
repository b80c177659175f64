"""The litmus corpus and cached native verdicts shared by several test files."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from modcheck.design import load_design
from modcheck.litmus import LitmusTest, load_litmus
from modcheck.verify import Backend, LitmusVerdict, verify_litmus

LITMUS = Path(__file__).resolve().parent / "litmus"
DESIGN_FOR = {"SC": "simpleProc", "TSO": "simpleProcTSO"}


def corpus_paths(mcm: str | None = None) -> list[Path]:
    dirs = [mcm] if mcm else sorted(DESIGN_FOR)
    return [p for d in dirs for p in sorted((LITMUS / d).glob("*.test"))]


def corpus_path(mcm: str, name: str) -> str:
    return str(LITMUS / mcm / f"{name}.test")


@lru_cache(maxsize=None)
def litmus(path: str) -> LitmusTest:
    return load_litmus(path)


@lru_cache(maxsize=None)
def design(name: str, drop: tuple[str, ...] = ()):
    return load_design(name, drop_axioms=drop)


@lru_cache(maxsize=None)
def native_verdict(design_name: str, path: str, bound: int = 11, symmetry: bool = True) -> LitmusVerdict:
    backend = Backend("native", symmetry=symmetry)
    return verify_litmus(design(design_name), litmus(path), bound, backend, witness=False)
