"""Litmus test files.

Format::

    test sb mcm SC expect forbidden
    i1: 0 W x 1
    i2: 0 R y 0
    i3: 1 W y 1
    i4: 1 R x 0

Each instruction line is ``<id>: <core> <R|W|F.flavor> [<addr> <val>]``.  For a
read the value is the one the proposed outcome requires it to return; every
address initially holds 0.  ``%`` starts a comment.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

MCMS = ("SC", "TSO", "RVWMO")

# RISC-V predecessor.successor fence sets, fence.tso and the x86 mfence
FENCE_FLAVORS = (
    "r.r", "r.w", "r.rw", "w.r", "w.w", "w.rw", "rw.r", "rw.w", "rw.rw", "tso", "mfence",
)


class LitmusError(ValueError):
    pass


class Kind(enum.Enum):
    READ = "R"
    WRITE = "W"
    FENCE = "F"


class Expectation(enum.Enum):
    FORBIDDEN = "forbidden"
    PERMITTED = "permitted"


@dataclass(frozen=True)
class LitmusInstruction:
    id: str
    core: int
    po_index: int
    kind: Kind
    address: Optional[str] = None
    data: Optional[int] = None
    fence: Optional[str] = None

    @property
    def is_read(self) -> bool:
        return self.kind is Kind.READ

    @property
    def is_write(self) -> bool:
        return self.kind is Kind.WRITE

    @property
    def is_fence(self) -> bool:
        return self.kind is Kind.FENCE


@dataclass(frozen=True)
class LitmusTest:
    name: str
    mcm: str
    expected: Expectation
    instructions: tuple[LitmusInstruction, ...]

    @property
    def cores(self) -> list[int]:
        return sorted({i.core for i in self.instructions})

    def core_instructions(self, core: int) -> list[LitmusInstruction]:
        return sorted((i for i in self.instructions if i.core == core), key=lambda i: i.po_index)

    @property
    def addresses(self) -> list[str]:
        return sorted({i.address for i in self.instructions if i.address is not None})

    @property
    def values(self) -> list[int]:
        return sorted({i.data for i in self.instructions if i.data is not None})


@dataclass(frozen=True)
class ReadFact:
    from_initial: bool
    data: int


def parse_litmus(text: str, source: str = "") -> LitmusTest:
    header = None
    raw: list[tuple[int, str, int, str]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("%", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}" if source else f"line {lineno}"
        if header is None:
            header = _parse_header(line, where)
            continue
        if ":" not in line:
            raise LitmusError(f"{where}: expected '<id>: <core> <op> ...'")
        ident, rest = line.split(":", 1)
        ident = ident.strip()
        if not ident.isidentifier():
            raise LitmusError(f"{where}: bad instruction id {ident!r}")
        fields = rest.split()
        if len(fields) < 2:
            raise LitmusError(f"{where}: missing core or operation")
        try:
            core = int(fields[0])
        except ValueError:
            raise LitmusError(f"{where}: core must be an integer, not {fields[0]!r}") from None
        if core < 0:
            raise LitmusError(f"{where}: negative core index")
        raw.append((lineno, ident, core, " ".join(fields[1:])))
    if header is None:
        raise LitmusError(f"{source or 'input'}: empty litmus test")
    name, mcm, expected = header

    counts: dict[int, int] = {}
    seen_ids: set[str] = set()
    instrs = []
    for lineno, ident, core, op in raw:
        where = f"{source}:{lineno}" if source else f"line {lineno}"
        if ident in seen_ids:
            raise LitmusError(f"{where}: duplicate instruction id {ident!r}")
        seen_ids.add(ident)
        po = counts.get(core, 0)
        counts[core] = po + 1
        instrs.append(_parse_op(ident, core, po, op, where))

    writes = {(i.address, i.data) for i in instrs if i.is_write}
    for i in instrs:
        if i.is_read and i.data != 0 and (i.address, i.data) not in writes:
            raise LitmusError(
                f"{source or name}: read {i.id} expects {i.address}={i.data} but no write produces it")
    return LitmusTest(name, mcm, expected, tuple(instrs))


def _parse_header(line: str, where: str) -> tuple[str, str, Expectation]:
    words = line.split()
    if len(words) != 6 or words[0] != "test" or words[2] != "mcm" or words[4] != "expect":
        raise LitmusError(f"{where}: header must be 'test <name> mcm <SC|TSO|RVWMO> expect <forbidden|permitted>'")
    mcm = words[3].upper()
    if mcm not in MCMS:
        raise LitmusError(f"{where}: unknown memory model {words[3]!r}")
    try:
        expected = Expectation(words[5].lower())
    except ValueError:
        raise LitmusError(f"{where}: expectation must be forbidden or permitted") from None
    return words[1], mcm, expected


def _parse_op(ident: str, core: int, po: int, op: str, where: str) -> LitmusInstruction:
    fields = op.split()
    head = fields[0]
    if head.startswith("F"):
        flavor = head[2:] if head.startswith("F.") else "mfence"
        if head not in ("F",) and not head.startswith("F."):
            raise LitmusError(f"{where}: bad fence {head!r}")
        if flavor not in FENCE_FLAVORS:
            raise LitmusError(f"{where}: unknown fence flavor {flavor!r}")
        if len(fields) != 1:
            raise LitmusError(f"{where}: fences take no operands")
        return LitmusInstruction(ident, core, po, Kind.FENCE, fence=flavor)
    if head not in ("R", "W"):
        raise LitmusError(f"{where}: operation must be R, W or F.<flavor>, not {head!r}")
    if len(fields) != 3:
        raise LitmusError(f"{where}: {head} needs an address and a value")
    addr = fields[1]
    if not addr.isidentifier():
        raise LitmusError(f"{where}: bad address {addr!r}")
    try:
        data = int(fields[2])
    except ValueError:
        raise LitmusError(f"{where}: value must be an integer, not {fields[2]!r}") from None
    if data < 0:
        raise LitmusError(f"{where}: negative value")
    return LitmusInstruction(ident, core, po, Kind(head), addr, data)


def format_litmus(test: LitmusTest) -> str:
    lines = [f"test {test.name} mcm {test.mcm} expect {test.expected.value}"]
    for i in test.instructions:
        if i.is_fence:
            lines.append(f"{i.id}: {i.core} F.{i.fence}")
        else:
            lines.append(f"{i.id}: {i.core} {i.kind.value} {i.address} {i.data}")
    return "\n".join(lines) + "\n"


def load_litmus(path) -> LitmusTest:
    path = Path(path)
    return parse_litmus(path.read_text(encoding="utf-8"), str(path))


def derived_read_facts(test: LitmusTest) -> dict[str, ReadFact]:
    # a read of 0 counts as reading the initial state, even if some write stores 0
    return {
        i.id: ReadFact(from_initial=i.data == 0, data=i.data)
        for i in test.instructions if i.is_read
    }
