"""Gate schedules: ordered local protocol steps and their text format.

One step per line::

    PREPARE ancilla=qudit
    MOVE link=(1,0,2)
    ENTANGLE link=(1,0,2) orient=-1
    DEGAUGE link=(0,0,1) orient=+1 adjoint
    SWAP vertex=(2,1)
    ROTATE vertex=(0,0) axis=y
    READOUT trU
    READOUT ndiff vertex=(0,0)
    EXCITE trU
    EXCITE hop vertex=(0,0)

Any step may carry ``anc=<k>`` to address ancilla ``k`` (default 0).
Header lines start with ``#`` and hold ``key=value`` pairs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from ..lattice import LatticeGeometry, Link, Vertex


@dataclass(frozen=True)
class PrepareAncilla:
    kind: str  # "qudit" or "chi"
    anc: int = 0


@dataclass(frozen=True)
class MoveAncilla:
    site: Union[Vertex, Link]
    anc: int = 0

    @property
    def is_link(self) -> bool:
        return len(self.site) == 3


@dataclass(frozen=True)
class EntangleW:
    link: Link
    orient: int
    adjoint: bool = False
    anc: int = 0


@dataclass(frozen=True)
class SwapFermions:
    vertex: Vertex
    adjoint: bool = False
    anc: int = 0


@dataclass(frozen=True)
class DeGauge:
    link: Link
    orient: int
    adjoint: bool = False
    anc: int = 0


@dataclass(frozen=True)
class Rotate:
    vertex: Vertex
    axis: str  # "y" for M, "x" for M'
    anc: int = 0


@dataclass(frozen=True)
class ReadoutTrU:
    anc: int = 0


@dataclass(frozen=True)
class ReadoutNumberDiff:
    vertex: Vertex
    anc: int = 0


@dataclass(frozen=True)
class LocalExcite:
    op: str  # "trU" or "hop"
    vertex: Vertex | None = None
    anc: int = 0


Step = Union[
    PrepareAncilla, MoveAncilla, EntangleW, SwapFermions, DeGauge, Rotate, ReadoutTrU, ReadoutNumberDiff, LocalExcite
]

GATE_TYPES = (EntangleW, SwapFermions, DeGauge, Rotate)


@dataclass
class GateSchedule:
    steps: list[Step] = field(default_factory=list)
    header: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def append(self, step: Step) -> None:
        self.steps.append(step)

    def count(self, kind: type) -> int:
        return sum(isinstance(s, kind) for s in self.steps)

    @property
    def gate_count(self) -> int:
        """Number of interaction steps (moves, prepares and readouts excluded)."""
        return sum(isinstance(s, GATE_TYPES + (LocalExcite,)) for s in self.steps)

    def kinds(self) -> list[str]:
        return [type(s).__name__ for s in self.steps]

    def to_text(self) -> str:
        lines = [f"# {k}={v}" for k, v in self.header.items()]
        lines += [format_step(s) for s in self.steps]
        return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ text format


def _tup(t) -> str:
    return "(" + ",".join(str(int(c)) for c in t) + ")"


def format_step(step: Step) -> str:
    anc = f" anc={step.anc}" if step.anc else ""
    adj = " adjoint" if getattr(step, "adjoint", False) else ""
    if isinstance(step, PrepareAncilla):
        return f"PREPARE ancilla={step.kind}{anc}"
    if isinstance(step, MoveAncilla):
        key = "link" if step.is_link else "vertex"
        return f"MOVE {key}={_tup(step.site)}{anc}"
    if isinstance(step, EntangleW):
        return f"ENTANGLE link={_tup(step.link)} orient={step.orient:+d}{adj}{anc}"
    if isinstance(step, DeGauge):
        return f"DEGAUGE link={_tup(step.link)} orient={step.orient:+d}{adj}{anc}"
    if isinstance(step, SwapFermions):
        return f"SWAP vertex={_tup(step.vertex)}{adj}{anc}"
    if isinstance(step, Rotate):
        return f"ROTATE vertex={_tup(step.vertex)} axis={step.axis}{anc}"
    if isinstance(step, ReadoutTrU):
        return f"READOUT trU{anc}"
    if isinstance(step, ReadoutNumberDiff):
        return f"READOUT ndiff vertex={_tup(step.vertex)}{anc}"
    if isinstance(step, LocalExcite):
        where = f" vertex={_tup(step.vertex)}" if step.vertex is not None else ""
        return f"EXCITE {step.op}{where}{anc}"
    raise TypeError(f"unknown step {step!r}")


_TOKEN_RE = re.compile(r"(\w+)=(\([^)]*\)|\S+)|(\S+)")


class ScheduleParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {msg}")


def _parse_tuple(text: str, n: int) -> tuple[int, ...]:
    if not (text.startswith("(") and text.endswith(")")):
        raise ValueError(f"expected a tuple, got {text!r}")
    parts = [int(p) for p in text[1:-1].split(",")]
    if len(parts) != n:
        raise ValueError(f"expected {n} integers in {text!r}")
    return tuple(parts)


def parse_step(line: str) -> Step:
    tokens = _TOKEN_RE.findall(line.strip())
    if not tokens:
        raise ValueError("empty step")
    verb = tokens[0][2]
    kw: dict[str, str] = {}
    flags: list[str] = []
    for key, val, bare in tokens[1:]:
        if key:
            kw[key] = val
        else:
            flags.append(bare)
    anc = int(kw.pop("anc", 0))
    adjoint = "adjoint" in flags
    if verb == "PREPARE":
        return PrepareAncilla(kw["ancilla"], anc)
    if verb == "MOVE":
        if "link" in kw:
            return MoveAncilla(_parse_tuple(kw["link"], 3), anc)
        return MoveAncilla(_parse_tuple(kw["vertex"], 2), anc)
    if verb == "ENTANGLE":
        return EntangleW(_parse_tuple(kw["link"], 3), int(kw["orient"]), adjoint, anc)
    if verb == "DEGAUGE":
        return DeGauge(_parse_tuple(kw["link"], 3), int(kw["orient"]), adjoint, anc)
    if verb == "SWAP":
        return SwapFermions(_parse_tuple(kw["vertex"], 2), adjoint, anc)
    if verb == "ROTATE":
        return Rotate(_parse_tuple(kw["vertex"], 2), kw["axis"], anc)
    if verb == "READOUT":
        if flags and flags[0] == "trU":
            return ReadoutTrU(anc)
        if flags and flags[0] == "ndiff":
            return ReadoutNumberDiff(_parse_tuple(kw["vertex"], 2), anc)
        raise ValueError(f"unknown readout {flags!r}")
    if verb == "EXCITE":
        vertex = _parse_tuple(kw["vertex"], 2) if "vertex" in kw else None
        return LocalExcite(flags[0], vertex, anc)
    raise ValueError(f"unknown step verb {verb!r}")


def parse_schedule(text: str) -> GateSchedule:
    sched = GateSchedule()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                sched.header[k.strip()] = v.strip()
            continue
        try:
            sched.append(parse_step(line))
        except (KeyError, ValueError, IndexError) as exc:
            raise ScheduleParseError(lineno, f"{exc} in {line!r}") from None
    return sched


# ------------------------------------------------------------------ structure checks


def touched(step: Step) -> set[tuple]:
    """Physical and ancilla subsystems a step acts on."""
    a = ("ancilla", step.anc)
    if isinstance(step, (EntangleW, DeGauge)):
        return {("link", tuple(step.link)), a}
    if isinstance(step, (SwapFermions, Rotate, ReadoutNumberDiff)):
        return {("vertex", tuple(step.vertex)), a}
    if isinstance(step, LocalExcite) and step.vertex is not None:
        return {("vertex", tuple(step.vertex)), a}
    return {a}


def check_locality(schedule: GateSchedule) -> None:
    """Every step touches at most one link or one vertex plus one ancilla."""
    for k, step in enumerate(schedule.steps):
        subs = touched(step)
        phys = [s for s in subs if s[0] in ("link", "vertex")]
        ancs = [s for s in subs if s[0] == "ancilla"]
        if len(phys) > 1 or len(ancs) != 1:
            raise AssertionError(f"step {k} ({format_step(step)}) is not two-body local")


def _adjacent(geo: LatticeGeometry, a, b) -> bool:
    if a == b:
        return True
    ends = lambda s: set(geo.link_ends(s)) if len(s) == 3 else {tuple(s)}
    return bool(ends(tuple(a)) & ends(tuple(b)))


def check_walk(schedule: GateSchedule, geometry: LatticeGeometry) -> None:
    """Consecutive MOVE sites of each ancilla must touch, and every
    interaction must happen where that ancilla currently sits."""
    where: dict[int, object] = {}
    for k, step in enumerate(schedule.steps):
        if isinstance(step, MoveAncilla):
            prev = where.get(step.anc)
            if prev is not None and not _adjacent(geometry, prev, step.site):
                raise AssertionError(f"step {k}: ancilla jumps from {prev} to {step.site}")
            where[step.anc] = tuple(step.site)
            continue
        site = getattr(step, "link", None) or getattr(step, "vertex", None)
        if site is not None and isinstance(step, GATE_TYPES + (ReadoutNumberDiff, LocalExcite)):
            if where.get(step.anc) != tuple(site):
                raise AssertionError(f"step {k}: ancilla {step.anc} is at {where.get(step.anc)}, not {site}")
