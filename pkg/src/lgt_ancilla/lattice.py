"""Two-dimensional lattice geometry, links, paths and loops.

Vertices are ``(x, y)`` tuples.  A link is ``(x, y, i)`` with direction
``i in (1, 2)``; it joins ``(x, y)`` to ``(x, y) + e_i``.  A path step is a
``(link, orientation)`` pair; orientation ``+1`` traverses the link along
``+e_i`` and ``-1`` against it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

Vertex = tuple[int, int]
Link = tuple[int, int, int]
Step = tuple[Link, int]


@dataclass(frozen=True)
class LatticeGeometry:
    lx: int
    ly: int
    boundary: str = "open"
    links: tuple[Link, ...] = field(init=False, repr=False)
    _link_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.lx < 1 or self.ly < 1:
            raise ValueError(f"lattice dimensions must be positive, got {self.lx}x{self.ly}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")
        links = []
        for v in self.vertices():
            for i in (1, 2):
                if self.periodic or self._inside(self._shift(v, i, wrap=False)):
                    links.append((v[0], v[1], i))
        object.__setattr__(self, "links", tuple(links))
        object.__setattr__(self, "_link_index", {l: k for k, l in enumerate(links)})

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"

    @property
    def n_vertices(self) -> int:
        return self.lx * self.ly

    @property
    def n_links(self) -> int:
        return len(self.links)

    def vertices(self) -> Iterator[Vertex]:
        """Vertices in canonical order (x fastest)."""
        for y in range(self.ly):
            for x in range(self.lx):
                yield (x, y)

    def vertex_index(self, v: Vertex) -> int:
        v = self.normalize(v)
        return v[0] + self.lx * v[1]

    def parity(self, v: Vertex) -> int:
        """Sublattice parity (x + y) mod 2; 1 means odd."""
        return (v[0] + v[1]) % 2

    def _inside(self, v: Vertex) -> bool:
        return 0 <= v[0] < self.lx and 0 <= v[1] < self.ly

    def _shift(self, v: Vertex, i: int, sign: int = 1, wrap: bool = True) -> Vertex:
        x, y = v
        if i == 1:
            x += sign
        else:
            y += sign
        if wrap and self.periodic:
            x, y = x % self.lx, y % self.ly
        return (x, y)

    def normalize(self, v: Sequence[int]) -> Vertex:
        v = (int(v[0]), int(v[1]))
        if self.periodic:
            v = (v[0] % self.lx, v[1] % self.ly)
        if not self._inside(v):
            raise ValueError(f"vertex {v} outside {self.lx}x{self.ly} lattice")
        return v

    def has_link(self, link: Sequence[int]) -> bool:
        try:
            self.link_index(link)
        except ValueError:
            return False
        return True

    def link_index(self, link: Sequence[int]) -> int:
        x, y, i = (int(c) for c in link)
        if self.periodic:
            x, y = x % self.lx, y % self.ly
        try:
            return self._link_index[(x, y, i)]
        except KeyError:
            raise ValueError(f"no link {(x, y, i)} in {self.lx}x{self.ly} {self.boundary} lattice") from None

    def canonical_link(self, link: Sequence[int]) -> Link:
        return self.links[self.link_index(link)]

    def link_ends(self, link: Link) -> tuple[Vertex, Vertex]:
        link = self.canonical_link(link)
        start = (link[0], link[1])
        return start, self._shift(start, link[2])

    def outgoing(self, v: Vertex) -> list[Link]:
        """Links (v, i) leaving v along +e_i."""
        v = self.normalize(v)
        return [(v[0], v[1], i) for i in (1, 2) if self.has_link((v[0], v[1], i))]

    def incoming(self, v: Vertex) -> list[Link]:
        """Links (v - e_i, i) arriving at v along +e_i."""
        v = self.normalize(v)
        out = []
        for i in (1, 2):
            w = self._shift(v, i, -1)
            if self.periodic or self._inside(w):
                if self.has_link((w[0], w[1], i)):
                    out.append(self.canonical_link((w[0], w[1], i)))
        return out

    def plaquettes(self) -> list[Vertex]:
        """Lower-left corners of all elementary plaquettes."""
        xs = range(self.lx) if self.periodic else range(self.lx - 1)
        ys = range(self.ly) if self.periodic else range(self.ly - 1)
        return [(x, y) for y in ys for x in xs]


@dataclass(frozen=True)
class PathSpec:
    """A contiguous directed walk; ``sites`` lists the visited vertices."""

    start: Vertex
    steps: tuple[Step, ...]
    end: Vertex
    sites: tuple[Vertex, ...] = field(repr=False, compare=False, default=())

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def links(self) -> list[Link]:
        return [s[0] for s in self.steps]

    @property
    def is_closed(self) -> bool:
        return self.start == self.end

    def is_simple(self) -> bool:
        vs = self.sites[:-1] if self.is_closed else self.sites
        return len(set(vs)) == len(vs)


@dataclass(frozen=True)
class LoopSpec(PathSpec):
    """A closed path (end == start)."""

    def rotated(self, k: int) -> LoopSpec:
        """The same loop with its base point moved forward by ``k`` steps."""
        k %= len(self.steps)
        start = self.sites[k]
        sites = self.sites[k:-1] + self.sites[:k] + (start,)
        return LoopSpec(start=start, steps=self.steps[k:] + self.steps[:k], end=start, sites=sites)


def _step_vertices(geometry: LatticeGeometry, step: Step) -> tuple[Vertex, Vertex]:
    link, orient = step
    a, b = geometry.link_ends(link)
    return (a, b) if orient == 1 else (b, a)


def make_path(geometry: LatticeGeometry, start: Vertex, steps: Sequence[Step]) -> PathSpec:
    """Validate contiguity and build a PathSpec (a LoopSpec if it closes)."""
    if not steps:
        raise ValueError("a path needs at least one step")
    start = geometry.normalize(start)
    cur = start
    canon: list[Step] = []
    sites = [start]
    for k, (link, orient) in enumerate(steps):
        if orient not in (1, -1):
            raise ValueError(f"step {k}: orientation must be +1 or -1, got {orient}")
        link = geometry.canonical_link(link)
        a, b = _step_vertices(geometry, (link, orient))
        if a != cur:
            raise ValueError(f"step {k} on link {link} starts at {a}, expected {cur}")
        canon.append((link, int(orient)))
        sites.append(b)
        cur = b
    cls = LoopSpec if cur == start else PathSpec
    return cls(start=start, steps=tuple(canon), end=cur, sites=tuple(sites))


def make_loop(geometry: LatticeGeometry, start: Vertex, steps: Sequence[Step]) -> LoopSpec:
    path = make_path(geometry, start, steps)
    if not isinstance(path, LoopSpec):
        raise ValueError(f"path from {path.start} ends at {path.end}; not a closed loop")
    return path


def build_lattice(lx: int, ly: int, boundary: str = "open") -> LatticeGeometry:
    return LatticeGeometry(int(lx), int(ly), boundary)


def rectangle_loop(geometry: LatticeGeometry, corner: Vertex, w: int, h: int) -> LoopSpec:
    """Counterclockwise w x h rectangle starting at its lower-left corner.

    Bottom and right edges are traversed with orientation +1, top and left
    edges with -1.
    """
    if w < 1 or h < 1:
        raise ValueError(f"rectangle needs w, h >= 1, got {w}x{h}")
    x0, y0 = corner
    if not geometry.periodic and not (
        0 <= x0 and 0 <= y0 and x0 + w < geometry.lx and y0 + h < geometry.ly
    ):
        raise ValueError(f"rectangle at {corner} of size {w}x{h} does not fit the lattice")
    steps: list[Step] = []
    steps += [((x0 + k, y0, 1), 1) for k in range(w)]
    steps += [((x0 + w, y0 + k, 2), 1) for k in range(h)]
    steps += [((x0 + w - 1 - k, y0 + h, 1), -1) for k in range(w)]
    steps += [((x0, y0 + h - 1 - k, 2), -1) for k in range(h)]
    return make_loop(geometry, (x0, y0), steps)


def shortest_path(geometry: LatticeGeometry, x: Vertex, y: Vertex) -> PathSpec:
    """Monotone staircase from x to y: all direction-1 moves, then direction-2."""
    x = geometry.normalize(x)
    y = geometry.normalize(y)
    if x == y:
        raise ValueError("path endpoints must differ")
    steps: list[Step] = []
    cx, cy = x
    while cx != y[0]:
        if y[0] > cx:
            steps.append(((cx, cy, 1), 1))
            cx += 1
        else:
            steps.append(((cx - 1, cy, 1), -1))
            cx -= 1
    while cy != y[1]:
        if y[1] > cy:
            steps.append(((cx, cy, 2), 1))
            cy += 1
        else:
            steps.append(((cx, cy - 1, 2), -1))
            cy -= 1
    return make_path(geometry, x, steps)


# ---------------------------------------------------------------- text syntax

_INT = r"\s*(-?\d+)\s*"
_RECT_RE = re.compile(rf"^\s*rect\s*:\s*\({_INT},{_INT},{_INT},{_INT}\)\s*$")
_AUTO_RE = re.compile(rf"^\s*auto\s*:\s*\({_INT},{_INT}\)\s*->\s*\({_INT},{_INT}\)\s*$")
_STEP_RE = re.compile(rf"^\s*\({_INT},{_INT},{_INT},\s*([+-]?1)\s*\)\s*$")


def parse_loop(geometry: LatticeGeometry, text: str) -> LoopSpec:
    """Parse ``rect:(x,y,w,h)`` or ``steps:(x,y,dir,+-1);...``."""
    m = _RECT_RE.match(text)
    if m:
        x, y, w, h = (int(g) for g in m.groups())
        return rectangle_loop(geometry, (x, y), w, h)
    return make_loop(geometry, *_parse_steps(geometry, text))


def parse_path(geometry: LatticeGeometry, text: str) -> PathSpec:
    """Parse ``auto:(x1,y1)->(x2,y2)`` or ``steps:(x,y,dir,+-1);...``."""
    m = _AUTO_RE.match(text)
    if m:
        x1, y1, x2, y2 = (int(g) for g in m.groups())
        return shortest_path(geometry, (x1, y1), (x2, y2))
    return make_path(geometry, *_parse_steps(geometry, text))


def _parse_steps(geometry: LatticeGeometry, text: str) -> tuple[Vertex, list[Step]]:
    body = text.strip()
    if not body.startswith("steps:"):
        raise ValueError(f"unrecognized path syntax {text!r}")
    steps: list[Step] = []
    for chunk in filter(None, (c.strip() for c in body[len("steps:"):].split(";"))):
        m = _STEP_RE.match(chunk)
        if m is None:
            raise ValueError(f"bad step {chunk!r}; expected (x,y,dir,+-1)")
        x, y, i, o = (int(g) for g in m.groups())
        if i not in (1, 2):
            raise ValueError(f"bad direction {i} in step {chunk!r}")
        steps.append(((x, y, i), o))
    if not steps:
        raise ValueError("empty step list")
    start = _step_vertices(geometry, (geometry.canonical_link(steps[0][0]), steps[0][1]))[0]
    return start, steps


def format_path(path: PathSpec) -> str:
    return "steps:" + ";".join(f"({l[0]},{l[1]},{l[2]},{o:+d})" for l, o in path.steps)
