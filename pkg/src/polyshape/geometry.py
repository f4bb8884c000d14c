"""Grid polyominoes: parsing, rendering, the dihedral group and canonical forms.

Cells are ``(x, y)`` tuples with ``y`` growing downwards, so the first line of
an ASCII picture is row 0.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

Cell = tuple[int, int]

FILLED = "#X"
EMPTY = ". "

# Transform t = (r, m): rotate r quarter turns, then mirror if m.  Stored as
# t = r + 4*m so ids 0..3 are the rotations.
ROTATIONS = (0, 1, 2, 3)
ALL_TRANSFORMS = tuple(range(8))


class ShapeError(ValueError):
    pass


class EmptyShape(ShapeError):
    pass


class Disconnected(ShapeError):
    pass


class HoleInPiece(ShapeError):
    pass


class BadCharacter(ShapeError):
    pass


def apply_transform(t: int, cell: Cell) -> Cell:
    x, y = cell
    for _ in range(t % 4):
        x, y = -y, x
    if t >= 4:
        x = -x
    return (x, y)


def compose(t2: int, t1: int) -> int:
    """Transform id equal to applying ``t1`` then ``t2``."""
    probe = ((0, 0), (1, 0), (0, 1))
    want = [apply_transform(t2, apply_transform(t1, c)) for c in probe]
    for t in ALL_TRANSFORMS:
        if [apply_transform(t, c) for c in probe] == want:
            return t
    raise AssertionError("dihedral group is not closed")


def normalize(cells: Iterable[Cell]) -> frozenset[Cell]:
    cells = list(cells)
    if not cells:
        return frozenset()
    mx = min(x for x, _ in cells)
    my = min(y for _, y in cells)
    return frozenset((x - mx, y - my) for x, y in cells)


def transform_cells(t: int, cells: Iterable[Cell]) -> frozenset[Cell]:
    return normalize(apply_transform(t, c) for c in cells)


def shape_key(cells: Iterable[Cell]) -> tuple[int, int, int]:
    """Sort key ``(height, width, row-major bits)`` of a normalized cell set.

    Bits are read with cell (0, 0) as the most significant one, so numeric
    order equals lexicographic order of the row-major '0'/'1' string.
    """
    cells = tuple(cells)
    w = max(x for x, _ in cells) + 1
    h = max(y for _, y in cells) + 1
    top = w * h - 1
    bits = 0
    for x, y in cells:
        bits |= 1 << (top - (y * w + x))
    return (h, w, bits)


def cells_from_key(key: tuple[int, int, int]) -> frozenset[Cell]:
    h, w, bits = key
    top = w * h - 1
    return frozenset((i % w, i // w) for i in range(w * h) if bits >> (top - i) & 1)


def canonical_key(cells: Iterable[Cell], allow_reflect: bool = True) -> tuple[int, int, int]:
    pts = tuple(cells)
    group = ALL_TRANSFORMS if allow_reflect else ROTATIONS
    best = None
    for t in group:
        k = shape_key(transform_cells(t, pts))
        if best is None or k < best:
            best = k
    return best


def flood(cells: set[Cell] | frozenset[Cell], start: Cell) -> set[Cell]:
    seen = {start}
    todo = deque([start])
    while todo:
        x, y = todo.popleft()
        for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if n in cells and n not in seen:
                seen.add(n)
                todo.append(n)
    return seen


class Topology(NamedTuple):
    connected: bool
    holes: int


def topology(cells: Iterable[Cell]) -> Topology:
    """Connectivity (4-adjacency) and number of bounded empty regions."""
    cells = frozenset(cells)
    if not cells:
        raise EmptyShape("topology of an empty cell set")
    connected = len(flood(cells, next(iter(cells)))) == len(cells)
    xs = [x for x, _ in cells]
    ys = [y for _, y in cells]
    x0, x1, y0, y1 = min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1
    empty = {
        (x, y)
        for x in range(x0, x1 + 1)
        for y in range(y0, y1 + 1)
        if (x, y) not in cells
    }
    outside = flood(empty, (x0, y0))
    rest = empty - outside
    holes = 0
    while rest:
        rest -= flood(rest, next(iter(rest)))
        holes += 1
    return Topology(connected, holes)


def is_connected(cells: Iterable[Cell]) -> bool:
    cells = frozenset(cells)
    return bool(cells) and len(flood(cells, next(iter(cells)))) == len(cells)


@dataclass(frozen=True)
class Polyomino:
    """An edge-connected, normalized set of unit cells."""

    cells: frozenset[Cell]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.cells:
            raise EmptyShape("polyomino has no cells")
        if normalize(self.cells) != self.cells:
            object.__setattr__(self, "cells", normalize(self.cells))
        if not is_connected(self.cells):
            raise Disconnected("cells are not edge-connected")

    @classmethod
    def of(cls, cells: Iterable[Cell], name: str = "") -> "Polyomino":
        return cls(normalize(cells), name)

    @property
    def area(self) -> int:
        return len(self.cells)

    @property
    def width(self) -> int:
        return max(x for x, _ in self.cells) + 1

    @property
    def height(self) -> int:
        return max(y for _, y in self.cells) + 1

    @property
    def bbox(self) -> tuple[int, int]:
        return (self.width, self.height)

    def transformed(self, t: int) -> "Polyomino":
        return Polyomino(transform_cells(t, self.cells), self.name)

    def key(self) -> tuple[int, int, int]:
        return shape_key(self.cells)

    def has_hole(self) -> bool:
        return topology(self.cells).holes > 0

    def __str__(self) -> str:
        return render_ascii(self.cells)


def orientations(p: Polyomino, allow_reflect: bool = True) -> tuple[Polyomino, ...]:
    """Distinct images of ``p`` in transform-id order."""
    group = ALL_TRANSFORMS if allow_reflect else ROTATIONS
    seen = set()
    out = []
    for t in group:
        q = transform_cells(t, p.cells)
        if q not in seen:
            seen.add(q)
            out.append(Polyomino(q, p.name))
    return tuple(out)


def canonical(p: Polyomino, allow_reflect: bool = True) -> Polyomino:
    return Polyomino(cells_from_key(canonical_key(p.cells, allow_reflect)), p.name)


def congruent(a: Iterable[Cell], b: Iterable[Cell], allow_reflect: bool = True) -> bool:
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        return False
    return canonical_key(a, allow_reflect) == canonical_key(b, allow_reflect)


def parse_cells(text: str) -> frozenset[Cell]:
    cells = set()
    for y, line in enumerate(text.strip("\n").split("\n")):
        for x, ch in enumerate(line.rstrip("\r")):
            if ch in FILLED:
                cells.add((x, y))
            elif ch not in EMPTY:
                raise BadCharacter(f"unexpected character {ch!r} at row {y}, column {x}")
    return normalize(cells)


def parse_ascii(text: str, piece: bool = True, name: str = "") -> Polyomino:
    """Parse '#'/'X' filled, '.'/' ' empty.  Pieces must be hole-free."""
    cells = parse_cells(text)
    if not cells:
        raise EmptyShape("no filled cells")
    topo = topology(cells)
    if not topo.connected:
        raise Disconnected("shape is not edge-connected")
    if piece and topo.holes:
        raise HoleInPiece(f"piece has {topo.holes} hole(s)")
    return Polyomino(cells, name)


def render_ascii(cells: Iterable[Cell], fill: str = "#", empty: str = ".") -> str:
    cells = normalize(cells)
    if not cells:
        return ""
    w = max(x for x, _ in cells) + 1
    h = max(y for _, y in cells) + 1
    return "\n".join(
        "".join(fill if (x, y) in cells else empty for x in range(w)) for y in range(h)
    )


def to_rle(cells: Iterable[Cell]) -> str:
    """Compact ``"W,H:r0/r1/..."`` form; row value bit x marks cell (x, y)."""
    cells = normalize(cells)
    w = max(x for x, _ in cells) + 1
    h = max(y for _, y in cells) + 1
    rows = [0] * h
    for x, y in cells:
        rows[y] |= 1 << x
    return f"{w},{h}:" + "/".join(format(r, "x") for r in rows)


def from_rle(text: str) -> frozenset[Cell]:
    dims, _, body = text.partition(":")
    w, h = (int(v) for v in dims.split(","))
    rows = body.split("/") if body else []
    if len(rows) != h:
        raise ShapeError(f"expected {h} rows in {text!r}")
    cells = set()
    for y, r in enumerate(rows):
        v = int(r, 16)
        if v >> w:
            raise ShapeError(f"row {y} wider than {w}")
        cells.update((x, y) for x in range(w) if v >> x & 1)
    return frozenset(cells)


def translate(cells: Iterable[Cell], dx: int, dy: int) -> frozenset[Cell]:
    return frozenset((x + dx, y + dy) for x, y in cells)


def rectangle(w: int, h: int) -> frozenset[Cell]:
    return frozenset((x, y) for x in range(w) for y in range(h))
