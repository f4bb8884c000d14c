"""Placements of a piece inside a rectangular bounding box."""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import Cell, Polyomino, orientations

DEFAULT_CELL_LIMIT = 1024


class BoxTooLarge(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Box:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"box sides must be positive, got {self.width}x{self.height}")

    @property
    def cells(self) -> int:
        return self.width * self.height

    def index(self, cell: Cell) -> int:
        return cell[1] * self.width + cell[0]

    def cell(self, index: int) -> Cell:
        return (index % self.width, index // self.width)

    def contains(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def check_limit(self, limit: int = DEFAULT_CELL_LIMIT) -> None:
        if self.cells > limit:
            raise BoxTooLarge(f"{self.width}x{self.height} exceeds the {limit}-cell limit")

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"


@dataclass(frozen=True)
class Placement:
    piece_id: int
    orientation_id: int
    offset: Cell
    cover: frozenset[Cell]
    mask: int = field(default=0, compare=False, repr=False)


def cover_mask(cover, box: Box) -> int:
    m = 0
    for c in cover:
        m |= 1 << box.index(c)
    return m


def fits(piece: Polyomino, box: Box, allow_reflect: bool = True) -> bool:
    return any(
        o.width <= box.width and o.height <= box.height
        for o in orientations(piece, allow_reflect)
    )


def enumerate_placements(
    piece: Polyomino,
    box: Box,
    allow_reflect: bool = True,
    piece_id: int = 0,
    cell_limit: int = DEFAULT_CELL_LIMIT,
) -> list[Placement]:
    """All (orientation, offset) placements of ``piece`` inside ``box``.

    Ordered by orientation id, then row-major offset.  Orientations are
    deduplicated images, so no two placements share a cover.
    """
    box.check_limit(cell_limit)
    out = []
    seen = set()
    for oid, o in enumerate(orientations(piece, allow_reflect)):
        cells = tuple(o.cells)
        for dy in range(box.height - o.height + 1):
            for dx in range(box.width - o.width + 1):
                cover = frozenset((x + dx, y + dy) for x, y in cells)
                if cover in seen:
                    continue
                seen.add(cover)
                out.append(Placement(piece_id, oid, (dx, dy), cover, cover_mask(cover, box)))
    return out
