"""Jigsaw pieces: unit squares with a color on each edge.

Colors are signed integers.  ``c`` and ``-c`` mate; ``0`` is the frame color
and may only sit on the boundary of the tiled region.  Two horizontally
adjacent pieces A|B fit when ``A.right == -B.left != 0``, and A above B fit
when ``A.bottom == -B.top != 0``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .cnf import SAT, UNSAT, Budget, CnfFormula, Session, exactly_one
from .dlx import AREA_CAP, AreaCapExceeded, polyominoes
from .geometry import Cell, normalize, rectangle, transform_cells
from .placement import Box

FIXED = "fixed"
ROTATABLE = "rotatable"

SIDES = ("top", "right", "bottom", "left")


class JigsawError(ValueError):
    pass


def mate(c: int) -> int:
    return -c


@dataclass(frozen=True)
class JigsawPiece:
    top: int
    bottom: int
    left: int
    right: int
    name: str = ""

    def rotated(self, quarter_turns: int = 1) -> "JigsawPiece":
        """Quarter turns clockwise (y points down)."""
        p = self
        for _ in range(quarter_turns % 4):
            p = JigsawPiece(top=p.left, right=p.top, bottom=p.right, left=p.bottom, name=p.name)
        return p

    def colors(self) -> tuple[int, int, int, int]:
        return (self.top, self.bottom, self.left, self.right)

    def __str__(self) -> str:
        return " ".join(str(c) for c in self.colors())


@dataclass(frozen=True)
class JigsawSet:
    pieces: tuple[JigsawPiece, ...]
    rotation_mode: str = FIXED

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise JigsawError("jigsaw set is empty")
        if self.rotation_mode not in (FIXED, ROTATABLE):
            raise JigsawError(f"unknown rotation mode {self.rotation_mode!r}")

    def __len__(self) -> int:
        return len(self.pieces)

    def oriented(self) -> list[tuple[int, int, JigsawPiece]]:
        """(piece index, quarter turns, rotated piece), without duplicates."""
        out = []
        for i, p in enumerate(self.pieces):
            seen = set()
            for r in range(4 if self.rotation_mode == ROTATABLE else 1):
                q = p.rotated(r)
                if q.colors() in seen:
                    continue
                seen.add(q.colors())
                out.append((i, r, q))
        return out

    def colors(self) -> set[int]:
        return {c for p in self.pieces for c in p.colors()}


def parse_jigsaw(text: str, rotation_mode: str = FIXED) -> JigsawSet:
    """One piece per line: ``top bottom left right`` (``#`` starts a comment)."""
    pieces = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise JigsawError(f"line {n}: expected 4 colors, got {len(parts)}")
        try:
            pieces.append(JigsawPiece(*map(int, parts)))
        except ValueError:
            raise JigsawError(f"line {n}: colors must be integers") from None
    return JigsawSet(tuple(pieces), rotation_mode)


def format_jigsaw(js: JigsawSet) -> str:
    return "".join(f"{p}\n" for p in js.pieces)


def load_jigsaw(path, rotation_mode: str = FIXED) -> JigsawSet:
    return parse_jigsaw(Path(path).read_text(), rotation_mode)


# -- region geometry -------------------------------------------------------------

_STEP = {"top": (0, -1), "right": (1, 0), "bottom": (0, 1), "left": (-1, 0)}


def boundary_pattern(cells: frozenset[Cell], c: Cell) -> tuple[bool, bool, bool, bool]:
    """Which of (top, bottom, left, right) lie on the region boundary."""
    x, y = c
    return ((x, y - 1) not in cells, (x, y + 1) not in cells, (x - 1, y) not in cells, (x + 1, y) not in cells)


def _zero_pattern(p: JigsawPiece) -> tuple[bool, bool, bool, bool]:
    return tuple(c == 0 for c in p.colors())


# -- checking --------------------------------------------------------------------


@dataclass
class Tiling:
    """cell -> (piece index, quarter turns)."""

    cells: dict[Cell, tuple[int, int]]

    def piece_at(self, js: JigsawSet, c: Cell) -> JigsawPiece:
        i, r = self.cells[c]
        return js.pieces[i].rotated(r)


def check_tiling(js: JigsawSet, region: Iterable[Cell], tiling: Tiling) -> list[str]:
    """Walk every edge of the region; returns the list of problems found."""
    region = frozenset(region)
    bad = []
    if set(tiling.cells) != set(region):
        bad.append("assignment does not match the region")
        return bad
    for (x, y), (i, r) in tiling.cells.items():
        if not 0 <= i < len(js.pieces):
            bad.append(f"cell {(x, y)}: no piece {i}")
            return bad
        if r % 4 and js.rotation_mode == FIXED:
            bad.append(f"cell {(x, y)}: rotation in fixed mode")
    for c in region:
        p = tiling.piece_at(js, c)
        x, y = c
        for side, color in (("top", p.top), ("bottom", p.bottom), ("left", p.left), ("right", p.right)):
            dx, dy = _STEP[side]
            n = (x + dx, y + dy)
            if n not in region:
                if color != 0:
                    bad.append(f"cell {c}: boundary {side} has color {color}")
                continue
            if color == 0:
                bad.append(f"cell {c}: interior {side} edge has color 0")
                continue
            q = tiling.piece_at(js, n)
            other = {"top": q.bottom, "bottom": q.top, "left": q.right, "right": q.left}[side]
            if other != mate(color):
                bad.append(f"cells {c}/{n}: colors {color} and {other} do not mate")
    return bad


# -- CNF tiling --------------------------------------------------------------------


@dataclass
class TileResult:
    status: str
    tiling: Tiling | None = None
    wall_ms: float = 0.0

    @property
    def found(self) -> bool:
        return self.status == SAT


def tile_cells(
    js: JigsawSet,
    region: Iterable[Cell],
    budget: Budget | None = None,
    backend: str | None = None,
) -> TileResult:
    """Decide whether copies of the pieces tile ``region`` (CNF + SAT)."""
    t0 = time.monotonic()
    region = frozenset(region)
    if not region:
        raise JigsawError("region is empty")
    opts = js.oriented()
    f = CnfFormula()
    var: dict[Cell, dict[int, int]] = {}
    for c in sorted(region):
        zero = boundary_pattern(region, c)
        ok = [k for k, (_, _, q) in enumerate(opts) if _zero_pattern(q) == zero]
        if not ok:
            return TileResult(UNSAT, None, (time.monotonic() - t0) * 1000)
        var[c] = dict(zip(ok, f.new_vars(len(ok))))
        exactly_one(f, var[c].values())
    for c in sorted(region):
        x, y = c
        for n, mine, theirs in (((x + 1, y), "right", "left"), ((x, y + 1), "bottom", "top")):
            if n not in region:
                continue
            by_color: dict[int, list[int]] = {}
            for k2, v2 in var[n].items():
                by_color.setdefault(getattr(opts[k2][2], theirs), []).append(v2)
            for k, v in var[c].items():
                want = mate(getattr(opts[k][2], mine))
                f.add_clause([-v, *by_color.get(want, [])])
            back: dict[int, list[int]] = {}
            for k, v in var[c].items():
                back.setdefault(getattr(opts[k][2], mine), []).append(v)
            for k2, v2 in var[n].items():
                want = mate(getattr(opts[k2][2], theirs))
                f.add_clause([-v2, *back.get(want, [])])
    v = Session(f, backend).solve((), budget)
    ms = (time.monotonic() - t0) * 1000
    if not v.sat:
        return TileResult(v.status, None, ms)
    assign = {}
    for c, choices in var.items():
        for k, x in choices.items():
            if v.model[x]:
                i, r, _ = opts[k]
                assign[c] = (i, r)
                break
    tiling = Tiling(assign)
    problems = check_tiling(js, region, tiling)
    if problems:
        raise AssertionError("CNF tiling failed the edge walk: " + problems[0])
    return TileResult(SAT, tiling, ms)


def tile_region(
    js: JigsawSet, box: Box, budget: Budget | None = None, backend: str | None = None
) -> TileResult:
    return tile_cells(js, rectangle(box.width, box.height), budget, backend)


def rotate_tiling(js: JigsawSet, region: frozenset[Cell], tiling: Tiling) -> tuple[frozenset[Cell], Tiling]:
    """Turn a whole tiling a quarter clockwise, turning every piece with it."""
    h = max(y for _, y in region) + 1
    moved = {}
    for (x, y), (i, r) in tiling.cells.items():
        moved[(h - 1 - y, x)] = (i, (r + 1) % 4)
    return frozenset(moved), Tiling(moved)


# -- fast backtracking tiler (used for exhaustive validation) -----------------------


class _Backtracker:
    def __init__(self, js: JigsawSet):
        self.opts = [q for _, _, q in js.oriented()]
        self.by_pattern: dict[tuple, list[JigsawPiece]] = {}
        for q in self.opts:
            self.by_pattern.setdefault(_zero_pattern(q), []).append(q)

    def tileable(self, region: frozenset[Cell]) -> bool:
        order = sorted(region, key=lambda c: (c[1], c[0]))
        cand = []
        for c in order:
            lst = self.by_pattern.get(boundary_pattern(region, c))
            if not lst:
                return False
            cand.append(lst)
        placed: dict[Cell, JigsawPiece] = {}

        def go(i: int) -> bool:
            if i == len(order):
                return True
            x, y = order[i]
            left = placed.get((x - 1, y))
            up = placed.get((x, y - 1))
            for q in cand[i]:
                if left is not None and q.left != -left.right:
                    continue
                if up is not None and q.top != -up.bottom:
                    continue
                placed[(x, y)] = q
                if go(i + 1):
                    return True
            placed.pop((x, y), None)
            return False

        return go(0)


def tileable_fast(js: JigsawSet, region: Iterable[Cell]) -> bool:
    return _Backtracker(js).tileable(frozenset(region))


# -- rectangle enforcement -----------------------------------------------------------


def is_rect_at_least_3(cells: frozenset[Cell]) -> bool:
    xs = {x for x, _ in cells}
    ys = {y for _, y in cells}
    w, h = len(xs), len(ys)
    return w >= 3 and h >= 3 and len(cells) == w * h and max(xs) - min(xs) + 1 == w and max(ys) - min(ys) + 1 == h


@dataclass
class RectReport:
    cap: int
    regions: int
    images: int
    tileable: list[frozenset[Cell]]
    counterexamples: list[tuple[frozenset[Cell], str]]
    sat_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def tileable_sizes(self) -> list[tuple[int, int]]:
        out = set()
        for s in self.tileable:
            w = max(x for x, _ in s) + 1
            h = max(y for _, y in s) + 1
            out.add((w, h))
        return sorted(out)


def validate_rect_enforcing(
    js: JigsawSet,
    area_cap: int,
    cap_limit: int = AREA_CAP,
    sat_sample: int = 0,
    backend: str | None = None,
) -> RectReport:
    """Every region of area <= cap (all 8 images of every free polyomino) is
    tiled iff it is a rectangle with both sides at least 3.

    The backtracker decides each region; every region it accepts and the
    first ``sat_sample`` rejected images are re-decided by the CNF tiler.
    """
    if area_cap > cap_limit:
        raise AreaCapExceeded(f"area cap {area_cap} exceeds {cap_limit}")
    bt = _Backtracker(js)
    rep = RectReport(area_cap, 0, 0, [], [])
    sampled = 0
    for n in range(1, area_cap + 1):
        for shape in polyominoes(n, True):
            rep.regions += 1
            images = {transform_cells(t, shape) for t in range(8)}
            for img in sorted(images, key=sorted):
                img = normalize(img)
                rep.images += 1
                ok = bt.tileable(img)
                want = is_rect_at_least_3(img)
                if ok or sampled < sat_sample:
                    sat = tile_cells(js, img, backend=backend).found
                    rep.sat_checked += 1
                    if not ok:
                        sampled += 1
                    if sat != ok:
                        rep.counterexamples.append((img, "backtracker and CNF tiler disagree"))
                if ok:
                    rep.tileable.append(img)
                if ok != want:
                    why = "tileable but not a >=3x3 rectangle" if ok else ">=3x3 rectangle not tileable"
                    rep.counterexamples.append((img, why))
    return rep


def rect_enforcing_set() -> JigsawSet:
    """Thirteen fixed-orientation pieces that tile exactly the rectangles of
    size at least 3 x 3.

    Vertical rails A (corner to side) and B (side to side), horizontal rails
    C and D likewise, interior colors h (horizontal) and v (vertical).
    """
    A, B, C, D, h, v = 1, 2, 3, 4, 5, 6
    P = JigsawPiece
    return JigsawSet(
        (
            P(0, A, 0, C, "TL"),
            P(0, v, -C, D, "T1"),
            P(0, v, -D, D, "T"),
            P(0, A, -D, 0, "TR"),
            P(-A, B, 0, h, "L1"),
            P(-B, B, 0, h, "L"),
            P(-A, B, -h, 0, "R1"),
            P(-B, B, -h, 0, "R"),
            P(-B, 0, 0, C, "BL"),
            P(-v, 0, -C, D, "B1"),
            P(-v, 0, -D, D, "B"),
            P(-B, 0, -D, 0, "BR"),
            P(-v, v, -h, h, "I"),
        ),
        FIXED,
    )
