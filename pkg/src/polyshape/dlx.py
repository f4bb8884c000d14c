"""Dancing-links exact cover, region packing, and a brute-force common-shape oracle.

The oracle enumerates every connected shape of each feasible area (up to
congruence) and asks :func:`pack_region` whether each piece set tiles it.  It
shares nothing with the SAT path beyond the piece catalog, so the two can
check each other on small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .geometry import Cell, canonical_key, cells_from_key, orientations, to_rle
from .instance import Mode, PieceSet, PuzzleInstance, common_areas
from .placement import Placement

EXACT_ONCE = "exact-once"
UNLIMITED = "unlimited"

AREA_CAP = 16


class AreaCapExceeded(ValueError):
    pass


class CoverMatrix:
    """Knuth's dancing links over ``ncols`` primary columns.

    Nodes live in flat lists; node ``c`` for ``c < ncols`` is a column header
    and node ``ncols`` is the root.
    """

    def __init__(self, ncols: int, rows: Sequence[Sequence[int]]):
        self.ncols = ncols
        root = ncols
        n = ncols + 1
        self.L = [i - 1 for i in range(n)]
        self.R = [i + 1 for i in range(n)]
        self.L[0] = root
        self.R[root] = 0 if ncols else root
        self.L[root] = ncols - 1 if ncols else root
        if ncols:
            self.R[ncols - 1] = root
        self.U = list(range(n))
        self.D = list(range(n))
        self.C = list(range(n))
        self.row_of = [-1] * n
        self.size = [0] * n
        for r, cols in enumerate(rows):
            first = None
            for c in sorted(set(cols)):
                if not 0 <= c < ncols:
                    raise ValueError(f"column {c} out of range")
                x = len(self.C)
                self.C.append(c)
                self.row_of.append(r)
                self.U.append(self.U[c])
                self.D.append(c)
                self.D[self.U[c]] = x
                self.U[c] = x
                self.size[c] += 1
                if first is None:
                    self.L.append(x)
                    self.R.append(x)
                    first = x
                else:
                    self.L.append(self.L[first])
                    self.R.append(first)
                    self.R[self.L[first]] = x
                    self.L[first] = x
        self.root = root

    def _cover(self, c: int) -> None:
        L, R, U, D, C = self.L, self.R, self.U, self.D, self.C
        R[L[c]] = R[c]
        L[R[c]] = L[c]
        i = D[c]
        while i != c:
            j = R[i]
            while j != i:
                D[U[j]] = D[j]
                U[D[j]] = U[j]
                self.size[C[j]] -= 1
                j = R[j]
            i = D[i]

    def _uncover(self, c: int) -> None:
        L, R, U, D, C = self.L, self.R, self.U, self.D, self.C
        i = U[c]
        while i != c:
            j = L[i]
            while j != i:
                self.size[C[j]] += 1
                D[U[j]] = j
                U[D[j]] = j
                j = L[j]
            i = U[i]
        R[L[c]] = c
        L[R[c]] = c

    def solutions(self) -> Iterator[list[int]]:
        """Exact covers as lists of row indices (smallest-column heuristic)."""
        picked: list[int] = []
        R, D, C = self.R, self.D, self.C
        root = self.root

        def search():
            if R[root] == root:
                yield list(picked)
                return
            c, best = -1, None
            j = R[root]
            while j != root:
                if best is None or self.size[j] < best:
                    c, best = j, self.size[j]
                    if best == 0:
                        break
                j = R[j]
            if best == 0:
                return
            self._cover(c)
            r = D[c]
            while r != c:
                picked.append(self.row_of[r])
                j = R[r]
                while j != r:
                    self._cover(C[j])
                    j = R[j]
                yield from search()
                j = self.L[r]
                while j != r:
                    self._uncover(C[j])
                    j = self.L[j]
                picked.pop()
                r = D[r]
            self._uncover(c)

        yield from search()


def region_placements(region, pieces: PieceSet, allow_reflect: bool = True, dedup_congruent: bool = False):
    """Placements of every piece lying inside ``region``."""
    region = frozenset(region)
    out = []
    seen_shapes = set()
    for pid, p in enumerate(pieces.pieces):
        if dedup_congruent:
            k = canonical_key(p.cells, allow_reflect)
            if k in seen_shapes:
                continue
            seen_shapes.add(k)
        for oid, o in enumerate(orientations(p, allow_reflect)):
            cells = tuple(o.cells)
            # anchor the orientation's first cell (row-major) on each region cell
            ax, ay = min(cells, key=lambda c: (c[1], c[0]))
            for cx, cy in region:
                dx, dy = cx - ax, cy - ay
                cover = frozenset((x + dx, y + dy) for x, y in cells)
                if cover <= region:
                    out.append(Placement(pid, oid, (dx, dy), cover))
    out.sort(key=lambda pl: (pl.piece_id, pl.orientation_id, pl.offset[1], pl.offset[0]))
    return out


def pack_region(
    region,
    pieces: PieceSet,
    multiplicity: str = UNLIMITED,
    allow_reflect: bool = True,
) -> list[Placement] | None:
    """One tiling of ``region`` by the pieces, or None."""
    for t in iter_packings(region, pieces, multiplicity, allow_reflect):
        return t
    return None


def iter_packings(region, pieces: PieceSet, multiplicity: str = UNLIMITED, allow_reflect: bool = True):
    region = frozenset(region)
    if not region:
        raise ValueError("region must have at least one cell")
    if multiplicity not in (EXACT_ONCE, UNLIMITED):
        raise ValueError(f"unknown multiplicity {multiplicity!r}")
    exact = multiplicity == EXACT_ONCE
    if exact and pieces.area != len(region):
        return
    index = {c: i for i, c in enumerate(sorted(region, key=lambda c: (c[1], c[0])))}
    pls = region_placements(region, pieces, allow_reflect, dedup_congruent=not exact)
    ncols = len(index) + (len(pieces.pieces) if exact else 0)
    rows = []
    for pl in pls:
        cols = [index[c] for c in pl.cover]
        if exact:
            cols.append(len(index) + pl.piece_id)
        rows.append(cols)
    m = CoverMatrix(ncols, rows)
    for sol in m.solutions():
        yield [pls[r] for r in sol]


# -- free polyomino enumeration ------------------------------------------------


_SHIFT = 64  # packs a cell as y * _SHIFT + x; shapes here stay far smaller


def _canon(cells, allow_reflect: bool) -> tuple[int, ...]:
    best = None
    xs = [x for x, _ in cells]
    ys = [y for _, y in cells]
    nx = [-x for x in xs]
    ny = [-y for y in ys]
    variants = [(xs, ys), (ny, xs), (nx, ny), (ys, nx)]
    if allow_reflect:
        variants += [(nx, ys), (ny, nx), (xs, ny), (ys, xs)]
    for vx, vy in variants:
        mx, my = min(vx), min(vy)
        key = tuple(sorted((b - my) * _SHIFT + (a - mx) for a, b in zip(vx, vy)))
        if best is None or key < best:
            best = key
    return best


@lru_cache(maxsize=None)
def polyominoes(n: int, allow_reflect: bool = True) -> tuple[frozenset[Cell], ...]:
    """Connected cell sets of size ``n`` up to congruence (free or one-sided)."""
    if n < 1:
        return ()
    if n == 1:
        return (frozenset({(0, 0)}),)
    seen = set()
    for shape in polyominoes(n - 1, allow_reflect):
        grow = {c for x, y in shape for c in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))} - shape
        for c in grow:
            seen.add(_canon(shape | {c}, allow_reflect))
    return tuple(frozenset((k % _SHIFT, k // _SHIFT) for k in key) for key in sorted(seen))


def polyomino_count(n: int, allow_reflect: bool = True) -> int:
    return len(polyominoes(n, allow_reflect))


# -- brute-force oracle ----------------------------------------------------------


@dataclass
class Census:
    minimal_area: int | None
    shapes: list[frozenset[Cell]]
    checked: int

    def strings(self) -> list[str]:
        return [to_rle(s) for s in self.shapes]


def _shape_order(s, allow_reflect: bool):
    return to_rle(cells_from_key(canonical_key(s, allow_reflect)))


def brute_force_common(
    inst: PuzzleInstance, max_area: int, cap: int = AREA_CAP, all_areas: bool = False
) -> Census:
    """Every goal of the smallest workable area, canonical and sorted."""
    if max_area > cap:
        raise AreaCapExceeded(f"max_area {max_area} exceeds the oracle cap {cap}")
    mult = EXACT_ONCE if inst.mode == Mode.SHAPE_LOGIC else UNLIMITED
    checked = 0
    for area in common_areas(inst, max_area):
        hits = []
        for shape in polyominoes(area, inst.allow_reflect):
            checked += 1
            if all(pack_region(shape, s, mult, inst.allow_reflect) is not None for s in inst.sets):
                hits.append(cells_from_key(canonical_key(shape, inst.allow_reflect)))
        if hits:
            hits.sort(key=lambda s: _shape_order(s, inst.allow_reflect))
            return Census(area, hits, checked)
    return Census(None, [], checked)


def brute_force_minimal_area(inst: PuzzleInstance, max_area: int, cap: int = AREA_CAP) -> int | None:
    return brute_force_common(inst, max_area, cap).minimal_area
