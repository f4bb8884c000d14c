"""CNF encodings of common-shape puzzles over a fixed bounding box.

Every box cell ``c`` has one goal indicator ``y[c]`` and every placement an
``x`` variable.  Each cell is covered by at most one placement per set, and
for every set ``y[c]`` is the OR of that set's placements covering ``c``; so a
cell is covered by every set or by none.  ``VarMap.y`` keeps one entry per
set, all pointing at the same list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cnf import CnfFormula, at_most_one, cardinality_equals, exactly_one
from .geometry import Cell, canonical_key
from .instance import Mode, PuzzleInstance, Solution, feasible_areas
from .placement import DEFAULT_CELL_LIMIT, Box, Placement, enumerate_placements


class EncodingError(ValueError):
    pass


class InfeasibleArea(EncodingError):
    pass


class BoxTooSmall(EncodingError):
    pass


class UnequalAreas(EncodingError):
    pass


class InternalInconsistency(RuntimeError):
    pass


# Tightness: "full" pins the goal's bounding box to exactly the box; "origin"
# only requires row 0 and column 0 to be occupied (the goal fits in the box).
TIGHT_FULL = "full"
TIGHT_ORIGIN = "origin"


@dataclass
class VarMap:
    box: Box
    placements: list[list[Placement]]
    x: list[list[int]]
    y: list[list[int]]
    # shape-logic: piece ids sharing one placement list, per set
    groups: list[list[list[int]]] = field(default_factory=list)
    aux: int = 0

    def y_goal(self, c: Cell) -> int:
        return self.y[0][self.box.index(c)]


def _piece_groups(pieces, allow_reflect: bool) -> list[list[int]]:
    """Indices of congruent pieces grouped together, in first-seen order."""
    groups: dict[tuple, list[int]] = {}
    for i, p in enumerate(pieces):
        groups.setdefault(canonical_key(p.cells, allow_reflect), []).append(i)
    return list(groups.values())


def _base(inst: PuzzleInstance, box: Box, f: CnfFormula, tight: str, cell_limit: int, symmetry: bool = True):
    vm = VarMap(box, [], [], [])
    ncell = box.cells
    for s in inst.sets:
        groups = _piece_groups(s.pieces, inst.allow_reflect)
        pls = []
        for g in groups:
            pls += enumerate_placements(s.pieces[g[0]], box, inst.allow_reflect, g[0], cell_limit)
        vm.groups.append(groups)
        vm.placements.append(pls)
        vm.x.append(f.new_vars(len(pls)))
    # one goal indicator per cell, shared by every set
    goal = f.new_vars(ncell)
    vm.y = [goal for _ in inst.sets]
    for si in range(len(inst.sets)):
        covering: list[list[int]] = [[] for _ in range(ncell)]
        for pl, xv in zip(vm.placements[si], vm.x[si]):
            for c in pl.cover:
                covering[box.index(c)].append(xv)
        for ci in range(ncell):
            lits = covering[ci]
            y = vm.y[si][ci]
            at_most_one(f, lits)
            f.add_clause([-y, *lits])
            for xv in lits:
                f.add_clause([-xv, y])
    W, H = box.width, box.height
    lines = [[vm.y[0][box.index((x, 0))] for x in range(W)], [vm.y[0][box.index((0, y))] for y in range(H)]]
    if tight == TIGHT_FULL:
        lines += [
            [vm.y[0][box.index((x, H - 1))] for x in range(W)],
            [vm.y[0][box.index((W - 1, y))] for y in range(H)],
        ]
    elif tight != TIGHT_ORIGIN:
        raise EncodingError(f"unknown tightness {tight!r}")
    for line in lines:
        f.add_clause(line)
    if tight == TIGHT_FULL and symmetry:
        _lex_leader(f, vm, inst.allow_reflect)
    return vm


def box_symmetries(box: Box, allow_reflect: bool):
    """Non-identity symmetries of the box as cell maps.  Reflections are
    only symmetries of the puzzle when pieces may be reflected."""
    W, H = box.width, box.height
    maps = [lambda x, y: (W - 1 - x, H - 1 - y)]
    if W == H:
        maps += [lambda x, y: (W - 1 - y, x), lambda x, y: (y, W - 1 - x)]
    if allow_reflect:
        maps += [lambda x, y: (W - 1 - x, y), lambda x, y: (x, H - 1 - y)]
        if W == H:
            maps += [lambda x, y: (y, x), lambda x, y: (W - 1 - y, W - 1 - x)]
    return maps


def _lex_leader(f: CnfFormula, vm: VarMap, allow_reflect: bool) -> None:
    """Keep only goals that are lexicographically no larger (row-major) than
    each of their images under the box symmetries.  Every orbit keeps its
    smallest member, so satisfiability is unchanged."""
    box, y = vm.box, vm.y[0]
    order = [(x, yy) for yy in range(box.height) for x in range(box.width)]
    for sym in box_symmetries(box, allow_reflect):
        eq = None  # true while the prefix compared so far is equal
        for c in order:
            d = sym(*c)
            if d == c:
                continue
            a, b = y[box.index(c)], y[box.index(d)]
            pre = [] if eq is None else [-eq]
            f.add_clause([*pre, -a, b])
            nxt = f.new_var()
            f.add_clause([*pre, -a, -b, nxt])
            f.add_clause([*pre, a, b, nxt])
            eq = nxt


def encode_common_multiple(
    inst: PuzzleInstance,
    box: Box,
    area: int,
    tight: str = TIGHT_FULL,
    cell_limit: int = DEFAULT_CELL_LIMIT,
    symmetry: bool = True,
) -> tuple[CnfFormula, VarMap]:
    if area > box.cells:
        raise BoxTooSmall(f"area {area} exceeds box {box}")
    for s in inst.sets:
        if area not in feasible_areas(s, area, Mode.COMMON_MULTIPLE):
            raise InfeasibleArea(f"area {area} is not a sum of piece areas of {s.describe()}")
    f = CnfFormula()
    vm = _base(inst, box, f, tight, cell_limit, symmetry)
    for si, s in enumerate(inst.sets):
        if not vm.placements[si]:
            raise BoxTooSmall(f"no piece of {s.describe()} fits in box {box}")
    cardinality_equals(f, vm.y[0], area)
    vm.aux = f.num_vars - sum(len(x) for x in vm.x) - box.cells
    return f, vm


def encode_shape_logic(
    inst: PuzzleInstance,
    box: Box,
    tight: str = TIGHT_FULL,
    cell_limit: int = DEFAULT_CELL_LIMIT,
    symmetry: bool = True,
) -> tuple[CnfFormula, VarMap]:
    """Every piece used exactly once.  Congruent pieces share one placement
    list with a cardinality constraint equal to their multiplicity."""
    if not inst.equal_areas():
        raise UnequalAreas("piece sets have different total areas")
    area = inst.sets[0].area
    if area > box.cells:
        raise BoxTooSmall(f"total area {area} exceeds box {box}")
    f = CnfFormula()
    vm = _base(inst, box, f, tight, cell_limit, symmetry)
    for si, groups in enumerate(vm.groups):
        for g in groups:
            lits = [xv for pl, xv in zip(vm.placements[si], vm.x[si]) if pl.piece_id == g[0]]
            if not lits:
                raise BoxTooSmall(f"piece {g[0]} of set {si} does not fit in box {box}")
            if len(g) == 1:
                exactly_one(f, lits)
            else:
                cardinality_equals(f, lits, len(g))
    vm.aux = f.num_vars - sum(len(x) for x in vm.x) - box.cells
    return f, vm


def decode(model, vm: VarMap, inst: PuzzleInstance, box: Box | None = None) -> Solution:
    box = box or vm.box
    goal = frozenset(box.cell(ci) for ci, y in enumerate(vm.y[0]) if model[y])
    tilings = []
    for si in range(len(inst.sets)):
        chosen = [pl for pl, xv in zip(vm.placements[si], vm.x[si]) if model[xv]]
        union: set[Cell] = set()
        for pl in chosen:
            if union & pl.cover:
                raise InternalInconsistency(f"set {si}: overlapping placements selected")
            union |= pl.cover
        if union != goal:
            raise InternalInconsistency(f"set {si}: covers disagree with cell indicators")
        if inst.mode == Mode.SHAPE_LOGIC and vm.groups:
            # hand out concrete piece ids to copies of congruent pieces
            pool = {g[0]: list(g) for g in vm.groups[si]}
            relabeled = []
            for pl in chosen:
                ids = pool[pl.piece_id]
                if not ids:
                    raise InternalInconsistency(f"set {si}: too many copies of piece {pl.piece_id}")
                relabeled.append(Placement(ids.pop(0), pl.orientation_id, pl.offset, pl.cover, pl.mask))
            chosen = relabeled
        tilings.append(tuple(chosen))
    if not goal:
        raise InternalInconsistency("model selects an empty goal")
    return Solution(goal, tuple(tilings)).normalized()


def block_goal(f: CnfFormula, vm: VarMap, goal) -> None:
    """Exclude exactly this goal cell set (in box coordinates)."""
    goal = set(goal)
    for c in goal:
        if not vm.box.contains(c):
            raise ValueError(f"goal cell {c} lies outside box {vm.box}")
    clause = []
    for ci, y in enumerate(vm.y[0]):
        clause.append(-y if vm.box.cell(ci) in goal else y)
    f.add_clause(clause)


def goal_in_box(vm: VarMap, model) -> frozenset[Cell]:
    return frozenset(vm.box.cell(ci) for ci, y in enumerate(vm.y[0]) if model[y])


def expected_var_count(vm: VarMap) -> int:
    return sum(len(p) for p in vm.placements) + vm.box.cells + vm.aux
