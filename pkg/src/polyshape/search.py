"""The outer search loop over (area, box) cells.

Each cell pins the goal area and the goal's bounding box, encodes the puzzle,
and asks the SAT backend.  Disconnected goals are excluded one at a time with
blocking clauses.  A JSONL ledger records the verdict of every cell so that a
minimal-area claim can be checked against it and interrupted runs resume.
"""

from __future__ import annotations

import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterator

from .cnf import SAT, UNKNOWN, UNSAT, Budget, Session
from .encoders import (
    TIGHT_FULL,
    TIGHT_ORIGIN,
    BoxTooSmall,
    InfeasibleArea,
    block_goal,
    decode,
    encode_common_multiple,
    encode_shape_logic,
    goal_in_box,
)
from .geometry import Polyomino, canonical_key, is_connected, normalize, orientations, to_rle
from .instance import Mode, PuzzleInstance, Solution, common_areas, feasible_areas, verify_solution
from .placement import DEFAULT_CELL_LIMIT, Box

log = logging.getLogger(__name__)

REPAIR_CAP = 10_000


class SearchError(RuntimeError):
    pass


class LedgerMismatch(SearchError):
    pass


def box_family(area: int) -> list[Box]:
    """All W x H with W <= H, W*H >= area and H <= area, by (W*H, W)."""
    out = []
    for w in range(1, area + 1):
        for h in range(w, area + 1):
            if w * h >= area:
                out.append(Box(w, h))
    out.sort(key=lambda b: (b.cells, b.width))
    return out


def _span(p) -> int:
    return p.width + p.height - 1


@lru_cache(maxsize=4096)
def _dims(cells: frozenset, allow_reflect: bool) -> tuple[tuple[int, int], ...]:
    return tuple(sorted({(o.width, o.height) for o in orientations(Polyomino(cells), allow_reflect)}))


def _fits(p, box: Box, allow_reflect: bool) -> bool:
    return any(w <= box.width and h <= box.height for w, h in _dims(p.cells, allow_reflect))


def _fit_extent(p, box: Box, allow_reflect: bool) -> tuple[int, int]:
    """Largest width and largest height ``p`` can take while inside ``box``."""
    w = h = 0
    for ow, oh in _dims(p.cells, allow_reflect):
        if ow <= box.width and oh <= box.height:
            w, h = max(w, ow), max(h, oh)
    return w, h


def prune_reason(inst: PuzzleInstance, box: Box, area: int) -> str | None:
    """A proof that no connected goal of ``area`` has bounding box exactly ``box``.

    Only valid for full tightness.  Uses: every shape-logic piece must fit; a
    connected union of pieces has W + H - 1 <= sum of (w_i + h_i - 1); every
    column (row) of the box meets some piece, so W (H) is at most the summed
    widths (heights) the pieces can take inside the box.
    """
    W, H = box.width, box.height
    if W * H < area:
        return "box smaller than area"
    if W + H - 1 > area:
        return "span exceeds area"
    for si, s in enumerate(inst.sets):
        tag = s.label or f"S{si + 1}"
        if inst.mode == Mode.SHAPE_LOGIC:
            for p in s.pieces:
                if not _fits(p, box, inst.allow_reflect):
                    return f"{tag}: piece {p.name or to_rle(p.cells)} does not fit"
            if W + H - 1 > sum(_span(p) for p in s.pieces):
                return f"{tag}: span exceeds sum of piece spans"
            ext = [_fit_extent(p, box, inst.allow_reflect) for p in s.pieces]
            if W > sum(e[0] for e in ext) or H > sum(e[1] for e in ext):
                return f"{tag}: pieces cannot reach across the box"
        else:
            usable = [p for p in s.pieces if _fits(p, box, inst.allow_reflect)]
            if not usable:
                return f"{tag}: no piece fits"
            sub = type(s)(tuple(usable), s.label)
            if area not in feasible_areas(sub, area, inst.mode):
                return f"{tag}: fitting pieces cannot make the area"
            ratio = max(_span(p) / p.area for p in usable)
            if W + H - 1 > ratio * area + 1e-9:
                return f"{tag}: span exceeds copy-span bound"
            ext = [(_fit_extent(p, box, inst.allow_reflect), p.area) for p in usable]
            if W > max(e[0] / a for e, a in ext) * area + 1e-9 or H > max(e[1] / a for e, a in ext) * area + 1e-9:
                return f"{tag}: copies cannot reach across the box"
    return None


@dataclass
class Schedule:
    max_area: int = 64
    min_area: int = 1
    conflicts: int | None = None
    seconds: float | None = None
    tight: str = TIGHT_FULL
    all_areas: bool = False  # keep going after the first solved area
    prune: bool = True
    repair_cap: int = REPAIR_CAP
    cell_limit: int = DEFAULT_CELL_LIMIT
    total_seconds: float | None = None  # wall clock for the whole run

    def budget(self) -> Budget:
        return Budget(self.conflicts, self.seconds)

    def stop_time(self) -> float | None:
        return None if self.total_seconds is None else time.monotonic() + self.total_seconds

    def areas(self, inst: PuzzleInstance) -> list[int]:
        return [a for a in common_areas(inst, self.max_area) if a >= self.min_area]

    def boxes(self, area: int) -> list[Box]:
        return box_family(area)


@dataclass
class CellResult:
    area: int
    box: Box
    status: str
    solution: Solution | None = None
    wall_ms: float = 0.0
    conflicts: int = 0
    blocks: int = 0
    reason: str = ""

    def record(self, inst: PuzzleInstance) -> dict:
        rec = {
            "instance_id": inst.instance_id(),
            "sets": [s.describe() for s in inst.sets],
            "mode": inst.mode.value,
            "box": [self.box.width, self.box.height],
            "area": self.area,
            "status": self.status,
            "wall_ms": round(self.wall_ms, 3),
            "conflicts": self.conflicts,
        }
        if self.reason:
            rec["reason"] = self.reason
        if self.blocks:
            rec["blocks"] = self.blocks
        if self.solution is not None:
            sj = self.solution.to_json()
            rec["shape_rle"] = sj["goal"]
            rec["tilings"] = sj["tilings"]
        return rec


def solve_cell(
    inst: PuzzleInstance,
    box: Box,
    area: int | None = None,
    tight: str = TIGHT_FULL,
    budget: Budget | None = None,
    backend: str | None = None,
    repair_cap: int = REPAIR_CAP,
    prune: bool = True,
    cell_limit: int = DEFAULT_CELL_LIMIT,
) -> CellResult:
    """Decide one (area, box) cell, repairing disconnected goals by blocking."""
    t0 = time.monotonic()
    if area is None:
        area = inst.sets[0].area
    res = CellResult(area, box, UNKNOWN)
    if prune and tight == TIGHT_FULL:
        why = prune_reason(inst, box, area)
        if why:
            res.status, res.reason = UNSAT, why
            return res
    if box.cells > cell_limit:
        res.reason = f"box exceeds the {cell_limit}-cell limit"
        return res
    try:
        if inst.mode == Mode.SHAPE_LOGIC:
            f, vm = encode_shape_logic(inst, box, tight, cell_limit)
        else:
            f, vm = encode_common_multiple(inst, box, area, tight, cell_limit)
    except (BoxTooSmall, InfeasibleArea) as e:
        res.status, res.reason = UNSAT, str(e)
        return res
    budget = budget or Budget()
    deadline = None if budget.seconds is None else t0 + budget.seconds
    session = Session(f, backend)
    while True:
        left = None if deadline is None else deadline - time.monotonic()
        if left is not None and left <= 0:
            res.status = UNKNOWN
            break
        v = session.solve((), Budget(budget.conflicts, left))
        res.conflicts += v.conflicts
        if not v.sat:
            res.status = v.status
            break
        goal = goal_in_box(vm, v.model)
        if is_connected(goal):
            res.solution = decode(v.model, vm, inst, box)
            res.status = SAT
            break
        if res.blocks >= repair_cap:
            res.status, res.reason = UNKNOWN, "repair cap reached"
            break
        block_goal(f, vm, goal)
        res.blocks += 1
    res.wall_ms = (time.monotonic() - t0) * 1000.0
    return res


def _cell_task(args) -> CellResult:
    return solve_cell(*args)


# -- ledger --------------------------------------------------------------------


@dataclass
class Ledger:
    """Verdict per (area, W, H); optionally mirrored to a JSONL file."""

    path: Path | None = None
    instance_id: str = ""
    cells: dict[tuple[int, int, int], dict] = field(default_factory=dict)

    @classmethod
    def open(cls, path, inst: PuzzleInstance) -> "Ledger":
        led = cls(Path(path) if path else None, inst.instance_id())
        if led.path and led.path.exists():
            for line in led.path.read_text().splitlines():
                if not line.strip():
                    continue
                rec = json.loads(line)
                if rec.get("instance_id") != led.instance_id:
                    continue
                led.cells[(rec["area"], *rec["box"])] = rec
        return led

    def status(self, area: int, box: Box) -> str | None:
        rec = self.cells.get((area, box.width, box.height))
        return rec["status"] if rec else None

    def done(self, area: int, box: Box) -> bool:
        return self.status(area, box) in (SAT, UNSAT)

    def add(self, rec: dict) -> None:
        self.cells[(rec["area"], *rec["box"])] = rec
        if self.path:
            with self.path.open("a") as fh:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    def solution(self, area: int, box: Box) -> Solution | None:
        rec = self.cells.get((area, box.width, box.height))
        if not rec or "shape_rle" not in rec:
            return None
        return Solution.from_json({"goal": rec["shape_rle"], "tilings": rec["tilings"]})

    def exhausted(self, area: int, boxes: list[Box]) -> bool:
        return all(self.status(area, b) == UNSAT for b in boxes)

    def check_minimal(self, area: int, smaller: list[int], family: Callable[[int], list[Box]]) -> None:
        """Raise unless every smaller area is unsat in every box of its family."""
        for a in smaller:
            if a >= area:
                continue
            for b in family(a):
                st = self.status(a, b)
                if st != UNSAT:
                    raise LedgerMismatch(f"area {area} claimed minimal but cell {a}@{b} is {st}")


# -- common multiple -------------------------------------------------------------


@dataclass
class Found:
    area: int
    box: Box
    solution: Solution
    minimal: bool


@dataclass
class SearchResult:
    found: list[Found]
    ledger: Ledger
    areas: list[int]

    @property
    def first(self) -> Found | None:
        return self.found[0] if self.found else None

    @property
    def minimal_area(self) -> int | None:
        for f in self.found:
            if f.minimal:
                return f.area
        return None


def _run_cells(inst, boxes, area, schedule, backend, jobs, ledger, stop=None) -> Iterator[CellResult]:
    """Decide the cells of one area in box order; stops at the first Sat when
    serial.  Cells not started before ``stop`` are recorded as unknown."""
    todo = []
    for b in boxes:
        if ledger.done(area, b):
            st = ledger.status(area, b)
            yield CellResult(area, b, st, ledger.solution(area, b) if st == SAT else None, reason="resumed")
            if st == SAT and jobs <= 1:
                return
            continue
        todo.append(b)
    args = [
        (inst, b, area, schedule.tight, schedule.budget(), backend, schedule.repair_cap, schedule.prune, schedule.cell_limit)
        for b in todo
    ]
    if jobs <= 1:
        for a in args:
            left = None if stop is None else stop - time.monotonic()
            if left is not None and left <= 0:
                r = CellResult(area, a[1], UNKNOWN, reason="schedule deadline")
            else:
                if left is not None:
                    cap = left if a[4].seconds is None else min(left, a[4].seconds)
                    a = (*a[:4], Budget(a[4].conflicts, cap), *a[5:])
                r = _cell_task(a)
            ledger.add(r.record(inst))
            yield r
            if r.status == SAT:
                return
        return
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        results = list(ex.map(_cell_task, args))
    for r in results:
        ledger.add(r.record(inst))
        yield r


def search_common_multiple(
    inst: PuzzleInstance,
    schedule: Schedule | None = None,
    ledger: Ledger | None = None,
    backend: str | None = None,
    jobs: int = 1,
) -> Iterator[CellResult | Found]:
    """Stream cell verdicts and found solutions, smallest area first."""
    schedule = schedule or Schedule()
    ledger = ledger if ledger is not None else Ledger(None, inst.instance_id())
    areas = schedule.areas(inst)
    stop = schedule.stop_time()
    proven = True  # every smaller area exhausted so far
    for area in areas:
        boxes = schedule.boxes(area)
        best: CellResult | None = None
        for r in _run_cells(inst, boxes, area, schedule, backend, jobs, ledger, stop):
            yield r
            if r.status == SAT and best is None:
                best = r  # earliest box in order, also under parallel runs
        if best is not None:
            skipped = any(a < schedule.min_area for a in common_areas(inst, area))
            minimal = proven and not skipped
            if minimal:
                ledger.check_minimal(area, areas, schedule.boxes)
            yield Found(area, best.box, best.solution, minimal)
            if not schedule.all_areas:
                return
            proven = False
        elif not ledger.exhausted(area, boxes):
            proven = False


def find_common_multiple(
    inst: PuzzleInstance,
    schedule: Schedule | None = None,
    ledger: Ledger | None = None,
    backend: str | None = None,
    jobs: int = 1,
) -> SearchResult:
    schedule = schedule or Schedule()
    ledger = ledger if ledger is not None else Ledger(None, inst.instance_id())
    found = [
        e
        for e in search_common_multiple(inst, schedule, ledger, backend, jobs)
        if isinstance(e, Found)
    ]
    return SearchResult(found, ledger, schedule.areas(inst))


# -- shape logic ----------------------------------------------------------------


@dataclass
class LogicResult:
    status: str  # "found", "none" or "unknown"
    solution: Solution | None
    ledger: Ledger
    box: Box | None = None


FOUND, NO_SOLUTION, UNKNOWN_RESULT = "found", "none", "unknown"


def find_shape_logic(
    inst: PuzzleInstance,
    schedule: Schedule | None = None,
    ledger: Ledger | None = None,
    backend: str | None = None,
    jobs: int = 1,
) -> LogicResult:
    schedule = schedule or Schedule()
    ledger = ledger if ledger is not None else Ledger(None, inst.instance_id())
    if inst.mode != Mode.SHAPE_LOGIC:
        inst = PuzzleInstance(Mode.SHAPE_LOGIC, inst.sets, inst.allow_reflect, inst.limits)
    if not inst.equal_areas():
        return LogicResult(NO_SOLUTION, None, ledger)
    area = inst.sets[0].area
    boxes = schedule.boxes(area)
    for r in _run_cells(inst, boxes, area, schedule, backend, jobs, ledger, schedule.stop_time()):
        if r.status == SAT:
            return LogicResult(FOUND, r.solution, ledger, r.box)
    if ledger.exhausted(area, boxes):
        return LogicResult(NO_SOLUTION, None, ledger)
    return LogicResult(UNKNOWN_RESULT, None, ledger)


# -- bounded sweep and enumeration ------------------------------------------------


def sweep_boxes(n: int) -> list[Box]:
    """The boxes i x floor(n / i) for 1 <= i <= sqrt(n)."""
    return [Box(i, n // i) for i in range(1, math.isqrt(n) + 1)]


@dataclass
class SweepCell:
    area: int
    box: Box
    solved_box: Box
    status: str
    reason: str = ""
    wall_ms: float = 0.0
    solution: Solution | None = None


def sweep(
    inst: PuzzleInstance,
    n: int = 625,
    max_area: int = 60,
    seconds: float | None = 5.0,
    backend: str | None = None,
    jobs: int = 1,
) -> list[SweepCell]:
    """Ask every sweep box for a connected goal of each feasible area <= max_area.

    A goal only has to fit in the box (origin tightness).  Sides longer than
    the area are clipped, which loses nothing since a connected goal of area A
    has both bounding-box sides at most A.
    """
    out: list[SweepCell] = []
    tasks = []
    for area in common_areas(inst, max_area):
        for b in sweep_boxes(n):
            solved = Box(min(b.width, area), min(b.height, area))
            tasks.append((area, b, solved))
    args = [
        (inst, s, a, TIGHT_ORIGIN, Budget(None, seconds), backend, REPAIR_CAP, False, DEFAULT_CELL_LIMIT)
        for a, _, s in tasks
    ]
    if jobs <= 1:
        results = [_cell_task(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_cell_task, args))
    for (area, b, s), r in zip(tasks, results):
        out.append(SweepCell(area, b, s, r.status, r.reason, r.wall_ms, r.solution))
    return out


def enumerate_goals(
    inst: PuzzleInstance,
    box: Box,
    area: int | None = None,
    tight: str = TIGHT_FULL,
    backend: str | None = None,
    limit: int = 100_000,
) -> list[frozenset]:
    """All distinct connected goals (up to congruence) with this box and area."""
    if area is None:
        area = inst.sets[0].area
    try:
        if inst.mode == Mode.SHAPE_LOGIC:
            f, vm = encode_shape_logic(inst, box, tight)
        else:
            f, vm = encode_common_multiple(inst, box, area, tight)
    except (BoxTooSmall, InfeasibleArea):
        return []
    session = Session(f, backend)
    seen = {}
    for _ in range(limit):
        v = session.solve()
        if not v.sat:
            break
        goal = goal_in_box(vm, v.model)
        block_goal(f, vm, goal)
        if is_connected(goal):
            seen.setdefault(canonical_key(goal, inst.allow_reflect), normalize(goal))
    else:
        raise SearchError(f"more than {limit} goals")
    return [seen[k] for k in sorted(seen)]


def check_solution(inst: PuzzleInstance, sol: Solution) -> None:
    rep = verify_solution(inst, sol)
    if not rep.ok:
        raise SearchError("; ".join(map(str, rep.violations)))


def default_jobs() -> int:
    return os.cpu_count() or 1
