"""Puzzle instances, the named-piece catalog, area arithmetic and the verifier."""

from __future__ import annotations

import enum
import hashlib
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from .geometry import (
    Cell,
    Polyomino,
    canonical_key,
    from_rle,
    is_connected,
    normalize,
    parse_ascii,
    to_rle,
)
from .placement import Placement


class Mode(str, enum.Enum):
    SHAPE_LOGIC = "shape-logic"
    COMMON_MULTIPLE = "common-multiple"


class InstanceError(ValueError):
    pass


class UnknownPiece(InstanceError):
    pass


@lru_cache(maxsize=None)
def catalog() -> dict[str, Polyomino]:
    """Named pieces shipped in ``data/pieces`` (I1, I2, L3, T4, F5, ...)."""
    out = {}
    root = resources.files("polyshape") / "data" / "pieces"
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".txt"):
            name = entry.name[:-4]
            out[name] = parse_ascii(entry.read_text(), name=name)
    return out


def piece(name: str) -> Polyomino:
    try:
        return catalog()[name.upper()]
    except KeyError:
        raise UnknownPiece(f"no catalog piece named {name!r}") from None


def split_names(combo: str) -> list[str]:
    """``"F5Q4T4"`` -> ``["F5", "Q4", "T4"]``."""
    parts = re.findall(r"[A-Za-z]\d+", combo)
    if "".join(parts) != combo:
        raise UnknownPiece(f"cannot split {combo!r} into piece names")
    return [p.upper() for p in parts]


@dataclass(frozen=True)
class PieceSet:
    pieces: tuple[Polyomino, ...]
    label: str = ""

    def __post_init__(self):
        if not self.pieces:
            raise InstanceError(f"piece set {self.label!r} is empty")
        for p in self.pieces:
            if p.has_hole():
                raise InstanceError(f"piece {p.name or to_rle(p.cells)} has a hole")
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @classmethod
    def named(cls, *names: str, label: str = "") -> "PieceSet":
        return cls(tuple(piece(n) for n in names), label or "".join(names))

    @property
    def area(self) -> int:
        return sum(p.area for p in self.pieces)

    def __len__(self) -> int:
        return len(self.pieces)

    def describe(self) -> str:
        return self.label or "+".join(p.name or to_rle(p.cells) for p in self.pieces)


@dataclass(frozen=True)
class PuzzleInstance:
    mode: Mode
    sets: tuple[PieceSet, ...]
    allow_reflect: bool = True
    limits: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "sets", tuple(self.sets))
        if not 2 <= len(self.sets) <= 3:
            raise InstanceError(f"need 2 or 3 piece sets, got {len(self.sets)}")

    @classmethod
    def common(cls, *sets: PieceSet | str, allow_reflect: bool = True) -> "PuzzleInstance":
        return cls(Mode.COMMON_MULTIPLE, tuple(_as_set(s) for s in sets), allow_reflect)

    @classmethod
    def logic(cls, *sets: PieceSet | str, allow_reflect: bool = True) -> "PuzzleInstance":
        return cls(Mode.SHAPE_LOGIC, tuple(_as_set(s) for s in sets), allow_reflect)

    def equal_areas(self) -> bool:
        return len({s.area for s in self.sets}) == 1

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "sets": [
                {"label": s.label, "pieces": [to_rle(p.cells) for p in s.pieces]}
                for s in self.sets
            ],
            "allow_reflect": self.allow_reflect,
            "limits": dict(self.limits),
        }

    def instance_id(self) -> str:
        body = {k: v for k, v in self.to_json().items() if k != "limits"}
        blob = json.dumps(body, sort_keys=True).encode()
        return hashlib.sha1(blob).hexdigest()[:12]


def _as_set(s: PieceSet | str) -> PieceSet:
    if isinstance(s, PieceSet):
        return s
    return PieceSet.named(*split_names(s), label=s)


def _piece_from_json(spec) -> Polyomino:
    if isinstance(spec, dict):
        if "ascii" in spec:
            return parse_ascii(spec["ascii"], name=spec.get("name", ""))
        if "rle" in spec:
            return Polyomino(from_rle(spec["rle"]), spec.get("name", ""))
        raise InstanceError(f"piece entry needs 'ascii' or 'rle': {spec!r}")
    if ":" in spec:
        return Polyomino(from_rle(spec))
    return piece(spec)


def instance_from_json(data: dict) -> PuzzleInstance:
    """Instance file: ``{"mode", "sets": [{"label", "pieces": [...]}], ...}``.

    A piece entry is a catalog name, an RLE string, or ``{"ascii": ...}``.
    A set may also be a plain combo string such as ``"T5"``.
    """
    sets = []
    for i, s in enumerate(data["sets"]):
        if isinstance(s, str):
            sets.append(_as_set(s))
            continue
        pieces = []
        for spec in s["pieces"]:
            count = spec.get("count", 1) if isinstance(spec, dict) else 1
            pieces.extend([_piece_from_json(spec)] * count)
        sets.append(PieceSet(tuple(pieces), s.get("label", f"S{i + 1}")))
    return PuzzleInstance(
        Mode(data.get("mode", Mode.COMMON_MULTIPLE.value)),
        tuple(sets),
        bool(data.get("allow_reflect", True)),
        dict(data.get("limits", {})),
    )


def feasible_areas(
    pieces: PieceSet, limit: int, mode: Mode = Mode.COMMON_MULTIPLE
) -> list[int]:
    """Areas up to ``limit`` reachable by the set (copies allowed unless shape logic)."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if mode == Mode.SHAPE_LOGIC:
        return [pieces.area] if pieces.area <= limit else []
    sizes = sorted({p.area for p in pieces.pieces})
    reach = [False] * (limit + 1)
    reach[0] = True
    for a in range(1, limit + 1):
        reach[a] = any(s <= a and reach[a - s] for s in sizes)
    return [a for a in range(1, limit + 1) if reach[a]]


def common_areas(inst: PuzzleInstance, limit: int) -> list[int]:
    common = None
    for s in inst.sets:
        areas = set(feasible_areas(s, limit, inst.mode))
        common = areas if common is None else common & areas
    return sorted(common)


@dataclass(frozen=True)
class Solution:
    goal: frozenset[Cell]
    tilings: tuple[tuple[Placement, ...], ...]

    @property
    def area(self) -> int:
        return len(self.goal)

    def normalized(self) -> "Solution":
        xs = [x for x, _ in self.goal]
        ys = [y for _, y in self.goal]
        dx, dy = min(xs), min(ys)
        if dx == 0 and dy == 0:
            return self

        def shift(p: Placement) -> Placement:
            cover = frozenset((x - dx, y - dy) for x, y in p.cover)
            return Placement(p.piece_id, p.orientation_id, (p.offset[0] - dx, p.offset[1] - dy), cover)

        return Solution(
            normalize(self.goal),
            tuple(tuple(shift(p) for p in t) for t in self.tilings),
        )

    def to_json(self) -> dict:
        return {
            "goal": to_rle(self.goal),
            "area": self.area,
            "tilings": [
                [{"piece": p.piece_id, "cells": sorted(map(list, p.cover))} for p in t]
                for t in self.tilings
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Solution":
        goal = from_rle(data["goal"])
        tilings = tuple(
            tuple(
                Placement(int(p["piece"]), -1, (0, 0), frozenset(tuple(c) for c in p["cells"]))
                for p in t
            )
            for t in data["tilings"]
        )
        return cls(goal, tilings)


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


@dataclass
class VerifyReport:
    ok: bool
    violations: list[Violation]

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def verify_solution(
    inst: PuzzleInstance, sol: Solution, check_connectivity: bool = True
) -> VerifyReport:
    """Check a certificate against an instance; never raises on bad input."""
    bad: list[Violation] = []
    goal = frozenset(sol.goal)
    if not goal:
        bad.append(Violation("EmptyGoal", "goal has no cells"))
    elif check_connectivity and not is_connected(goal):
        bad.append(Violation("Disconnected", "goal is not edge-connected"))
    if len(sol.tilings) != len(inst.sets):
        bad.append(
            Violation("SetCount", f"{len(sol.tilings)} tilings for {len(inst.sets)} sets")
        )
    for si, (pset, tiling) in enumerate(zip(inst.sets, sol.tilings)):
        tag = pset.label or f"S{si + 1}"
        keys = [canonical_key(p.cells, inst.allow_reflect) for p in pset.pieces]
        covered: dict[Cell, int] = {}
        uses = [0] * len(pset.pieces)
        for pi, pl in enumerate(tiling):
            if not 0 <= pl.piece_id < len(pset.pieces):
                bad.append(Violation("BadPiece", f"{tag} placement {pi}: piece {pl.piece_id}"))
                continue
            uses[pl.piece_id] += 1
            cover = pl.cover
            if not cover or canonical_key(cover, inst.allow_reflect) != keys[pl.piece_id]:
                bad.append(
                    Violation("NotCongruent", f"{tag} placement {pi} is not piece {pl.piece_id}")
                )
            for c in cover:
                if c in covered:
                    bad.append(
                        Violation("Overlap", f"{tag} cell {c} covered by {covered[c]} and {pi}")
                    )
                else:
                    covered[c] = pi
        outside = set(covered) - goal
        if outside:
            bad.append(Violation("OutsideGoal", f"{tag} covers {len(outside)} cell(s) off the goal"))
        missing = goal - set(covered)
        if missing:
            bad.append(Violation("Uncovered", f"{tag} leaves {len(missing)} goal cell(s) empty"))
        if inst.mode == Mode.SHAPE_LOGIC:
            wrong = [i for i, u in enumerate(uses) if u != 1]
            if wrong:
                bad.append(Violation("Usage", f"{tag} pieces {wrong} not used exactly once"))
        elif not tiling:
            bad.append(Violation("Usage", f"{tag} uses no copies"))
    if inst.mode == Mode.SHAPE_LOGIC and not inst.equal_areas():
        bad.append(Violation("AreaMismatch", "piece sets have different total areas"))
    return VerifyReport(not bad, bad)


def certificate_json(inst: PuzzleInstance, sol: Solution) -> dict:
    return {"instance": inst.to_json(), "solution": sol.to_json()}


def load_certificate(data: dict) -> tuple[PuzzleInstance, Solution]:
    return instance_from_json(data["instance"]), Solution.from_json(data["solution"])


def named_sets(names: Sequence[str] | Iterable[str]) -> tuple[PieceSet, ...]:
    return tuple(_as_set(n) for n in names)
