"""ASCII and SVG renderings of a solution, one panel per piece set."""

from __future__ import annotations

import random
import string

from .geometry import Cell, normalize
from .instance import Solution

CELL = 20
LETTERS = string.ascii_uppercase + string.ascii_lowercase + string.digits
EMPTY = "."


def _copy_maps(sol: Solution) -> list[dict[Cell, int]]:
    """Cell -> index of the covering piece copy, per set, in goal coordinates."""
    xs = [x for x, _ in sol.goal]
    ys = [y for _, y in sol.goal]
    dx, dy = min(xs), min(ys)
    out = []
    for tiling in sol.tilings:
        owner = {}
        for k, pl in enumerate(tiling):
            for x, y in pl.cover:
                owner[(x - dx, y - dy)] = k
        out.append(owner)
    return out


def render_ascii(sol: Solution) -> str:
    """One grid per set, separated by blank lines.  Each piece copy gets its
    own letter; letters are reused cyclically after 62 copies."""
    goal = normalize(sol.goal)
    W = max(x for x, _ in goal) + 1
    H = max(y for _, y in goal) + 1
    grids = []
    for owner in _copy_maps(sol):
        rows = []
        for y in range(H):
            rows.append("".join(LETTERS[owner[(x, y)] % len(LETTERS)] if (x, y) in owner else EMPTY for x in range(W)))
        grids.append("\n".join(rows))
    return "\n\n".join(grids) + "\n"


def parse_grids(text: str) -> list[frozenset[Cell]]:
    """Filled cells of each grid written by :func:`render_ascii`."""
    out = []
    for block in text.strip("\n").split("\n\n"):
        cells = {
            (x, y)
            for y, line in enumerate(block.split("\n"))
            for x, ch in enumerate(line)
            if ch not in (EMPTY, " ")
        }
        out.append(normalize(cells))
    return out


def palette(n: int, seed: int = 0) -> list[str]:
    rng = random.Random(seed)
    cols = []
    for i in range(n):
        hue = (i * 137 + rng.randrange(40)) % 360
        sat = 45 + rng.randrange(30)
        light = 55 + rng.randrange(20)
        cols.append(f"hsl({hue},{sat}%,{light}%)")
    return cols


def render_svg(sol: Solution, seed: int = 0) -> str:
    """Side-by-side tilings.  Fill color follows the piece (so copies of one
    piece share it); darker lines separate neighbouring copies."""
    goal = normalize(sol.goal)
    W = max(x for x, _ in goal) + 1
    H = max(y for _, y in goal) + 1
    nids = max((pl.piece_id for t in sol.tilings for pl in t), default=0) + 1
    colors = [palette(nids, seed * 1000 + si) for si in range(len(sol.tilings))]
    pieces_of = [{} for _ in sol.tilings]
    for si, t in enumerate(sol.tilings):
        for k, pl in enumerate(t):
            pieces_of[si][k] = pl.piece_id
    gap = 1
    total_w = (W * len(sol.tilings) + gap * (len(sol.tilings) - 1)) * CELL
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{H * CELL}" '
        f'viewBox="0 0 {total_w} {H * CELL}">'
    ]
    for si, owner in enumerate(_copy_maps(sol)):
        ox = si * (W + gap) * CELL
        lines.append(f'<g class="panel" data-set="{si}" transform="translate({ox},0)">')
        for (x, y) in sorted(owner, key=lambda c: (c[1], c[0])):
            k = owner[(x, y)]
            fill = colors[si][pieces_of[si][k]]
            lines.append(
                f'<rect class="cell" x="{x * CELL}" y="{y * CELL}" width="{CELL}" height="{CELL}" fill="{fill}"/>'
            )
        segs = []
        for (x, y), k in sorted(owner.items(), key=lambda t: (t[0][1], t[0][0])):
            if owner.get((x + 1, y)) != k:
                segs.append(((x + 1, y), (x + 1, y + 1)))
            if owner.get((x - 1, y)) is None:
                segs.append(((x, y), (x, y + 1)))
            if owner.get((x, y + 1)) != k:
                segs.append(((x, y + 1), (x + 1, y + 1)))
            if owner.get((x, y - 1)) is None:
                segs.append(((x, y), (x + 1, y)))
        path = "".join(f"M{a[0] * CELL},{a[1] * CELL}L{b[0] * CELL},{b[1] * CELL}" for a, b in segs)
        lines.append(f'<path d="{path}" stroke="#222" stroke-width="1.5" fill="none"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render(sol: Solution, fmt: str = "ascii", seed: int = 0) -> str:
    if fmt == "ascii":
        return render_ascii(sol)
    if fmt == "svg":
        return render_svg(sol, seed)
    raise ValueError(f"unknown format {fmt!r}")
