"""Executable hardness constructions.

* 3-partition -> shape logic with sticks and congruent blocks.
* PCP -> jigsaw pieces whose rectangular tilings spell PCP solutions.
* jigsaw -> polyominoes, by drawing each edge color as a binary zigzag.
* a breadth-first PCP search used as an oracle.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import Cell, Polyomino, rectangle, topology
from .instance import Mode, PieceSet, PuzzleInstance, Solution
from .jigsaw import FIXED, JigsawPiece, JigsawSet, Tiling
from .placement import Placement


class PreconditionViolated(ValueError):
    pass


class ExtractionFailed(RuntimeError):
    pass


class ScaleTooSmall(ValueError):
    pass


# -- 3-partition -------------------------------------------------------------------


@dataclass(frozen=True)
class ThreePartitionInstance:
    m: int
    a: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        if self.m < 1:
            raise PreconditionViolated("m must be positive")
        if len(self.a) != 3 * self.m:
            raise PreconditionViolated(f"need 3m = {3 * self.m} integers, got {len(self.a)}")
        if any(x < 1 for x in self.a):
            raise PreconditionViolated("integers must be positive")
        if sum(self.a) % self.m:
            raise PreconditionViolated(f"sum {sum(self.a)} is not divisible by m = {self.m}")

    @property
    def B(self) -> int:
        return sum(self.a) // self.m

    def generator_failures(self) -> list[str]:
        m, B = self.m, self.B
        bad = []
        for x in self.a:
            if not 4 * x > B:
                bad.append(f"a_i = {x} is not > B/4 = {B / 4}")
            if not 2 * x < B:
                bad.append(f"a_i = {x} is not < B/2 = {B / 2}")
            if not x > 3:
                bad.append(f"a_i = {x} is not > 3")
        if B % (3 * m):
            bad.append(f"B = {B} is not divisible by 3m = {3 * m}")
        return bad


def parse_3partition(text: str) -> ThreePartitionInstance:
    """``m`` followed by 3m integers (any whitespace)."""
    nums = [int(t) for t in text.split()]
    if not nums:
        raise PreconditionViolated("empty 3-partition file")
    return ThreePartitionInstance(nums[0], tuple(nums[1:]))


def load_3partition(path) -> ThreePartitionInstance:
    return parse_3partition(Path(path).read_text())


def format_3partition(tp: ThreePartitionInstance) -> str:
    return f"{tp.m}\n{' '.join(map(str, tp.a))}\n"


def gen_3partition(tp: ThreePartitionInstance) -> PuzzleInstance:
    """Sticks 1 x (a_i + 3m^2) against 3m blocks m x (B/(3m) + 3m)."""
    bad = tp.generator_failures()
    if bad:
        raise PreconditionViolated("; ".join(bad))
    m, B = tp.m, tp.B
    sticks = tuple(Polyomino(rectangle(1, x + 3 * m * m), f"1x{x + 3 * m * m}") for x in tp.a)
    bw = B // (3 * m) + 3 * m
    blocks = tuple(Polyomino(rectangle(m, bw), f"{m}x{bw}") for _ in range(3 * m))
    inst = PuzzleInstance(Mode.SHAPE_LOGIC, (PieceSet(sticks, "sticks"), PieceSet(blocks, "blocks")))
    assert inst.equal_areas()
    return inst


def expected_goal(tp: ThreePartitionInstance) -> tuple[int, int]:
    return tp.m, tp.B + 9 * tp.m * tp.m


def extract_3partition(sol: Solution, tp: ThreePartitionInstance) -> list[tuple[int, ...]]:
    """Read the m triples off the stick tiling of the m x (B + 9m^2) goal."""
    m, long = expected_goal(tp)
    xs = {x for x, _ in sol.goal}
    ys = {y for _, y in sol.goal}
    w, h = max(xs) + 1, max(ys) + 1
    if len(sol.goal) != m * long or sorted((w, h)) != sorted((m, long)):
        raise ExtractionFailed(f"goal is {w}x{h} with area {len(sol.goal)}, expected {m}x{long}")
    horizontal = w == long and (h == m or m != long)
    lines: dict[int, list[int]] = {}
    for pl in sol.tilings[0]:
        cover = pl.cover
        line = {y for _, y in cover} if horizontal else {x for x, _ in cover}
        if len(line) != 1:
            raise ExtractionFailed(f"stick {pl.piece_id} does not lie along one line")
        lines.setdefault(line.pop(), []).append(pl.piece_id)
    triples = []
    for k in sorted(lines):
        vals = tuple(sorted(tp.a[i] for i in lines[k]))
        if len(vals) != 3 or sum(vals) != tp.B:
            raise ExtractionFailed(f"line {k} holds {vals}, not a triple summing to {tp.B}")
        triples.append(vals)
    if len(triples) != m:
        raise ExtractionFailed(f"{len(triples)} lines of sticks, expected {m}")
    return sorted(triples)


def solve_3partition(a, m: int) -> list[tuple[int, ...]] | None:
    """Brute-force 3-partition; the sorted triples or None."""
    a = sorted(a)
    if len(a) != 3 * m or sum(a) % m:
        return None
    B = sum(a) // m

    def go(rest: list[int]) -> list[tuple[int, ...]] | None:
        if not rest:
            return []
        first, others = rest[0], rest[1:]
        for j, k in itertools.combinations(range(len(others)), 2):
            if first + others[j] + others[k] == B:
                left = [x for t, x in enumerate(others) if t not in (j, k)]
                sub = go(left)
                if sub is not None:
                    return [(first, others[j], others[k])] + sub
        return None

    res = go(a)
    return sorted(res) if res is not None else None


# -- PCP -----------------------------------------------------------------------------


@dataclass(frozen=True)
class PcpInstance:
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((str(t), str(b)) for t, b in self.pairs))
        if not self.pairs:
            raise PreconditionViolated("PCP instance has no pairs")
        for t, b in self.pairs:
            if not t or not b:
                raise PreconditionViolated("PCP strings must be non-empty")

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(sorted({ch for t, b in self.pairs for ch in t + b}))

    def __len__(self) -> int:
        return len(self.pairs)

    def top(self, seq) -> str:
        return "".join(self.pairs[i][0] for i in seq)

    def bottom(self, seq) -> str:
        return "".join(self.pairs[i][1] for i in seq)

    def is_solution(self, seq) -> bool:
        return bool(seq) and self.top(seq) == self.bottom(seq)


def parse_pcp(text: str) -> PcpInstance:
    """One pair per line, ``top;bottom``."""
    pairs = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.count(";") != 1:
            raise PreconditionViolated(f"line {n}: expected 'top;bottom'")
        t, b = (s.strip() for s in line.split(";"))
        pairs.append((t, b))
    return PcpInstance(tuple(pairs))


def load_pcp(path) -> PcpInstance:
    return parse_pcp(Path(path).read_text())


def format_pcp(pcp: PcpInstance) -> str:
    return "".join(f"{t};{b}\n" for t, b in pcp.pairs)


EXAMPLE_PCP = PcpInstance((("b", "ca"), ("a", "ab"), ("ca", "a"), ("abc", "c")))


def pcp_oracle(pcp: PcpInstance, max_len: int, overhang_cap: int | None = None) -> tuple[int, ...] | None:
    """Shortest index sequence (0-based) of length <= max_len, or None.

    States are (which side is ahead, unmatched overhang).  Pairs are tried
    in index order, so ties resolve to the lexicographically first sequence.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if overhang_cap is None:
        overhang_cap = max(max(len(t), len(b)) for t, b in pcp.pairs) * max_len
    start = ("", "")  # (top excess, bottom excess); at most one is non-empty
    queue = deque([(start, ())])
    seen = {start}
    while queue:
        (top, bot), seq = queue.popleft()
        if len(seq) >= max_len:
            continue
        for i, (t, b) in enumerate(pcp.pairs):
            nt, nb = top + t, bot + b
            k = min(len(nt), len(nb))
            if nt[:k] != nb[:k]:
                continue
            state = (nt[k:], nb[k:])
            nseq = seq + (i,)
            if state == ("", ""):
                return nseq
            if len(state[0]) + len(state[1]) > overhang_cap or state in seen:
                continue
            seen.add(state)
            queue.append((state, nseq))
    return None


# -- PCP -> jigsaw ------------------------------------------------------------------------


@dataclass
class PieceInfo:
    kind: str  # top, bottom, wire, turn-right, turn-left, down-a, down-b, prop, wire2, straight, frame, fill
    pair: int = -1
    pos: int = -1
    letter: str = ""


@dataclass
class PcpJigsaw:
    pcp: PcpInstance
    jset: JigsawSet
    info: list[PieceInfo]
    colors: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.jset)

    def count_by_kind(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for i in self.info:
            out[i.kind] = out.get(i.kind, 0) + 1
        return out


def formula_piece_count(pcp: PcpInstance) -> int:
    """sum(|t_i| + |b_i|) + 8n + 6 + |alphabet|."""
    return sum(len(t) + len(b) for t, b in pcp.pairs) + 8 * len(pcp) + 6 + len(pcp.alphabet)


def gen_pcp_jigsaw(pcp: PcpInstance, color_offset: int = 0, sound_straight: bool = True) -> PcpJigsaw:
    """Jigsaw pieces whose rectangular tilings encode PCP solutions.

    Colors: H (string rectangles), V (frame sides), h (interior), one per
    letter, and for every pair the ID colors i, i', i'' (ID after zero, one
    and two turns).  Unique glue colors hold multi-letter rectangles together.

    A horizontal ID run uses i' when heading right and a separate color when
    heading left; with a single color a right turn could mate directly with
    a left turn and two top IDs would cancel.  So propagation pieces exist
    per (pair, letter, direction).  With ``sound_straight`` the straight ID
    piece is only emitted for pairs whose strings start with the same letter,
    since that column is not otherwise checked.
    """
    sigma = pcp.alphabet
    nxt = itertools.count(color_offset + 1)
    col: dict[str, int] = {}
    for name in ("H", "V", "h"):
        col[name] = next(nxt)
    for ch in sigma:
        col["L" + ch] = next(nxt)
    for i in range(len(pcp)):
        for tag in ("", "'", "'<", "''"):
            col[f"{i}{tag}"] = next(nxt)
    H, V, h = col["H"], col["V"], col["h"]
    L = {ch: col["L" + ch] for ch in sigma}
    pieces: list[JigsawPiece] = []
    info: list[PieceInfo] = []

    def add(p: JigsawPiece, inf: PieceInfo) -> None:
        pieces.append(p)
        info.append(inf)

    def strip(s: str, i: int, kind: str, first: int) -> None:
        glue = [next(nxt) for _ in range(len(s) - 1)]
        for k in range(len(s)):
            for_edge = first if k == 0 else (L[s[k]] if kind == "top" else -L[s[k]])
            left = -H if k == 0 else -glue[k - 1]
            right = H if k == len(s) - 1 else glue[k]
            if kind == "top":
                p = JigsawPiece(0, for_edge, left, right, f"t{i + 1}.{k}")
            else:
                p = JigsawPiece(for_edge, 0, left, right, f"b{i + 1}.{k}")
            add(p, PieceInfo(kind, i, k, s[k]))

    for i, (t, b) in enumerate(pcp.pairs):
        strip(t, i, "top", col[f"{i}"])
    for i, (t, b) in enumerate(pcp.pairs):
        strip(b, i, "bottom", -col[f"{i}''"])
    P = JigsawPiece
    for i, (t, b) in enumerate(pcp.pairs):
        c0, c1, cl, c2 = col[f"{i}"], col[f"{i}'"], col[f"{i}'<"], col[f"{i}''"]
        x, y = L[t[0]], L[b[0]]
        add(P(-c0, c0, -h, h, f"wire{i + 1}"), PieceInfo("wire", i))
        add(P(-c0, x, -h, c1, f"right{i + 1}"), PieceInfo("turn-right", i))
        add(P(-c0, x, -cl, h, f"left{i + 1}"), PieceInfo("turn-left", i))
        add(P(-y, c2, -h, cl, f"downa{i + 1}"), PieceInfo("down-a", i))
        add(P(-y, c2, -c1, h, f"downb{i + 1}"), PieceInfo("down-b", i))
        for ch in sigma:
            add(P(-L[ch], L[ch], -c1, c1, f"prop{i + 1}{ch}"), PieceInfo("prop", i, letter=ch))
            add(P(-L[ch], L[ch], -cl, cl, f"propl{i + 1}{ch}"), PieceInfo("prop-left", i, letter=ch))
        add(P(-c2, c2, -h, h, f"wire{i + 1}''"), PieceInfo("wire2", i))
        if t[0] == b[0] or not sound_straight:
            add(P(-c0, c2, -h, h, f"straight{i + 1}"), PieceInfo("straight", i))
    for p in (
        P(0, V, 0, H, "TL"),
        P(0, V, -H, 0, "TR"),
        P(-V, V, 0, h, "L"),
        P(-V, V, -h, 0, "R"),
        P(-V, 0, 0, H, "BL"),
        P(-V, 0, -H, 0, "BR"),
    ):
        add(p, PieceInfo("frame"))
    for ch in sigma:
        add(P(-L[ch], L[ch], -h, h, f"fill{ch}"), PieceInfo("fill", letter=ch))
    return PcpJigsaw(pcp, JigsawSet(tuple(pieces), FIXED), info, col)


def _read_row(pj: PcpJigsaw, tiling: Tiling, y: int, width: int, kind: str) -> list[int]:
    seq = []
    expect = 0
    cur = -1
    for x in range(1, width - 1):
        idx, _ = tiling.cells[(x, y)]
        inf = pj.info[idx]
        if inf.kind != kind:
            raise ExtractionFailed(f"cell ({x}, {y}) holds a {inf.kind} piece, not a {kind} string")
        if inf.pos == 0:
            if cur >= 0 and expect != len(pj.pcp.pairs[cur][0 if kind == "top" else 1]):
                raise ExtractionFailed(f"string for pair {cur + 1} cut short at x={x}")
            cur, expect = inf.pair, 1
            seq.append(cur)
        else:
            if inf.pair != cur or inf.pos != expect:
                raise ExtractionFailed(f"cell ({x}, {y}) breaks a string rectangle")
            expect += 1
    return seq


def decode_pcp_tiling(pj: PcpJigsaw, tiling: Tiling) -> tuple[int, ...]:
    """Pair indices along the top row; checked against the bottom row and
    against the PCP equation."""
    width = max(x for x, _ in tiling.cells) + 1
    height = max(y for _, y in tiling.cells) + 1
    top = _read_row(pj, tiling, 0, width, "top")
    bot = _read_row(pj, tiling, height - 1, width, "bottom")
    if top != bot:
        raise ExtractionFailed(f"top sequence {top} differs from bottom sequence {bot}")
    if not pj.pcp.is_solution(top):
        raise ExtractionFailed(f"sequence {top} does not solve the PCP instance")
    return tuple(top)


# -- jigsaw -> polyomino -----------------------------------------------------------------


def min_scale_bits(max_id: int) -> int:
    return max(1, math.ceil(math.log2(max_id + 1))) + 2


def edge_pattern(color: int, scale_bits: int) -> list[int]:
    """Outward profile along an edge of length K = 2*scale_bits + 4.

    +1 is a bump (cell added outside), -1 a dent (boundary cell removed),
    0 flat.  Code bits are a leading 1, |color| in binary, a trailing 0; each
    bit becomes two positions (1: bump, dent; 0: dent, bump).  A negative
    color negates the profile; color 0 is flat.
    """
    K = 2 * scale_bits + 4
    if color == 0:
        return [0] * K
    mag = abs(color)
    if mag >= 1 << (scale_bits - 2):
        raise ScaleTooSmall(f"color {color} needs more than {scale_bits} scale bits")
    bits = [1] + [(mag >> k) & 1 for k in range(scale_bits - 3, -1, -1)] + [0]
    prof = [0, 0]
    for b in bits:
        prof += [1, -1] if b else [-1, 1]
    prof += [0, 0]
    sign = 1 if color > 0 else -1
    return [sign * v for v in prof]


def macro_cells(p: JigsawPiece, scale_bits: int) -> frozenset[Cell]:
    """The K x K block of ``p`` with each edge drawn as its zigzag."""
    K = 2 * scale_bits + 4
    cells = set(rectangle(K, K))
    for side, color in (("top", p.top), ("bottom", p.bottom), ("left", p.left), ("right", p.right)):
        for k, v in enumerate(edge_pattern(color, scale_bits)):
            if v == 0:
                continue
            if side == "top":
                inner, outer = (k, 0), (k, -1)
            elif side == "bottom":
                inner, outer = (k, K - 1), (k, K)
            elif side == "left":
                inner, outer = (0, k), (-1, k)
            else:
                inner, outer = (K - 1, k), (K, k)
            if v > 0:
                cells.add(outer)
            else:
                cells.discard(inner)
    return frozenset(cells)


def zigzag_encode(js: JigsawSet, scale_bits: int, label: str = "") -> PieceSet:
    need = min_scale_bits(max((abs(c) for c in js.colors()), default=0))
    if scale_bits < need:
        raise ScaleTooSmall(f"scale_bits {scale_bits} < {need} needed for these colors")
    out = []
    for i, p in enumerate(js.pieces):
        cells = macro_cells(p, scale_bits)
        out.append(Polyomino(cells, p.name or f"z{i}"))
    return PieceSet(tuple(out), label or "zigzag")


def offset_colors(js: JigsawSet, offset: int) -> JigsawSet:
    """Shift every nonzero color id by ``offset`` (keeps signs)."""

    def sh(c: int) -> int:
        return 0 if c == 0 else (c + offset if c > 0 else c - offset)

    return JigsawSet(
        tuple(JigsawPiece(sh(p.top), sh(p.bottom), sh(p.left), sh(p.right), p.name) for p in js.pieces),
        js.rotation_mode,
    )


def edges_interlock(c: int, d: int, scale_bits: int, shift: int = 0, vertical: bool = False) -> bool:
    """Do an edge of color ``c`` and the facing edge of color ``d`` meet
    with no gap and no overlap?

    With ``vertical`` False, ``c`` is a right edge and ``d`` the left edge of
    the next block; otherwise ``c`` is a bottom edge and ``d`` a top edge.
    ``shift`` slides the second block along the edge; only the rows (columns)
    shared by both blocks are compared.
    """
    K = 2 * scale_bits + 4
    if vertical:
        a = macro_cells(JigsawPiece(0, c, 0, 0), scale_bits)
        b = macro_cells(JigsawPiece(d, 0, 0, 0), scale_bits)
        a = {(y, x) for x, y in a}
        b = {(y, x) for x, y in b}
    else:
        a = set(macro_cells(JigsawPiece(0, 0, 0, c), scale_bits))
        b = set(macro_cells(JigsawPiece(0, 0, d, 0), scale_bits))
    b = {(x + K, y + shift) for x, y in b}
    lo, hi = max(0, shift), min(K, K + shift)
    for y in range(lo, hi):
        for x in (K - 1, K):
            inside_a = (x, y) in a
            inside_b = (x, y) in b
            if inside_a == inside_b:
                return False
    return True


@dataclass
class MatingReport:
    ids: int
    scale_bits: int
    pairs: int
    mismatches: list[tuple[str, int, int]]
    shifted: list[tuple[str, int, int, int]]

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.shifted


def mating_matrix(max_id: int = 7, scale_bits: int | None = None, shifts: bool = True) -> MatingReport:
    """Check, for every signed color pair with ids <= max_id, that two edges
    interlock exactly when the colors mate, in both edge orientations."""
    sb = scale_bits or min_scale_bits(max_id)
    colors = list(range(-max_id, max_id + 1))
    rep = MatingReport(max_id, sb, 0, [], [])
    K = 2 * sb + 4
    for vertical in (False, True):
        tag = "vertical" if vertical else "horizontal"
        for c in colors:
            for d in colors:
                rep.pairs += 1
                want = d == -c
                if edges_interlock(c, d, sb, 0, vertical) != want:
                    rep.mismatches.append((tag, c, d))
                if shifts and c and d:
                    # shifts whose overlap still pairs code positions of both edges
                    for s in range(-(K - 5), K - 4):
                        if s and edges_interlock(c, d, sb, s, vertical):
                            rep.shifted.append((tag, c, d, s))
    return rep


def check_macro_pieces(ps: PieceSet) -> list[str]:
    bad = []
    for p in ps.pieces:
        topo = topology(p.cells)
        if not topo.connected:
            bad.append(f"{p.name}: disconnected")
        if topo.holes:
            bad.append(f"{p.name}: has a hole")
    return bad


def assemble_macro(js: JigsawSet, tiling: Tiling, scale_bits: int) -> list[Placement]:
    """Place the macro polyomino of every tiled cell at K times its position."""
    K = 2 * scale_bits + 4
    out = []
    for (x, y), (i, r) in sorted(tiling.cells.items()):
        p = js.pieces[i].rotated(r)
        cover = frozenset((cx + K * x, cy + K * y) for cx, cy in macro_cells(p, scale_bits))
        out.append(Placement(i, 0, (K * x, K * y), cover))
    return out


def common_multiple_reduction(pcp: PcpInstance, scale_bits: int | None = None) -> PuzzleInstance:
    """S1: the rectangle-enforcing set, S2: the PCP set on a disjoint palette,
    both drawn as zigzag polyominoes."""
    from .jigsaw import rect_enforcing_set

    rect = rect_enforcing_set()
    top = max(abs(c) for c in rect.colors())
    pj = gen_pcp_jigsaw(pcp, color_offset=top)
    top2 = max(abs(c) for c in pj.jset.colors())
    sb = scale_bits or min_scale_bits(top2)
    return PuzzleInstance(
        Mode.COMMON_MULTIPLE,
        (zigzag_encode(rect, sb, "rect"), zigzag_encode(pj.jset, sb, "pcp")),
    )
