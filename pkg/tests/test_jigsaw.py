import random

import pytest

from polyshape.cnf import UNSAT
from polyshape.dlx import AreaCapExceeded
from polyshape.geometry import rectangle
from polyshape.jigsaw import (
    FIXED,
    ROTATABLE,
    JigsawError,
    JigsawPiece,
    JigsawSet,
    Tiling,
    check_tiling,
    format_jigsaw,
    load_jigsaw,
    mate,
    parse_jigsaw,
    rect_enforcing_set,
    rotate_tiling,
    tile_cells,
    tile_region,
    tileable_fast,
    validate_rect_enforcing,
)
from polyshape.placement import Box

STACK = JigsawSet((JigsawPiece(0, 1, 0, 0), JigsawPiece(-1, 0, 0, 0)))


def test_mate_is_an_involution():
    for c in range(-5, 6):
        assert mate(mate(c)) == c
    assert mate(0) == 0


def test_stacked_pair():
    r = tile_region(STACK, Box(1, 2))
    assert r.found
    assert r.tiling.cells == {(0, 0): (0, 0), (0, 1): (1, 0)}


def test_single_cell_needs_all_zero_piece():
    assert tile_region(STACK, Box(1, 1)).status == UNSAT


def test_rect_set_tiles_3x3():
    js = rect_enforcing_set()
    r = tile_region(js, Box(3, 3))
    assert r.found and check_tiling(js, rectangle(3, 3), r.tiling) == []


@pytest.mark.parametrize("w,h", [(3, 3), (4, 3), (3, 5), (6, 4)])
def test_rect_set_tiles_big_rectangles(w, h):
    assert tile_region(rect_enforcing_set(), Box(w, h)).found


@pytest.mark.parametrize("w,h", [(1, 1), (2, 2), (2, 5), (5, 2), (1, 4)])
def test_rect_set_rejects_thin_rectangles(w, h):
    assert not tile_region(rect_enforcing_set(), Box(w, h)).found


def test_checker_catches_bad_assignments():
    region = rectangle(1, 2)
    assert check_tiling(STACK, region, Tiling({(0, 0): (1, 0), (0, 1): (0, 0)}))
    assert check_tiling(STACK, region, Tiling({(0, 0): (0, 0)}))
    assert check_tiling(STACK, region, Tiling({(0, 0): (0, 1), (0, 1): (1, 0)}))


def test_no_interior_zero():
    js = JigsawSet((JigsawPiece(0, 0, 0, 0),))
    assert not tile_region(js, Box(1, 2)).found
    assert tile_region(js, Box(1, 1)).found


def test_validate_rect_set_small_cap():
    rep = validate_rect_enforcing(rect_enforcing_set(), 9, sat_sample=30)
    assert rep.ok, rep.counterexamples[:3]
    assert rep.tileable_sizes() == [(3, 3)]
    assert rep.sat_checked >= 30


def test_validate_finds_counterexample():
    js = JigsawSet((JigsawPiece(0, 0, 0, 0),))
    rep = validate_rect_enforcing(js, 4)
    assert not rep.ok
    assert any(len(r) == 1 for r, _ in rep.counterexamples)


def test_validate_cap_zero_is_vacuous():
    rep = validate_rect_enforcing(rect_enforcing_set(), 0)
    assert rep.ok and rep.regions == 0


def test_validate_cap_limit():
    with pytest.raises(AreaCapExceeded):
        validate_rect_enforcing(rect_enforcing_set(), 20)


def test_backtracker_agrees_with_cnf():
    rng = random.Random(3)
    js = rect_enforcing_set()
    for _ in range(40):
        w, h = rng.randint(1, 5), rng.randint(1, 5)
        cells = set(rectangle(w, h))
        if rng.random() < 0.5 and len(cells) > 1:
            cells.discard(rng.choice(sorted(cells)))
        assert tileable_fast(js, cells) == tile_cells(js, cells).found


def test_rotatable_tilings_rotate():
    js = JigsawSet(rect_enforcing_set().pieces, ROTATABLE)
    region = rectangle(4, 3)
    r = tile_cells(js, region)
    assert r.found
    turned_region, turned = rotate_tiling(js, region, r.tiling)
    assert turned_region == rectangle(3, 4)
    assert check_tiling(js, turned_region, turned) == []


def test_fixed_mode_rejects_rotations():
    js = rect_enforcing_set()
    r = tile_region(js, Box(3, 3))
    _, turned = rotate_tiling(js, rectangle(3, 3), r.tiling)
    assert any("rotation" in p for p in check_tiling(js, rectangle(3, 3), turned))


def test_rotatable_mode_expands_orientations():
    p = JigsawPiece(0, 1, 2, 3)
    assert len(JigsawSet((p,), ROTATABLE).oriented()) == 4
    assert len(JigsawSet((JigsawPiece(1, 1, 1, 1),), ROTATABLE).oriented()) == 1
    assert p.rotated(4) == p


def test_file_round_trip(tmp_path):
    js = rect_enforcing_set()
    path = tmp_path / "rect.txt"
    path.write_text("# rectangle set\n" + format_jigsaw(js))
    back = load_jigsaw(path)
    assert [q.colors() for q in back.pieces] == [q.colors() for q in js.pieces]
    assert back.rotation_mode == FIXED


def test_parse_errors():
    with pytest.raises(JigsawError):
        parse_jigsaw("0 1 0")
    with pytest.raises(JigsawError):
        parse_jigsaw("0 a 0 0")
    with pytest.raises(JigsawError):
        parse_jigsaw("# nothing\n")
