import pytest

from polyshape.geometry import Polyomino, rectangle
from polyshape.instance import piece
from polyshape.placement import Box, BoxTooLarge, enumerate_placements, fits


def test_domino_in_2x2():
    assert len(enumerate_placements(piece("I2"), Box(2, 2))) == 4


def test_i5_in_5x5():
    assert len(enumerate_placements(piece("I5"), Box(5, 5))) == 10


def test_q4_in_3x3():
    assert len(enumerate_placements(piece("Q4"), Box(3, 3))) == 4


def test_too_large_piece_gives_nothing():
    assert enumerate_placements(piece("I5"), Box(4, 4)) == []
    assert not fits(piece("I5"), Box(4, 4))


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_bar_count_formula(k):
    bar = Polyomino(rectangle(k, 1))
    for W in range(1, 9):
        for H in range(1, 9):
            if k > min(W, H):
                continue
            got = len(enumerate_placements(bar, Box(W, H)))
            assert got == H * (W - k + 1) + W * (H - k + 1)


@pytest.mark.parametrize("name", ["F5", "T4", "Q4", "I3", "W5"])
def test_covers_distinct_in_bounds(name):
    p = piece(name)
    box = Box(5, 6)
    pls = enumerate_placements(p, box)
    assert len({pl.cover for pl in pls}) == len(pls)
    for pl in pls:
        assert len(pl.cover) == p.area
        assert all(box.contains(c) for c in pl.cover)


def test_deterministic_order():
    a = enumerate_placements(piece("L4"), Box(4, 4))
    b = enumerate_placements(piece("L4"), Box(4, 4))
    assert a == b
    keys = [(pl.orientation_id, pl.offset[1], pl.offset[0]) for pl in a]
    assert keys == sorted(keys)


def test_cell_limit():
    with pytest.raises(BoxTooLarge):
        enumerate_placements(piece("I1"), Box(40, 40))
    assert len(enumerate_placements(piece("I1"), Box(40, 40), cell_limit=1600)) == 1600
