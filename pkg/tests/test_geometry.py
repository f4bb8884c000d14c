import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyshape.geometry import (
    ALL_TRANSFORMS,
    BadCharacter,
    Disconnected,
    EmptyShape,
    HoleInPiece,
    Polyomino,
    canonical,
    canonical_key,
    compose,
    from_rle,
    is_connected,
    orientations,
    parse_ascii,
    render_ascii,
    to_rle,
    topology,
    transform_cells,
)
from polyshape.instance import piece

from oracles import uf_connected


@st.composite
def polyominoes(draw, max_size=9):
    n = draw(st.integers(1, max_size))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    cells = {(0, 0)}
    while len(cells) < n:
        x, y = rng.choice(sorted(cells))
        dx, dy = rng.choice(((1, 0), (-1, 0), (0, 1), (0, -1)))
        cells.add((x + dx, y + dy))
    return Polyomino.of(cells)


def test_parse_l_tromino():
    p = parse_ascii(".X\nXX")
    assert p.area == 3
    assert p.bbox == (2, 2)


def test_ring_in_goal_mode_has_hole():
    p = parse_ascii("XXX\nX.X\nXXX", piece=False)
    assert p.area == 8
    assert p.has_hole()
    with pytest.raises(HoleInPiece):
        parse_ascii("XXX\nX.X\nXXX")


def test_parse_errors():
    with pytest.raises(Disconnected):
        parse_ascii("X.X")
    with pytest.raises(EmptyShape):
        parse_ascii("...")
    with pytest.raises(BadCharacter):
        parse_ascii("X?")


@pytest.mark.parametrize("name,count", [("Q4", 1), ("I5", 2), ("F5", 8), ("T4", 4), ("S4", 4), ("L4", 8)])
def test_orientation_counts(name, count):
    assert len(orientations(piece(name))) == count


def test_one_sided_orientations():
    assert len(orientations(piece("F5"), allow_reflect=False)) == 4
    assert len(orientations(piece("I5"), allow_reflect=False)) == 2


def test_canonical_of_rotated_tromino():
    p = parse_ascii(".X\nXX")
    assert canonical(p.transformed(1)) == canonical(p)


def test_t5_and_p5_differ():
    assert canonical(piece("T5")) != canonical(piece("P5"))


def test_topology_examples():
    assert topology({(x, y) for x in range(2) for y in range(10)}) == (True, 0)
    ring = {(x, y) for x in range(3) for y in range(3)} - {(1, 1)}
    assert topology(ring) == (True, 1)
    assert topology({(0, 0), (1, 0), (3, 0), (4, 0)}) == (False, 0)


def test_compose_is_closed():
    for a in ALL_TRANSFORMS:
        for b in ALL_TRANSFORMS:
            assert compose(a, b) in ALL_TRANSFORMS
    assert all(compose(0, t) == t for t in ALL_TRANSFORMS)


def test_catalog_shapes():
    assert piece("I1").area == 1
    for name in ["I4", "L4", "N4", "Q4", "S4", "T4"]:
        assert piece(name).area == 4
    for name in ["F5", "I5", "L5", "N5", "P5", "T5", "U5", "V5", "W5", "X5", "Y5", "Z5"]:
        assert piece(name).area == 5
    keys = {canonical_key(piece(n).cells) for n in ["F5", "I5", "L5", "N5", "P5", "T5", "U5", "V5", "W5", "X5", "Y5", "Z5"]}
    assert len(keys) == 12


@settings(max_examples=100, deadline=None)
@given(polyominoes())
def test_transforms_preserve_area_and_class(p):
    for t in ALL_TRANSFORMS:
        q = transform_cells(t, p.cells)
        assert len(q) == p.area
        assert canonical_key(q) == canonical_key(p.cells)


@settings(max_examples=100, deadline=None)
@given(polyominoes())
def test_canonical_idempotent(p):
    c = canonical(p)
    assert canonical(c) == c


@settings(max_examples=100, deadline=None)
@given(polyominoes())
def test_orientation_count_divides_8(p):
    assert 8 % len(orientations(p)) == 0


@settings(max_examples=100, deadline=None)
@given(polyominoes(max_size=12))
def test_ascii_and_rle_round_trip(p):
    assert parse_ascii(render_ascii(p.cells), piece=False) == p
    assert from_rle(to_rle(p.cells)) == p.cells


def test_connectivity_matches_union_find():
    rng = random.Random(7)
    for _ in range(300):
        cells = {(x, y) for x in range(8) for y in range(8) if rng.random() < 0.45}
        if cells:
            assert is_connected(cells) == uf_connected(cells)
