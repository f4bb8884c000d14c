import json

import pytest

from polyshape.geometry import Polyomino
from polyshape.instance import (
    InstanceError,
    Mode,
    PieceSet,
    PuzzleInstance,
    Solution,
    UnknownPiece,
    certificate_json,
    common_areas,
    feasible_areas,
    instance_from_json,
    load_certificate,
    piece,
    split_names,
    verify_solution,
)
from polyshape.placement import Placement


def _pl(pid, cells):
    return Placement(pid, -1, (0, 0), frozenset(cells))


def i5_q4_certificate():
    goal = frozenset((x, y) for x in range(10) for y in range(2))
    bars = [_pl(0, {(x, y) for x in range(5 * k, 5 * k + 5)}) for k in range(2) for y in range(2)]
    squares = [_pl(0, {(x, y) for x in range(2 * k, 2 * k + 2) for y in range(2)}) for k in range(5)]
    return PuzzleInstance.common("I5", "Q4"), Solution(goal, (tuple(bars), tuple(squares)))


def test_feasible_areas_examples():
    assert feasible_areas(PieceSet.named("T5"), 22) == [5, 10, 15, 20]
    assert feasible_areas(PieceSet.named("L3", "Q4"), 12) == [3, 4, 6, 7, 8, 9, 10, 11, 12]
    inst = PuzzleInstance.common("I5", "Q4")
    assert common_areas(inst, 19) == []
    assert common_areas(inst, 20) == [20]


def test_feasible_areas_shape_logic():
    assert feasible_areas(PieceSet.named("T5", "Q4"), 20, Mode.SHAPE_LOGIC) == [9]


def test_feasible_areas_monotone():
    s = PieceSet.named("L3", "T5")
    for lim in range(1, 30):
        small = set(feasible_areas(s, lim))
        assert small <= set(feasible_areas(s, lim + 1))
        assert all(p.area in feasible_areas(s, max(lim, p.area)) for p in s.pieces)


def test_split_names():
    assert split_names("F5Q4T4") == ["F5", "Q4", "T4"]
    with pytest.raises(UnknownPiece):
        split_names("F5?")
    with pytest.raises(UnknownPiece):
        piece("K9")


def test_verifier_accepts_i5_q4():
    inst, sol = i5_q4_certificate()
    rep = verify_solution(inst, sol)
    assert rep.ok, rep.violations


def test_verifier_flags_overlap():
    inst, sol = i5_q4_certificate()
    squares = list(sol.tilings[1])
    squares[1] = _pl(0, {(x, y) for x in range(1, 3) for y in range(2)})
    rep = verify_solution(inst, Solution(sol.goal, (sol.tilings[0], tuple(squares))))
    assert not rep.ok
    assert "Overlap" in rep.kinds()


def test_verifier_flags_disconnected_goal():
    inst = PuzzleInstance.common("Q4", "I2")
    goal = frozenset({(0, 0), (1, 0), (0, 1), (1, 1), (3, 0), (4, 0), (3, 1), (4, 1)})
    sq = (_pl(0, {(0, 0), (1, 0), (0, 1), (1, 1)}), _pl(0, {(3, 0), (4, 0), (3, 1), (4, 1)}))
    dom = tuple(_pl(0, {(x, 0), (x, 1)}) for x in (0, 1, 3, 4))
    rep = verify_solution(inst, Solution(goal, (sq, dom)))
    assert rep.kinds() == {"Disconnected"}


def test_verifier_flags_wrong_shape_and_usage():
    inst = PuzzleInstance.logic("I2", "I1I1")
    goal = frozenset({(0, 0), (1, 0)})
    ok = Solution(goal, ((_pl(0, goal),), (_pl(0, {(0, 0)}), _pl(1, {(1, 0)}))))
    assert verify_solution(inst, ok).ok
    twice = Solution(goal, ((_pl(0, goal),), (_pl(0, {(0, 0)}), _pl(0, {(1, 0)}))))
    assert "Usage" in verify_solution(inst, twice).kinds()
    wrong = Solution(goal, ((_pl(0, {(0, 0)}),), (_pl(0, {(0, 0)}), _pl(1, {(1, 0)}))))
    kinds = verify_solution(inst, wrong).kinds()
    assert {"NotCongruent", "Uncovered"} <= kinds


def test_verifier_flags_area_mismatch():
    inst = PuzzleInstance.logic("I2", "I1")
    goal = frozenset({(0, 0)})
    rep = verify_solution(inst, Solution(goal, ((), (_pl(0, goal),))))
    assert "AreaMismatch" in rep.kinds()


def test_certificate_round_trip():
    inst, sol = i5_q4_certificate()
    data = json.loads(json.dumps(certificate_json(inst, sol)))
    inst2, sol2 = load_certificate(data)
    assert inst2 == inst
    assert sol2.goal == sol.goal
    assert verify_solution(inst2, sol2).ok


def test_instance_json_forms():
    data = {
        "mode": "shape-logic",
        "sets": ["T4", {"label": "sq", "pieces": [{"ascii": "XX\nXX"}]}],
        "allow_reflect": False,
    }
    inst = instance_from_json(data)
    assert inst.mode == Mode.SHAPE_LOGIC
    assert inst.sets[1].pieces[0] == piece("Q4")
    assert not inst.allow_reflect
    again = instance_from_json(inst.to_json())
    assert again == inst
    assert again.instance_id() == inst.instance_id()


def test_piece_set_rejects_holes_and_empty():
    ring = Polyomino.of({(x, y) for x in range(3) for y in range(3)} - {(1, 1)})
    with pytest.raises(InstanceError):
        PieceSet((ring,))
    with pytest.raises(InstanceError):
        PieceSet(())


def test_instance_set_count():
    with pytest.raises(InstanceError):
        PuzzleInstance.common("I2")
