import math
from collections import Counter

import pytest

from polyshape.cnf import solve
from polyshape.dlx import brute_force_common
from polyshape.encoders import (
    TIGHT_FULL,
    TIGHT_ORIGIN,
    BoxTooSmall,
    InfeasibleArea,
    UnequalAreas,
    block_goal,
    box_symmetries,
    decode,
    encode_common_multiple,
    encode_shape_logic,
    expected_var_count,
    goal_in_box,
)
from polyshape.geometry import Polyomino, canonical_key, is_connected, rectangle
from polyshape.instance import PieceSet, PuzzleInstance, verify_solution
from polyshape.placement import Box
from polyshape.search import box_family


def bar(n):
    return Polyomino(rectangle(n, 1))


def S(*pieces):
    return PieceSet(tuple(pieces))


def sat_solution(inst, box, area=None, **kw):
    if area is None:
        f, vm = encode_shape_logic(inst, box, **kw)
    else:
        f, vm = encode_common_multiple(inst, box, area, **kw)
    v = solve(f, backend="builtin")
    return (decode(v.model, vm, inst) if v.sat else None), f, vm


def test_i5_q4_2x10():
    inst = PuzzleInstance.common("I5", "Q4")
    sol, _, _ = sat_solution(inst, Box(2, 10), 20)
    assert sol is not None and sol.area == 20
    assert verify_solution(inst, sol).ok
    assert Counter(len(t) for t in sol.tilings) == Counter([4, 5])


def test_infeasible_area():
    with pytest.raises(InfeasibleArea):
        encode_common_multiple(PuzzleInstance.common("T5", "Q4"), Box(4, 4), 16)


def test_box_too_small():
    with pytest.raises(BoxTooSmall):
        encode_common_multiple(PuzzleInstance.common("I5", "Q4"), Box(2, 2), 20)
    with pytest.raises(UnequalAreas):
        encode_shape_logic(PuzzleInstance.logic("T4", "I5"), Box(4, 4))


def test_t4_q4_area_8_unsat_in_small_boxes():
    inst = PuzzleInstance.common("T4", "Q4")
    for box in box_family(8):
        if box.cells <= 9:
            try:
                f, vm = encode_common_multiple(inst, box, 8)
            except BoxTooSmall:
                continue
            assert solve(f, backend="builtin").unsat


def test_logic_domino_vs_monominoes():
    inst = PuzzleInstance.logic(S(bar(2)), S(bar(1), bar(1)))
    sol, _, _ = sat_solution(inst, Box(2, 1))
    assert sol.goal == rectangle(2, 1)
    assert verify_solution(inst, sol).ok


def test_logic_t4_q4_unsat():
    inst = PuzzleInstance.logic("T4", "Q4")
    for w in range(1, 5):
        for h in range(w, 5):
            if w * h >= 4:
                try:
                    f, _ = encode_shape_logic(inst, Box(w, h), TIGHT_ORIGIN)
                except BoxTooSmall:
                    continue
                assert solve(f, backend="builtin").unsat


def test_logic_bar_split():
    inst = PuzzleInstance.logic(S(bar(3)), S(bar(2), bar(1)))
    sol, _, _ = sat_solution(inst, Box(3, 1))
    assert sol.goal == rectangle(3, 1)
    assert sorted(pl.piece_id for pl in sol.tilings[1]) == [0, 1]


def test_block_goal_excludes_only_solution():
    inst = PuzzleInstance.logic(S(bar(2)), S(bar(1), bar(1)))
    f, vm = encode_shape_logic(inst, Box(2, 1))
    v = solve(f, backend="builtin")
    block_goal(f, vm, goal_in_box(vm, v.model))
    assert solve(f, backend="builtin").unsat


def test_block_non_solution_keeps_sat():
    inst = PuzzleInstance.common("I5", "Q4")
    f, vm = encode_common_multiple(inst, Box(2, 10), 20)
    block_goal(f, vm, {(0, y) for y in range(10)})
    assert solve(f, backend="builtin").sat


def test_block_then_resolve_gives_new_goal():
    inst = PuzzleInstance.common("L4", "Q4")
    f, vm = encode_common_multiple(inst, Box(3, 4), 8, TIGHT_ORIGIN, symmetry=False)
    seen = set()
    while True:
        v = solve(f, backend="builtin")
        if not v.sat:
            break
        g = goal_in_box(vm, v.model)
        assert g not in seen
        seen.add(g)
        sol = decode(v.model, vm, inst)
        assert verify_solution(inst, sol, check_connectivity=False).ok
        block_goal(f, vm, g)
    assert seen


def test_goal_census_matches_dlx():
    # connected area-8 goals for L4 vs Q4 over every box, up to congruence
    inst = PuzzleInstance.common("L4", "Q4")
    classes = set()
    for box in box_family(8):
        try:
            f, vm = encode_common_multiple(inst, box, 8, TIGHT_FULL, symmetry=False)
        except BoxTooSmall:
            continue
        while True:
            v = solve(f, backend="builtin")
            if not v.sat:
                break
            g = goal_in_box(vm, v.model)
            if is_connected(g):
                classes.add(canonical_key(g))
            block_goal(f, vm, g)
    census = brute_force_common(inst, 8)
    assert census.minimal_area == 8
    assert classes == {canonical_key(c) for c in census.shapes}


def test_block_goal_rejects_outside_cells():
    inst = PuzzleInstance.common("I5", "Q4")
    f, vm = encode_common_multiple(inst, Box(2, 10), 20)
    with pytest.raises(ValueError):
        block_goal(f, vm, {(5, 5)})


def _counter_aux(n, k):
    if k in (0, n):
        return 0
    return sum(min(i + 1, k + 1) for i in range(n))


def _commander_aux(n):
    aux = 0
    while n > 6:
        n = math.ceil(n / 3)
        aux += n
    return aux


def _closed_form_vars(inst, vm, area, symmetry):
    total = sum(len(p) for p in vm.placements) + vm.box.cells
    for si in range(len(inst.sets)):
        per_cell = Counter(c for pl in vm.placements[si] for c in pl.cover)
        total += sum(_commander_aux(per_cell.get(vm.box.cell(i), 0)) for i in range(vm.box.cells))
    if area is not None:
        total += _counter_aux(vm.box.cells, area)
    else:
        for si, groups in enumerate(vm.groups):
            for g in groups:
                n = sum(1 for pl in vm.placements[si] if pl.piece_id == g[0])
                total += _commander_aux(n) if len(g) == 1 else _counter_aux(n, len(g))
    if symmetry:
        for sym in box_symmetries(vm.box, inst.allow_reflect):
            total += sum(1 for i in range(vm.box.cells) if sym(*vm.box.cell(i)) != vm.box.cell(i))
    return total


@pytest.mark.parametrize(
    "sets,box,area",
    [
        (("I5", "Q4"), Box(2, 10), 20),
        (("L4", "Q4"), Box(2, 4), 8),
        (("T4", "Q4"), Box(4, 4), 16),
        (("L4", "Q4"), Box(3, 3), 8),
        (("I3", "L3"), Box(3, 3), None),
        (("L4I4", "Q4T4"), Box(4, 4), None),
    ],
)
@pytest.mark.parametrize("symmetry", [True, False])
def test_variable_count_closed_form(sets, box, area, symmetry):
    if area is None:
        inst = PuzzleInstance.logic(*sets)
        f, vm = encode_shape_logic(inst, box, symmetry=symmetry)
    else:
        inst = PuzzleInstance.common(*sets)
        f, vm = encode_common_multiple(inst, box, area, symmetry=symmetry)
    assert f.num_vars == expected_var_count(vm)
    assert f.num_vars == _closed_form_vars(inst, vm, area, symmetry)
    # disjoint ranges: x blocks, then the shared goal block
    flat = [v for xs in vm.x for v in xs] + vm.y[0]
    assert len(set(flat)) == len(flat)
    assert all(vm.y[s] is vm.y[0] for s in range(len(vm.y)))


@pytest.mark.parametrize(
    "pair",
    [("L4", "Q4"), ("T4", "Q4"), ("I2", "I1"), ("L3", "I3"), ("I4", "Q4"), ("S4", "T4")],
)
def test_third_copy_of_a_set_changes_nothing(pair):
    two = PuzzleInstance.common(*pair)
    three = PuzzleInstance.common(pair[0], pair[1], pair[1])
    for area in (4, 8, 12):
        for box in box_family(area):
            if box.cells > 16:
                continue
            try:
                f2, _ = encode_common_multiple(two, box, area)
                f3, _ = encode_common_multiple(three, box, area)
            except (InfeasibleArea, BoxTooSmall):
                continue
            assert solve(f2, backend="builtin").status == solve(f3, backend="builtin").status


@pytest.mark.parametrize("sets,area", [(("L4", "Q4"), 8), (("T4", "Q4"), 16), (("L3", "I3"), 6), (("I2", "Q4"), 8)])
def test_symmetry_breaking_keeps_verdicts(sets, area):
    inst = PuzzleInstance.common(*sets)
    for box in box_family(area):
        if box.cells > 20:
            continue
        try:
            on, _ = encode_common_multiple(inst, box, area, TIGHT_FULL, symmetry=True)
            off, _ = encode_common_multiple(inst, box, area, TIGHT_FULL, symmetry=False)
        except BoxTooSmall:
            continue
        assert solve(on, backend="builtin").status == solve(off, backend="builtin").status, box


def test_every_sat_model_decodes_and_verifies():
    cases = [
        (PuzzleInstance.common("L4", "Q4"), 8),
        (PuzzleInstance.common("I5", "Q4"), 20),
        (PuzzleInstance.common("T4", "Q4"), 16),
        (PuzzleInstance.common("I2", "L3"), 6),
    ]
    n = 0
    for inst, area in cases:
        for box in box_family(area):
            if box.cells > 24:
                continue
            try:
                sol, _, _ = sat_solution(inst, box, area)
            except BoxTooSmall:
                continue
            if sol is None:
                continue
            n += 1
            assert sol.area == area
            rep = verify_solution(inst, sol, check_connectivity=False)
            assert rep.ok, rep.violations
            if is_connected(sol.goal):
                assert verify_solution(inst, sol).ok
    assert n > 0


def test_toy_triple():
    inst = PuzzleInstance.logic(S(bar(2)), S(bar(1), bar(1)), S(bar(2)))
    sol, _, _ = sat_solution(inst, Box(2, 1))
    assert len(sol.tilings) == 3
    assert verify_solution(inst, sol).ok
