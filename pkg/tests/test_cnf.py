import math
import random
import sys
import textwrap

import pytest

from polyshape import cdcl
from polyshape.cnf import (
    SAT,
    UNKNOWN,
    UNSAT,
    Budget,
    CnfFormula,
    ExternalSolverFailure,
    KOutOfRange,
    Session,
    at_most_one,
    cardinality_equals,
    emit_dimacs,
    exactly_one,
    parse_dimacs,
    resolve_backend,
    solve,
)

from oracles import dpll, projected_models


def random_cnf(rng, nvars, nclauses, width=3):
    f = CnfFormula(nvars)
    for _ in range(nclauses):
        vs = rng.sample(range(1, nvars + 1), min(width, nvars))
        f.add_clause([v if rng.random() < 0.5 else -v for v in vs])
    return f


def corpus(n=200, seed=2024):
    rng = random.Random(seed)
    out = []
    for i in range(n):
        nv = rng.randint(3, 20)
        ratio = rng.choice([2.0, 3.5, 4.26, 5.0, 6.0])
        out.append(random_cnf(rng, nv, max(1, int(nv * ratio)), rng.choice([2, 3, 3, 4])))
    return out


def test_builtin_matches_dpll_on_corpus():
    for f in corpus():
        ref = dpll(f.clauses, f.num_vars)
        v = solve(f, backend="builtin")
        assert v.status == (SAT if ref is not None else UNSAT)
        if v.sat:
            assert v.model.satisfies(f)


def test_learned_clauses_are_implied():
    for f in corpus(60, seed=5):
        s = cdcl.CdclSolver(f.num_vars)
        for c in f.clauses:
            s.add_clause(c)
        status = s.solve()
        if status != SAT:
            continue
        g = CnfFormula(f.num_vars)
        g.clauses = f.clauses + s.learned_clauses()
        assert dpll(g.clauses, g.num_vars) is not None


def test_builtin_is_deterministic():
    rng = random.Random(3)
    f = random_cnf(rng, 60, 250)
    a = solve(f, backend="builtin")
    b = solve(f, backend="builtin")
    assert a.status == b.status
    if a.sat:
        assert a.model.true_vars() == b.model.true_vars()


def test_trivial_formulas():
    f = CnfFormula(1)
    f.add_clause([1])
    f.add_clause([-1])
    assert solve(f, backend="builtin").status == UNSAT
    assert solve(CnfFormula(3), backend="builtin").status == SAT


def test_empty_clause_rejected():
    f = CnfFormula(2)
    with pytest.raises(ValueError):
        f.add_clause([])
    with pytest.raises(ValueError):
        f.add_clause([3])


def test_assumptions_and_incremental_clauses():
    f = CnfFormula(2)
    f.add_clause([1, 2])
    s = Session(f, "builtin")
    assert s.solve().sat
    assert s.solve([-1, -2]).status == UNSAT
    assert s.solve([-1]).model[2]
    f.add_clause([-2])
    v = s.solve()
    assert v.sat and v.model[1] and not v.model[2]


def test_conflict_budget_gives_unknown():
    # pigeonhole 8 -> 7 is hard for resolution
    n = 8
    f = CnfFormula(n * (n - 1))
    var = lambda p, h: p * (n - 1) + h + 1
    for p in range(n):
        f.add_clause([var(p, h) for h in range(n - 1)])
    for h in range(n - 1):
        for p in range(n):
            for q in range(p + 1, n):
                f.add_clause([-var(p, h), -var(q, h)])
    assert solve(f, backend="builtin", budget=Budget(conflicts=50)).status == UNKNOWN


def test_at_most_one_pairwise_clause_count():
    f = CnfFormula(3)
    at_most_one(f, [1, 2, 3], "pairwise")
    assert len(f.clauses) == 3
    g = CnfFormula(0)
    at_most_one(g, [])
    assert g.clauses == []


def test_at_most_one_commander_20():
    f = CnfFormula(20)
    lits = list(range(1, 21))
    at_most_one(f, lits, "commander")
    # count projected models with the builtin solver plus blocking clauses
    s = Session(f, "builtin")
    seen = set()
    while True:
        v = s.solve()
        if not v.sat:
            break
        proj = tuple(v.model[l] for l in lits)
        seen.add(proj)
        f.add_clause([-l if b else l for l, b in zip(lits, proj)])
    assert len(seen) == 21


@pytest.mark.parametrize("n", range(1, 11))
def test_cardinality_counts_are_binomial(n):
    for k in range(0, n + 1):
        f = CnfFormula(n)
        lits = list(range(1, n + 1))
        cardinality_equals(f, lits, k)
        models = projected_models(f.clauses, f.num_vars, lits)
        assert len(models) == math.comb(n, k)
        assert all(sum(m) == k for m in models)


def test_cardinality_out_of_range():
    with pytest.raises(KOutOfRange):
        cardinality_equals(CnfFormula(3), [1, 2, 3], 4)


def test_exactly_one():
    f = CnfFormula(4)
    exactly_one(f, [1, 2, 3, 4])
    assert len(projected_models(f.clauses, 4, [1, 2, 3, 4])) == 4


def test_dimacs_format_and_round_trip():
    f = CnfFormula(2)
    f.add_clause([1, -2])
    assert emit_dimacs(f) == "p cnf 2 1\n1 -2 0\n"
    rng = random.Random(11)
    for _ in range(50):
        g = random_cnf(rng, rng.randint(1, 30), rng.randint(1, 60), rng.randint(1, 4))
        text = emit_dimacs(g)
        assert parse_dimacs(text) == g
        header = text.splitlines()[0].split()
        assert int(header[3]) == len(text.splitlines()) - 1


def _fake_solver(tmp_path, body):
    path = tmp_path / "fake_solver.py"
    path.write_text(f"#!{sys.executable}\n" + textwrap.dedent(body))
    path.chmod(0o755)
    return str(path)


def test_external_bridge(tmp_path):
    # a tiny DIMACS solver built on the reference DPLL
    here = str((__import__("pathlib").Path(__file__).parent))
    path = _fake_solver(
        tmp_path,
        f"""
        import sys
        sys.path.insert(0, {here!r})
        from oracles import dpll
        from polyshape.cnf import parse_dimacs
        f = parse_dimacs(open(sys.argv[1]).read())
        m = dpll(f.clauses, f.num_vars)
        if m is None:
            print("s UNSATISFIABLE")
            sys.exit(20)
        print("s SATISFIABLE")
        print("v " + " ".join(str(v if m.get(v, False) else -v) for v in range(1, f.num_vars + 1)) + " 0")
        sys.exit(10)
        """,
    )
    rng = random.Random(1)
    for _ in range(10):
        f = random_cnf(rng, 12, 50)
        v = solve(f, backend=path)
        assert v.status == (SAT if dpll(f.clauses, f.num_vars) else UNSAT)
        if v.sat:
            assert v.model.satisfies(f)


def test_external_failure(tmp_path):
    path = _fake_solver(tmp_path, "import sys\nsys.exit(3)\n")
    f = CnfFormula(1)
    f.add_clause([1])
    with pytest.raises(ExternalSolverFailure):
        solve(f, backend=path)
    with pytest.raises(ExternalSolverFailure):
        solve(f, backend=str(tmp_path / "missing"))


def test_backend_resolution(monkeypatch):
    assert resolve_backend("builtin") == "builtin"
    assert resolve_backend("/usr/bin/x").startswith("external:")
    monkeypatch.setenv("POLYSHAPE_SAT", "builtin")
    assert resolve_backend(None) == "builtin"


def _optional_backends():
    out = []
    try:
        import pysat.solvers  # noqa: F401

        out.append("pysat")
    except ImportError:
        pass
    try:
        import pycosat  # noqa: F401

        out.append("pycosat")
    except ImportError:
        pass
    return out


@pytest.mark.parametrize("backend", _optional_backends())
def test_optional_backends_agree(backend):
    for f in corpus(40, seed=9):
        ref = dpll(f.clauses, f.num_vars)
        v = solve(f, backend=backend)
        assert v.status == (SAT if ref is not None else UNSAT)
        if v.sat:
            assert v.model.satisfies(f)
