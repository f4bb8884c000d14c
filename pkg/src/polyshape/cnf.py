"""CNF formulas, standard encodings, DIMACS I/O and SAT backends.

Backends:

* ``builtin``  -- the pure-Python CDCL solver in :mod:`polyshape.cdcl`.
* ``pysat`` / ``pysat:NAME`` -- a solver from the optional ``python-sat``
  package (Glucose 4 unless NAME says otherwise), kept alive between calls.
* ``pycosat``  -- PicoSAT through the optional ``pycosat`` package.
* ``external:PATH`` (or a bare path) -- any DIMACS solver invoked as
  ``PATH file.cnf`` that prints ``s SATISFIABLE`` / ``v ...`` lines.
* ``auto``     -- the first importable of ``pysat``, ``pycosat``, ``builtin``.

``POLYSHAPE_SAT`` overrides the default backend.
"""

from __future__ import annotations

import os
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import cdcl

SAT, UNSAT, UNKNOWN = cdcl.SAT, cdcl.UNSAT, cdcl.UNKNOWN

PAIRWISE_MAX = 6
PYSAT_DEFAULT = "glucose4"


class CnfError(ValueError):
    pass


class KOutOfRange(CnfError):
    pass


class ExternalSolverFailure(RuntimeError):
    pass


class CnfFormula:
    """Clause database over variables ``1..num_vars``."""

    def __init__(self, num_vars: int = 0):
        self.num_vars = num_vars
        self.clauses: list[list[int]] = []

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def new_vars(self, n: int) -> list[int]:
        first = self.num_vars + 1
        self.num_vars += n
        return list(range(first, first + n))

    def add_clause(self, lits: Iterable[int]) -> None:
        clause = list(lits)
        if not clause:
            raise CnfError("empty clause; UNSAT must come from the solver")
        for lit in clause:
            if lit == 0 or abs(lit) > self.num_vars:
                raise CnfError(f"literal {lit} outside 1..{self.num_vars}")
        self.clauses.append(clause)

    def extend(self, clauses: Iterable[Iterable[int]]) -> None:
        for c in clauses:
            self.add_clause(c)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CnfFormula)
            and self.num_vars == other.num_vars
            and self.clauses == other.clauses
        )

    def __repr__(self) -> str:
        return f"CnfFormula(vars={self.num_vars}, clauses={len(self.clauses)})"


# -- encodings ---------------------------------------------------------------


def at_most_one(f: CnfFormula, lits: Sequence[int], method: str = "auto") -> None:
    lits = list(lits)
    if method == "auto":
        method = "pairwise" if len(lits) <= PAIRWISE_MAX else "commander"
    if method == "pairwise":
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                f.add_clause([-lits[i], -lits[j]])
    elif method == "commander":
        _commander(f, lits)
    else:
        raise CnfError(f"unknown at-most-one method {method!r}")


def _commander(f: CnfFormula, lits: list[int], group: int = 3) -> None:
    while len(lits) > PAIRWISE_MAX:
        commanders = []
        for i in range(0, len(lits), group):
            g = lits[i : i + group]
            c = f.new_var()
            commanders.append(c)
            at_most_one(f, g, "pairwise")
            for x in g:
                f.add_clause([-x, c])
            f.add_clause([-c, *g])
        lits = commanders
    at_most_one(f, lits, "pairwise")


def exactly_one(f: CnfFormula, lits: Sequence[int]) -> None:
    lits = list(lits)
    if not lits:
        raise CnfError("exactly-one over no literals is unsatisfiable")
    f.add_clause(lits)
    at_most_one(f, lits)


def cardinality_equals(f: CnfFormula, lits: Sequence[int], k: int) -> None:
    """Exactly ``k`` of ``lits`` true, as a sequential counter.

    Register ``r[i][j]`` is equivalent to "at least j+1 of lits[0..i] are
    true"; counting stops at k+1 so the encoding has n*(k+1) auxiliaries at
    most.
    """
    lits = list(lits)
    n = len(lits)
    if not 0 <= k <= n:
        raise KOutOfRange(f"k={k} outside 0..{n}")
    if k == 0:
        for x in lits:
            f.add_clause([-x])
        return
    if k == n:
        for x in lits:
            f.add_clause([x])
        return
    top = k + 1  # registers j = 0..k; j == k means overflow
    prev: list[int | bool] = [False] * top
    for i, x in enumerate(lits):
        cur: list[int | bool] = []
        for j in range(top):
            if j > i:
                cur.append(False)
                continue
            below = True if j == 0 else prev[j - 1]
            same = prev[j]
            r = f.new_var()
            cur.append(r)
            # r <- same ; r <- x & below
            if same is True:
                f.add_clause([r])
            elif same is not False:
                f.add_clause([-same, r])
            if below is True:
                f.add_clause([-x, r])
            elif below is not False:
                f.add_clause([-x, -below, r])
            # r -> same | x ; r -> same | below
            tail = [] if same is False else [same]
            f.add_clause([-r, *tail, x])
            if below is False:
                f.add_clause([-r, *tail])
            elif below is not True:
                f.add_clause([-r, *tail, below])
        prev = cur
    f.add_clause([prev[k - 1]])
    if prev[k] is not False:
        f.add_clause([-prev[k]])


# -- DIMACS ------------------------------------------------------------------


def emit_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    f = None
    pending: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise CnfError(f"bad header {line!r}")
            f = CnfFormula(int(parts[2]))
            continue
        if f is None:
            raise CnfError("clause before 'p cnf' header")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                f.add_clause(pending)
                pending = []
            else:
                pending.append(lit)
    if f is None:
        raise CnfError("missing 'p cnf' header")
    if pending:
        f.add_clause(pending)
    return f


# -- solving -----------------------------------------------------------------


class Model:
    """Total assignment; ``model[lit]`` gives the truth value of a literal."""

    def __init__(self, values: Sequence[bool]):
        self.values = list(values)

    @classmethod
    def from_lits(cls, num_vars: int, lits: Iterable[int]) -> "Model":
        values = [False] * (num_vars + 1)
        for lit in lits:
            if 0 < abs(lit) <= num_vars:
                values[abs(lit)] = lit > 0
        return cls(values)

    def __getitem__(self, lit: int) -> bool:
        v = self.values[abs(lit)]
        return v if lit > 0 else not v

    def satisfies(self, f: CnfFormula) -> bool:
        return all(any(self[l] for l in c) for c in f.clauses)

    def true_vars(self) -> list[int]:
        return [v for v in range(1, len(self.values)) if self.values[v]]


@dataclass
class Budget:
    conflicts: int | None = None
    seconds: float | None = None

    def deadline(self) -> float | None:
        return None if self.seconds is None else time.monotonic() + self.seconds


@dataclass
class Verdict:
    status: str
    model: Model | None = None
    conflicts: int = 0
    wall_ms: float = 0.0
    backend: str = ""

    @property
    def sat(self) -> bool:
        return self.status == SAT

    @property
    def unsat(self) -> bool:
        return self.status == UNSAT


def default_backend() -> str:
    return os.environ.get("POLYSHAPE_SAT", "auto")


def resolve_backend(name: str | None) -> str:
    name = name or default_backend()
    if name == "auto":
        try:
            import pysat.solvers  # noqa: F401

            return "pysat:" + PYSAT_DEFAULT
        except ImportError:
            pass
        try:
            import pycosat  # noqa: F401

            return "pycosat"
        except ImportError:
            return "builtin"
    if name == "pysat":
        return "pysat:" + PYSAT_DEFAULT
    if name in ("builtin", "pycosat") or name.startswith("pysat:"):
        return name
    if name.startswith("external:"):
        return name
    return "external:" + name


class Session:
    """Incremental solving: clauses appended to the formula are picked up
    by the next :meth:`solve` call.  Nothing is ever removed."""

    def __init__(self, f: CnfFormula, backend: str | None = None):
        self.f = f
        self.backend = resolve_backend(backend)
        self._fed = 0
        self._cdcl = cdcl.CdclSolver() if self.backend == "builtin" else None
        self._pysat = None
        if self.backend.startswith("pysat:"):
            from pysat.solvers import Solver

            try:
                self._pysat = Solver(name=self.backend.split(":", 1)[1])
            except Exception as e:
                raise ExternalSolverFailure(f"cannot start {self.backend}: {e}") from e
        if self.backend.startswith("external:"):
            path = self.backend.split(":", 1)[1]
            if not os.path.exists(path):
                raise ExternalSolverFailure(f"external solver {path!r} not found")

    def solve(self, assumptions: Sequence[int] = (), budget: Budget | None = None) -> Verdict:
        budget = budget or Budget()
        t0 = time.monotonic()
        if self.backend == "builtin":
            v = self._solve_builtin(assumptions, budget)
        elif self.backend == "pycosat":
            v = self._solve_pycosat(assumptions, budget)
        elif self._pysat is not None:
            v = self._solve_pysat(assumptions, budget)
        else:
            v = self._solve_external(assumptions, budget)
        v.wall_ms = (time.monotonic() - t0) * 1000.0
        v.backend = self.backend
        return v

    def _solve_builtin(self, assumptions, budget: Budget) -> Verdict:
        s = self._cdcl
        s.ensure_vars(self.f.num_vars)
        for c in self.f.clauses[self._fed :]:
            s.add_clause(c)
        self._fed = len(self.f.clauses)
        before = s.stats.conflicts
        status = s.solve(assumptions, budget.conflicts, budget.deadline())
        model = Model(s.model[: self.f.num_vars + 1]) if status == SAT else None
        return Verdict(status, model, s.stats.conflicts - before)

    def _solve_pysat(self, assumptions, budget: Budget) -> Verdict:
        s = self._pysat
        for c in self.f.clauses[self._fed :]:
            s.add_clause(c)
        self._fed = len(self.f.clauses)
        if budget.conflicts is not None:
            s.conf_budget(budget.conflicts)
        timer = None
        if budget.seconds is not None:
            timer = threading.Timer(budget.seconds, s.interrupt)
            timer.start()
        try:
            limited = budget.conflicts is not None or timer is not None
            if limited:
                res = s.solve_limited(assumptions=list(assumptions), expect_interrupt=timer is not None)
            else:
                res = s.solve(assumptions=list(assumptions))
        finally:
            if timer is not None:
                timer.cancel()
                s.clear_interrupt()
        stats = s.accum_stats() or {}
        conflicts = stats.get("conflicts", 0) - getattr(self, "_pysat_conflicts", 0)
        self._pysat_conflicts = stats.get("conflicts", 0)
        if res is None:
            return Verdict(UNKNOWN, conflicts=conflicts)
        if not res:
            return Verdict(UNSAT, conflicts=conflicts)
        return Verdict(SAT, Model.from_lits(self.f.num_vars, s.get_model()), conflicts)

    def close(self) -> None:
        if self._pysat is not None:
            self._pysat.delete()
            self._pysat = None

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    def _solve_pycosat(self, assumptions, budget: Budget) -> Verdict:
        import pycosat

        clauses = self.f.clauses + [[a] for a in assumptions]
        kwargs = {"vars": self.f.num_vars}
        if budget.conflicts is not None:
            kwargs["prop_limit"] = budget.conflicts * 1000
        res = pycosat.solve(clauses, **kwargs)
        if res == "UNSAT":
            return Verdict(UNSAT)
        if res == "UNKNOWN":
            return Verdict(UNKNOWN)
        return Verdict(SAT, Model.from_lits(self.f.num_vars, res))

    def _solve_external(self, assumptions, budget: Budget) -> Verdict:
        path = self.backend.split(":", 1)[1]
        g = CnfFormula(self.f.num_vars)
        g.clauses = self.f.clauses + [[a] for a in assumptions]
        with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
            fh.write(emit_dimacs(g))
            name = fh.name
        try:
            try:
                proc = subprocess.run(
                    [path, name], capture_output=True, text=True, timeout=budget.seconds
                )
            except subprocess.TimeoutExpired:
                return Verdict(UNKNOWN)
        finally:
            os.unlink(name)
        status = None
        lits: list[int] = []
        for line in proc.stdout.splitlines():
            if line.startswith("s "):
                word = line[2:].strip()
                status = {"SATISFIABLE": SAT, "UNSATISFIABLE": UNSAT}.get(word, UNKNOWN)
            elif line.startswith("v "):
                lits.extend(int(t) for t in line[2:].split() if t != "0")
        if status is None:
            if proc.returncode not in (0, 10, 20):
                raise ExternalSolverFailure(
                    f"{path} exited {proc.returncode} without a verdict: {proc.stderr.strip()[:200]}"
                )
            status = UNKNOWN
        model = Model.from_lits(self.f.num_vars, lits) if status == SAT else None
        return Verdict(status, model)


def solve(
    f: CnfFormula,
    assumptions: Sequence[int] = (),
    backend: str | None = None,
    budget: Budget | None = None,
) -> Verdict:
    return Session(f, backend).solve(assumptions, budget)
