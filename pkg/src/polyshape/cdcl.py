"""Builtin CDCL solver: two watched literals, 1UIP learning, VSIDS, Luby restarts.

Literals are encoded internally as ``2*v`` (positive) and ``2*v + 1``
(negative).  The solver is incremental: clauses may be appended between calls
and each call may carry assumption literals.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

SAT, UNSAT, UNKNOWN = "sat", "unsat", "unknown"


def _code(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


def _luby(i: int) -> int:
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        if i >= 1 << (k - 1):
            i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


@dataclass
class Stats:
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    restarts: int = 0
    learned: int = 0


class CdclSolver:
    def __init__(self, num_vars: int = 0, restart_unit: int = 100, decay: float = 0.95):
        self.nvars = 0
        self.value: list[int] = [0, 0]  # per literal code: 1 true, -1 false, 0 free
        self.level: list[int] = [0]
        self.reason: list = [None]
        self.activity: list[float] = [0.0]
        self.phase: list[bool] = [False]
        self.seen: list[bool] = [False]
        self.watches: list[list] = [[], []]
        self.clauses: list[list[int]] = []
        self.learnts: list[tuple[int, list[int]]] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.decay = decay
        self.restart_unit = restart_unit
        self.max_learnts = 2000.0
        self.ok = True
        self.stats = Stats()
        self.model: list[bool] | None = None
        self.ensure_vars(num_vars)

    def learned_clauses(self) -> list[list[int]]:
        """Learned clauses currently kept, as signed literals."""
        return [[c >> 1 if c % 2 == 0 else -(c >> 1) for c in cl] for _, cl in self.learnts]

    # -- construction -------------------------------------------------------

    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.nvars += 1
            self.value += [0, 0]
            self.level.append(0)
            self.reason.append(None)
            self.activity.append(0.0)
            self.phase.append(False)
            self.seen.append(False)
            self.watches += [[], []]
            heapq.heappush(self.heap, (-0.0, self.nvars))

    def add_clause(self, lits) -> bool:
        """Add a DIMACS-style clause; returns False once the formula is UNSAT."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        codes = set()
        for lit in lits:
            if lit == 0:
                raise ValueError("literal 0 is not allowed")
            self.ensure_vars(abs(lit))
            codes.add(_code(lit))
        clause = []
        for c in codes:
            if c ^ 1 in codes or self.value[c] == 1:
                return True
            if self.value[c] == 0:
                clause.append(c)
        clause.sort()
        if not clause:
            self.ok = False
            return False
        if len(clause) == 1:
            self._enqueue(clause[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self.clauses.append(clause)
        self.watches[clause[0]].append(clause)
        self.watches[clause[1]].append(clause)
        return True

    # -- core ---------------------------------------------------------------

    def _enqueue(self, code: int, reason) -> None:
        v = code >> 1
        self.value[code] = 1
        self.value[code ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(code)

    def _propagate(self):
        value = self.value
        watches = self.watches
        trail = self.trail
        props = 0
        while self.qhead < len(trail):
            false_lit = trail[self.qhead] ^ 1
            self.qhead += 1
            props += 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if value[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if value[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if value[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.stats.propagations += props
                        return c
                    v = first >> 1
                    value[first] = 1
                    value[first ^ 1] = -1
                    self.level[v] = len(self.trail_lim)
                    self.reason[v] = c
                    trail.append(first)
            del ws[j:]
        self.stats.propagations += props
        return None

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        value, phase, activity, heap = self.value, self.phase, self.activity, self.heap
        for code in self.trail[stop:]:
            v = code >> 1
            value[code] = 0
            value[code ^ 1] = 0
            phase[v] = not (code & 1)
            self.reason[v] = None
            heapq.heappush(heap, (-activity[v], v))
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.nvars + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[i], i) for i in range(1, self.nvars + 1)]
            heapq.heapify(self.heap)
        elif self.value[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _analyze(self, confl):
        seen, level, reason, trail = self.seen, self.level, self.reason, self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        marked = []
        path = 0
        p = -1
        idx = len(trail) - 1
        while True:
            for q in confl:
                if q == p:
                    continue
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    marked.append(v)
                    self._bump(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None or any(not seen[x >> 1] and level[x >> 1] > 0 for x in r if x != q ^ 1):
                keep.append(q)
        for v in marked:
            seen[v] = False
        if len(keep) == 1:
            back = 0
        else:
            best = max(range(1, len(keep)), key=lambda i: level[keep[i] >> 1])
            keep[1], keep[best] = keep[best], keep[1]
            back = level[keep[1] >> 1]
        lbd = len({level[q >> 1] for q in keep})
        return keep, back, lbd

    def _pick(self):
        value, heap, act = self.value, self.heap, self.activity
        while heap:
            neg, v = heap[0]
            if value[2 * v] != 0 or -neg != act[v]:
                heapq.heappop(heap)
                continue
            return v
        for v in range(1, self.nvars + 1):
            if value[2 * v] == 0:
                return v
        return 0

    def _reduce(self) -> None:
        self.learnts.sort(key=lambda t: (t[0], len(t[1])))
        cut = len(self.learnts) // 2
        dropped = {id(c) for lbd, c in self.learnts[cut:] if lbd > 2}
        if not dropped:
            return
        self.learnts = [t for t in self.learnts if id(t[1]) not in dropped]
        for ws in self.watches:
            if ws:
                ws[:] = [c for c in ws if id(c) not in dropped]

    def solve(self, assumptions=(), max_conflicts=None, deadline=None) -> str:
        """Return SAT, UNSAT or UNKNOWN (budget exhausted)."""
        self.model = None
        if not self.ok:
            return UNSAT
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return UNSAT
        assume = []
        for lit in assumptions:
            self.ensure_vars(abs(lit))
            assume.append(_code(lit))
        conflicts = 0
        restart_no = 1
        limit = _luby(restart_no) * self.restart_unit
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                conflicts += 1
                since_restart += 1
                self.stats.conflicts += 1
                if not self.trail_lim:
                    self.ok = False
                    return UNSAT
                learnt, back, lbd = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self.learnts.append((lbd, learnt))
                    self.stats.learned += 1
                    self._enqueue(learnt[0], learnt)
                self.var_inc /= self.decay
                if max_conflicts is not None and conflicts >= max_conflicts:
                    self._cancel_until(0)
                    return UNKNOWN
                if deadline is not None and conflicts % 64 == 0 and time.monotonic() > deadline:
                    self._cancel_until(0)
                    return UNKNOWN
                continue
            if since_restart >= limit:
                self.stats.restarts += 1
                restart_no += 1
                limit = _luby(restart_no) * self.restart_unit
                since_restart = 0
                self._cancel_until(0)
                if len(self.heap) > 4 * self.nvars + 1024:
                    act = self.activity
                    self.heap = [(-act[i], i) for i in range(1, self.nvars + 1) if self.value[2 * i] == 0]
                    heapq.heapify(self.heap)
                if len(self.learnts) > self.max_learnts + len(self.trail):
                    self._reduce()
                    self.max_learnts *= 1.1
                continue
            dl = len(self.trail_lim)
            if dl < len(assume):
                a = assume[dl]
                if self.value[a] == -1:
                    self._cancel_until(0)
                    return UNSAT
                self.trail_lim.append(len(self.trail))
                if self.value[a] == 0:
                    self._enqueue(a, None)
                continue
            v = self._pick()
            if v == 0:
                self.model = [False] + [self.value[2 * i] == 1 for i in range(1, self.nvars + 1)]
                self._cancel_until(0)
                return SAT
            self.stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(2 * v if self.phase[v] else 2 * v + 1, None)
