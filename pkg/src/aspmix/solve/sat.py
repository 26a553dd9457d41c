"""Conflict-driven clause-learning SAT solver.

Literals are non-zero integers in DIMACS style. The solver is incremental:
clauses may be added between calls and each call may carry assumptions.
Branching is deterministic (activity order with ties broken by variable
index, negative phase first), so identical inputs give identical models.
"""

from __future__ import annotations

import heapq
import time


class ResourceLimit(RuntimeError):
    """Raised when a decision or time budget is exhausted."""


def _luby(i: int) -> int:
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class Solver:
    def __init__(self, max_decisions: int = 10_000_000, max_seconds: float = 60.0):
        self.nvars = 0
        self.ok = True
        self.assign: list[int] = [0]  # per var: 1 true, -1 false, 0 free
        self.level: list[int] = [0]
        self.reason: list = [None]
        self.activity: list[float] = [0.0]
        self.phase: list[int] = [-1]
        self.watches: dict[int, list] = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list = []
        self.var_inc = 1.0
        self.n_learnt = 0
        self.max_decisions = max_decisions
        self.max_seconds = max_seconds
        self.decisions = 0
        self.conflicts = 0
        self.propagations = 0

    # ------------------------------------------------------------ building
    def new_var(self) -> int:
        self.nvars += 1
        v = self.nvars
        self.assign.append(0)
        self.level.append(0)
        self.reason.append(None)
        self.activity.append(0.0)
        self.phase.append(-1)
        self.watches[v] = []
        self.watches[-v] = []
        heapq.heappush(self.heap, (0.0, v))
        return v

    def value(self, lit: int) -> int:
        a = self.assign[lit if lit > 0 else -lit]
        return a if lit > 0 else -a

    def add_clause(self, lits) -> bool:
        """Add a clause at the root level. Returns False once unsatisfiable."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._cancel_until(0)
        out = []
        seen = set()
        for l in lits:
            if -l in seen:
                return True
            if l in seen:
                continue
            v = self.value(l)
            if v == 1 and self.level[abs(l)] == 0:
                return True
            if v == -1 and self.level[abs(l)] == 0:
                continue
            seen.add(l)
            out.append(l)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._enqueue(out[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self._attach(out)
        return True

    def _attach(self, c: list) -> None:
        self.watches[-c[0]].append(c)
        self.watches[-c[1]].append(c)

    # ------------------------------------------------------------ core
    def _enqueue(self, lit: int, reason) -> None:
        v = lit if lit > 0 else -lit
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        """Unit propagation; returns a conflicting clause or None."""
        assign = self.assign
        trail = self.trail
        watches = self.watches
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = -p
            ws = watches[p]  # clauses watching a literal that just became false
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                fv = assign[first] if first > 0 else -assign[-first]
                if fv == 1:
                    ws[j] = c
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    l = c[k]
                    lv = assign[l] if l > 0 else -assign[-l]
                    if lv != -1:
                        c[1], c[k] = l, false_lit
                        watches[-l].append(c)
                        found = True
                        break
                if found:
                    continue
                ws[j] = c
                j += 1
                if fv == -1:
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    self.qhead = len(trail)
                    return c
                self._enqueue(first, c)
            del ws[j:]
        return None

    def _analyze(self, confl):
        seen = set()
        learnt = [0]
        counter = 0
        p = None
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        level = self.level
        while True:
            for q in confl:
                if p is not None and q == p:
                    continue
                v = q if q > 0 else -q
                if v not in seen and level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while True:
                lit = self.trail[idx]
                idx -= 1
                if abs(lit) in seen:
                    break
            p = lit
            confl = self.reason[abs(p)]
            counter -= 1
            if counter == 0:
                break
        learnt[0] = -p
        # minimize: drop literals implied by others in the clause
        in_clause = {abs(l) for l in learnt}
        kept = [learnt[0]]
        for l in learnt[1:]:
            r = self.reason[abs(l)]
            if r is None or any(abs(x) not in in_clause and level[abs(x)] > 0 for x in r if x != -l):
                kept.append(l)
        learnt = kept
        if len(learnt) == 1:
            bt = 0
        else:
            mi = max(range(1, len(learnt)), key=lambda k: level[abs(learnt[k])])
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            bt = level[abs(learnt[1])]
        self.var_inc /= 0.95
        return learnt, bt

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for k in range(1, self.nvars + 1):
                self.activity[k] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[k], k) for k in range(1, self.nvars + 1) if self.assign[k] == 0]
            heapq.heapify(self.heap)
            return
        if self.assign[v] == 0:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for k in range(len(self.trail) - 1, start - 1, -1):
            lit = self.trail[k]
            v = abs(lit)
            self.phase[v] = 1 if lit > 0 else -1
            self.assign[v] = 0
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick(self) -> int:
        heap = self.heap
        while heap:
            act, v = heapq.heappop(heap)
            if self.assign[v] == 0 and -act == self.activity[v]:
                return v
            if self.assign[v] == 0 and -act != self.activity[v]:
                heapq.heappush(heap, (-self.activity[v], v))
        for v in range(1, self.nvars + 1):
            if self.assign[v] == 0:
                return v
        return 0

    def solve(self, assumptions=()) -> bool:
        """True if satisfiable under ``assumptions``; the model is then in
        :meth:`model`. Raises :class:`ResourceLimit` when over budget."""
        if not self.ok:
            return False
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        assumptions = list(assumptions)
        deadline = time.monotonic() + self.max_seconds
        restart_i = 1
        budget = 100 * _luby(restart_i)
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._attach(learnt)
                    self.n_learnt += 1
                    self._enqueue(learnt[0], learnt)
                continue
            if since_restart >= budget:
                restart_i += 1
                budget = 100 * _luby(restart_i)
                since_restart = 0
                self._cancel_until(0)
                if self.conflicts & 63 == 0 and time.monotonic() > deadline:
                    raise ResourceLimit("time limit")
                continue
            lvl = len(self.trail_lim)
            if lvl < len(assumptions):
                p = assumptions[lvl]
                val = self.value(p)
                if val == -1:
                    self._cancel_until(0)
                    return False
                self.trail_lim.append(len(self.trail))
                if val == 0:
                    self._enqueue(p, None)
                continue
            v = self._pick()
            if v == 0:
                self._model = list(self.assign)
                self._cancel_until(0)
                return True
            self.decisions += 1
            if self.decisions > self.max_decisions:
                self._cancel_until(0)
                raise ResourceLimit("decision limit")
            if (self.decisions & 1023) == 0 and time.monotonic() > deadline:
                self._cancel_until(0)
                raise ResourceLimit("time limit")
            self.trail_lim.append(len(self.trail))
            self._enqueue(v if self.phase[v] > 0 else -v, None)

    def model(self) -> list[int]:
        """Assignment of the last satisfiable call (index = variable)."""
        return self._model

    def true_in_model(self, lit: int) -> bool:
        a = self._model[abs(lit)]
        return a == 1 if lit > 0 else a == -1
