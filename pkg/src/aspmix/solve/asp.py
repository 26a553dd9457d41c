"""Answer sets of ground programs, with consistency-restoring rules.

The program is compiled to its Clark completion over a CDCL core. A
complementary disjunction ``p | -p :- B`` is shifted into ``p :- B, not -p``
and ``-p :- B, not p``; for consistent candidates the two readings have the
same answer sets. Candidate models of the completion are checked against the
least model of the reduct and, when unstable, excluded with a loop nogood.

CR rules carry a selector variable in their body. The applied set is
minimised lexicographically by priority bucket (lower priority value first)
using sequential counters bounded through assumptions.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..ground import GroundProgram
from ..lang.syntax import Literal
from .sat import ResourceLimit, Solver

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
RESOURCE_LIMIT = "resource-limit"


@dataclass(frozen=True)
class AnswerSet:
    ids: frozenset
    literals: frozenset
    applied: tuple = ()
    counts: tuple = ()  # (priority, applied count) pairs, strongest first

    def __contains__(self, lit) -> bool:
        return lit in self.literals

    def by_pred(self, pred: str) -> list[Literal]:
        return sorted((l for l in self.literals if l.atom.pred == pred), key=str)

    @property
    def n_applied(self) -> int:
        return len(self.applied)


@dataclass
class SolveResult:
    status: str
    models: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.status == CONSISTENT


class _Rule:
    __slots__ = ("head", "pos", "neg", "sel", "body")

    def __init__(self, head, pos, neg, sel):
        self.head = head
        self.pos = pos
        self.neg = neg
        self.sel = sel
        self.body = 0


class Engine:
    """Incremental answer-set search over one ground program."""

    def __init__(self, gp: GroundProgram, use_cr: bool = True,
                 max_decisions: int = 10_000_000, max_seconds: float = 60.0):
        self.gp = gp
        self.sat = Solver(max_decisions, max_seconds)
        self.t0 = time.monotonic()
        n = len(gp.symbols)
        for _ in range(n):
            self.sat.new_var()
        self.true_var = self.sat.new_var()
        self.sat.add_clause([self.true_var])
        self.cr_index: list[int] = []  # rule index in gp for each selector
        self.selectors: list[int] = []
        self.sel_prio: list[int] = []
        rules: list[_Rule] = []
        for k, r in enumerate(gp.rules):
            sel = None
            if r.cr:
                if not use_cr:
                    continue
                sel = self.sat.new_var()
                self.cr_index.append(k)
                self.selectors.append(sel)
                self.sel_prio.append(r.priority)
            pos = tuple(sorted(set(r.pos)))
            neg = tuple(sorted(set(r.neg)))
            if not r.head:
                rules.append(_Rule(None, pos, neg, sel))
            elif len(r.head) == 1:
                rules.append(_Rule(r.head[0], pos, neg, sel))
            else:
                a, b = r.head
                rules.append(_Rule(a, pos, tuple(sorted(set(neg) | {b})), sel))
                rules.append(_Rule(b, pos, tuple(sorted(set(neg) | {a})), sel))
        self.rules = rules
        self._encode(n)
        self.tight = self._is_tight(n)
        self.bounds: list[int] = []  # assumption literals fixing CR minimality
        self._counters: dict[int, list[int]] = {}
        self.min_counts: tuple = ()

    # ------------------------------------------------------------ encoding
    def _encode(self, n: int) -> None:
        sat = self.sat
        bodies: dict[tuple, int] = {}
        support: list[list[int]] = [[] for _ in range(n)]
        for r in self.rules:
            lits = [p + 1 for p in r.pos] + [-(q + 1) for q in r.neg]
            if r.sel is not None:
                lits.append(r.sel)
            if r.head is None:
                sat.add_clause([-l for l in lits])
                continue
            key = tuple(lits)
            b = bodies.get(key)
            if b is None:
                if not lits:
                    b = self.true_var
                elif len(lits) == 1:
                    b = lits[0]
                else:
                    b = sat.new_var()
                    for l in lits:
                        sat.add_clause([-b, l])
                    sat.add_clause([b] + [-l for l in lits])
                bodies[key] = b
            r.body = b
            sat.add_clause([-b, r.head + 1])
            support[r.head].append(b)
        for a in range(n):
            sat.add_clause([-(a + 1)] + support[a])
        for i, j in self.gp.complement_pairs():
            sat.add_clause([-(i + 1), -(j + 1)])
        self.support = support
        self.heads: list[list[_Rule]] = [[] for _ in range(n)]
        self.pos_occ: list[list[_Rule]] = [[] for _ in range(n)]
        for r in self.rules:
            if r.head is not None:
                self.heads[r.head].append(r)
                for p in r.pos:
                    self.pos_occ[p].append(r)

    def _is_tight(self, n: int) -> bool:
        graph = [[] for _ in range(n)]
        for r in self.rules:
            if r.head is not None:
                for p in r.pos:
                    graph[r.head].append(p)
        # iterative DFS cycle detection
        color = [0] * n
        for s in range(n):
            if color[s]:
                continue
            stack = [(s, 0)]
            color[s] = 1
            while stack:
                v, i = stack[-1]
                if i < len(graph[v]):
                    stack[-1] = (v, i + 1)
                    w = graph[v][i]
                    if color[w] == 1:
                        return False
                    if color[w] == 0:
                        color[w] = 1
                        stack.append((w, 0))
                else:
                    color[v] = 2
                    stack.pop()
        return True

    # ------------------------------------------------------------ stability
    def _unfounded(self, model_true) -> set[int]:
        """Atoms true in the model but not in the least model of its reduct."""
        n = len(self.gp.symbols)
        sat_model = self.sat.model()
        M = {a for a in range(n) if sat_model[a + 1] == 1}
        remaining = {}
        derived: set[int] = set()
        queue = []
        for r in self.rules:
            if r.head is None:
                continue
            if r.sel is not None and sat_model[r.sel] != 1:
                continue
            if any(q in M for q in r.neg):
                continue
            c = len(r.pos)
            remaining[id(r)] = c
            if c == 0 and r.head not in derived:
                derived.add(r.head)
                queue.append(r.head)
        while queue:
            a = queue.pop()
            for r in self.pos_occ[a]:
                k = id(r)
                if k in remaining:
                    remaining[k] -= 1
                    if remaining[k] == 0 and r.head not in derived:
                        derived.add(r.head)
                        queue.append(r.head)
        return M - derived

    def _search(self, assumptions) -> bool:
        """Find a stable model under ``assumptions``; adds loop nogoods."""
        while True:
            if not self.sat.solve(assumptions):
                return False
            if self.tight:
                return True
            U = self._unfounded(None)
            if not U:
                return True
            # a true atom of U needs some rule supporting U from outside U
            ext = sorted({r.body for u in U for r in self.heads[u]
                          if not any(p in U for p in r.pos)})
            for u in sorted(U):
                self.sat.add_clause([-(u + 1)] + ext)

    # ------------------------------------------------------------ CR bounds
    def _counter(self, prio: int) -> list[int]:
        """Outputs R[j] (1-based) meaning at least j selectors of ``prio`` are on."""
        if prio in self._counters:
            return self._counters[prio]
        xs = [s for s, p in zip(self.selectors, self.sel_prio) if p == prio]
        sat = self.sat
        n = len(xs)
        prev: list[int] = []
        for i, x in enumerate(xs):
            cur = [sat.new_var() for _ in range(i + 1)]
            sat.add_clause([-x, cur[0]])
            for j in range(len(prev)):
                sat.add_clause([-prev[j], cur[j]])
                sat.add_clause([-x, -prev[j], cur[j + 1]])
            prev = cur
        self._counters[prio] = prev + [None] * (n - len(prev))
        return self._counters[prio]

    def _at_most(self, prio: int, k: int):
        outs = self._counter(prio)
        if k >= len(outs):
            return None
        return -outs[k]

    def priorities(self) -> list[int]:
        return sorted(set(self.sel_prio))

    def minimize(self, assumptions=()) -> bool:
        """Fix the lexicographically least CR application level.
        Returns False if no answer set exists at any level."""
        assumptions = list(assumptions)
        off = [-s for s in self.selectors]
        if self._search(assumptions + off):
            self.bounds = off
            self.min_counts = tuple((p, 0) for p in self.priorities())
            return True
        if not self.selectors or not self._search(assumptions):
            return False
        counts = self._model_counts()
        fixed: list[int] = []
        result = []
        for prio in self.priorities():
            best = counts[prio]
            for k in range(0, counts[prio]):
                lit = self._at_most(prio, k)
                if self._search(assumptions + fixed + [lit]):
                    best = k
                    counts = self._model_counts()
                    break
            lit = self._at_most(prio, best)
            if lit is not None:
                fixed.append(lit)
            result.append((prio, best))
        self.bounds = fixed
        self.min_counts = tuple(result)
        return True

    def _model_counts(self) -> dict[int, int]:
        out = {p: 0 for p in self.priorities()}
        for s, p in zip(self.selectors, self.sel_prio):
            if self.sat.true_in_model(s):
                out[p] += 1
        return out

    # ------------------------------------------------------------ models
    def find(self, assumptions=()) -> AnswerSet | None:
        """One answer set at the fixed CR level satisfying ``assumptions``."""
        if self._search(list(self.bounds) + list(assumptions)):
            return self.current()
        return None

    def current(self) -> AnswerSet:
        m = self.sat.model()
        gp = self.gp
        ids = frozenset(a for a in range(len(gp.symbols)) if m[a + 1] == 1)
        applied = tuple(k for k, s in zip(self.cr_index, self.selectors) if m[s] == 1)
        counts = self._model_counts() if self.selectors else {}
        return AnswerSet(ids, frozenset(gp.symbols[i] for i in ids), applied,
                         tuple(sorted(counts.items())))

    def enumerate(self, limit: int = 0, project=None, assumptions=()) -> list[AnswerSet]:
        """Distinct answer sets (distinct on ``project`` atom ids, default all)."""
        proj = sorted(project) if project is not None else range(len(self.gp.symbols))
        act = self.sat.new_var()
        out = []
        base = list(self.bounds) + list(assumptions) + [act]
        try:
            while limit <= 0 or len(out) < limit:
                if not self._search(base):
                    break
                a = self.current()
                out.append(a)
                block = [-act] + [-(i + 1) if i in a.ids else (i + 1) for i in proj]
                if len(block) == 1:
                    break
                self.sat.add_clause(block)
        finally:
            self.sat.add_clause([-act])
        return out

    def stats(self) -> dict:
        return {"decisions": self.sat.decisions, "conflicts": self.sat.conflicts,
                "seconds": round(time.monotonic() - self.t0, 6)}

    def id_lit(self, lit: Literal) -> int | None:
        i = self.gp.id_of(lit)
        return None if i is None else i + 1


def _run(gp: GroundProgram, use_cr: bool, limit: int, project, max_decisions, max_seconds):
    eng = Engine(gp, use_cr, max_decisions, max_seconds)
    try:
        if use_cr:
            if not eng.minimize():
                return SolveResult(INCONSISTENT, [], eng.stats())
        models = eng.enumerate(limit, project)
    except ResourceLimit as e:
        st = eng.stats()
        st["reason"] = str(e)
        return SolveResult(RESOURCE_LIMIT, [], st)
    st = eng.stats()
    return SolveResult(CONSISTENT if models else INCONSISTENT, models, st)


def answer_sets(gp: GroundProgram, limit: int = 0, project=None,
                max_decisions: int = 10_000_000, max_seconds: float = 60.0) -> SolveResult:
    """Answer sets of ``gp`` ignoring CR rules; ``limit`` 0 means all."""
    return _run(gp, False, limit, project, max_decisions, max_seconds)


def solve_with_cr(gp: GroundProgram, limit: int = 0, project=None,
                  max_decisions: int = 10_000_000, max_seconds: float = 60.0) -> SolveResult:
    """Answer sets at the minimal CR application level."""
    return _run(gp, True, limit, project, max_decisions, max_seconds)


def is_answer_set(gp: GroundProgram, candidate, applied=()) -> bool:
    """Reduct check. ``candidate`` holds atom ids or literals; ``applied`` lists
    CR rule indices that count as ordinary rules."""
    X = {c if isinstance(c, int) else gp.id_of(c) for c in candidate}
    if None in X:
        return False
    for i in X:
        j = gp.complement(i)
        if j is not None and j in X:
            return False
    applied = set(applied)
    active = []
    for k, r in enumerate(gp.rules):
        if r.cr and k not in applied:
            continue
        if any(q in X for q in r.neg):
            continue
        if not r.head:
            if all(p in X for p in r.pos):
                return False
            continue
        if len(r.head) == 1:
            active.append((r.head[0], r.pos))
        else:
            a, b = r.head
            # shifted reading of the complementary pair
            if b not in X:
                active.append((a, r.pos))
            if a not in X:
                active.append((b, r.pos))
    derived: set[int] = set()
    changed = True
    while changed:
        changed = False
        for h, pos in active:
            if h not in derived and all(p in derived for p in pos):
                derived.add(h)
                changed = True
    return derived == X
