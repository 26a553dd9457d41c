"""Direct interpreter for the transition semantics of a domain description.

Works on complete states (a truth value for every ground fluent) and does
not use the logic-program solver, so it can serve as an independent check
of plans and as the simulator's step function.

A successor state follows the inertia principle: it is the unique complete
state that equals the closure of the direct effects plus the inertial
literals it keeps. The construction below computes a candidate and then
verifies that fixpoint condition exactly.
"""

from __future__ import annotations

from itertools import product

from .lang.syntax import (
    BASIC, Atom, CausalLaw, Comparison, Const, ExecutabilityCondition, Literal, StateConstraint,
    SystemDescription, Var,
)


def _subst(t, b):
    if isinstance(t, Var):
        return b[t.name]
    if isinstance(t, Atom):
        return Atom(t.pred, tuple(_subst(a, b) for a in t.args))
    return t


def _vars(items) -> dict[str, str]:
    out: dict[str, str] = {}
    for it in items:
        terms = [it.left, it.right] if isinstance(it, Comparison) else [it.atom]
        for t in terms:
            stack = [t]
            while stack:
                x = stack.pop()
                if isinstance(x, Var):
                    if x.sort:
                        out.setdefault(x.name, x.sort)
                elif isinstance(x, Atom):
                    stack.extend(x.args)
    return out


class Interpreter:
    def __init__(self, sd: SystemDescription):
        self.sd = sd
        self.basic = [a for a in sd.ground_fluents(BASIC)]
        self.defined = [a for a in sd.ground_fluents() if sd.fluent_kind(a.pred) != BASIC]
        self.basic_set = set(self.basic)
        self.defined_set = set(self.defined)
        self.constraints: list[tuple[Literal, tuple]] = []
        self.causal: dict[Atom, list[tuple[Literal, tuple]]] = {}
        self.exec: list[tuple[tuple, tuple]] = []
        for law in sd.laws:
            if isinstance(law, StateConstraint):
                for b, body in self._instances(law.body, [law.head]):
                    self.constraints.append((Literal(_subst(law.head.atom, b), law.head.neg), body))
            elif isinstance(law, CausalLaw):
                for b, body in self._instances(law.body, [law.head, Literal(law.action)]):
                    act = _subst(law.action, b)
                    head = Literal(_subst(law.head.atom, b), law.head.neg)
                    self.causal.setdefault(act, []).append((head, body))
            elif isinstance(law, ExecutabilityCondition):
                for b, body in self._instances(law.body, [Literal(a) for a in law.actions]):
                    self.exec.append((tuple(_subst(a, b) for a in law.actions), body))
        self.by_body: dict[Literal, list[int]] = {}
        for k, (_, body) in enumerate(self.constraints):
            for l in body:
                self.by_body.setdefault(l, []).append(k)
        # basic atoms whose value can be touched by a constraint mentioning another atom
        self.deps: dict[Atom, set[Atom]] = {}
        for head, body in self.constraints:
            for l in body:
                self.deps.setdefault(l.atom, set()).add(head.atom)

    def _instances(self, body, extra):
        sd = self.sd
        vs = _vars(list(body) + list(extra))
        names = list(vs)
        pools = [[Const(o) for o in sd.sorts.members(vs[n])] for n in names]
        for combo in product(*pools):
            b = dict(zip(names, combo))
            ok = True
            fl = []
            for it in body:
                if isinstance(it, Comparison):
                    if not it.holds(_subst(it.left, b), _subst(it.right, b)):
                        ok = False
                        break
                    continue
                a = _subst(it.atom, b)
                if a.pred in sd.static_decls:
                    if (a in sd.static_set) == it.neg:
                        ok = False
                        break
                    continue
                fl.append(Literal(a, it.neg))
            if ok:
                yield b, tuple(fl)

    # ------------------------------------------------------------ closure
    def closure(self, lits) -> set[Literal] | None:
        """Close a literal set under the state constraints (basic and positive
        defined heads). Returns None on a complementary pair."""
        X = set(lits)
        count = [0] * len(self.constraints)
        queue = []
        for k, (head, body) in enumerate(self.constraints):
            c = sum(1 for l in body if l not in X)
            count[k] = c
            if c == 0:
                queue.append(head)
        while queue:
            h = queue.pop()
            if h in X:
                continue
            X.add(h)
            for k in self.by_body.get(h, ()):
                count[k] -= 1
                if count[k] == 0:
                    queue.append(self.constraints[k][0])
        for l in X:
            if l.complement() in X:
                return None
        return X

    def complete(self, true_basic) -> frozenset | None:
        """Full state from the set of true basic atoms; None if the valuation
        violates a state constraint."""
        true_basic = set(true_basic)
        base = {Literal(a, a not in true_basic) for a in self.basic}
        X = self.closure(base)
        if X is None:
            return None
        for a in self.defined:
            if Literal(a) not in X:
                X.add(Literal(a, True))
        # constraints whose body uses a negative defined literal
        Y = self.closure(X)
        if Y is None or len(Y) != len(X):
            return None
        return frozenset(X)

    def from_facts(self, facts) -> frozenset | None:
        """Complete state in which exactly ``facts`` and their consequences
        are the true basic atoms."""
        X = self.closure(Literal(a) if isinstance(a, Atom) else a for a in facts)
        if X is None:
            return None
        return self.complete({l.atom for l in X if not l.neg and l.atom in self.basic_set})

    # ------------------------------------------------------------ dynamics
    def executable(self, state, actions) -> bool:
        acts = set(actions)
        for need, body in self.exec:
            if all(a in acts for a in need) and all(l in state for l in body):
                return False
        return True

    def effects(self, state, actions) -> set[Literal]:
        out = set()
        for a in actions:
            for head, body in self.causal.get(a, ()):
                if all(l in state for l in body):
                    out.add(head)
        return out

    def step(self, state, actions):
        """Successor of a complete ``state`` under the concurrent ``actions``,
        or None when they are not executable or have no consistent result."""
        if not self.executable(state, actions):
            return None
        E = self.effects(state, actions)
        if any(l.complement() in E for l in E):
            return None
        affected = set()
        stack = [l.atom for l in E]
        while stack:
            a = stack.pop()
            if a in affected:
                continue
            affected.add(a)
            stack.extend(self.deps.get(a, ()))
        known = set(E)
        for a in self.basic:
            if a not in affected:
                known.add(Literal(a, Literal(a) not in state))
        X = self.closure(known)
        if X is None:
            return None
        for a in self.basic:
            if Literal(a) in X or Literal(a, True) in X:
                continue
            keep = Literal(a, Literal(a) not in state)
            Y = self.closure(X | {keep})
            if Y is None:
                Y = self.closure(X | {keep.complement()})
                if Y is None:
                    return None
            X = Y
        new_true = {a for a in self.basic if Literal(a) in X}
        nxt = self.complete(new_true)
        if nxt is None:
            return None
        # exact check of the inertia fixpoint condition
        kept = {l for l in nxt if l.atom in self.basic_set and l in state}
        fix = self.closure(E | kept)
        if fix is None or {l for l in fix if l.atom in self.basic_set} != \
                {l for l in nxt if l.atom in self.basic_set}:
            raise RuntimeError("successor state is not determined by the inertia principle")
        return nxt

    def holds(self, state, lit: Literal) -> bool:
        return lit in state

    def true_basic(self, state) -> frozenset:
        return frozenset(l.atom for l in state if not l.neg and l.atom in self.basic_set)
