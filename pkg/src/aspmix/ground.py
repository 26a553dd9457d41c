"""Instantiate rule variables over the sort hierarchy.

Statics (predicates defined only by ground facts) are treated as closed-world:
rule instances whose positive body mentions a missing static fact are dropped,
and satisfied static literals are removed from the instance body.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .lang.syntax import Atom, Comparison, Const, LangError, Literal, Program, Rule, Var


class GroundingError(RuntimeError):
    def __init__(self, message: str, atoms: int, rules: int):
        super().__init__(f"{message} (atoms={atoms}, rules={rules})")
        self.atoms = atoms
        self.rules = rules


@dataclass(frozen=True, slots=True)
class GroundRule:
    head: tuple[int, ...]
    pos: tuple[int, ...]
    neg: tuple[int, ...]
    cr: bool = False
    priority: int = 0
    tag: str = ""


@dataclass
class GroundProgram:
    """Variable-free program over interned ground literals."""

    symbols: list[Literal] = field(default_factory=list)
    rules: list[GroundRule] = field(default_factory=list)
    index: dict[Literal, int] = field(default_factory=dict)

    def intern(self, lit: Literal) -> int:
        i = self.index.get(lit)
        if i is None:
            i = len(self.symbols)
            self.index[lit] = i
            self.symbols.append(lit)
        return i

    def id_of(self, lit: Literal) -> int | None:
        return self.index.get(lit)

    def complement(self, i: int) -> int | None:
        return self.index.get(self.symbols[i].complement())

    def complement_pairs(self) -> list[tuple[int, int]]:
        out = []
        for lit, i in self.index.items():
            if not lit.neg:
                j = self.index.get(lit.complement())
                if j is not None:
                    out.append((i, j))
        return out

    @property
    def cr_rules(self) -> list[int]:
        return [k for k, r in enumerate(self.rules) if r.cr]

    def add_rule(self, head=(), pos=(), neg=(), cr=False, priority=0, tag="") -> int:
        """Add a rule given as literals (or already interned ids)."""
        conv = lambda xs: tuple(x if isinstance(x, int) else self.intern(x) for x in xs)
        self.rules.append(GroundRule(conv(head), conv(pos), conv(neg), cr, priority, tag))
        return len(self.rules) - 1

    def show_rule(self, r: GroundRule) -> str:
        s = lambda i: str(self.symbols[i])
        head = " | ".join(map(s, r.head))
        body = [s(i) for i in r.pos] + ["not " + s(i) for i in r.neg]
        arrow = "+-" if r.cr else ":-"
        if body:
            return f"{head} {arrow} {', '.join(body)}." if head else f":- {', '.join(body)}."
        if r.cr:
            return f"{head} +- ."
        return f"{head}." if head else ":- ."


@dataclass(frozen=True)
class Stats:
    atoms: int
    rules: int
    cr_rules: int


def stats(gp: GroundProgram) -> Stats:
    return Stats(len(gp.symbols), len(gp.rules), sum(1 for r in gp.rules if r.cr))


# ---------------------------------------------------------------- matching

def _subst(t, b: dict):
    if isinstance(t, Var):
        return b[t.name]
    if isinstance(t, Atom):
        if not t.args:
            return t
        return Atom(t.pred, tuple(_subst(a, b) for a in t.args))
    return t


def _subst_lit(l: Literal, b: dict) -> Literal:
    return Literal(_subst(l.atom, b), l.neg)


def _match(pat, g, b: dict, bound: list) -> bool:
    """Unify pattern term with ground term, extending binding ``b``."""
    if isinstance(pat, Var):
        cur = b.get(pat.name)
        if cur is None:
            b[pat.name] = g
            bound.append(pat.name)
            return True
        return cur == g
    if isinstance(pat, Atom):
        if not isinstance(g, Atom) or g.pred != pat.pred or len(g.args) != len(pat.args):
            return False
        for p, x in zip(pat.args, g.args):
            if not _match(p, x, b, bound):
                return False
        return True
    return pat == g


def _lit_key(l: Literal) -> tuple:
    return (l.atom.pred, len(l.atom.args), l.neg)


def _var_names(l) -> set[str]:
    if isinstance(l, Literal):
        return {v.name for v in l.atom.variables()}
    out = set()
    for t in (l.left, l.right):
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, Atom):
            out.update(v.name for v in t.variables())
    return out


def _cache_entry(l: Literal) -> tuple:
    return (l, tuple(sorted(_var_names(l))), {})


class _Plan:
    """Binding order for one rule: generators and filters interleaved."""

    def __init__(self, rule: Rule, closed: set, sorts):
        self.rule = rule
        var_sort: dict[str, str | None] = {}
        for v in rule.variables():
            if v.sort is not None or v.name not in var_sort:
                var_sort[v.name] = v.sort
        self.var_sort = var_sort
        closed_pos = [l for l in rule.pos if _lit_key(l) in closed]
        open_pos = [l for l in rule.pos if _lit_key(l) not in closed]
        closed_neg = [l for l in rule.neg if _lit_key(l) in closed]
        self.open_pos = open_pos
        self.open_neg = [l for l in rule.neg if _lit_key(l) not in closed]
        self.closed_pos = closed_pos
        self.closed_neg = closed_neg
        ops = []
        bound: set[str] = set()
        pending_filters = [("cpos", l) for l in closed_pos] + [("cneg", l) for l in closed_neg]
        pending_filters += [("cmp", c) for c in rule.cmps]
        gens = list(closed_pos)
        unbound = [n for n in var_sort]
        uses_open = False

        def flush():
            nonlocal pending_filters
            keep = []
            for kind, item in pending_filters:
                if _var_names(item) <= bound:
                    ops.append((kind, item))
                else:
                    keep.append((kind, item))
            pending_filters = keep

        flush()
        while len(bound) < len(var_sort):
            # prefer a closed positive literal that binds something
            g = next((l for l in gens if not _var_names(l) <= bound), None)
            if g is not None:
                gens.remove(g)
                pending_filters = [(k, i) for k, i in pending_filters if i is not g]
                new = _var_names(g) - bound
                ops.append(("gen", g))
                bound |= new
                for n in new:
                    if var_sort[n] is not None:
                        ops.append(("sortcheck", n))
                flush()
                continue
            sorted_free = [n for n in unbound if n not in bound and var_sort[n] is not None]
            if sorted_free:
                n = sorted_free[0]
                ops.append(("sort", n))
                bound.add(n)
                flush()
                continue
            o = next((l for l in open_pos if not _var_names(l) <= bound), None)
            if o is None:
                raise LangError(f"unsafe rule: {rule.show()}")
            uses_open = True
            ops.append(("open", o))
            bound |= _var_names(o)
            flush()
        flush()
        self.ops = ops
        self.uses_open = uses_open


class Grounder:
    def __init__(self, program: Program, max_rules: int = 5_000_000):
        self.program = program
        self.sorts = program.sorts
        self.max_rules = max_rules
        heads: dict[tuple, bool] = {}
        for r in program.rules:
            for h in r.head:
                k = _lit_key(h)
                fact = not r.pos and not r.neg and not r.cmps and not r.cr and len(r.head) == 1 \
                    and h.atom.is_ground()
                heads[k] = heads.get(k, True) and fact
        self.closed = {k for k, is_fact in heads.items() if is_fact}
        # body-only predicates with no defining rule are closed and empty
        for r in program.rules:
            for l in r.pos + r.neg:
                if _lit_key(l) not in heads:
                    self.closed.add(_lit_key(l))
        self.facts: dict[tuple, list[Literal]] = {}
        self.fact_set: set[Literal] = set()
        for r in program.rules:
            if len(r.head) == 1 and _lit_key(r.head[0]) in self.closed:
                lit = r.head[0]
                if lit not in self.fact_set:
                    self.fact_set.add(lit)
                    self.facts.setdefault(_lit_key(lit), []).append(lit)
        self.possible: dict[tuple, list[Literal]] = {}
        self.possible_set: set[Literal] = set()

    def run(self) -> GroundProgram:
        gp = GroundProgram()
        plans = [_Plan(r, self.closed, self.sorts) for r in self.program.rules]
        for p in plans:
            p.head_keys = [_cache_entry(l) for l in p.rule.head]
            p.pos_keys = [_cache_entry(l) for l in p.open_pos]
            p.neg_keys = [_cache_entry(l) for l in p.open_neg]
        seen: set = set()
        fixpoint = any(p.uses_open for p in plans)
        while True:
            before = len(gp.rules)
            for plan in plans:
                for b in self._bindings(plan):
                    self._emit(plan, b, gp, seen)
                    if len(gp.rules) > self.max_rules:
                        raise GroundingError("memory guard exceeded", len(gp.symbols), len(gp.rules))
            if not fixpoint or len(gp.rules) == before:
                return gp

    def _emit(self, plan: _Plan, b: dict, gp: GroundProgram, seen: set) -> None:
        r = plan.rule
        ids_h = tuple(self._lit_id(e, b, gp) for e in plan.head_keys)
        # a fact-defined head re-derived by a rule stays a plain rule
        ids_p = tuple(dict.fromkeys(self._lit_id(e, b, gp) for e in plan.pos_keys))
        ids_n = tuple(dict.fromkeys(self._lit_id(e, b, gp) for e in plan.neg_keys))
        key = (ids_h, ids_p, ids_n, r.cr, r.priority)
        if key in seen:
            return
        seen.add(key)
        gp.rules.append(GroundRule(ids_h, ids_p, ids_n, r.cr, r.priority, r.tag))
        for i in ids_h:
            l = gp.symbols[i]
            if l not in self.possible_set:
                self.possible_set.add(l)
                self.possible.setdefault(_lit_key(l), []).append(l)

    @staticmethod
    def _lit_id(entry, b: dict, gp: GroundProgram) -> int:
        # cache ids by the values of the literal's own variables
        lit, names, cache = entry
        k = tuple([b[n] for n in names])
        i = cache.get(k)
        if i is None:
            i = cache[k] = gp.intern(_subst_lit(lit, b))
        return i

    def _bindings(self, plan: _Plan) -> Iterator[dict]:
        ops = plan.ops
        n_ops = len(ops)
        b: dict = {}
        sorts = self.sorts
        var_sort = plan.var_sort

        def rec(k: int):
            if k == n_ops:
                yield b
                return
            kind, item = ops[k]
            if kind == "sort":
                name = item
                for obj in sorts.members(var_sort[name]):
                    b[name] = Const(obj)
                    yield from rec(k + 1)
                b.pop(name, None)  # absent when the sort is empty
            elif kind == "gen" or kind == "open":
                pool = (self.facts if kind == "gen" else self.possible).get(_lit_key(item), ())
                for g in list(pool):
                    bound: list = []
                    if _match(item.atom, g.atom, b, bound):
                        yield from rec(k + 1)
                    for n in bound:
                        del b[n]
            elif kind == "sortcheck":
                v = b[item]
                if isinstance(v, Const) and sorts.is_instance(v.name, var_sort[item]):
                    yield from rec(k + 1)
            elif kind == "cpos":
                if _subst_lit(item, b) in self.fact_set:
                    yield from rec(k + 1)
            elif kind == "cneg":
                if _subst_lit(item, b) not in self.fact_set:
                    yield from rec(k + 1)
            elif kind == "cmp":
                if item.holds(_subst(item.left, b), _subst(item.right, b)):
                    yield from rec(k + 1)

        yield from rec(0)


def ground(program: Program, max_rules: int = 5_000_000) -> GroundProgram:
    """Ground ``program`` over its sort hierarchy."""
    return Grounder(program, max_rules).run()


# ---------------------------------------------------------------- flat format

def dump_ground(gp: GroundProgram) -> str:
    """One line per atom (``a id literal``) then one per rule
    (``r cr priority | heads | pos | neg | tag``)."""
    lines = ["% aspmix ground program v1"]
    lines += [f"a {i} {lit}" for i, lit in enumerate(gp.symbols)]
    for r in gp.rules:
        lines.append("r {} {} | {} | {} | {} | {}".format(
            int(r.cr), r.priority, " ".join(map(str, r.head)), " ".join(map(str, r.pos)),
            " ".join(map(str, r.neg)), r.tag))
    return "\n".join(lines) + "\n"


def load_ground(text: str) -> GroundProgram:
    from .lang.parser import parse_literal

    gp = GroundProgram()
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        kind, _, rest = line.partition(" ")
        if kind == "a":
            ident, _, lit = rest.partition(" ")
            if int(ident) != len(gp.symbols):
                raise LangError(f"atom ids must be dense and ordered", n, 1)
            gp.intern(parse_literal(lit))
        elif kind == "r":
            parts = rest.split("|")
            if len(parts) != 5:
                raise LangError("malformed rule line", n, 1)
            cr, prio = parts[0].split()
            ids = [tuple(int(x) for x in p.split()) for p in parts[1:4]]
            for group in ids:
                for i in group:
                    if i >= len(gp.symbols):
                        raise LangError(f"unknown atom id {i}", n, 1)
            gp.rules.append(GroundRule(ids[0], ids[1], ids[2], cr == "1", int(prio), parts[4].strip()))
        else:
            raise LangError(f"unknown line kind '{kind}'", n, 1)
    return gp
