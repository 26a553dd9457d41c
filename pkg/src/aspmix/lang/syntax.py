"""Abstract syntax for domains, logic programs and scenarios."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union


class LangError(ValueError):
    """Raised for malformed or inconsistent input."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message)


# ---------------------------------------------------------------- terms

@dataclass(frozen=True, slots=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    sort: str | None = None

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Atom:
    """Predicate applied to terms. Also used as a compound term (a reified
    fluent or action inside holds/occurs/obs/hpd)."""

    pred: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(str(a) for a in self.args)})"

    def is_ground(self) -> bool:
        return all(_ground_term(a) for a in self.args)

    def variables(self) -> Iterator[Var]:
        for a in self.args:
            yield from term_vars(a)


Term = Union[Const, Var, Atom]


def _ground_term(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Atom):
        return t.is_ground()
    return True


def term_vars(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Atom):
        yield from t.variables()


def show_term(t: Term, annotate: bool = False) -> str:
    if isinstance(t, Var):
        return f"{t.name}:{t.sort}" if annotate and t.sort else t.name
    if isinstance(t, Atom):
        if not t.args:
            return t.pred
        return f"{t.pred}({', '.join(show_term(a, annotate) for a in t.args)})"
    return t.name


@dataclass(frozen=True, slots=True)
class Literal:
    atom: Atom
    neg: bool = False

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.neg)

    def __str__(self) -> str:
        return ("-" if self.neg else "") + str(self.atom)

    def show(self, annotate: bool = False) -> str:
        return ("-" if self.neg else "") + show_term(self.atom, annotate)


@dataclass(frozen=True, slots=True)
class Comparison:
    op: str  # "!=" or "="
    left: Term
    right: Term

    def show(self, annotate: bool = False) -> str:
        return f"{show_term(self.left, annotate)} {self.op} {show_term(self.right, annotate)}"

    def holds(self, left: Term, right: Term) -> bool:
        return (left == right) if self.op == "=" else (left != right)


BodyItem = Union[Literal, Comparison]


def body_vars(items: Iterable[BodyItem]) -> Iterator[Var]:
    for it in items:
        if isinstance(it, Literal):
            yield from it.atom.variables()
        else:
            yield from term_vars(it.left)
            yield from term_vars(it.right)


# ---------------------------------------------------------------- sorts

class SortHierarchy:
    """Sorts, subsort edges and typed object instances.

    Membership is the reflexive-transitive closure of the subsort relation:
    an instance of ``room`` is also an instance of ``location`` when ``room``
    is declared a subsort of ``location``.
    """

    def __init__(self) -> None:
        self.sorts: list[str] = []
        self.parents: dict[str, list[str]] = {}
        self.instances: dict[str, list[str]] = {}
        self.sort_of: dict[str, str] = {}
        self._member_cache: dict[str, tuple[str, ...]] = {}

    def copy(self) -> "SortHierarchy":
        h = SortHierarchy()
        h.sorts = list(self.sorts)
        h.parents = {k: list(v) for k, v in self.parents.items()}
        h.instances = {k: list(v) for k, v in self.instances.items()}
        h.sort_of = dict(self.sort_of)
        return h

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SortHierarchy):
            return NotImplemented
        return (set(self.sorts) == set(other.sorts)
                and {k: set(v) for k, v in self.parents.items() if v}
                == {k: set(v) for k, v in other.parents.items() if v}
                and self.sort_of == other.sort_of)

    def add_sort(self, name: str) -> None:
        if name not in self.parents:
            self.sorts.append(name)
            self.parents[name] = []
            self.instances[name] = []
        self._member_cache.clear()

    def add_subsort(self, child: str, parent: str) -> None:
        for s in (child, parent):
            if s not in self.parents:
                raise LangError(f"undeclared sort '{s}'")
        if child in self.ancestors(parent):
            raise LangError(f"sort cycle: '{parent}' is already below '{child}'")
        if parent not in self.parents[child]:
            self.parents[child].append(parent)
        self._member_cache.clear()

    def add_instance(self, obj: str, sort: str) -> None:
        if sort not in self.parents:
            raise LangError(f"undeclared sort '{sort}'")
        old = self.sort_of.get(obj)
        if old is not None and old != sort:
            raise LangError(f"object '{obj}' declared with sorts '{old}' and '{sort}'")
        if old is None:
            self.sort_of[obj] = sort
            self.instances[sort].append(obj)
        self._member_cache.clear()

    def ancestors(self, sort: str) -> set[str]:
        seen = {sort}
        stack = [sort]
        while stack:
            for p in self.parents.get(stack.pop(), ()):
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    def is_subsort(self, child: str, parent: str) -> bool:
        return parent in self.ancestors(child)

    def members(self, sort: str) -> tuple[str, ...]:
        """All objects of ``sort`` (transitively), in declaration order."""
        cached = self._member_cache.get(sort)
        if cached is not None:
            return cached
        if sort not in self.parents:
            raise LangError(f"undeclared sort '{sort}'")
        out = tuple(o for o, s in self.sort_of.items() if sort in self.ancestors(s))
        self._member_cache[sort] = out
        return out

    def is_instance(self, obj: str, sort: str) -> bool:
        s = self.sort_of.get(obj)
        return s is not None and self.is_subsort(s, sort)

    def narrower(self, a: str, b: str) -> str | None:
        """The more specific of two comparable sorts, or None."""
        if self.is_subsort(a, b):
            return a
        if self.is_subsort(b, a):
            return b
        return None


# ---------------------------------------------------------------- declarations

BASIC, DEFINED = "basic", "defined"
AGENT, EXOGENOUS = "agent", "exogenous"


@dataclass(frozen=True)
class Signature:
    name: str
    params: tuple[str, ...]

    def show(self) -> str:
        return f"{self.name}({', '.join(self.params)})" if self.params else self.name


@dataclass(frozen=True)
class FluentDecl:
    sig: Signature
    kind: str


@dataclass(frozen=True)
class ActionDecl:
    sig: Signature
    kind: str


@dataclass(frozen=True)
class CausalLaw:
    action: Atom
    head: Literal
    body: tuple = ()


@dataclass(frozen=True)
class StateConstraint:
    head: Literal
    body: tuple = ()


@dataclass(frozen=True)
class ExecutabilityCondition:
    actions: tuple
    body: tuple = ()


ALStatement = Union[CausalLaw, StateConstraint, ExecutabilityCondition]


@dataclass(frozen=True)
class InitialDefault:
    """Initial-state default; lower priority value means a stronger default."""

    id: str
    head: Literal
    body: tuple = ()
    priority: int = 1


@dataclass(frozen=True)
class AttributeRule:
    """Ideal or default attribute of an object class, e.g. tables are white."""

    id: str
    head: Literal
    body: tuple = ()


@dataclass
class SystemDescription:
    sorts: SortHierarchy = field(default_factory=SortHierarchy)
    statics: list[Atom] = field(default_factory=list)
    fluents: dict[str, FluentDecl] = field(default_factory=dict)
    actions: dict[str, ActionDecl] = field(default_factory=dict)
    static_decls: dict[str, Signature] = field(default_factory=dict)
    attributes: dict[str, Signature] = field(default_factory=dict)
    laws: list = field(default_factory=list)
    defaults: list[InitialDefault] = field(default_factory=list)
    attribute_rules: list[AttributeRule] = field(default_factory=list)

    def __post_init__(self) -> None:
        self._static_set: frozenset | None = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SystemDescription):
            return NotImplemented
        return (self.sorts == other.sorts and self.statics == other.statics
                and self.fluents == other.fluents and self.actions == other.actions
                and self.static_decls == other.static_decls
                and self.attributes == other.attributes and self.laws == other.laws
                and self.defaults == other.defaults
                and self.attribute_rules == other.attribute_rules)

    @property
    def static_set(self) -> frozenset:
        if self._static_set is None or len(self._static_set) != len(set(self.statics)):
            self._static_set = frozenset(self.statics)
        return self._static_set

    def fluent_kind(self, name: str) -> str | None:
        d = self.fluents.get(name)
        return d.kind if d else None

    def signature(self, name: str) -> Signature | None:
        for table in (self.fluents, self.actions):
            if name in table:
                return table[name].sig
        if name in self.static_decls:
            return self.static_decls[name]
        return self.attributes.get(name)

    def causal_laws(self) -> list[CausalLaw]:
        return [s for s in self.laws if isinstance(s, CausalLaw)]

    def state_constraints(self) -> list[StateConstraint]:
        return [s for s in self.laws if isinstance(s, StateConstraint)]

    def executability(self) -> list[ExecutabilityCondition]:
        return [s for s in self.laws if isinstance(s, ExecutabilityCondition)]

    def ground_instances(self, name: str) -> list[Atom]:
        """Every sort-consistent ground instance of a declared predicate."""
        sig = self.signature(name)
        if sig is None:
            raise LangError(f"undeclared symbol '{name}'")
        out = [()]
        for p in sig.params:
            out = [prev + (Const(o),) for prev in out for o in self.sorts.members(p)]
        return [Atom(name, args) for args in out]

    def ground_actions(self, kind: str | None = None) -> list[Atom]:
        acts = []
        for name, d in self.actions.items():
            if kind is None or d.kind == kind:
                acts.extend(self.ground_instances(name))
        return acts

    def ground_fluents(self, kind: str | None = None) -> list[Atom]:
        out = []
        for name, d in self.fluents.items():
            if kind is None or d.kind == kind:
                out.extend(self.ground_instances(name))
        return out


# ---------------------------------------------------------------- histories

@dataclass(frozen=True)
class Obs:
    fluent: Atom
    value: bool
    step: int

    def __str__(self) -> str:
        return f"obs({self.fluent}, {'true' if self.value else 'false'}, {self.step})"


@dataclass(frozen=True)
class Hpd:
    action: Atom
    step: int

    def __str__(self) -> str:
        return f"hpd({self.action}, {self.step})"


@dataclass
class History:
    obs: list[Obs] = field(default_factory=list)
    hpd: list[Hpd] = field(default_factory=list)
    defaults: list[InitialDefault] = field(default_factory=list)

    def copy(self) -> "History":
        return History(list(self.obs), list(self.hpd), list(self.defaults))

    def last_step(self) -> int:
        steps = [o.step for o in self.obs] + [h.step + 1 for h in self.hpd]
        return max(steps, default=0)

    def add(self, record) -> None:
        if isinstance(record, Obs):
            if record not in self.obs:
                self.obs.append(record)
        elif isinstance(record, Hpd):
            if record not in self.hpd:
                self.hpd.append(record)
        else:
            raise TypeError(f"not a history record: {record!r}")


@dataclass(frozen=True)
class ScriptEvent:
    """Exogenous event in the simulated world. ``step`` is None for events
    that fire only when the agent asks for help."""

    action: Atom
    step: int | None = None

    @property
    def on_help(self) -> bool:
        return self.step is None


@dataclass
class Scenario:
    history: History = field(default_factory=History)
    goal: list[Literal] = field(default_factory=list)
    script: list[ScriptEvent] = field(default_factory=list)
    truth: list[Literal] = field(default_factory=list)
    noise: str | None = None


# ---------------------------------------------------------------- programs

@dataclass(frozen=True)
class Rule:
    """``head :- pos, not neg, cmps``.

    ``head`` holds 0 literals (constraint), 1, or 2 (a literal and its
    classical complement). CR rules have exactly one head literal.
    """

    head: tuple = ()
    pos: tuple = ()
    neg: tuple = ()
    cmps: tuple = ()
    cr: bool = False
    priority: int = 0
    tag: str = ""

    def key(self) -> tuple:
        return (self.head, self.pos, self.neg, self.cmps, self.cr, self.priority)

    def variables(self) -> list[Var]:
        """Distinct variables in order of first appearance."""
        out: dict[Var, None] = {}
        for lit in self.head + self.pos + self.neg:
            out.update(dict.fromkeys(lit.atom.variables()))
        out.update(dict.fromkeys(body_vars(self.cmps)))
        return list(out)

    def show(self, annotate: bool = True) -> str:
        head = " | ".join(l.show(annotate) for l in self.head)
        body = [l.show(annotate) for l in self.pos]
        body += ["not " + l.show(annotate) for l in self.neg]
        body += [c.show(annotate) for c in self.cmps]
        arrow = "+-" if self.cr else ":-"
        if body:
            text = f"{head} {arrow} {', '.join(body)}." if head else f":- {', '.join(body)}."
        elif self.cr:
            text = f"{head} +- ."
        elif head:
            text = f"{head}."
        else:
            text = ":- ."
        meta = []
        if self.tag:
            meta.append(f"tag={self.tag}")
        if self.priority:
            meta.append(f"priority={self.priority}")
        if meta:
            text += " %@ " + " ".join(meta)
        return text


@dataclass
class Program:
    rules: list[Rule] = field(default_factory=list)
    sorts: SortHierarchy = field(default_factory=SortHierarchy)
    horizon: int = 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Program):
            return NotImplemented
        return (self.horizon == other.horizon and self.sorts == other.sorts
                and [r.key() + (r.tag,) for r in self.rules]
                == [r.key() + (r.tag,) for r in other.rules])

    def copy(self) -> "Program":
        return Program(list(self.rules), self.sorts, self.horizon)

    def extend(self, rules: Iterable[Rule]) -> "Program":
        return Program(self.rules + list(rules), self.sorts, self.horizon)


def atom(pred: str, *args) -> Atom:
    """Convenience constructor: strings become constants, ints become numerals."""
    conv = []
    for a in args:
        if isinstance(a, (Const, Var, Atom)):
            conv.append(a)
        else:
            conv.append(Const(str(a)))
    return Atom(pred, tuple(conv))
