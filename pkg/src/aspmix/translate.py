"""Compile a domain description plus history into a CR-Prolog program.

Fluents are reified inside ``holds(F, I)``, actions inside ``occurs(A, I)``.
Step numbers are emitted as constants, one rule instance per step, so the
grounder never needs arithmetic. Every rule carries a provenance tag.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .lang.syntax import (
    AGENT, BASIC, DEFINED, EXOGENOUS, Atom, CausalLaw, Comparison, Const, ExecutabilityCondition,
    History, LangError, Literal, Program, Rule, StateConstraint, SystemDescription, Var,
)

OFF, ALL, MINIMAL = "off", "all", "minimal"
TRUE, FALSE = Const("true"), Const("false")


@dataclass(frozen=True)
class TranslationConfig:
    horizon: int = 0
    diagnosis: str = OFF
    scene: bool = False
    # exogenous occurrences are hypothesised only at steps < diagnose_until
    diagnose_until: int | None = None
    # agent actions at steps >= plan_from are left open for the planner
    plan_from: int | None = None

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        if self.diagnosis not in (OFF, ALL, MINIMAL):
            raise ValueError(f"unknown diagnosis mode '{self.diagnosis}'")


def step(i: int) -> Const:
    return Const(str(i))


def holds(lit: Literal, i: int) -> Literal:
    return Literal(Atom("holds", (lit.atom, step(i))), lit.neg)


def occurs(action: Atom, i: int, neg: bool = False) -> Literal:
    return Literal(Atom("occurs", (action, step(i))), neg)


def _params(sig) -> tuple:
    return tuple(Var(f"X{k}", s) for k, s in enumerate(sig.params))


def _schema(sd: SystemDescription, name: str) -> Atom:
    return Atom(name, _params(sd.signature(name)))


def _body(sd: SystemDescription, items, i: int):
    """Split domain body items into (pos, neg, cmps) at step ``i``."""
    pos, neg, cmps = [], [], []
    for it in items:
        if isinstance(it, Comparison):
            cmps.append(it)
        elif it.atom.pred in sd.fluents:
            pos.append(holds(it, i))
        elif it.neg:  # closed-world static
            neg.append(Literal(it.atom))
        else:
            pos.append(it)
    return tuple(pos), tuple(neg), tuple(cmps)


def _default_vars(d) -> tuple:
    seen: dict[str, Var] = {}
    for v in d.head.atom.variables():
        seen.setdefault(v.name, v)
    for it in d.body:
        if isinstance(it, Literal):
            for v in it.atom.variables():
                seen.setdefault(v.name, v)
    return tuple(seen.values())


def translate(sd: SystemDescription, h: History, cfg: TranslationConfig) -> Program:
    """Build the program for steps ``0..cfg.horizon``."""
    n = cfg.horizon
    for o in h.obs:
        if o.step > n:
            raise LangError(f"observation at step {o.step} exceeds horizon {n}")
        if o.fluent.pred not in sd.fluents and o.fluent.pred not in sd.attributes:
            raise LangError(f"unknown symbol '{o.fluent.pred}'")
    for r in h.hpd:
        if r.step > n:
            raise LangError(f"action record at step {r.step} exceeds horizon {n}")
        if r.action.pred not in sd.actions:
            raise LangError(f"unknown symbol '{r.action.pred}'")
    rules: list[Rule] = []
    add = rules.append

    for a in sd.statics:
        add(Rule((Literal(a),), tag="static"))

    for k, law in enumerate(sd.laws):
        if isinstance(law, CausalLaw):
            for i in range(n):
                pos, neg, cmps = _body(sd, law.body, i)
                add(Rule((holds(law.head, i + 1),), (occurs(law.action, i),) + pos, neg, cmps,
                         tag=f"causal:{k}"))
        elif isinstance(law, StateConstraint):
            for i in range(n + 1):
                pos, neg, cmps = _body(sd, law.body, i)
                add(Rule((holds(law.head, i),), pos, neg, cmps, tag=f"constraint:{k}"))
        elif isinstance(law, ExecutabilityCondition):
            for i in range(n):
                pos, neg, cmps = _body(sd, law.body, i)
                acts = tuple(occurs(a, i) for a in law.actions)
                add(Rule((), acts + pos, neg, cmps, tag=f"exec:{k}"))

    for name, d in sd.fluents.items():
        f = Literal(_schema(sd, name))
        if d.kind == BASIC:
            add(Rule((holds(f, 0), holds(f.complement(), 0)), tag=f"awareness:{name}"))
            for i in range(n):
                add(Rule((holds(f, i + 1),), (holds(f, i),), (holds(f.complement(), i + 1),),
                         tag=f"inertia:{name}"))
                add(Rule((holds(f.complement(), i + 1),), (holds(f.complement(), i),),
                         (holds(f, i + 1),), tag=f"inertia:{name}"))
        else:
            for i in range(n + 1):
                add(Rule((holds(f.complement(), i),), (), (holds(f, i),), tag=f"cwa:{name}"))

    exo_prio = max([d.priority for d in sd.defaults + h.defaults], default=0) + 1
    until = cfg.diagnose_until if cfg.diagnose_until is not None else n
    hpd_steps = {r.step for r in h.hpd}
    for name, d in sd.actions.items():
        a = _schema(sd, name)
        for i in range(n):
            if d.kind == EXOGENOUS and cfg.diagnosis != OFF and i < until:
                if cfg.diagnosis == ALL:
                    add(Rule((occurs(a, i), occurs(a, i, True)), tag=f"diagnosis:{name}"))
                else:
                    add(Rule((occurs(a, i),), cr=True, priority=exo_prio, tag=f"diagnosis:{name}"))
                hpd_a = Literal(Atom("hpd", (a, step(i))))
                add(Rule((Literal(Atom("expl", (a, step(i)))),), (occurs(a, i),), (hpd_a,),
                         tag=f"expl:{name}"))
                continue
            if d.kind == AGENT and cfg.plan_from is not None and i >= cfg.plan_from \
                    and i not in hpd_steps:
                continue  # left to the planner's choice rule
            add(Rule((occurs(a, i, True),), (), (occurs(a, i),), tag=f"cwa-action:{name}"))

    for o in h.obs:
        if o.fluent.pred in sd.fluents:
            add(Rule((Literal(Atom("obs", (o.fluent, TRUE if o.value else FALSE, step(o.step)))),),
                     tag="obs"))
    for r in h.hpd:
        add(Rule((Literal(Atom("hpd", (r.action, step(r.step)))),), tag="hpd"))
    F, I = Var("F"), Var("I")
    hold_fi = Literal(Atom("holds", (F, I)))
    add(Rule((), (Literal(Atom("obs", (F, TRUE, I))), hold_fi.complement()), tag="reality"))
    add(Rule((), (Literal(Atom("obs", (F, FALSE, I))), hold_fi), tag="reality"))
    A = Var("A")
    add(Rule((Literal(Atom("occurs", (A, I))),), (Literal(Atom("hpd", (A, I))),), tag="hpd-occurs"))

    for d in sd.defaults + h.defaults:
        args = (Const(d.id),) + _default_vars(d)
        ab = Literal(Atom("ab", args))
        pos, neg, cmps = _body(sd, d.body, 0)
        add(Rule((holds(d.head, 0),), pos, neg + (ab,), cmps, tag=f"default:{d.id}"))
        add(Rule((ab,), pos, neg, cmps, cr=True, priority=d.priority, tag=f"default:{d.id}"))

    return Program(rules, sd.sorts, n)


def goal_at(i: int) -> Literal:
    return Literal(Atom("goal_at", (step(i),)))


def add_goal(p: Program, sd: SystemDescription, goal, cfg: TranslationConfig,
             hpd_steps=(), per_step: bool = False) -> Program:
    """Goal constraint plus the plan-generation choice over agent actions.

    With ``per_step`` there is no constraint; instead ``goal_at(i)`` is
    derived for every step from the planning start, so one grounding can
    be queried for several horizons.
    """
    goal = list(goal)
    if not goal:
        raise LangError("empty goal")
    n = p.horizon
    for g in goal:
        if not g.atom.is_ground():
            raise LangError(f"goal '{g}' is not ground")
        if g.atom.pred not in sd.fluents:
            raise LangError(f"goal mentions undeclared fluent '{g.atom.pred}'")
    start = cfg.plan_from if cfg.plan_from is not None else 0
    if per_step:
        rules = [Rule((goal_at(i),), tuple(holds(g, i) for g in goal), tag="goal")
                 for i in range(start, n + 1)]
    else:
        met = Literal(Atom("goal_met"))
        rules = [Rule((met,), tuple(holds(g, n) for g in goal), tag="goal"),
                 Rule((), (), (met,), tag="goal")]
    hpd_steps = set(hpd_steps)
    agent = sd.ground_actions(AGENT)
    for i in range(start, n):
        if i in hpd_steps:
            continue
        for name, d in sd.actions.items():
            if d.kind == AGENT:
                a = _schema(sd, name)
                rules.append(Rule((occurs(a, i), occurs(a, i, True)), tag=f"plan:{name}"))
        for a, b in combinations(agent, 2):
            rules.append(Rule((), (occurs(a, i), occurs(b, i)), tag="one-action"))
    return p.extend(rules)


SCENE_LABEL_PRIORITY = 2
SCENE_RELAX_PRIORITY = 1


def add_scene_axioms(p: Program, sd: SystemDescription, observed, objects) -> Program:
    """Class-labelling program for unlabelled percepts.

    Attribute rules become individually defeasible through ``relaxed(r, O)``;
    labels come from a CR rule, so answer sets at the minimal CR level carry
    the labels that need the fewest relaxed rules.
    """
    sorts = p.sorts
    rules = list(p.rules)
    for lit in observed:
        a = lit.atom
        if a.pred not in sd.attributes:
            raise LangError(f"'{a.pred}' is not an attribute")
        for arg, s in zip(a.args, sd.attributes[a.pred].params):
            if not isinstance(arg, Const) or not sorts.is_instance(arg.name, s):
                raise LangError(f"attribute literal for unknown object: '{lit}'")
        rules.append(Rule((lit,), tag="scene-obs"))
    objects = list(objects)
    if not objects:
        return Program(rules, sorts, p.horizon)
    for o in objects:
        if not sorts.is_instance(o, "percept"):
            raise LangError(f"unknown object '{o}'")
        rules.append(Rule((Literal(Atom("object", (Const(o),))),), tag="scene-object"))
    O = Var("O", "percept")
    C, C1, C2 = Var("C", "class"), Var("C1", "class"), Var("C2", "class")
    lit = lambda pred, *args: Literal(Atom(pred, tuple(args)))
    rules.append(Rule((lit("member", O, C),), (lit("is_a", O, C),), tag="scene-member"))
    if any(a.pred == "subclass" for a in sd.statics):
        rules.append(Rule((lit("member", O, C2),), (lit("member", O, C1), lit("subclass", C1, C2)),
                          tag="scene-member"))
    rules.append(Rule((lit("class_known", O),), (lit("is_a", O, C),), tag="scene-known"))
    rules.append(Rule((), (lit("object", O),), (lit("class_known", O),), tag="scene-reality"))
    rules.append(Rule((), (lit("is_a", O, C1), lit("is_a", O, C2)), (),
                      (Comparison("!=", C1, C2),), tag="scene-single"))
    rules.append(Rule((lit("is_a", O, C),), (lit("object", O),), cr=True,
                      priority=SCENE_LABEL_PRIORITY, tag="scene-label"))
    for name, sig in sd.attributes.items():
        if len(sig.params) >= 2:
            args = tuple(Var(f"X{k}", s) for k, s in enumerate(sig.params[:-1]))
            v1, v2 = Var("V1", sig.params[-1]), Var("V2", sig.params[-1])
            rules.append(Rule((Literal(Atom(name, args + (v2,)), True),), (lit(name, *args, v1),), (),
                              (Comparison("!=", v1, v2),), tag=f"scene-unique:{name}"))
    for ar in sd.attribute_rules:
        seen: dict[str, Var] = {}
        for v in list(ar.head.atom.variables()) + [v for it in ar.body if isinstance(it, Literal)
                                                   for v in it.atom.variables()]:
            seen.setdefault(v.name, v)
        relaxed = Literal(Atom("relaxed", (Const(ar.id),) + tuple(seen.values())))
        pos = tuple(it for it in ar.body if isinstance(it, Literal))
        cmps = tuple(it for it in ar.body if isinstance(it, Comparison))
        obj_vars = [v for v in ar.head.atom.args if isinstance(v, Var) and v.sort == "percept"]
        guard = (lit("object", obj_vars[0]),) if obj_vars else ()
        rules.append(Rule((ar.head,), pos, (relaxed,), cmps, tag=f"attribute:{ar.id}"))
        rules.append(Rule((relaxed,), pos + guard, (), cmps, cr=True,
                          priority=SCENE_RELAX_PRIORITY, tag=f"relax:{ar.id}"))
    return Program(rules, sorts, p.horizon)
