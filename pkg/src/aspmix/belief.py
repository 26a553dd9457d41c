"""Probabilistic execution of single planned actions.

Each action gets a small belief over mutually exclusive hypotheses about its
outcome (where the robot ended up, or whether the effect happened). Noisy
observations update the belief with Bayes' rule until one hypothesis passes
the commit threshold, at which point it is written to the history.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass, field

from .lang.syntax import (
    Atom, CausalLaw, Const, Hpd, LangError, Literal, Obs, StateConstraint, SystemDescription,
)

DEFAULT_TP = 0.8
DEFAULT_FP = 0.1
DEFAULT_MOVE_SUCCESS = 0.9


class BeliefError(ValueError):
    pass


# ---------------------------------------------------------------- models

def _pattern_matches(pattern: Atom | None, a: Atom) -> bool:
    if pattern is None:
        return True
    if pattern.pred != a.pred or len(pattern.args) != len(a.args):
        return False
    return all(p.name in ("_", "*") or p == x for p, x in zip(pattern.args, a.args))


@dataclass
class SensorModel:
    """Per fluent pattern: p(reading true | fluent true), p(reading true | fluent false)."""

    entries: list = field(default_factory=list)  # (pattern Atom or None, tp, fp)
    tp: float = DEFAULT_TP
    fp: float = DEFAULT_FP

    def __post_init__(self):
        for _, tp, fp in self.entries:
            _check_rate(tp)
            _check_rate(fp)
        _check_rate(self.tp)
        _check_rate(self.fp)

    def rates(self, fluent: Atom) -> tuple[float, float]:
        for pattern, tp, fp in self.entries:
            if _pattern_matches(pattern, fluent):
                return tp, fp
        return self.tp, self.fp


def _check_rate(x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise BeliefError(f"rate {x} outside [0, 1]")


@dataclass
class MotionModel:
    """Per action name: success probability and a slip distribution.

    Slip outcomes are ``stay`` (no effect), ``adjacent`` (a uniformly chosen
    neighbour of the start other than the target) or a location name.
    """

    success: dict = field(default_factory=lambda: {"move": DEFAULT_MOVE_SUCCESS})
    slip: dict = field(default_factory=lambda: {"move": {"stay": 1.0}})

    def __post_init__(self):
        for name, p in self.success.items():
            _check_rate(p)
            dist = self.slip.get(name, {"stay": 1.0})
            if p < 1.0 and abs(math.fsum(dist.values()) - 1.0) > 1e-9:
                raise BeliefError(f"slip distribution for '{name}' does not sum to 1")

    def success_prob(self, action: Atom) -> float:
        return self.success.get(action.pred, 1.0)

    def slip_dist(self, action: Atom) -> dict:
        return self.slip.get(action.pred, {"stay": 1.0})


@dataclass
class NoiseConfig:
    sensor: SensorModel = field(default_factory=SensorModel)
    motion: MotionModel = field(default_factory=MotionModel)
    action_cost: int = 5
    observe_cost: int = 1


def parse_noise(text: str) -> NoiseConfig:
    """Lines ``sensor <pattern> tp=<p> fp=<p>``, ``motion <action> success=<p>
    slip=<outcome:p,...>`` and ``cost action=<n> observe=<n>``."""
    from .lang.parser import parse_atom

    cfg = NoiseConfig(SensorModel(), MotionModel({}, {}))
    entries = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].split("#", 1)[0].strip()
        if not line:
            continue
        kw = dict(re.findall(r"(\w+)=(\S+)", line))
        head = re.sub(r"\s*\w+=\S+", "", line).split(None, 1)
        try:
            if head[0] == "sensor":
                pat = head[1].strip() if len(head) > 1 else "*"
                tp, fp = float(kw["tp"]), float(kw["fp"])
                if pat == "*":
                    cfg.sensor.tp, cfg.sensor.fp = tp, fp
                else:
                    entries.append((parse_atom(pat), tp, fp))
            elif head[0] == "motion":
                name = head[1].strip()
                cfg.motion.success[name] = float(kw["success"])
                dist = {}
                for part in kw.get("slip", "stay:1.0").split(","):
                    k, _, v = part.partition(":")
                    dist[k] = float(v)
                cfg.motion.slip[name] = dist
            elif head[0] == "cost":
                cfg.action_cost = int(kw.get("action", cfg.action_cost))
                cfg.observe_cost = int(kw.get("observe", cfg.observe_cost))
            else:
                raise LangError(f"unknown noise entry '{head[0]}'", n, 1)
        except (KeyError, ValueError, IndexError) as e:
            if isinstance(e, LangError):
                raise
            raise LangError(f"malformed noise entry: {raw.strip()}", n, 1) from None
    cfg.sensor = SensorModel(entries, cfg.sensor.tp, cfg.sensor.fp)
    cfg.motion = MotionModel(cfg.motion.success, cfg.motion.slip)
    return cfg


# ---------------------------------------------------------------- beliefs

@dataclass(frozen=True)
class BeliefState:
    hypotheses: tuple  # Literals, one per mutually exclusive outcome
    probs: tuple

    def __post_init__(self):
        if len(self.hypotheses) != len(self.probs) or not self.hypotheses:
            raise BeliefError("belief needs one probability per hypothesis")
        if any(p < 0 for p in self.probs) or abs(math.fsum(self.probs) - 1.0) > 1e-9:
            raise BeliefError("belief is not normalised")

    def best(self) -> int:
        return max(range(len(self.probs)), key=lambda i: (self.probs[i], -i))

    def prob(self, hyp) -> float:
        return self.probs[self.hypotheses.index(hyp)]


def init_belief(subset, prior="uniform", favored=None, trust: float = 0.8) -> BeliefState:
    """Prior over ``subset``: ``uniform``, ``history-default`` (``trust`` on the
    ``favored`` hypothesis, the rest spread evenly) or an explicit list."""
    subset = tuple(subset)
    if not subset:
        raise BeliefError("empty hypothesis set")
    k = len(subset)
    if prior == "uniform":
        probs = [1.0 / k] * k
    elif prior == "history-default":
        i = subset.index(favored)
        if k == 1:
            probs = [1.0]
        else:
            rest = (1.0 - trust) / (k - 1)
            probs = [trust if j == i else rest for j in range(k)]
    else:
        probs = [float(x) for x in prior]
        if len(probs) != k or any(p < 0 for p in probs):
            raise BeliefError("explicit prior has the wrong shape")
        z = math.fsum(probs)
        if z <= 0:
            raise BeliefError("explicit prior cannot be normalised")
        probs = [p / z for p in probs]
    return BeliefState(subset, tuple(probs))


def bayes_update(b: BeliefState, i: int, observed: bool, tp: float, fp: float) -> BeliefState:
    """Posterior after a reading about hypothesis ``i``.

    The observed hypothesis gets likelihood ``tp`` (or ``1 - tp`` for a
    negative reading), every other hypothesis ``fp`` (or ``1 - fp``); the
    result is renormalised. For two hypotheses this is the two-event form
    p(E|O) = p(O|E)p(E) / (p(O|E)p(E) + p(O|~E)p(~E)).
    """
    lik_i = tp if observed else 1.0 - tp
    lik_o = fp if observed else 1.0 - fp
    w = [p * (lik_i if j == i else lik_o) for j, p in enumerate(b.probs)]
    z = math.fsum(w)
    if z <= 0.0:
        raise BeliefError("degenerate likelihood: observation has zero probability")
    return BeliefState(b.hypotheses, tuple(x / z for x in w))


def hypothesis_rates(h: Literal, sensor: SensorModel) -> tuple[float, float]:
    """Reading likelihoods for a hypothesis literal; a negative literal is
    confirmed by a false reading of its atom."""
    tp, fp = sensor.rates(h.atom)
    if h.neg:
        return 1.0 - fp, 1.0 - tp
    return tp, fp


# ---------------------------------------------------------------- relevant subset

def functional_fluents(sd: SystemDescription) -> dict[str, str]:
    """Fluents made single-valued in their last argument by a uniqueness
    constraint ``-f(X, V2) if f(X, V1), V1 != V2``; maps name -> value sort."""
    out = {}
    for law in sd.state_constraints():
        h = law.head
        if not h.neg or len(h.atom.args) < 2:
            continue
        for it in law.body:
            if isinstance(it, Literal) and not it.neg and it.atom.pred == h.atom.pred \
                    and it.atom.args[:-1] == h.atom.args[:-1]:
                v = h.atom.args[-1]
                out.setdefault(h.atom.pred, [])
                if getattr(v, "sort", None):
                    out[h.atom.pred].append(v.sort)
    return {k: v for k, v in out.items() if v}


def relevant_subset(action: Atom, sd: SystemDescription, current) -> list[Literal]:
    """Outcome hypotheses for ``action`` given the literals believed now.

    For an effect on a single-valued fluent the hypotheses are the current
    value, the target value and values statically connected to the current
    one; otherwise the effect either happens or not.
    """
    if action.pred not in sd.actions:
        raise BeliefError(f"undeclared action '{action.pred}'")
    from .transition import Interpreter  # local: heavy to build

    interp = _interp(sd)
    current = set(current)
    effects = [h for h, body in interp.causal.get(action, ()) if all(l in current for l in body)]
    if not effects:
        effects = [h for h, _ in interp.causal.get(action, ())]
    if not effects:
        raise BeliefError(f"action '{action}' has no observable effect model")
    eff = effects[0]
    functional = functional_fluents(sd)
    if eff.atom.pred in functional and not eff.neg:
        target = eff.atom.args[-1]
        key = eff.atom.args[:-1]
        sorts = functional[eff.atom.pred]
        vsort = next((s for s in sorts if sd.sorts.is_instance(target.name, s)), None)
        if vsort is not None:
            cur = [l.atom.args[-1] for l in current
                   if not l.neg and l.atom.pred == eff.atom.pred and l.atom.args[:-1] == key
                   and sd.sorts.is_instance(l.atom.args[-1].name, vsort)]
            values = {target} | set(cur)
            for c in cur:
                for s in sd.statics:
                    if len(s.args) == 2 and s.args[0] == c and isinstance(s.args[1], Const) \
                            and sd.sorts.is_instance(s.args[1].name, vsort):
                        values.add(s.args[1])
            order = {o: k for k, o in enumerate(sd.sorts.members(vsort))}
            vals = sorted(values, key=lambda v: order.get(v.name, len(order)))
            return [Literal(Atom(eff.atom.pred, key + (v,))) for v in vals]
    return [eff, eff.complement()]


_INTERP_CACHE: dict[int, object] = {}


def _interp(sd: SystemDescription):
    from .transition import Interpreter

    it = _INTERP_CACHE.get(id(sd))
    if it is None or it.sd is not sd:
        it = Interpreter(sd)
        _INTERP_CACHE[id(sd)] = it
    return it


# ---------------------------------------------------------------- execution

@dataclass(frozen=True)
class ExecutionPolicy:
    theta: float = 0.85
    max_cycles: int = 50
    seed: int = 0
    max_issues: int = 3
    # "binary-default" trusts history on two-way subsets only; larger
    # subsets (where an action may have slipped) start uniform
    prior: str = "binary-default"
    trust: float = 0.8

    def __post_init__(self):
        if not 0.5 < self.theta < 1.0:
            raise BeliefError("commit threshold must lie in (0.5, 1)")
        if self.max_cycles < 1 or self.max_issues < 1:
            raise BeliefError("cycle and issue budgets must be positive")
        if self.prior not in ("uniform", "history-default", "binary-default"):
            raise BeliefError(f"unknown prior '{self.prior}'")


@dataclass
class ExecutionResult:
    status: str  # "completed" or "timed-out"
    statements: list
    cycles: int
    belief: BeliefState | None
    ticks: int = 0
    issues: int = 0


def execute_action(action: Atom, step: int, world, hypotheses, expected: Literal,
                   noise: NoiseConfig, policy: ExecutionPolicy) -> ExecutionResult:
    """Issue ``action`` and observe until a hypothesis passes the threshold.

    ``world`` offers ``apply(action, step)`` and ``sense(atom)`` (None when the
    atom cannot be seen). If the "not done" side wins, the action may be
    issued again, up to ``policy.max_issues`` times in total. On completion the winning
    hypothesis is committed for ``step + 1``; on timeout the negation of the
    expected effect is. Only actions with a stochastic motion model are
    issued again, since a deterministic action would fail the same way.
    """
    hyps = tuple(hypotheses)
    ticks = 0
    cycles = 0
    issues = 0
    try:
        world.apply(action, step)
    except Exception:
        return ExecutionResult("timed-out", _timeout(action, step, expected), 0, None, 0, 0)
    issues = 1
    ticks += noise.action_cost
    b = _prior(hyps, expected, policy)
    fav = hyps.index(expected) if expected in hyps else -1
    while cycles < policy.max_cycles:
        cycles += 1
        # look at the likeliest hypothesis that can be seen from here
        reading = None
        for i in sorted(range(len(hyps)), key=lambda k: (-b.probs[k], k != fav, k)):
            reading = world.sense(hyps[i].atom)
            ticks += noise.observe_cost
            if reading is not None:
                break
        if reading is None:
            break
        h = hyps[i]
        observed = reading if not h.neg else not reading
        tp, fp = hypothesis_rates(h, noise.sensor)
        b = bayes_update(b, i, observed, tp, fp)
        j = b.best()
        if b.probs[j] >= policy.theta:
            if hyps[j] == expected:
                stmts = [Hpd(action, step), Obs(expected.atom, not expected.neg, step + 1)]
                return ExecutionResult("completed", stmts, cycles, b, ticks, issues)
            if issues < policy.max_issues and noise.motion.success_prob(action) < 1.0:
                world.apply(action, step)
                issues += 1
                ticks += noise.action_cost
                b = _prior(hyps, expected, policy)
                continue
            if _is_not_done(hyps[j], expected, hyps):
                break
            stmts = [Hpd(action, step), Obs(hyps[j].atom, not hyps[j].neg, step + 1)]
            return ExecutionResult("completed", stmts, cycles, b, ticks, issues)
    return ExecutionResult("timed-out", _timeout(action, step, expected), cycles, b, ticks, issues)


def _prior(hyps, expected, policy: ExecutionPolicy) -> BeliefState:
    if policy.prior == "uniform" or expected not in hyps:
        return init_belief(hyps)
    if policy.prior == "binary-default" and len(hyps) > 2:
        return init_belief(hyps)
    return init_belief(hyps, "history-default", expected, policy.trust)


def _is_not_done(h: Literal, expected: Literal, hyps) -> bool:
    return h == expected.complement() or len(hyps) > 2


def _timeout(action: Atom, step: int, expected: Literal) -> list:
    return [Hpd(action, step), Obs(expected.atom, expected.neg, step + 1)]
