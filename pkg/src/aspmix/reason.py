"""Planning, diagnosis, scene explanation and the plan-execute-replan loop."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Protocol

from .ground import ground
from .lang.syntax import (
    AGENT, EXOGENOUS, Atom, Const, History, Hpd, Literal, Obs, Program, Scenario, SystemDescription,
)
from .solve.asp import AnswerSet, Engine
from .translate import (
    ALL, MINIMAL, OFF, SCENE_RELAX_PRIORITY, TranslationConfig, add_goal, add_scene_axioms, goal_at, holds,
    occurs, translate,
)

DEFAULT_MAX_HORIZON = 12
PLAN_WINDOW = 4


class ReasonError(Exception):
    """A reasoning query without a usable answer; ``kind`` names the case."""

    def __init__(self, kind: str, message: str = ""):
        super().__init__(f"{kind}: {message}" if message else kind)
        self.kind = kind


@dataclass
class Plan:
    steps: list  # (action Atom, step) pairs
    horizon: int
    start: int
    model: AnswerSet | None = None

    @property
    def actions(self) -> list[Atom]:
        return [a for a, _ in self.steps]

    def predicted(self, lit: Literal, i: int) -> bool | None:
        """Truth value of a fluent literal at step ``i`` in the plan's model."""
        if self.model is None:
            return None
        if holds(lit, i) in self.model.literals:
            return True
        if holds(lit.complement(), i) in self.model.literals:
            return False
        return None

    def to_json(self) -> dict:
        return {"horizon": self.horizon, "start": self.start,
                "steps": [{"step": i, "action": str(a)} for a, i in self.steps]}


@dataclass(frozen=True)
class Explanation:
    events: tuple  # sorted (exogenous action, step) pairs
    mode: str = MINIMAL

    def to_json(self) -> dict:
        return {"mode": self.mode, "expl": [f"expl({a}, {i})" for a, i in self.events]}

    def __str__(self) -> str:
        return ", ".join(f"expl({a}, {i})" for a, i in self.events) or "(none)"


@dataclass
class SceneLabeling:
    candidates: dict = field(default_factory=dict)  # object -> sorted class labels
    relaxed: dict = field(default_factory=dict)  # (object, class) -> relaxed rule count
    unexplainable: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"candidates": self.candidates,
                "relaxed": {f"{o}:{c}": k for (o, c), k in sorted(self.relaxed.items())},
                "unexplainable": self.unexplainable}


@dataclass
class TaskResult:
    success: bool
    reason: str = ""
    actions: list = field(default_factory=list)
    diagnoses: list = field(default_factory=list)
    replans: int = 0
    timing: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    history: History | None = None
    ticks: int = 0

    def to_json(self) -> dict:
        return {"success": self.success, "reason": self.reason,
                "actions": [{"step": i, "action": str(a)} for a, i in self.actions],
                "diagnoses": [d.to_json() for d in self.diagnoses], "replans": self.replans,
                "ticks": self.ticks, "timing": {k: round(v, 4) for k, v in self.timing.items()}}


# ---------------------------------------------------------------- helpers

def current_step(h: History) -> int:
    return h.last_step()


def _engine(p: Program, **kw) -> Engine:
    return Engine(ground(p), **kw)


def check_consistency(sd: SystemDescription, h: History, horizon: int | None = None,
                      strict: bool = False):
    """The minimal-CR answer set of the history program, or None if inconsistent.

    With ``strict`` the history only counts as consistent when no
    consistency-restoring rule is needed, so an observation that can only be
    reconciled by dropping an initial-state default is reported too.
    """
    n = current_step(h) if horizon is None else horizon
    eng = _engine(translate(sd, h, TranslationConfig(horizon=n)))
    if not eng.minimize():
        return None
    if strict and any(c for _, c in eng.min_counts):
        return None
    return eng.find()


# ---------------------------------------------------------------- planning

def plan(sd: SystemDescription, history: History, goal, max_horizon: int = DEFAULT_MAX_HORIZON,
         min_horizon: int = 0) -> Plan:
    """Shortest plan from the current step; ties broken towards the
    lexicographically least (step, action order) sequence.

    Horizons are tried in increasing order. To avoid grounding once per
    horizon, a window of horizons is grounded together: the program for the
    window's last horizon derives ``goal_at(i)`` at every step, and horizon
    h is tested by assuming the goal at t+h and no agent action from t+h on.
    Idle steps leave the state unchanged, so this has exactly the answer
    sets of the horizon-h program, extended by idling.
    """
    goal = list(goal)
    if not goal:
        raise ReasonError("missing-goal", "no goal given")
    t = current_step(history)
    if check_consistency(sd, history, t) is None:
        raise ReasonError("inconsistent-history", "diagnose before planning")
    order = sd.ground_actions(AGENT)
    hpd_steps = {r.step for r in history.hpd}
    h = min_horizon
    width = PLAN_WINDOW
    while h <= max_horizon:
        last = min(max_horizon, h + width - 1)
        cfg = TranslationConfig(horizon=t + last, plan_from=t)
        eng = _engine(add_goal(translate(sd, history, cfg), sd, goal, cfg, hpd_steps,
                               per_step=True))
        for k in range(h, last + 1):
            base = [eng.id_lit(goal_at(t + k))]
            if base[0] is None:
                continue
            for i in range(t + k, t + last):
                for a in order:
                    v = eng.id_lit(occurs(a, i))
                    if v is not None:
                        base.append(-v)
            if eng.minimize(base):
                return _least_plan(eng, order, t, t + k, base)
        h = last + 1
        width *= 2
    raise ReasonError("no-plan", f"no plan within horizon {max_horizon}")


def _least_plan(eng: Engine, order: list[Atom], t: int, n: int, base=()) -> Plan:
    fixed: list[int] = list(base)
    model = eng.find(fixed)
    steps = []
    for i in range(t, n):
        chosen = None
        for a in order:
            if occurs(a, i) in model.literals:
                chosen = a
                break
        for a in order:
            if a == chosen:
                break
            v = eng.id_lit(occurs(a, i))
            if v is None:
                continue
            m = eng.find(fixed + [v])
            if m is not None:
                model, chosen = m, a
                break
        if chosen is None:
            # no agent action at this step in the least plan
            for a in order:
                v = eng.id_lit(occurs(a, i))
                if v is not None:
                    fixed.append(-v)
            continue
        fixed.append(eng.id_lit(occurs(chosen, i)))
        steps.append((chosen, i))
    model = eng.find(fixed) or model
    return Plan(steps, n, t, model)


# ---------------------------------------------------------------- diagnosis

def diagnose(sd: SystemDescription, history: History, mode: str = MINIMAL,
             limit: int = 1000) -> list[Explanation]:
    """Exogenous explanations of the observations in ``history``.

    Returns [] for a consistent history. ``limit`` caps how many distinct
    explanations are enumerated (0 means no cap).
    """
    if mode not in (ALL, MINIMAL):
        raise ValueError(f"unknown diagnosis mode '{mode}'")
    t = current_step(history)
    if check_consistency(sd, history, t, strict=True) is not None:
        return []
    cfg = TranslationConfig(horizon=t, diagnosis=mode, diagnose_until=t)
    gp = ground(translate(sd, history, cfg))
    eng = Engine(gp)
    if not eng.minimize():
        raise ReasonError("unexplainable", "no exogenous hypothesis restores consistency")
    expl_ids = [i for i, l in enumerate(gp.symbols) if l.atom.pred == "expl" and not l.neg]
    out = []
    for m in eng.enumerate(limit, project=expl_ids):
        events = sorted(((l.atom.args[0], int(l.atom.args[1].name)) for l in m.literals
                         if l.atom.pred == "expl" and not l.neg), key=lambda e: (e[1], str(e[0])))
        out.append(Explanation(tuple(events), mode))
    out.sort(key=lambda e: (len(e.events), [(i, str(a)) for a, i in e.events]))
    if out and not out[0].events:
        # dropping defaults alone restores consistency
        return []
    return out


# ---------------------------------------------------------------- scenes

def explain_scene(sd: SystemDescription, observations, objects) -> SceneLabeling:
    """Class labels reachable with the fewest relaxed attribute rules."""
    observations = list(observations)
    result = SceneLabeling()
    for o in objects:
        mine = [l for l in observations if l.atom.args and l.atom.args[0] == Const(o)]
        p = add_scene_axioms(Program([], sd.sorts, 0), sd, mine, [o])
        gp = ground(p)
        eng = Engine(gp)
        if not eng.minimize():
            result.unexplainable.append(o)
            continue
        label_ids = [i for i, l in enumerate(gp.symbols) if l.atom.pred == "is_a" and not l.neg]
        relaxed = dict(eng.min_counts).get(SCENE_RELAX_PRIORITY, 0)
        labels = set()
        for m in eng.enumerate(0, project=label_ids):
            for l in m.literals:
                if l.atom.pred == "is_a" and not l.neg:
                    labels.add(l.atom.args[1].name)
        result.candidates[o] = sorted(labels)
        for c in labels:
            result.relaxed[(o, c)] = relaxed
        if not labels:
            result.unexplainable.append(o)
    return result


# ---------------------------------------------------------------- agent loop

@dataclass
class ExecOutcome:
    status: str  # "completed" or "timed-out"
    statements: list  # Obs / Hpd records
    cycles: int = 0
    ticks: int = 0


class Executor(Protocol):
    def execute(self, action: Atom, step: int, plan: Plan) -> ExecOutcome: ...

    def request_help(self, step: int) -> list[Atom]: ...


def _matches(plan: Plan, statements) -> bool:
    for s in statements:
        if isinstance(s, Obs):
            if plan.predicted(Literal(s.fluent, not s.value), s.step) is not True:
                return False
        elif isinstance(s, Hpd):
            if (s.action, s.step) not in plan.steps:
                return False
    return True


def run_agent_loop(sd: SystemDescription, scenario: Scenario, executor: Executor,
                   max_replans: int = 5, max_horizon: int = DEFAULT_MAX_HORIZON,
                   max_steps: int = 60) -> TaskResult:
    """Plan, execute one action at a time, commit outcomes, diagnose and replan."""
    history = scenario.history.copy()
    res = TaskResult(False, history=history)
    timing = {"plan": 0.0, "execute": 0.0, "diagnose": 0.0}
    res.timing = timing

    def log(phase: str, **kw):
        rec = {"phase": phase, "step": current_step(history)}
        rec.update(kw)
        res.trace.append(rec)

    def make_plan():
        t0 = time.perf_counter()
        try:
            return plan(sd, history, scenario.goal, max_horizon)
        finally:
            timing["plan"] += time.perf_counter() - t0

    try:
        cur = make_plan()
    except ReasonError as e:
        res.reason = e.kind
        log("fail", reason=e.kind)
        return res
    log("plan", plan=[str(a) for a in cur.actions])
    queue = list(cur.steps)
    while True:
        if not queue:
            res.success = True
            res.reason = "goal"
            log("done")
            return res
        if len(res.actions) >= max_steps:
            res.reason = "step-budget"
            log("fail", reason=res.reason)
            return res
        action, i = queue.pop(0)
        t0 = time.perf_counter()
        out = executor.execute(action, i, cur)
        timing["execute"] += time.perf_counter() - t0
        res.ticks += out.ticks
        for s in out.statements:
            history.add(s)
        res.actions.append((action, i))
        log("execute", action=str(action), status=out.status, cycles=out.cycles,
            commit=[str(s) for s in out.statements])
        if out.status == "completed" and _matches(cur, out.statements):
            continue
        t0 = time.perf_counter()
        try:
            expls = diagnose(sd, history, MINIMAL, limit=50)
        except ReasonError as e:
            timing["diagnose"] += time.perf_counter() - t0
            res.reason = e.kind
            log("fail", reason=e.kind)
            return res
        timing["diagnose"] += time.perf_counter() - t0
        if expls:
            chosen = expls[0]
            res.diagnoses.append(chosen)
            log("diagnose", explanations=[str(e) for e in expls], chosen=str(chosen))
            for a, j in chosen.events:
                history.add(Hpd(a, j))
            t = current_step(history)
            helped = executor.request_help(t)
            for a in helped:
                history.add(Hpd(a, t))
            if helped:
                log("help", events=[str(a) for a in helped])
        res.replans += 1
        if res.replans > max_replans:
            res.reason = "replan-budget"
            log("fail", reason=res.reason)
            return res
        try:
            cur = make_plan()
        except ReasonError as e:
            res.reason = "unreachable" if e.kind == "no-plan" else e.kind
            log("fail", reason=res.reason)
            return res
        log("plan", plan=[str(a) for a in cur.actions])
        queue = list(cur.steps)
