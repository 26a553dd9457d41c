"""Executors connecting the agent loop to a simulated world."""

from __future__ import annotations

from ..belief import ExecutionPolicy, NoiseConfig, execute_action, relevant_subset
from ..lang.syntax import Atom, Hpd, Literal, Obs, SystemDescription
from ..reason import ExecOutcome, Plan
from .world import World


def _believed_now(plan: Plan, step: int) -> list[Literal]:
    if plan.model is None:
        return []
    out = []
    for l in plan.model.literals:
        if l.atom.pred == "holds" and int(l.atom.args[1].name) == step:
            out.append(Literal(l.atom.args[0], l.neg))
    return out


def expected_effect(sd: SystemDescription, action: Atom, step: int, plan: Plan):
    """Outcome hypotheses for ``action`` and the one the plan predicts."""
    hyps = relevant_subset(action, sd, _believed_now(plan, step))
    for h in hyps:
        if plan.predicted(h, step + 1) is True and plan.predicted(h, step) is not True:
            return hyps, h
    for h in hyps:
        if plan.predicted(h, step + 1) is True:
            return hyps, h
    return hyps, hyps[0]


class BeliefExecutor:
    """Mixed architecture: probabilistic execution of each planned action."""

    def __init__(self, sd: SystemDescription, world: World, noise: NoiseConfig,
                 policy: ExecutionPolicy | None = None):
        self.sd = sd
        self.world = world
        self.noise = noise
        self.policy = policy or ExecutionPolicy()
        self.results = []

    def execute(self, action: Atom, step: int, plan: Plan) -> ExecOutcome:
        hyps, expected = expected_effect(self.sd, action, step, plan)
        r = execute_action(action, step, self.world, hyps, expected, self.noise, self.policy)
        self.results.append(r)
        return ExecOutcome(r.status, r.statements, r.cycles, r.ticks)

    def request_help(self, step: int) -> list[Atom]:
        return self.world.help()


class AspOnlyExecutor:
    """Logic-only architecture: the action is assumed to succeed and a single
    noisy reading of its expected effect is committed as read."""

    def __init__(self, sd: SystemDescription, world: World, noise: NoiseConfig):
        self.sd = sd
        self.world = world
        self.noise = noise

    def execute(self, action: Atom, step: int, plan: Plan) -> ExecOutcome:
        _, expected = expected_effect(self.sd, action, step, plan)
        self.world.apply(action, step)
        ticks = self.noise.action_cost + self.noise.observe_cost
        reading = self.world.sense(expected.atom)
        stmts = [Hpd(action, step)]
        if reading is not None:
            stmts.append(Obs(expected.atom, reading, step + 1))
        return ExecOutcome("completed", stmts, 1, ticks)

    def request_help(self, step: int) -> list[Atom]:
        return self.world.help()
