"""Probabilistic greedy baseline: no symbolic planning.

Keeps a factored belief (a categorical belief per single-valued fluent family,
a Bernoulli belief per other fluent), reads every visible fluent each cycle and
takes the executable action whose successor, in the most likely state, is
closest to the goal under a distance heuristic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from ..belief import BeliefState, NoiseConfig, bayes_update, functional_fluents, init_belief
from ..lang.syntax import AGENT, BASIC, Atom, Const, Literal, SystemDescription
from .world import MapSpec, World

CLIP = 0.95


@dataclass
class GreedyResult:
    success_claimed: bool
    actions: list = field(default_factory=list)
    ticks: int = 0
    helps: int = 0
    reason: str = ""


class FactoredBelief:
    def __init__(self, sd: SystemDescription, map_: MapSpec, init_state):
        self.sd = sd
        self.map = map_
        fun = functional_fluents(sd)
        self.families: dict[tuple, BeliefState] = {}
        self.binary: dict[Atom, BeliefState] = {}
        places = set(map_.places)
        for a in sd.ground_fluents(BASIC):
            if a.pred in fun and len(a.args) >= 2:
                if a.args[-1].name not in places:
                    continue
                key = (a.pred,) + a.args[:-1]
                self.families.setdefault(key, [])
                self.families[key].append(a)
            else:
                self.binary[a] = None
        for key, atoms in list(self.families.items()):
            hyps = tuple(Literal(a) for a in atoms)
            truth = [Literal(a) in init_state for a in atoms]
            if any(truth):
                self.families[key] = init_belief(hyps, "history-default",
                                                 hyps[truth.index(True)], CLIP)
            else:
                self.families[key] = init_belief(hyps)
        for a in self.binary:
            pos = Literal(a)
            self.binary[a] = init_belief((pos, pos.complement()), "history-default",
                                         pos if pos in init_state else pos.complement(), CLIP)

    def observe(self, a: Atom, reading: bool, tp: float, fp: float) -> None:
        if a in self.binary:
            self.binary[a] = bayes_update(self.binary[a], 0, reading, tp, fp)
            return
        key = (a.pred,) + a.args[:-1]
        b = self.families.get(key)
        if b is not None:
            i = b.hypotheses.index(Literal(a))
            self.families[key] = bayes_update(b, i, reading, tp, fp)

    def prob(self, lit: Literal) -> float:
        a = lit.atom
        if a in self.binary:
            p = self.binary[a].probs[0]
        else:
            b = self.families.get((a.pred,) + a.args[:-1])
            if b is None or Literal(a) not in b.hypotheses:
                return 0.0 if not lit.neg else 1.0
            p = b.prob(Literal(a))
        return 1.0 - p if lit.neg else p

    def predict(self, before, after, success: float) -> None:
        """Shift belief towards the modelled successor with confidence ``success``."""
        s = min(success, CLIP)
        for key, b in self.families.items():
            new = [k for k, h in enumerate(b.hypotheses) if h in after]
            old = [k for k, h in enumerate(b.hypotheses) if h in before]
            if new and new != old:
                probs = [(1 - s) * p for p in b.probs]
                probs[new[0]] += s
                self.families[key] = BeliefState(b.hypotheses, _norm(probs))
        for a, b in self.binary.items():
            pos = Literal(a)
            if (pos in after) != (pos in before):
                target = 0 if pos in after else 1
                probs = [(1 - s) * p for p in b.probs]
                probs[target] += s
                self.binary[a] = BeliefState(b.hypotheses, _norm(probs))

    def likely_facts(self) -> list[tuple[float, Literal]]:
        out = []
        for b in self.families.values():
            i = b.best()
            out.append((b.probs[i], b.hypotheses[i]))
        for a, b in self.binary.items():
            if b.probs[0] >= 0.5:
                out.append((b.probs[0], Literal(a)))
        out.sort(key=lambda x: (-x[0], str(x[1])))
        return out


def _norm(probs):
    import math
    z = math.fsum(probs)
    return tuple(p / z for p in probs)


class GreedyAgent:
    def __init__(self, sd: SystemDescription, world: World, noise: NoiseConfig, goal,
                 init_state, theta: float = 0.85, max_actions: int = 60, help_after: int = 3):
        self.sd = sd
        self.world = world
        self.noise = noise
        self.goal = list(goal)
        self.theta = theta
        self.max_actions = max_actions
        self.help_after = help_after
        self.interp = world.interp
        self.map = world.map
        self.robot = world.robot
        self.belief = FactoredBelief(sd, self.map, init_state)
        self.actions = sd.ground_actions(AGENT)
        self.observable = [a for a in sd.ground_fluents(BASIC)
                           if not (len(a.args) >= 2 and a.pred == "has_location"
                                   and a.args[-1].name not in self.map.places)]

    # ------------------------------------------------------------ state
    def likely_state(self):
        kept = []
        for _, lit in self.belief.likely_facts():
            if self.interp.closure(kept + [lit]) is not None:
                kept.append(lit)
        return self.interp.from_facts(kept)

    def _loc(self, state, thing: str) -> str | None:
        for p in self.map.places:
            if Literal(Atom("has_location", (Const(thing), Const(p)))) in state:
                return p
        return None

    def _dist(self, state, src: str | None, dst: str | None) -> float:
        """Moves from ``src`` to ``dst``, plus one per closed door passed."""
        if src is None or dst is None:
            return 50.0
        best = {src: 0}
        heap = [(0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if u == dst:
                return d
            if d > best.get(u, 1e9):
                continue
            extra = 0
            if u in self.map.doors and Literal(Atom("is_open", (Const(u),))) not in state:
                extra = 1
            for v in self.map.connected.get(u, ()):
                nd = d + 1 + extra
                if nd < best.get(v, 1e9):
                    best[v] = nd
                    heapq.heappush(heap, (nd, v))
        return 50.0

    def heuristic(self, state) -> float:
        r = self._loc(state, self.robot)
        h = 0.0
        placed = set()
        for g in self.goal:
            if g in state:
                continue
            a = g.atom
            args = [t.name for t in a.args]
            if a.pred == "has_location" and not g.neg:
                x, where = args
                placed.add(x)
                if x == self.robot:
                    h += self._dist(state, r, where)
                elif self.sd.sorts.is_instance(x, "person"):
                    h += self._dist(state, r, self._loc(state, x)) + 1
                else:
                    held = Literal(Atom("in_hand", (Const(self.robot), Const(x)))) in state
                    if held:
                        h += self._dist(state, r, where) + 1
                    else:
                        at = self._loc(state, x)
                        h += self._dist(state, r, at) + 1 + self._dist(state, at, where) + 1
            elif a.pred == "in_hand" and g.neg:
                if args[1] not in placed:
                    h += 1
            elif a.pred == "in_hand":
                h += self._dist(state, r, self._loc(state, args[1])) + 1
            else:
                h += 1
        return h

    # ------------------------------------------------------------ loop
    def observe_all(self) -> int:
        n = 0
        for a in self.observable:
            reading = self.world.sense(a)
            if reading is None:
                continue
            n += 1
            tp, fp = self.noise.sensor.rates(a)
            self.belief.observe(a, reading, tp, fp)
        return n * self.noise.observe_cost

    def goal_believed(self) -> bool:
        return all(self.belief.prob(g) >= self.theta for g in self.goal)

    def run(self) -> GreedyResult:
        res = GreedyResult(False)
        failed_opens: dict[Atom, int] = {}
        step = 0
        while len(res.actions) < self.max_actions:
            res.ticks += self.observe_all()
            if self.goal_believed():
                res.success_claimed = True
                res.reason = "goal"
                return res
            s = self.likely_state()
            if s is None:
                continue
            h0 = self.heuristic(s)
            best = None
            for act in self.actions:
                nxt = self.interp.step(s, [act])
                if nxt is None:
                    continue
                hv = self.heuristic(nxt)
                if best is None or hv < best[0]:
                    best = (hv, act, nxt)
            stuck_door = self._blocking_door(s)
            if best is None or best[0] >= h0 or (
                    stuck_door is not None and failed_opens.get(stuck_door, 0) >= self.help_after):
                if self.world.help():
                    res.helps += 1
                    failed_opens.clear()
                    for a in list(self.belief.binary):
                        if a.pred == "is_locked":
                            pos = Literal(a)
                            self.belief.binary[a] = init_belief((pos, pos.complement()),
                                                                [1 - CLIP, CLIP])
                    continue
                if best is None or best[0] >= h0:
                    res.reason = "stuck"
                    res.actions.append(None)
                    continue
            _, act, nxt = best
            if act.pred == "open":
                failed_opens[act.args[-1]] = failed_opens.get(act.args[-1], 0) + 1
            self.world.apply(act, step)
            step += 1
            res.ticks += self.noise.action_cost
            res.actions.append(act)
            self.belief.predict(s, nxt, self.noise.motion.success_prob(act))
        res.reason = "budget"
        return res

    def _blocking_door(self, state):
        r = self._loc(state, self.robot)
        if r in self.map.doors and Literal(Atom("is_open", (Const(r),))) not in state:
            return Const(r)
        return None
