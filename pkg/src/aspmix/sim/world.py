"""Ground-truth world: a complete state, stochastic motion and noisy sensing."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..belief import NoiseConfig
from ..lang.syntax import Atom, Const, Literal, ScriptEvent, SystemDescription
from ..transition import Interpreter


@dataclass
class MapSpec:
    places: tuple
    rooms: tuple
    doors: tuple
    connected: dict  # place -> tuple of neighbouring places
    room_of: dict  # place -> room

    @classmethod
    def from_domain(cls, sd: SystemDescription) -> "MapSpec":
        places = sd.sorts.members("place")
        doors = sd.sorts.members("door") if "door" in sd.sorts.sorts else ()
        rooms = sd.sorts.members("room")
        conn = {p: [] for p in places}
        room_of = {}
        for s in sd.statics:
            if s.pred == "connected" and len(s.args) == 2:
                a, b = s.args[0].name, s.args[1].name
                if a in conn and b not in conn[a]:
                    conn[a].append(b)
            elif s.pred == "belongs" and len(s.args) == 2 and s.args[1].name in rooms:
                room_of[s.args[0].name] = s.args[1].name
        order = {p: k for k, p in enumerate(places)}
        connected = {p: tuple(sorted(v, key=order.get)) for p, v in conn.items()}
        for p in places:
            for q in connected[p]:
                if p not in connected.get(q, ()):
                    raise ValueError(f"connectivity is not symmetric between {p} and {q}")
        return cls(places, rooms, tuple(doors), connected, room_of)


def agent_name(sd: SystemDescription) -> str:
    robots = sd.sorts.members("robot")
    if not robots:
        raise ValueError("domain declares no robot")
    return robots[0]


@dataclass
class World:
    """Simulated restaurant. ``apply`` fires due scripted events before the
    action; ``sense`` returns None for fluents out of view."""

    sd: SystemDescription
    state: frozenset
    noise: NoiseConfig
    script: list = field(default_factory=list)
    seed: int = 0
    interp: Interpreter | None = None

    def __post_init__(self):
        if self.interp is None:
            self.interp = Interpreter(self.sd)
        self.rng = random.Random(self.seed)
        self.map = MapSpec.from_domain(self.sd)
        self.robot = agent_name(self.sd)
        self.fired: set[int] = set()
        self.log: list = []

    # ------------------------------------------------------------ queries
    def holds(self, lit: Literal) -> bool:
        return lit in self.state

    def goal_met(self, goal) -> bool:
        return all(l in self.state for l in goal)

    def location(self, thing: str) -> str | None:
        for p in self.map.places:
            if Literal(Atom("has_location", (Const(thing), Const(p)))) in self.state:
                return p
        return None

    def visible(self, a: Atom) -> bool:
        here = self.location(self.robot)
        room = self.map.room_of.get(here)
        args = [t.name for t in a.args]
        if a.pred == "has_location":
            if args[0] == self.robot:
                return True
            if Literal(Atom("in_hand", (Const(self.robot), a.args[0]))) in self.state:
                return True
            where = args[1]
            return where == room or self.map.room_of.get(where) == room
        if a.pred in ("is_open", "is_locked"):
            d = args[0]
            return d == here or d in self.map.connected.get(here, ())
        return True

    def sense(self, a: Atom) -> bool | None:
        if not self.visible(a):
            return None
        tp, fp = self.noise.sensor.rates(a)
        truth = Literal(a) in self.state
        return self.rng.random() < (tp if truth else fp)

    # ------------------------------------------------------------ dynamics
    def _event(self, ev: Atom) -> bool:
        nxt = self.interp.step(self.state, [ev])
        if nxt is None:
            return False
        self.state = nxt
        self.log.append(("event", str(ev)))
        return True

    def fire_due(self, step: int) -> None:
        for k, ev in enumerate(self.script):
            if k not in self.fired and not ev.on_help and ev.step <= step:
                self.fired.add(k)
                self._event(ev.action)

    def help(self) -> list[Atom]:
        """Fire the pending on-help events; returns those that took effect."""
        done = []
        for k, ev in enumerate(self.script):
            if k not in self.fired and ev.on_help:
                self.fired.add(k)
                if self._event(ev.action):
                    done.append(ev.action)
        return done

    def apply(self, action: Atom, step: int) -> str:
        """Issue an agent action; returns "ok", "slip" or "failed"."""
        self.fire_due(step)
        p = self.noise.motion.success_prob(action)
        if p < 1.0 and self.rng.random() >= p:
            target = self._slip_target(action)
            if target is None:
                self.log.append(("slip", str(action)))
                return "slip"
            action = Atom(action.pred, action.args[:-1] + (Const(target),))
            nxt = self.interp.step(self.state, [action])
            if nxt is not None:
                self.state = nxt
            self.log.append(("slip", str(action)))
            return "slip"
        nxt = self.interp.step(self.state, [action])
        if nxt is None:
            self.log.append(("failed", str(action)))
            return "failed"
        self.state = nxt
        self.log.append(("ok", str(action)))
        return "ok"

    def _slip_target(self, action: Atom) -> str | None:
        dist = self.noise.motion.slip_dist(action)
        r = self.rng.random()
        acc = 0.0
        outcome = "stay"
        for k in sorted(dist):
            acc += dist[k]
            if r < acc:
                outcome = k
                break
        if outcome == "stay" or not action.args:
            return None
        target = action.args[-1].name
        if outcome == "adjacent":
            here = self.location(self.robot)
            options = [q for q in self.map.connected.get(here, ()) if q != target]
            return self.rng.choice(options) if options else None
        return outcome


def world_from_truth(sd: SystemDescription, truth, noise: NoiseConfig, script=(), seed: int = 0,
                     interp: Interpreter | None = None) -> World:
    interp = interp or Interpreter(sd)
    state = interp.from_facts(truth)
    if state is None:
        raise ValueError("initial facts violate a state constraint")
    return World(sd, state, noise, list(script), seed, interp)
