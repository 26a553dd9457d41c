"""Randomised restaurant tasks, paired trials and the benchmark summary."""

from __future__ import annotations

import random
import statistics
import time
from collections import deque
from dataclasses import dataclass, field

from ..belief import ExecutionPolicy, NoiseConfig
from ..lang.syntax import (
    Atom, Const, History, Literal, Obs, Scenario, ScriptEvent, SystemDescription,
)
from ..reason import run_agent_loop
from ..transition import Interpreter
from .executors import AspOnlyExecutor, BeliefExecutor
from .greedy import GreedyAgent
from .world import MapSpec, World, agent_name

MIXED, ASP, PROB = "mixed", "asp", "prob"
ARCHITECTURES = (MIXED, ASP, PROB)
ARCH_ALIASES = {"mixed": MIXED, "asp": ASP, "asp-only": ASP, "prob": PROB, "prob-greedy": PROB}
TASK_KINDS = ("deliver", "fetch", "seat")
LOCK_PROB = 0.3
# the longest task (fetch across both doors and back) needs 16 steps
TASK_MAX_HORIZON = 18


def _a(pred, *args) -> Atom:
    return Atom(pred, tuple(Const(str(x)) for x in args))


# ---------------------------------------------------------------- tasks

def _path(m: MapSpec, src: str, dst: str) -> list[str]:
    prev = {src: None}
    q = deque([src])
    while q:
        u = q.popleft()
        if u == dst:
            break
        for v in m.connected.get(u, ()):
            if v not in prev:
                prev[v] = u
                q.append(v)
    out = []
    u = dst
    while u is not None:
        out.append(u)
        u = prev.get(u)
    return out[::-1]


def make_task(sd: SystemDescription, rng: random.Random, kind: str | None = None,
              lock_prob: float = LOCK_PROB) -> Scenario:
    """A random task on the restaurant map with its own initial world."""
    m = MapSpec.from_domain(sd)
    robot = agent_name(sd)
    areas = list(sd.sorts.members("area"))
    dish = sd.sorts.members("dish")[0]
    person = sd.sorts.members("person")[0]
    table = sd.sorts.members("table")[0]
    kind = kind or rng.choice(TASK_KINDS)
    start = rng.choice(areas)
    open_doors = {d: rng.random() < 0.5 for d in m.doors}
    table_at = rng.choice(areas)
    person_at = rng.choice(areas)
    truth = [_a("has_location", robot, start), _a("has_location", table, table_at)]
    goal = []
    stops = [start]
    if kind == "deliver":
        truth.append(_a("in_hand", robot, dish))
        target = rng.choice([x for x in areas if x != start])
        goal = [Literal(_a("has_location", dish, target)), Literal(_a("in_hand", robot, dish), True)]
        stops.append(target)
    elif kind == "fetch":
        dish_at = rng.choice([x for x in areas if x != start])
        target = rng.choice([x for x in areas if x != dish_at])
        truth.append(_a("has_location", dish, dish_at))
        goal = [Literal(_a("has_location", dish, target)), Literal(_a("in_hand", robot, dish), True)]
        stops += [dish_at, target]
    elif kind == "seat":
        person_at = rng.choice([x for x in areas if x != table_at])
        goal = [Literal(_a("has_location", person, table_at))]
        stops += [person_at, table_at]
        truth.append(_a("has_location", dish, rng.choice(areas)))
    else:
        raise ValueError(f"unknown task kind '{kind}'")
    truth.append(_a("has_location", person, person_at))
    for d, is_open in open_doors.items():
        if is_open:
            truth.append(_a("is_open", d))
    route = []
    for a, b in zip(stops, stops[1:]):
        route += _path(m, a, b)
    script = []
    closed_on_route = [d for d in m.doors if d in route and not open_doors[d]]
    if closed_on_route and rng.random() < lock_prob:
        d = rng.choice(closed_on_route)
        script = [ScriptEvent(_a("locked", d), 0), ScriptEvent(_a("unlocked", d), None)]
    obs = [Obs(a, True, 0) for a in truth]
    obs += [Obs(_a("is_open", d), False, 0) for d in m.doors if not open_doors[d]]
    if kind != "deliver":
        obs.append(Obs(_a("in_hand", robot, dish), False, 0))
    hist = History(obs, [], list(sd.defaults))
    return Scenario(hist, goal, script, [Literal(a) for a in truth], None)


# ---------------------------------------------------------------- trials

@dataclass(frozen=True)
class TrialConfig:
    architecture: str
    scenario: Scenario
    seed: int = 0
    group: int = 0


@dataclass
class TrialResult:
    architecture: str
    group: int
    success: bool
    ticks: int
    wall: float
    diagnoses: int = 0
    replans: int = 0
    actions: int = 0
    reason: str = ""

    def to_json(self) -> dict:
        return {"arch": self.architecture, "group": self.group, "success": self.success,
                "ticks": self.ticks, "wall": round(self.wall, 4), "diagnoses": self.diagnoses,
                "replans": self.replans, "actions": self.actions, "reason": self.reason}


_INTERP: dict[int, Interpreter] = {}


def _interp(sd: SystemDescription) -> Interpreter:
    it = _INTERP.get(id(sd))
    if it is None or it.sd is not sd:
        it = _INTERP[id(sd)] = Interpreter(sd)
    return it


def run_trial(sd: SystemDescription, cfg: TrialConfig, noise: NoiseConfig,
              policy: ExecutionPolicy | None = None, max_replans: int = 5,
              max_horizon: int = TASK_MAX_HORIZON) -> TrialResult:
    arch = ARCH_ALIASES.get(cfg.architecture)
    if arch is None:
        raise ValueError(f"unknown architecture '{cfg.architecture}'")
    sc = cfg.scenario
    interp = _interp(sd)
    state = interp.from_facts([l.atom for l in sc.truth if not l.neg])
    if state is None:
        raise ValueError("scenario truth violates a state constraint")
    world = World(sd, state, noise, list(sc.script), cfg.seed, interp)
    t0 = time.perf_counter()
    if arch == PROB:
        believed = interp.from_facts([o.fluent for o in sc.history.obs if o.value and o.step == 0])
        agent = GreedyAgent(sd, world, noise, sc.goal, believed,
                            theta=(policy or ExecutionPolicy()).theta)
        g = agent.run()
        return TrialResult(arch, cfg.group, world.goal_met(sc.goal), g.ticks,
                           time.perf_counter() - t0, 0, g.helps,
                           sum(1 for a in g.actions if a is not None), g.reason)
    if arch == MIXED:
        ex = BeliefExecutor(sd, world, noise,
                            ExecutionPolicy(**{**(policy or ExecutionPolicy()).__dict__,
                                               "seed": cfg.seed}))
    else:
        ex = AspOnlyExecutor(sd, world, noise)
    r = run_agent_loop(sd, sc, ex, max_replans=max_replans, max_horizon=max_horizon)
    return TrialResult(arch, cfg.group, world.goal_met(sc.goal), r.ticks,
                       time.perf_counter() - t0, len(r.diagnoses), r.replans, len(r.actions),
                       r.reason)


# ---------------------------------------------------------------- benchmark

def group_seed(seed: int, group: int) -> int:
    return (seed * 1_000_003 + group * 7919) % (2 ** 31)


@dataclass
class BenchmarkSummary:
    n: int
    seed: int
    architectures: tuple
    trials: list = field(default_factory=list)
    per_arch: dict = field(default_factory=dict)
    tests: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"n": self.n, "seed": self.seed, "per_arch": self.per_arch, "tests": self.tests,
                "pairs": [t.to_json() for t in self.trials]}

    def table(self) -> str:
        rows = [f"{'Architecture':<14}{'Accuracy':>10}{'Acc. factor':>13}{'Time factor':>18}"
                f"{'Ticks':>10}{'n':>6}"]
        for arch in self.architectures:
            s = self.per_arch[arch]
            tf = f"{s['time_mean']:.2f} ± {s['time_std']:.2f}" if s["time_mean"] is not None \
                else "n/a"
            af = f"{s['accuracy_factor']:.2f}" if s["accuracy_factor"] is not None else "n/a"
            rows.append(f"{arch:<14}{s['accuracy']:>10.3f}{af:>13}{tf:>18}"
                        f"{s['ticks_mean']:>10.1f}{s['n']:>6}")
        for name, t in self.tests.items():
            rows.append(f"sign test {name}: {t['wins']} vs {t['losses']}, p = {t['p_value']:.3g}")
        return "\n".join(rows)


def run_benchmark(sd: SystemDescription, n_trials: int, architectures=ARCHITECTURES,
                  seed: int = 0, noise: NoiseConfig | None = None,
                  policy: ExecutionPolicy | None = None, progress=None) -> BenchmarkSummary:
    """Paired trials: every architecture faces the same task, world and seed
    in each group. Times are per-pair ratios of simulated ticks against the
    mixed architecture over pairs where both succeeded."""
    if n_trials < 1:
        raise ValueError("need at least one trial")
    noise = noise or NoiseConfig()
    archs = tuple(ARCH_ALIASES[a] for a in architectures)
    summary = BenchmarkSummary(n_trials, seed, archs)
    by_group: dict[int, dict[str, TrialResult]] = {}
    for g in range(n_trials):
        gs = group_seed(seed, g)
        sc = make_task(sd, random.Random(gs))
        by_group[g] = {}
        for arch in archs:
            r = run_trial(sd, TrialConfig(arch, sc, gs, g), noise, policy)
            by_group[g][arch] = r
            summary.trials.append(r)
        if progress:
            progress(g, by_group[g])
    summary.per_arch = _aggregate(by_group, archs)
    summary.tests = _sign_tests(by_group, archs)
    return summary


def _aggregate(by_group, archs) -> dict:
    out = {}
    base = MIXED if MIXED in archs else archs[0]
    base_acc = statistics.fmean(r[base].success for r in by_group.values())
    for arch in archs:
        rs = [g[arch] for g in by_group.values()]
        acc = statistics.fmean(r.success for r in rs)
        ratios = [g[arch].ticks / g[base].ticks for g in by_group.values()
                  if g[arch].success and g[base].success and g[base].ticks > 0]
        out[arch] = {
            "accuracy": acc,
            "accuracy_factor": acc / base_acc if base_acc > 0 else None,
            "time_mean": statistics.fmean(ratios) if ratios else None,
            "time_std": statistics.pstdev(ratios) if len(ratios) > 1 else 0.0,
            "ticks_mean": statistics.fmean(r.ticks for r in rs),
            "wall_mean": statistics.fmean(r.wall for r in rs),
            "n": len(rs),
            "paired_n": len(ratios),
        }
    return out


def _sign_tests(by_group, archs) -> dict:
    from scipy.stats import binomtest

    tests = {}
    if MIXED in archs and ASP in archs:
        wins = sum(1 for g in by_group.values() if g[MIXED].success and not g[ASP].success)
        losses = sum(1 for g in by_group.values() if g[ASP].success and not g[MIXED].success)
        tests["accuracy mixed>asp"] = _binom(wins, losses, binomtest)
    if MIXED in archs and PROB in archs:
        both = [g for g in by_group.values() if g[MIXED].success and g[PROB].success]
        wins = sum(1 for g in both if g[PROB].ticks > g[MIXED].ticks)
        losses = sum(1 for g in both if g[PROB].ticks < g[MIXED].ticks)
        tests["time prob>mixed"] = _binom(wins, losses, binomtest)
    return tests


def _binom(wins: int, losses: int, binomtest) -> dict:
    n = wins + losses
    p = binomtest(wins, n, 0.5, alternative="greater").pvalue if n else 1.0
    return {"wins": wins, "losses": losses, "p_value": float(p)}
