import random

import pytest

from aspmix.belief import MotionModel, NoiseConfig, SensorModel
from aspmix.cli import data_path
from aspmix.lang.parser import parse_atom, parse_domain, parse_literal
from aspmix.lang.syntax import ScriptEvent
from aspmix.sim.bench import (
    ARCHITECTURES, TrialConfig, group_seed, make_task, run_benchmark, run_trial,
)
from aspmix.sim.world import MapSpec, World, world_from_truth
from aspmix.transition import Interpreter

PERFECT = NoiseConfig(SensorModel(tp=1.0, fp=0.0), MotionModel({"move": 1.0}, {}))


@pytest.fixture(scope="module")
def sd():
    return parse_domain(data_path("restaurant.dom").read_text())


@pytest.fixture(scope="module")
def interp(sd):
    return Interpreter(sd)


def A(text):
    return parse_atom(text)


def L(text):
    return parse_literal(text)


# ---------------------------------------------------------------- map

def test_map_invariants(sd):
    m = MapSpec.from_domain(sd)
    for p, qs in m.connected.items():
        for q in qs:
            assert p in m.connected[q]
    areas = sd.sorts.members("area")
    assert all(m.room_of.get(a) in m.rooms for a in areas)
    assert set(m.doors) == {"d1", "d2"}


def test_asymmetric_map_rejected():
    text = ("#sort place. #instance a, b : place. #sort room. #static connected(place, place). "
            "connected(a, b).")
    with pytest.raises(ValueError):
        MapSpec.from_domain(parse_domain(text))


# ---------------------------------------------------------------- stepping

def test_deterministic_move(sd, interp):
    w = world_from_truth(sd, [A("has_location(robot, a1)")], PERFECT, seed=1, interp=interp)
    assert w.apply(A("move(robot, a2)"), 0) == "ok"
    assert w.location("robot") == "a2"


def test_inexecutable_is_noop(sd, interp):
    w = world_from_truth(sd, [A("has_location(robot, a1)")], PERFECT, seed=1, interp=interp)
    before = w.state
    assert w.apply(A("move(robot, a4)"), 0) == "failed"
    assert w.state == before


def test_scripted_lock_keeps_door_closed(sd, interp):
    w = world_from_truth(sd, [A("has_location(robot, d2)")], PERFECT,
                         [ScriptEvent(A("locked(d2)"), 2)], 0, interp)
    assert w.apply(A("open(robot, d2)"), 2) == "ok"
    assert w.holds(L("-is_open(d2)")) and w.holds(L("is_locked(d2)"))
    assert w.help() == []


def test_help_fires_unlock(sd, interp):
    w = world_from_truth(sd, [A("has_location(robot, d2)"), A("is_locked(d2)")], PERFECT,
                         [ScriptEvent(A("unlocked(d2)"))], 0, interp)
    assert w.help() == [A("unlocked(d2)")]
    w.apply(A("open(robot, d2)"), 1)
    assert w.holds(L("is_open(d2)"))


def test_motion_success_rate(sd, interp):
    noise = NoiseConfig(motion=MotionModel({"move": 0.8}, {"move": {"adjacent": 1.0}}))
    w = world_from_truth(sd, [A("has_location(robot, a1)")], noise, seed=2024, interp=interp)
    start = w.state
    hit = 0
    elsewhere = 0
    for _ in range(10_000):
        w.state = start
        w.apply(A("move(robot, a2)"), 0)
        hit += w.location("robot") == "a2"
        elsewhere += w.location("robot") not in ("a1", "a2")
    assert abs(hit / 10_000 - 0.8) <= 0.01
    # every slip lands on a neighbour of a1 other than the target
    assert elsewhere == 10_000 - hit


def test_constraints_hold_after_every_step(sd, interp):
    rng = random.Random(9)
    noise = NoiseConfig(motion=MotionModel({"move": 0.7}, {"move": {"adjacent": 0.5, "stay": 0.5}}))
    acts = sd.ground_actions("agent")
    for seed in range(20):
        w = world_from_truth(sd, [A("has_location(robot, a1)"), A("has_location(ds1, a2)")],
                             noise, seed=seed, interp=interp)
        for step in range(15):
            w.apply(rng.choice(acts), step)
            facts = [l.atom for l in w.state if not l.neg and l.atom in interp.basic_set]
            assert interp.from_facts(facts) == w.state


# ---------------------------------------------------------------- sensing

def test_false_positive_rate(sd, interp):
    w = world_from_truth(sd, [A("has_location(robot, d1)")], NoiseConfig(), seed=7, interp=interp)
    reads = [w.sense(A("is_open(d1)")) for _ in range(10_000)]
    assert abs(sum(reads) / 10_000 - 0.1) <= 0.01


def test_true_positive_certain(sd, interp):
    noise = NoiseConfig(SensorModel(tp=1.0, fp=0.1))
    w = world_from_truth(sd, [A("has_location(robot, d1)"), A("is_open(d1)")], noise, seed=7,
                         interp=interp)
    assert all(w.sense(A("is_open(d1)")) for _ in range(1000))


def test_other_room_gives_no_reading(sd, interp):
    w = world_from_truth(sd, [A("has_location(robot, a1)"), A("has_location(ds1, a3)")],
                         NoiseConfig(), seed=7, interp=interp)
    assert w.sense(A("has_location(ds1, a3)")) is None
    assert w.sense(A("is_open(d2)")) is None
    assert w.sense(A("has_location(robot, a1)")) is not None


# ---------------------------------------------------------------- tasks and trials

def test_task_kinds(sd, interp):
    for kind in ("deliver", "fetch", "seat"):
        sc = make_task(sd, random.Random(3), kind)
        assert sc.goal
        assert interp.from_facts([l.atom for l in sc.truth]) is not None
    with pytest.raises(ValueError):
        make_task(sd, random.Random(3), "dance")


def test_task_is_seeded(sd):
    a = make_task(sd, random.Random(group_seed(4, 2)))
    b = make_task(sd, random.Random(group_seed(4, 2)))
    assert a == b


def test_trial_reproducible(sd):
    sc = make_task(sd, random.Random(11))
    for arch in ARCHITECTURES:
        r1 = run_trial(sd, TrialConfig(arch, sc, 11, 0), NoiseConfig())
        r2 = run_trial(sd, TrialConfig(arch, sc, 11, 0), NoiseConfig())
        r1.wall = r2.wall = 0.0
        assert r1 == r2


def test_unknown_architecture(sd):
    with pytest.raises(ValueError):
        run_trial(sd, TrialConfig("oracle", make_task(sd, random.Random(1))), NoiseConfig())


def test_example_one_mixed(sd):
    from aspmix.lang.parser import parse_scenario

    sc = parse_scenario(data_path("ex1.scn").read_text(), sd)
    r = run_trial(sd, TrialConfig("mixed", sc, 0), PERFECT)
    assert r.success and r.diagnoses == 1 and r.replans == 1


def test_single_group_is_paired(sd):
    s = run_benchmark(sd, 1, seed=5)
    assert [t.architecture for t in s.trials] == list(ARCHITECTURES)
    assert {t.group for t in s.trials} == {0}
    me = s.per_arch["mixed"]
    assert me["accuracy_factor"] == 1.0 or not me["accuracy"]
    if s.trials[0].success:
        assert me["time_mean"] == 1.0 and me["time_std"] == 0.0
    data = s.to_json()
    assert set(data) == {"n", "seed", "per_arch", "tests", "pairs"}
    assert {"accuracy", "time_mean", "time_std", "n"} <= set(data["per_arch"]["prob"])
    assert "Architecture" in s.table()


def test_perfect_world_all_succeed(sd):
    s = run_benchmark(sd, 4, seed=2, noise=PERFECT)
    for arch in ARCHITECTURES:
        assert s.per_arch[arch]["accuracy"] == 1.0


def test_benchmark_needs_trials(sd):
    with pytest.raises(ValueError):
        run_benchmark(sd, 0)
