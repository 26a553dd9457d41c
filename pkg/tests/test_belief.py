import math
import random
from fractions import Fraction

import pytest

from aspmix.belief import (
    BeliefError, BeliefState, ExecutionPolicy, MotionModel, NoiseConfig, SensorModel,
    bayes_update, execute_action, hypothesis_rates, init_belief, parse_noise, relevant_subset,
)
from aspmix.cli import data_path
from aspmix.lang.parser import parse_atom, parse_domain, parse_literal
from aspmix.lang.syntax import Hpd, LangError, Obs, ScriptEvent
from aspmix.sim.world import world_from_truth
from aspmix.transition import Interpreter

from episodes import episode


@pytest.fixture(scope="module")
def sd():
    return parse_domain(data_path("restaurant.dom").read_text())


@pytest.fixture(scope="module")
def interp(sd):
    return Interpreter(sd)


def exact_update(probs, i, observed, tp, fp):
    """Rational-arithmetic Bayes update used as an independent check."""
    li = Fraction(tp) if observed else 1 - Fraction(tp)
    lo = Fraction(fp) if observed else 1 - Fraction(fp)
    w = [p * (li if j == i else lo) for j, p in enumerate(probs)]
    z = sum(w)
    return [x / z for x in w]


# ---------------------------------------------------------------- numerics

def test_eight_ninths():
    b = init_belief(["e", "not e"])
    post = bayes_update(b, 0, True, 0.8, 0.1)
    assert abs(post.probs[0] - 8 / 9) <= 1e-12
    assert abs(post.probs[1] - 1 / 9) <= 1e-12


def test_uninformative_reading():
    rng = random.Random(3)
    for _ in range(200):
        k = rng.randint(2, 6)
        b = init_belief(range(k), [rng.random() + 0.01 for _ in range(k)])
        r = rng.random()
        post = bayes_update(b, rng.randrange(k), rng.random() < 0.5, r, r)
        assert all(abs(x - y) <= 1e-12 for x, y in zip(post.probs, b.probs))


def test_certainty_absorbs():
    b = init_belief(["a", "b"], [1.0, 0.0])
    for observed in (True, False):
        assert bayes_update(b, 1, observed, 0.8, 0.1).probs == (1.0, 0.0)


def test_matches_rational_arithmetic():
    rng = random.Random(11)
    for _ in range(100):
        k = rng.randint(2, 5)
        raw = [Fraction(rng.randint(1, 20)) for _ in range(k)]
        exact = [x / sum(raw) for x in raw]
        b = init_belief(range(k), [float(x) for x in exact])
        for _ in range(10):
            i, obs = rng.randrange(k), rng.random() < 0.5
            tp, fp = Fraction(rng.randint(50, 95), 100), Fraction(rng.randint(1, 40), 100)
            exact = exact_update(exact, i, obs, tp, fp)
            b = bayes_update(b, i, obs, float(tp), float(fp))
        assert all(abs(float(e) - p) < 1e-12 for e, p in zip(exact, b.probs))


def test_order_independence():
    rng = random.Random(5)
    k = 4
    readings = [(rng.randrange(k), rng.random() < 0.5, rng.uniform(0.6, 0.9), rng.uniform(0.05, 0.3))
                for _ in range(20)]
    results = []
    for seed in range(30):
        order = readings[:]
        random.Random(seed).shuffle(order)
        b = init_belief(range(k))
        for i, obs, tp, fp in order:
            b = bayes_update(b, i, obs, tp, fp)
        results.append(b.probs)
    for probs in results[1:]:
        assert all(abs(x - y) <= 1e-9 for x, y in zip(probs, results[0]))


def test_normalisation_fuzz():
    rng = random.Random(17)
    b = init_belief(range(5))
    for n in range(100_000):
        if n % 50 == 0:
            b = init_belief(range(5))
        b = bayes_update(b, rng.randrange(5), rng.random() < 0.5,
                         rng.uniform(0.55, 0.99), rng.uniform(0.01, 0.45))
        assert abs(math.fsum(b.probs) - 1.0) <= 1e-9 and min(b.probs) >= 0.0


def test_positive_reading_never_lowers():
    rng = random.Random(2)
    b = init_belief(range(3))
    for _ in range(60):
        p = b.probs[0]
        b = bayes_update(b, 0, True, 0.8, 0.1)
        assert b.probs[0] >= p
    assert b.probs[0] > 1 - 1e-9


def test_zero_likelihood_raises():
    b = init_belief(["a", "b"], [1.0, 0.0])
    with pytest.raises(BeliefError):
        bayes_update(b, 0, True, 0.0, 0.3)


# ---------------------------------------------------------------- priors

def test_history_default_prior():
    b = init_belief(["a", "b", "c", "d"], "history-default", "a")
    assert b.probs[0] == pytest.approx(0.8)
    assert b.probs[1:] == pytest.approx((0.2 / 3,) * 3)
    assert init_belief(["a"], "history-default", "a").probs == (1.0,)


def test_explicit_prior_normalised_or_rejected():
    assert init_belief(["a", "b"], [2, 6]).probs == (0.25, 0.75)
    with pytest.raises(BeliefError):
        init_belief(["a", "b"], [0, 0])
    with pytest.raises(BeliefError):
        init_belief(["a", "b"], [1])
    with pytest.raises(BeliefError):
        init_belief([])


def test_unnormalised_state_rejected():
    with pytest.raises(BeliefError):
        BeliefState(("a", "b"), (0.5, 0.6))


def test_negative_hypothesis_rates():
    s = SensorModel(tp=0.8, fp=0.1)
    assert hypothesis_rates(parse_literal("is_open(d1)"), s) == (0.8, 0.1)
    assert hypothesis_rates(parse_literal("-is_open(d1)"), s) == pytest.approx((0.9, 0.2))


# ---------------------------------------------------------------- noise files

def test_shipped_noise_config():
    cfg = parse_noise(data_path("noise.cfg").read_text())
    assert cfg.sensor.rates(parse_atom("is_open(d1)")) == (0.8, 0.1)
    assert cfg.motion.success_prob(parse_atom("move(robot, a2)")) == 0.9
    assert cfg.motion.success_prob(parse_atom("pickup(robot, ds1)")) == 1.0
    assert (cfg.action_cost, cfg.observe_cost) == (5, 1)


def test_noise_pattern_entries():
    cfg = parse_noise("sensor * tp=0.7 fp=0.2\nsensor is_open(_) tp=0.95 fp=0.01\n")
    assert cfg.sensor.rates(parse_atom("is_open(d2)")) == (0.95, 0.01)
    assert cfg.sensor.rates(parse_atom("has_location(robot, a1)")) == (0.7, 0.2)


@pytest.mark.parametrize("text", ["sensor * tp=2 fp=0.1", "bogus x=1", "motion move",
                                  "motion move success=0.5 slip=stay:0.5"])
def test_noise_errors(text):
    with pytest.raises((LangError, BeliefError)):
        parse_noise(text)


def test_policy_validation():
    with pytest.raises(BeliefError):
        ExecutionPolicy(theta=0.4)
    with pytest.raises(BeliefError):
        ExecutionPolicy(max_cycles=0)
    with pytest.raises(BeliefError):
        ExecutionPolicy(prior="flat")


# ---------------------------------------------------------------- relevant subset

def test_move_subset(sd, interp):
    s = interp.from_facts([parse_atom("has_location(robot, a1)")])
    subset = relevant_subset(parse_atom("move(robot, a2)"), sd, s)
    assert [str(h) for h in subset] == ["has_location(robot,a1)", "has_location(robot,a2)",
                                        "has_location(robot,d1)"]


def test_binary_subset(sd, interp):
    s = interp.from_facts([parse_atom("has_location(robot, d2)")])
    subset = relevant_subset(parse_atom("open(robot, d2)"), sd, s)
    assert [str(h) for h in subset] == ["is_open(d2)", "-is_open(d2)"]


def test_undeclared_action(sd):
    with pytest.raises(BeliefError):
        relevant_subset(parse_atom("fly(robot)"), sd, [])


# ---------------------------------------------------------------- execution

PERFECT = NoiseConfig(SensorModel(tp=1.0, fp=0.0), MotionModel({"move": 1.0}, {}))


def _move_world(sd, interp, noise, seed, script=()):
    return world_from_truth(sd, [parse_atom("has_location(robot, a1)")], noise, script, seed, interp)


def test_perfect_sensor_one_cycle(sd, interp):
    w = _move_world(sd, interp, PERFECT, 0)
    act = parse_atom("move(robot, a2)")
    hyps = relevant_subset(act, sd, w.state)
    r = execute_action(act, 0, w, hyps, hyps[1], PERFECT, ExecutionPolicy())
    assert r.status == "completed" and r.cycles == 1
    assert r.statements == [Hpd(act, 0), Obs(parse_atom("has_location(robot, a2)"), True, 1)]
    assert r.ticks == 6


def test_locked_open_times_out(sd, interp):
    noise = NoiseConfig()
    truth = [parse_atom("has_location(robot, d2)"), parse_atom("is_locked(d2)")]
    w = world_from_truth(sd, truth, noise, [], 4, interp)
    act = parse_atom("open(robot, d2)")
    hyps = relevant_subset(act, sd, w.state)
    r = execute_action(act, 3, w, hyps, parse_literal("is_open(d2)"), noise, ExecutionPolicy(seed=4))
    assert r.status == "timed-out"
    assert r.statements == [Hpd(act, 3), Obs(parse_atom("is_open(d2)"), False, 4)]
    assert w.holds(parse_literal("-is_open(d2)"))


def test_scripted_lock_times_out(sd, interp):
    noise = NoiseConfig()
    truth = [parse_atom("has_location(robot, d2)")]
    w = world_from_truth(sd, truth, noise, [ScriptEvent(parse_atom("locked(d2)"), 2)], 1, interp)
    act = parse_atom("open(robot, d2)")
    hyps = relevant_subset(act, sd, w.state)
    r = execute_action(act, 2, w, hyps, hyps[0], noise, ExecutionPolicy())
    assert r.statements[-1] == Obs(parse_atom("is_open(d2)"), False, 3)


def test_world_failure_is_timeout(sd):
    class Broken:
        def apply(self, action, step):
            raise RuntimeError("offline")

    act = parse_atom("open(robot, d2)")
    hyps = [parse_literal("is_open(d2)"), parse_literal("-is_open(d2)")]
    r = execute_action(act, 0, Broken(), hyps, hyps[0], NoiseConfig(), ExecutionPolicy())
    assert (r.status, r.cycles, r.belief) == ("timed-out", 0, None)


def test_uniform_prior_completion_rate(sd, interp):
    noise = NoiseConfig(motion=MotionModel({"move": 1.0}, {}))
    act = parse_atom("move(robot, a2)")
    reached = right = 0
    for seed in range(1000):
        w = _move_world(sd, interp, noise, seed)
        hyps = relevant_subset(act, sd, w.state)
        r = execute_action(act, 0, w, hyps, hyps[1], noise,
                           ExecutionPolicy(prior="uniform", seed=seed))
        reached += r.cycles <= 50 and max(r.belief.probs) >= 0.85
        right += r.status == "completed"
    assert reached >= 990
    # seeded Monte-Carlo baseline: the rest commit "still at a1"
    assert right == 945


def test_reissue_after_slip(sd, interp):
    # the first move always slips in place, the second succeeds
    class Flaky:
        def __init__(self, world):
            self.world, self.n = world, 0

        def apply(self, action, step):
            self.n += 1
            if self.n > 1:
                return self.world.apply(action, step)
            return "slip"

        def sense(self, a):
            return self.world.sense(a)

    noise = NoiseConfig(SensorModel(tp=1.0, fp=0.0), MotionModel({"move": 0.9}, {}))
    w = Flaky(_move_world(sd, interp, PERFECT, 0))
    act = parse_atom("move(robot, a2)")
    hyps = relevant_subset(act, sd, w.world.state)
    r = execute_action(act, 0, w, hyps, hyps[1], noise, ExecutionPolicy())
    assert r.status == "completed" and r.issues == 2
    assert r.statements[-1] == Obs(parse_atom("has_location(robot, a2)"), True, 1)


def test_commit_soundness_sample(sd, interp):
    right = total = 0
    for seed in range(500):
        _, truth, _ = episode(sd, interp, seed)
        right += sum(truth)
        total += len(truth)
    assert total >= 500 and right / total >= 0.85


@pytest.mark.parametrize("theta", [0.6, 0.85, 0.95])
def test_threshold_respected(sd, interp, theta):
    for seed in range(40):
        w = _move_world(sd, interp, NoiseConfig(), seed)
        act = parse_atom("move(robot, a2)")
        hyps = relevant_subset(act, sd, w.state)
        r = execute_action(act, 0, w, hyps, hyps[1], NoiseConfig(),
                           ExecutionPolicy(theta=theta, seed=seed))
        if r.status == "completed":
            assert max(r.belief.probs) >= theta
