import random

import pytest

from aspmix.cli import data_path
from aspmix.lang.parser import parse_domain, parse_literal, parse_program, parse_scenario
from aspmix.lang.pretty import domain_to_text, program_to_text, scenario_to_text
from aspmix.lang.syntax import LangError, SortHierarchy
from aspmix.translate import TranslationConfig, translate


@pytest.fixture(scope="module")
def sd():
    return parse_domain(data_path("restaurant.dom").read_text())


# ---------------------------------------------------------------- domains

def test_subsort_declaration_echo():
    d = parse_domain("#sort room. #subsort room location. #instance kitchen : room.")
    assert d.sorts.members("room") == ("kitchen",)
    assert d.sorts.members("location") == ("kitchen",)
    assert d.sorts.is_subsort("room", "location")


def test_restaurant_actions(sd):
    agent = {n for n, a in sd.actions.items() if a.kind == "agent"}
    assert agent == {"move", "pickup", "putdown", "open", "seat_person", "search_person"}
    exo = {n for n, a in sd.actions.items() if a.kind == "exogenous"}
    assert {"locked", "moved_from"} <= exo


def test_defined_fluent_in_causal_head():
    text = ("#sort a. #instance x : a. #fluent defined f(a). #action agent act(a). "
            "act(X) causes f(X).")
    with pytest.raises(LangError, match="defined fluent in causal-law head"):
        parse_domain(text)


@pytest.mark.parametrize("text, msg", [
    ("#sort a. #sort b. #subsort a b. #subsort b a.", "sort cycle"),
    ("#sort a. #instance x : b.", "undeclared sort"),
    ("#sort a. #instance x : a. #fluent basic g(a). foo(x) if g(x).", "undeclared predicate"),
    ("#sort a\n#instance x : a.", "expected '.'"),
    ("#sort a. #instance x : a. #fluent basic g(a). "
     "default d1: g(x) priority 1. default d2: -g(x) priority 1.", "equal priority"),
])
def test_domain_errors(text, msg):
    with pytest.raises(LangError, match=msg):
        parse_domain(text)


def test_syntax_error_position():
    with pytest.raises(LangError) as e:
        parse_domain("#sort a.\n#sort b\n#instance x : a.")
    assert e.value.line == 3


def test_domain_round_trip(sd):
    again = parse_domain(domain_to_text(sd))
    assert again == sd
    assert domain_to_text(again) == domain_to_text(sd)


# ---------------------------------------------------------------- programs

def test_even_loop_rules():
    p = parse_program("a :- not b. b :- not a.")
    assert len(p.rules) == 2
    assert all(len(r.neg) == 1 and not r.pos for r in p.rules)


def test_cr_rule_empty_body():
    p = parse_program("q +- .")
    assert len(p.rules) == 1
    r = p.rules[0]
    assert r.cr and not r.pos and not r.neg and str(r.head[0]) == "q"


def test_unsafe_variable():
    with pytest.raises(LangError, match="unsafe variable X"):
        parse_program("p(X) :- not q(X).")


def test_sorted_variable_is_safe():
    p = parse_program("#sort s. #instance c : s. p(X:s) :- not q(X).")
    assert len(p.rules) == 1


@pytest.mark.parametrize("text", ["a | b.", "a | -b.", "a | b +- ."])
def test_general_disjunction_rejected(text):
    with pytest.raises(LangError):
        parse_program(text)


def test_priority_annotation():
    p = parse_program("a +- . %@ priority=3 tag=x")
    assert p.rules[0].priority == 3 and p.rules[0].tag == "x"


def _random_program(rng):
    preds = ["p", "q", "r", "s"]
    consts = ["c1", "c2"]
    lines = ["#sort s.", "#instance c1, c2 : s."]
    for _ in range(rng.randint(1, 8)):
        def lit(var):
            a = rng.choice(preds)
            arg = "X" if var else rng.choice(consts)
            return ("-" if rng.random() < 0.3 else "") + f"{a}({arg})"
        use_var = rng.random() < 0.5
        head = [] if rng.random() < 0.2 else [lit(use_var)]
        if head and rng.random() < 0.2:
            h = head[0]
            head.append(h[1:] if h.startswith("-") else "-" + h)
        pos = [lit(use_var)] + [lit(False) for _ in range(rng.randint(0, 2))]
        neg = [lit(rng.random() < 0.5 and use_var) for _ in range(rng.randint(0, 2))]
        body = ", ".join(pos + ["not " + n for n in neg])
        if len(head) == 1 and rng.random() < 0.2:
            lines.append(f"{head[0]} +- {body}.")
        else:
            lines.append(f"{' | '.join(head)} :- {body}.")
    return "\n".join(lines)


@pytest.mark.parametrize("seed", range(40))
def test_program_round_trip(seed):
    p = parse_program(_random_program(random.Random(seed)))
    assert parse_program(program_to_text(p)) == p


def test_translated_program_round_trip(sd):
    sc = parse_scenario(data_path("ex1.scn").read_text(), sd)
    p = translate(sd, sc.history, TranslationConfig(horizon=2))
    assert parse_program(program_to_text(p)) == p


# ---------------------------------------------------------------- sorts

def _brute_closure(edges, sort):
    out = {sort}
    changed = True
    while changed:
        changed = False
        for c, p in edges:
            if c in out and p not in out:
                out.add(p)
                changed = True
    return out


@pytest.mark.parametrize("seed", range(30))
def test_sort_membership_closure(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 20)
    names = [f"s{i}" for i in range(n)]
    h = SortHierarchy()
    for s in names:
        h.add_sort(s)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.15:
                h.add_subsort(names[i], names[j])  # lower index below higher: a DAG
                edges.append((names[i], names[j]))
    objs = {}
    for k in range(rng.randint(1, 25)):
        s = rng.choice(names)
        h.add_instance(f"o{k}", s)
        objs[f"o{k}"] = s
    for s in names:
        expect = {o for o, so in objs.items() if s in _brute_closure(edges, so)}
        assert set(h.members(s)) == expect


# ---------------------------------------------------------------- scenarios

def test_observation_record(sd):
    sc = parse_scenario("obs(is_open(d2), false, 3).", sd)
    [o] = sc.history.obs
    assert str(o.fluent) == "is_open(d2)" and o.value is False and o.step == 3


def test_script_record(sd):
    sc = parse_scenario("script locked(d2) at 2.", sd)
    [e] = sc.script
    assert str(e.action) == "locked(d2)" and e.step == 2


def test_help_script(sd):
    [e] = parse_scenario("script unlocked(d2) on help.", sd).script
    assert e.on_help


def test_empty_scenario(sd):
    sc = parse_scenario("", sd)
    assert not sc.history.obs and not sc.history.hpd and not sc.goal


@pytest.mark.parametrize("text, msg", [
    ("obs(is_open(D), false, 3).", "not ground"),
    ("obs(is_open(d9), false, 3).", "unknown symbol"),
    ("obs(is_open(d2), false, -1).", "negative step"),
])
def test_scenario_errors(sd, text, msg):
    with pytest.raises(LangError, match=msg):
        parse_scenario(text, sd)


def test_scenario_round_trip(sd):
    sc = parse_scenario(data_path("ex1.scn").read_text(), sd)
    again = parse_scenario(scenario_to_text(sc), sd)
    assert again.history == sc.history and again.goal == sc.goal
    assert again.script == sc.script and again.truth == sc.truth


def test_parse_literal():
    lit = parse_literal("-is_open(d2)")
    assert lit.neg and str(lit.atom) == "is_open(d2)"
    assert lit.complement().complement() == lit
