"""Seeded random ground programs for oracle comparisons."""

import random

from aspmix.ground import GroundProgram
from aspmix.lang.syntax import Atom, Literal


def random_program(rng: random.Random, max_atoms: int = 12, max_cr: int = 4) -> GroundProgram:
    """Up to ``max_atoms`` literals with default negation, constraints,
    complementary disjunction and up to ``max_cr`` CR rules."""
    n = rng.randint(1, min(8, max_atoms))
    base = [Atom(f"p{i}") for i in range(n)]
    lits = [Literal(a) for a in base]
    room = max_atoms - n
    for a in base:
        if room and rng.random() < 0.4:
            lits.append(Literal(a, True))
            room -= 1
    gp = GroundProgram()
    for l in lits:
        gp.intern(l)
    ids = list(range(len(lits)))
    paired = [a for a in base if gp.id_of(Literal(a, True)) is not None]
    for _ in range(rng.randint(1, 2 * len(ids) + 2)):
        kind = rng.random()
        pos = tuple(rng.sample(ids, rng.randint(0, min(2, len(ids)))))
        neg = tuple(rng.sample(ids, rng.randint(0, min(2, len(ids)))))
        if kind < 0.15:
            if not pos and not neg:
                continue
            head = ()
        elif kind < 0.25 and paired:
            a = rng.choice(paired)
            head = (gp.id_of(Literal(a)), gp.id_of(Literal(a, True)))
        else:
            head = (rng.choice(ids),)
        gp.add_rule(head, pos, neg)
    for _ in range(rng.randint(0, max_cr)):
        h = rng.choice(ids)
        pos = tuple(rng.sample(ids, rng.randint(0, 1)))
        gp.add_rule((h,), pos, (), cr=True, priority=rng.randint(1, 2))
    return gp
