"""Seeded random databases, update requests and set families.

Instances are propositional (all atoms have arity 0), which keeps the
updatable Herbrand base small enough for exhaustive oracles.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .core import Atom, HornClause, KnowledgeBase
from .semantics import least_model, violated_constraints
from .text_format import UpdateRequest


@dataclass(frozen=True)
class Shape:
    base: tuple[int, int] = (4, 10)
    views: tuple[int, int] = (2, 5)
    max_rules: int = 6
    max_facts: int = 10
    max_ics: int = 2
    recursion: float = 0.15


SMALL = Shape(base=(3, 7), views=(2, 4), max_rules=5, max_facts=8, max_ics=2)


def random_kb(rng: random.Random, shape: Shape = Shape(), consistent: bool = True
              ) -> KnowledgeBase:
    """A random well-formed database; retried until consistent if requested."""
    while True:
        base = [Atom(f"b{i}") for i in range(rng.randint(*shape.base))]
        views = [Atom(f"v{i}") for i in range(rng.randint(*shape.views))]
        n_rules = rng.randint(len(views), max(len(views), shape.max_rules))
        rules = set()
        for i in range(n_rules):
            head = views[i] if i < len(views) else rng.choice(views)
            pool = base + ([v for v in views if v != head] if rng.random() < 0.5 else [])
            if rng.random() < shape.recursion:
                pool = pool + [head]
            body = rng.sample(pool, min(len(pool), rng.randint(1, 3)))
            if body == [head]:
                body = [rng.choice(base)]
            rules.add(HornClause(head, tuple(sorted(body))))
        facts = rng.sample(base, rng.randint(0, min(len(base), shape.max_facts)))
        ics = set()
        for _ in range(rng.randint(0, shape.max_ics)):
            ics.add(HornClause(None, tuple(sorted(rng.sample(base + views, 2)))))
        kb = KnowledgeBase.build(rules, facts, ics)
        if not consistent or not violated_constraints(kb):
            return kb


def random_request(rng: random.Random, kb: KnowledgeBase, size: int | None = None
                   ) -> UpdateRequest | None:
    """A true update over view atoms with one or two atoms, if one exists."""
    model = least_model(kb)
    views = sorted(Atom(p) for p in kb.view_predicates)
    derivable = [v for v in views if v in model]
    underivable = [v for v in views if v not in model]
    want = size or rng.randint(1, 2)
    ins, dels = set(), set()
    for _ in range(want):
        choices = [("+", v) for v in underivable if v not in ins]
        choices += [("-", v) for v in derivable if v not in dels]
        if not choices:
            break
        sign, atom = rng.choice(choices)
        (ins if sign == "+" else dels).add(atom)
    if not ins and not dels:
        return None
    return UpdateRequest(frozenset(ins), frozenset(dels))


def random_instance(seed: int, shape: Shape = Shape()) -> tuple[KnowledgeBase, UpdateRequest]:
    rng = random.Random(seed)
    while True:
        kb = random_kb(rng, shape)
        request = random_request(rng, kb)
        if request is not None:
            return kb, request


def chain_kb(n: int) -> KnowledgeBase:
    """``p1 :- p0. … pn :- p(n-1).`` with the single fact ``p0``."""
    atoms = [Atom(f"p{i}") for i in range(n + 1)]
    rules = [HornClause(atoms[i], (atoms[i - 1],)) for i in range(1, n + 1)]
    return KnowledgeBase.build(rules, [atoms[0]])


def random_family(rng: random.Random, max_members: int = 6, universe: int = 10
                  ) -> list[frozenset[str]]:
    elements = [f"e{i}" for i in range(universe)]
    return [frozenset(rng.sample(elements, rng.randint(1, min(4, universe))))
            for _ in range(rng.randint(0, max_members))]
