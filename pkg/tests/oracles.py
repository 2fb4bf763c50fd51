"""Exhaustive reference implementations used to check the engine.

Nothing here calls the package's fixpoint, SLD, tableau or hitting-set
code: models come from naive iteration over explicitly enumerated ground
instances, and every search is plain subset enumeration.
"""
from __future__ import annotations

import itertools
from typing import Iterable

from hornbase.core import Atom, HornClause, KnowledgeBase, is_variable


def ground(clause: HornClause, constants: Iterable[str]) -> list[HornClause]:
    names = sorted({t for a in clause.atoms() for t in a.args if is_variable(t)}
                   | {t for g in clause.guards for t in g if is_variable(t)})
    out = []
    for values in itertools.product(sorted(constants), repeat=len(names)):
        theta = dict(zip(names, values))
        g = clause.substitute(theta)
        if all(s != t for s, t in g.guards):
            out.append(g)
    return out


def all_ground_rules(kb: KnowledgeBase) -> list[HornClause]:
    return [g for r in kb.kb_i for g in ground(r, kb.constants)]


def naive_model(rules: Iterable[HornClause], facts: Iterable[Atom]) -> set[Atom]:
    rules = list(rules)
    model = set(facts)
    while True:
        new = {r.head for r in rules if all(b in model for b in r.body)} - model
        if not new:
            return model
        model |= new


def model_of(kb: KnowledgeBase, facts: Iterable[Atom] | None = None) -> set[Atom]:
    return naive_model(all_ground_rules(kb), kb.kb_u if facts is None else facts)


def violations(kb: KnowledgeBase, model: set[Atom]) -> list[HornClause]:
    return [g for c in kb.kb_ic for g in ground(c, kb.constants)
            if all(b in model for b in g.body)]


def minimal_subsets(items: list, test, limit: int | None = None,
                    monotone: bool = True) -> list[frozenset]:
    """All subset-minimal sets of ``items`` satisfying ``test``.

    A ``monotone`` test that fails on the whole set fails everywhere.
    """
    found: list[frozenset] = []
    if monotone and not test(frozenset(items)):
        return found
    top = len(items) if limit is None else min(limit, len(items))
    for k in range(top + 1):
        for combo in itertools.combinations(items, k):
            s = frozenset(combo)
            if any(f <= s for f in found):
                continue
            if test(s):
                found.append(s)
    return found


def kernels(kb: KnowledgeBase, goal: Atom) -> set[frozenset]:
    """Minimal sets of ground rules and facts entailing ``goal``."""
    rules = all_ground_rules(kb)
    facts = [HornClause(a) for a in sorted(kb.kb_u)]
    items = rules + facts

    def entails(s):
        return goal in naive_model([c for c in s if c.body], [c.head for c in s if not c.body])

    return set(minimal_subsets(items, entails))


def explanations(kb: KnowledgeBase, goal: Atom) -> set[frozenset[Atom]]:
    rules = all_ground_rules(kb)
    return set(minimal_subsets(sorted(kb.kb_u), lambda s: goal in naive_model(rules, s)))


def hitting_sets(family: list[frozenset]) -> set[frozenset]:
    universe = sorted(set().union(*family), key=str) if family else []
    if any(not m for m in family):
        return set()
    return set(minimal_subsets(universe, lambda h: all(h & m for m in family)))


def base_atoms(kb: KnowledgeBase) -> list[Atom]:
    preds = {a.pred: a.arity for c in list(kb.kb_i) + list(kb.kb_ic) for a in c.atoms()}
    preds.update({a.pred: a.arity for a in kb.kb_u})
    views = {c.head.pred for c in kb.kb_i}
    return sorted(Atom(p, args) for p, n in preds.items() if p not in views
                  for args in itertools.product(kb.constants, repeat=n))


def minimal_updates(kb: KnowledgeBase, insert: Iterable[Atom], delete: Iterable[Atom],
                    universe: list[Atom] | None = None, limit: int | None = None
                    ) -> set[tuple[frozenset[Atom], frozenset[Atom]]]:
    """Subset-minimal toggle sets after which the request holds consistently."""
    insert, delete = set(insert), set(delete)
    rules = all_ground_rules(kb)
    atoms = base_atoms(kb) if universe is None else universe

    def valid(toggles):
        facts = kb.kb_u ^ toggles
        m = naive_model(rules, facts)
        return insert <= m and not (delete & m) and not violations(kb, m)

    return {(t - kb.kb_u, t & kb.kb_u) for t in minimal_subsets(atoms, valid, limit, monotone=False)}


def has_cycle(kb: KnowledgeBase) -> bool:
    """Whether some view predicate depends on itself through the rules."""
    deps: dict[str, set[str]] = {}
    for r in kb.kb_i:
        deps.setdefault(r.head.pred, set()).update(b.pred for b in r.body)
    for start in deps:
        stack, seen = list(deps[start]), set()
        while stack:
            p = stack.pop()
            if p == start:
                return True
            if p not in seen:
                seen.add(p)
                stack.extend(deps.get(p, ()))
    return False
