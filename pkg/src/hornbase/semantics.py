"""Least Herbrand models, entailment and integrity checking."""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Iterator, Sequence

from .core import Atom, HornClause, KnowledgeBase, match
from .errors import HornbaseError

Model = frozenset  # a least model is just a frozenset of ground atoms


class _Index:
    def __init__(self):
        self.by_pred: dict[str, set[Atom]] = defaultdict(set)

    def add(self, atom: Atom) -> bool:
        bucket = self.by_pred[atom.pred]
        if atom in bucket:
            return False
        bucket.add(atom)
        return True

    def get(self, pred: str) -> set[Atom]:
        return self.by_pred.get(pred, set())


def _join(body: Sequence[Atom], theta: dict, sources: Sequence[set[Atom]]) -> Iterator[dict]:
    if not body:
        yield theta
        return
    first, rest = body[0], body[1:]
    pattern = first.substitute(theta)
    if pattern.is_ground:
        if pattern in sources[0]:
            yield from _join(rest, theta, sources[1:])
        return
    for candidate in sources[0]:
        t = match(pattern, candidate, theta)
        if t is not None:
            yield from _join(rest, t, sources[1:])


def _guards_ok(clause: HornClause, theta: dict) -> bool:
    return all(theta.get(s, s) != theta.get(t, t) for s, t in clause.guards)


def fixpoint(rules: Iterable[HornClause], facts: Iterable[Atom]) -> frozenset[Atom]:
    """Semi-naive least fixpoint of ``rules`` over ``facts``."""
    rules = list(rules)
    full = _Index()
    delta = _Index()
    for a in facts:
        if full.add(a):
            delta.add(a)
    while delta.by_pred:
        new = _Index()
        for rule in rules:
            body = rule.body
            for i, atom in enumerate(body):
                d = delta.get(atom.pred)
                if not d:
                    continue
                sources = [full.get(b.pred) for b in body]
                sources[i] = d
                for theta in _join(body, {}, sources):
                    if not _guards_ok(rule, theta):
                        continue
                    head = rule.head.substitute(theta)
                    if head not in full.get(head.pred):
                        new.add(head)
        for bucket in new.by_pred.values():
            for a in bucket:
                full.add(a)
        delta = new
    return frozenset(a for bucket in full.by_pred.values() for a in bucket)


def least_model(kb: KnowledgeBase, extra_facts: Iterable[Atom] = ()) -> frozenset[Atom]:
    facts = kb.kb_u
    extra = frozenset(extra_facts)
    if extra:
        facts = facts | extra
    return fixpoint(kb.rules, facts)


def entails(kb: KnowledgeBase, goal: Atom, model: frozenset[Atom] | None = None) -> bool:
    if not goal.is_ground:
        raise HornbaseError(f"goal {goal} is not ground")
    if model is None:
        model = least_model(kb)
    return goal in model


def violated_constraints(kb: KnowledgeBase, model: frozenset[Atom] | None = None,
                         constraints: Iterable[HornClause] | None = None
                         ) -> list[tuple[HornClause, dict[str, str]]]:
    """Ground instances of denials whose bodies hold in the least model."""
    if model is None:
        model = least_model(kb)
    idx = _Index()
    for a in model:
        idx.add(a)
    out = []
    for c in (kb.constraints if constraints is None else constraints):
        sources = [idx.get(b.pred) for b in c.body]
        seen = set()
        for theta in _join(c.body, {}, sources):
            if not _guards_ok(c, theta):
                continue
            key = tuple(sorted(theta.items()))
            if key not in seen:
                seen.add(key)
                out.append((c, dict(key)))
    out.sort(key=lambda pair: (pair[0].sort_key(), sorted(pair[1].items())))
    return out


def is_consistent(kb: KnowledgeBase, model: frozenset[Atom] | None = None,
                  forbidden: Iterable[Atom] = ()) -> bool:
    """No denial fires and no ``forbidden`` atom is derivable."""
    if model is None:
        model = least_model(kb)
    if any(a in model for a in forbidden):
        return False
    return not violated_constraints(kb, model)
