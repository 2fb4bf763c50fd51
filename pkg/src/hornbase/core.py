"""Logical syntax for function-free Horn programs.

Terms are plain strings: an upper-case (or ``_``) initial marks a variable,
anything else is a constant.  Atoms, clauses and knowledge bases are frozen
dataclasses and safe to share.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import ArityError, WellFormednessError

Substitution = Mapping[str, str]

# Prefix that turns an atom into its "deleted" counterpart inside tableaux.
NEG_TAG = "~"


def is_variable(term: str) -> bool:
    return term[:1].isupper() or term[:1] == "_"


@dataclass(frozen=True, order=True)
class Atom:
    pred: str
    args: tuple[str, ...] = ()

    def __repr__(self):
        return f"<{self}>"

    def __str__(self):
        if not self.args:
            return self.pred if not self.is_tagged else f"¬{self.pred[1:]}"
        name = self.pred if not self.is_tagged else f"¬{self.pred[1:]}"
        return f"{name}({','.join(self.args)})"

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return not any(is_variable(t) for t in self.args)

    def variables(self) -> set[str]:
        return {t for t in self.args if is_variable(t)}

    def substitute(self, theta: Substitution) -> Atom:
        if not theta:
            return self
        return Atom(self.pred, tuple(theta.get(t, t) for t in self.args))

    # -- polarity tagging (¬A read as a positive atom) --
    @property
    def is_tagged(self) -> bool:
        return self.pred.startswith(NEG_TAG)

    def tagged(self) -> Atom:
        return Atom(NEG_TAG + self.pred, self.args)

    def untagged(self) -> Atom:
        return Atom(self.pred[len(NEG_TAG):], self.args) if self.is_tagged else self


@dataclass(frozen=True, order=True)
class Literal:
    atom: Atom
    positive: bool = True

    def complement(self) -> Literal:
        return Literal(self.atom, not self.positive)

    def __str__(self):
        return str(self.atom) if self.positive else f"not {self.atom}"


@dataclass(frozen=True)
class HornClause:
    """``head :- body, guards``.  ``head is None`` makes it a denial."""

    head: Atom | None
    body: tuple[Atom, ...] = ()
    guards: tuple[tuple[str, str], ...] = ()

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.body and not self.guards and self.head.is_ground

    @property
    def is_ground(self) -> bool:
        return not self.variables()

    def atoms(self) -> Iterator[Atom]:
        if self.head is not None:
            yield self.head
        yield from self.body

    def variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.atoms():
            out |= a.variables()
        for s, t in self.guards:
            out |= {x for x in (s, t) if is_variable(x)}
        return out

    def substitute(self, theta: Substitution) -> HornClause:
        head = self.head.substitute(theta) if self.head is not None else None
        return HornClause(
            head,
            tuple(a.substitute(theta) for a in self.body),
            tuple((theta.get(s, s), theta.get(t, t)) for s, t in self.guards),
        )

    def guards_hold(self) -> bool:
        """Ground guards only; a non-ground guard counts as holding."""
        return all(s != t for s, t in self.guards if not (is_variable(s) or is_variable(t)))

    def sort_key(self):
        head = (0, self.head) if self.head is not None else (1, Atom(""))
        return (head, self.body, self.guards)

    def __str__(self):
        parts = [str(a) for a in self.body] + [f"{s} != {t}" for s, t in self.guards]
        if self.head is None:
            return f":- {', '.join(parts)}."
        if not parts:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(parts)}."


def fact(atom: Atom) -> HornClause:
    return HornClause(atom)


@dataclass(frozen=True)
class KnowledgeBase:
    """Rules (``kb_i``), ground base facts (``kb_u``) and denials (``kb_ic``).

    ``extra_constants`` widens the Herbrand universe, e.g. with constants
    that only occur in an update request.
    """

    kb_i: frozenset[HornClause] = frozenset()
    kb_u: frozenset[Atom] = frozenset()
    kb_ic: frozenset[HornClause] = frozenset()
    extra_constants: frozenset[str] = field(default=frozenset(), compare=False)

    @classmethod
    def build(cls, rules: Iterable[HornClause] = (), facts: Iterable[Atom] = (),
              constraints: Iterable[HornClause] = (), validate: bool = True) -> KnowledgeBase:
        kb = cls(frozenset(rules), frozenset(facts), frozenset(constraints))
        if validate:
            kb.validate()
        return kb

    # -- derived views, computed lazily --
    @cached_property
    def rules(self) -> tuple[HornClause, ...]:
        return tuple(sorted(self.kb_i, key=HornClause.sort_key))

    @cached_property
    def constraints(self) -> tuple[HornClause, ...]:
        return tuple(sorted(self.kb_ic, key=HornClause.sort_key))

    @cached_property
    def edb(self) -> tuple[Atom, ...]:
        return tuple(sorted(self.kb_u))

    @cached_property
    def view_predicates(self) -> frozenset[str]:
        return frozenset(c.head.pred for c in self.kb_i)

    @cached_property
    def arities(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for a in self._all_atoms():
            out.setdefault(a.pred, a.arity)
        return out

    @cached_property
    def base_predicates(self) -> frozenset[str]:
        return frozenset(p for p in self.arities if p not in self.view_predicates)

    @cached_property
    def constants(self) -> tuple[str, ...]:
        consts = set(self.extra_constants)
        for a in self._all_atoms():
            consts.update(t for t in a.args if not is_variable(t))
        for c in itertools.chain(self.kb_i, self.kb_ic):
            for s, t in c.guards:
                consts.update(x for x in (s, t) if not is_variable(x))
        return tuple(sorted(consts))

    def _all_atoms(self) -> Iterator[Atom]:
        for c in itertools.chain(self.rules, self.constraints):
            yield from c.atoms()
        yield from self.edb

    def is_view(self, atom: Atom) -> bool:
        return atom.pred in self.view_predicates

    def is_base(self, atom: Atom) -> bool:
        return atom.pred not in self.view_predicates

    def with_edb(self, facts: Iterable[Atom]) -> KnowledgeBase:
        return KnowledgeBase(self.kb_i, frozenset(facts), self.kb_ic, self.extra_constants)

    def with_constants(self, constants: Iterable[str]) -> KnowledgeBase:
        extra = self.extra_constants | frozenset(constants)
        if extra == self.extra_constants:
            return self
        return KnowledgeBase(self.kb_i, self.kb_u, self.kb_ic, extra)

    def validate(self) -> None:
        arity: dict[str, int] = {}
        for a in itertools.chain(
            (a for c in itertools.chain(self.kb_i, self.kb_ic) for a in c.atoms()), self.kb_u
        ):
            if arity.setdefault(a.pred, a.arity) != a.arity:
                raise WellFormednessError(
                    f"arity conflict for predicate {a.pred}: {arity[a.pred]} vs {a.arity}")
        for a in self.kb_u:
            if not a.is_ground:
                raise WellFormednessError(f"non-ground EDB fact {a}")
            if a.pred in self.view_predicates:
                raise WellFormednessError(f"predicate {a.pred} is both view and base")
        for c in self.kb_i:
            if c.head is None:
                raise WellFormednessError(f"rule without head: {c}")
            if not c.body:
                raise WellFormednessError(f"unit clause in IDB: {c}")
            _check_safe(c)
        for c in self.kb_ic:
            if c.head is not None:
                raise WellFormednessError(f"integrity constraint with a head: {c}")
            if not c.body:
                raise WellFormednessError(f"empty integrity constraint: {c}")
            _check_safe(c)


def _check_safe(c: HornClause) -> None:
    bound = set().union(*(a.variables() for a in c.body)) if c.body else set()
    unsafe = c.variables() - bound
    if unsafe:
        raise WellFormednessError(f"unsafe clause (variables {', '.join(sorted(unsafe))}): {c}")


# ---------------------------------------------------------------------------
# unification and instantiation


def _walk(t: str, theta: dict[str, str]) -> str:
    while t in theta:
        t = theta[t]
    return t


def unify(a1: Atom, a2: Atom, theta: Substitution | None = None) -> dict[str, str] | None:
    """Most general unifier of two function-free atoms, or ``None``.

    Raises ArityError when the predicates agree but the arities do not.
    """
    if a1.pred != a2.pred:
        return None
    if a1.arity != a2.arity:
        raise ArityError(f"arity mismatch for {a1.pred}: {a1.arity} vs {a2.arity}")
    out = dict(theta) if theta else {}
    for s, t in zip(a1.args, a2.args):
        s, t = _walk(s, out), _walk(t, out)
        if s == t:
            continue
        if is_variable(s):
            out[s] = t
        elif is_variable(t):
            out[t] = s
        else:
            return None
    return {v: _walk(v, out) for v in out}


def match(pattern: Atom, ground: Atom, theta: Substitution | None = None) -> dict[str, str] | None:
    """One-way matching of ``pattern`` onto a ground atom."""
    if pattern.pred != ground.pred or pattern.arity != ground.arity:
        return None
    out = dict(theta) if theta else {}
    for s, t in zip(pattern.args, ground.args):
        if is_variable(s):
            bound = out.get(s)
            if bound is None:
                out[s] = t
            elif bound != t:
                return None
        elif s != t:
            return None
    return out


def instances(clause: HornClause, constants: Iterable[str]) -> Iterator[HornClause]:
    """All ground instances of ``clause`` whose guards hold."""
    variables = sorted(clause.variables())
    if not variables:
        if clause.guards_hold():
            yield clause
        return
    consts = tuple(constants)
    for values in itertools.product(consts, repeat=len(variables)):
        g = clause.substitute(dict(zip(variables, values)))
        if g.guards_hold():
            yield g


def ground_rules(kb: KnowledgeBase) -> tuple[HornClause, ...]:
    return tuple(g for r in kb.rules for g in instances(r, kb.constants))


def ground_constraints(kb: KnowledgeBase) -> tuple[HornClause, ...]:
    return tuple(g for c in kb.constraints for g in instances(c, kb.constants))


def ground_instantiation(kb: KnowledgeBase) -> frozenset[HornClause]:
    """IDB_G ∪ EDB ∪ IC_G over the constants of ``kb``."""
    return frozenset(ground_rules(kb)) | {fact(a) for a in kb.kb_u} | frozenset(ground_constraints(kb))


def herbrand_base(kb: KnowledgeBase, predicates: Iterable[str] | None = None) -> frozenset[Atom]:
    preds = kb.arities if predicates is None else {p: kb.arities[p] for p in predicates}
    out = set()
    for p, n in preds.items():
        for args in itertools.product(kb.constants, repeat=n):
            out.add(Atom(p, args))
    return frozenset(out)


def base_herbrand_base(kb: KnowledgeBase) -> frozenset[Atom]:
    """The updatable Herbrand base: ground atoms of base predicates."""
    return herbrand_base(kb, kb.base_predicates)
