"""Ground hyper tableaux and the update tableaux built on them.

A negated atom ``¬A`` is carried as the positive atom ``A.tagged()``, so a
branch is closed exactly when it holds both ``A`` and ``A.tagged()``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .core import Atom, HornClause, KnowledgeBase, ground_rules
from .errors import ResourceCapError
from .semantics import least_model
from .sld import node_cap

MINIMALITY = "minimality"
MATERIALIZED = "materialized"


def complement(atom: Atom) -> Atom:
    return atom.untagged() if atom.is_tagged else atom.tagged()


@dataclass(frozen=True)
class DisjunctiveClause:
    """``h1 ∨ … ∨ hn ← b1 ∧ … ∧ bm`` over possibly tagged ground atoms."""

    head: tuple[Atom, ...] = ()
    body: tuple[Atom, ...] = ()

    @classmethod
    def make(cls, head: Iterable[Atom] = (), body: Iterable[Atom] = ()) -> DisjunctiveClause:
        return cls(tuple(sorted(set(head))), tuple(sorted(set(body))))

    def sort_key(self):
        return (self.body, self.head)

    def __str__(self):
        head = " ∨ ".join(map(str, self.head)) or "⊥"
        if not self.body:
            return f"{head} ←"
        return f"{head} ← {' ∧ '.join(map(str, self.body))}"


@dataclass
class Branch:
    literals: list[Atom]
    closed: bool = False
    finished: bool = False
    note: str = ""

    @property
    def is_open(self) -> bool:
        return not self.closed

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.literals

    def render(self) -> str:
        mark = "closed" if self.closed else ("open, finished" if self.finished else "open")
        note = f" {self.note}" if self.note else ""
        return f"[{', '.join(map(str, self.literals))}] ({mark}){note}"


@dataclass
class Tableau:
    program: tuple[DisjunctiveClause, ...]
    branches: list[Branch] = field(default_factory=list)
    nodes: int = 0

    def open_branches(self) -> list[Branch]:
        return [b for b in self.branches if b.is_open]

    def render(self) -> str:
        return "\n".join(f"b{i}: {b.render()}" for i, b in enumerate(self.branches))


# ---------------------------------------------------------------------------
# transformations


def transform_clause(clause: HornClause, s: frozenset[Atom]) -> DisjunctiveClause:
    head, body = [], []
    if clause.head in s:
        body.append(clause.head.tagged())
    else:
        head.append(clause.head)
    for b in clause.body:
        if b in s:
            head.append(b.tagged())
        else:
            body.append(b)
    return DisjunctiveClause.make(head, body)


def transform_idb(idb: Iterable[HornClause], s: Iterable[Atom]) -> set[DisjunctiveClause]:
    """Move every literal over an atom of ``s`` to the other side, negated."""
    s = frozenset(s)
    return {transform_clause(c, s) for c in idb}


def _units(protected: frozenset[Atom]) -> set[DisjunctiveClause]:
    return {DisjunctiveClause.make((a,)) for a in protected}


def idb_star(kb: KnowledgeBase, protected: Iterable[Atom] = ()) -> set[DisjunctiveClause]:
    """Transformation wrt the EDB plus every ground view atom.

    ``protected`` atoms are kept positive and asserted as unit clauses, so
    no branch can propose deleting them.
    """
    protected = frozenset(protected)
    rules = ground_rules(kb)
    views = {r.head for r in rules}
    s = (kb.kb_u | views) - protected
    return transform_idb(rules, s) | _units(protected)


def idb_plus(kb: KnowledgeBase, protected: Iterable[Atom] = ()) -> set[DisjunctiveClause]:
    """Transformation wrt the least model of ``kb`` (with ``protected`` added)."""
    protected = frozenset(protected)
    s = least_model(kb, protected) - protected
    return transform_idb(ground_rules(kb), s) | _units(protected)


# ---------------------------------------------------------------------------
# the calculus


def _applicable(clause: DisjunctiveClause, present: set[Atom]) -> bool:
    if not all(b in present for b in clause.body):
        return False
    # regularity: a clause whose head already holds adds nothing new
    return not any(h in present for h in clause.head)


def build_tableau(program: Iterable[DisjunctiveClause], seed: Sequence[Atom] = (),
                  cap: int | None = None) -> Tableau:
    """Exhaust hyper extension steps from a single branch holding ``seed``.

    Clauses are tried in canonical order and the leftmost unfinished branch
    is extended first.
    """
    cap = node_cap() if cap is None else cap
    ordered = tuple(sorted(set(program), key=DisjunctiveClause.sort_key))
    tab = Tableau(ordered)
    root = Branch(list(dict.fromkeys(seed)))
    tab.nodes = len(root.literals)
    if any(complement(a) in root for a in root.literals):
        root.closed, root.note = True, "seed is inconsistent"
    done: list[Branch] = []
    work = [root]
    while work:
        branch = work.pop(0)
        if branch.closed:
            done.append(branch)
            continue
        present = set(branch.literals)
        clause = next((c for c in ordered if _applicable(c, present)), None)
        if clause is None:
            branch.finished = True
            done.append(branch)
            continue
        if not clause.head:
            branch.closed, branch.note = True, f"by {clause}"
            done.append(branch)
            continue
        children = []
        for h in clause.head:
            child = Branch(branch.literals + [h])
            if complement(h) in present:
                child.closed, child.note = True, f"{h} clashes"
            children.append(child)
        # the body-complement branches of the extension close at once
        for b in clause.body:
            done.append(Branch(branch.literals + [complement(b)], closed=True,
                               note=f"{complement(b)} clashes"))
        tab.nodes += len(children) + len(clause.body)
        if tab.nodes > cap:
            raise ResourceCapError(f"tableau exceeds node cap {cap}")
        work[0:0] = children
    tab.branches = done
    return tab


def build_update_tableau(kb: KnowledgeBase, goal: Atom, mode: str = MINIMALITY,
                         protected: Iterable[Atom] = (), cap: int | None = None) -> Tableau:
    """Deletion tableau for ``goal``: the transformed IDB seeded with ``¬goal``."""
    transform = idb_star if mode == MINIMALITY else idb_plus
    program = transform(kb, protected)
    return build_tableau(program, (goal.tagged(),), cap)


def branch_hitting_set(branch: Branch, kb: KnowledgeBase) -> frozenset[Atom]:
    """EDB atoms whose negation labels the branch."""
    return frozenset(a.untagged() for a in branch.literals
                     if a.is_tagged and a.untagged() in kb.kb_u)


def strong_minimality_filter(tab: Tableau, kb: KnowledgeBase, goal: Atom,
                             protected: Iterable[Atom] = ()) -> Tableau:
    """Close every open branch one of whose deletions is not needed."""
    protected = frozenset(protected)
    branches = []
    for b in tab.branches:
        if b.is_open:
            hs = branch_hitting_set(b, kb)
            remaining = (kb.kb_u - hs) | protected
            if not all(goal in least_model(kb.with_edb(remaining | {s})) for s in hs):
                b = replace(b, closed=True, note="fails strong minimality")
        branches.append(b)
    return Tableau(tab.program, branches, tab.nodes)


def edb_cuts(tab: Tableau, kb: KnowledgeBase) -> list[frozenset[Atom]]:
    """One negated EDB atom chosen per open branch, in every combination.

    No open branches means deletion is impossible and yields ``[]``.
    """
    per_branch = [sorted(branch_hitting_set(b, kb)) for b in tab.open_branches()]
    if not per_branch:
        return []
    return sorted({frozenset(c) for c in itertools.product(*per_branch)},
                  key=lambda s: (len(s), sorted(map(str, s))))


def deletion_candidates(kb: KnowledgeBase, goal: Atom, mode: str = MINIMALITY,
                        protected: Iterable[Atom] = (), trace: list[Tableau] | None = None
                        ) -> list[frozenset[Atom]]:
    """Hitting sets read off the open branches of the deletion tableau."""
    protected = frozenset(protected)
    tab = build_update_tableau(kb, goal, mode, protected)
    if mode == MINIMALITY:
        tab = strong_minimality_filter(tab, kb, goal, protected)
    if trace is not None:
        trace.append(tab)
    found = {branch_hitting_set(b, kb) for b in tab.open_branches()}
    return sorted(found, key=lambda s: (len(s), sorted(map(str, s))))
