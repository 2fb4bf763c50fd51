"""Kernels and abductive explanations over the EDB.

Abducibles are all ground base atoms of the Herbrand base.  Candidate
explanations are read off SLD branches and then minimized exhaustively,
which is affordable at the sizes this package targets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .core import Atom, HornClause, KnowledgeBase, fact
from .errors import HornbaseError
from .hitting_sets import minimal_hitting_sets, minimize_family, set_key
from .semantics import fixpoint, least_model, violated_constraints
from .sld import abductive_tree, assumption_sets, sld_tree


@dataclass(frozen=True)
class Explanation:
    delta_plus: frozenset[Atom] = frozenset()
    delta_minus: frozenset[Atom] = frozenset()

    def __post_init__(self):
        if self.delta_plus & self.delta_minus:
            raise HornbaseError("an explanation cannot both assume and deny an atom")

    @property
    def size(self) -> int:
        return len(self.delta_plus) + len(self.delta_minus)

    def sort_key(self):
        return (self.size, set_key(self.delta_plus), set_key(self.delta_minus))

    def __str__(self):
        plus = ", ".join(sorted(map(str, self.delta_plus)))
        minus = ", ".join(sorted(map(str, self.delta_minus)))
        return f"(+{{{plus}}}, -{{{minus}}})"


def _successes(kb: KnowledgeBase, alpha: Atom, background: Iterable[Atom]):
    return sld_tree(kb, alpha, background=background).successes()


def kernels(kb: KnowledgeBase, alpha: Atom, background: Iterable[Atom] = ()
            ) -> list[frozenset[HornClause]]:
    """Subset-minimal sets of ground rules and EDB facts that entail ``alpha``.

    ``background`` atoms count as given and never appear in a kernel.
    """
    candidates = [n.used_rules | {fact(a) for a in n.used_edb}
                  for n in _successes(kb, alpha, background)]
    return minimize_family(candidates)


def explanations(kb: KnowledgeBase, alpha: Atom, background: Iterable[Atom] = ()
                 ) -> list[frozenset[Atom]]:
    """Subset-minimal sets of EDB facts that, with the rules, entail ``alpha``."""
    return minimize_family(n.used_edb for n in _successes(kb, alpha, background))


def conjunction_explanations(kb: KnowledgeBase, atoms: Iterable[Atom],
                             background: Iterable[Atom] = ()) -> list[frozenset[Atom]]:
    background = frozenset(background)
    per_atom = [explanations(kb, a, background) for a in atoms]
    if any(not fam for fam in per_atom):
        return []
    return minimize_family(frozenset().union(*combo) for combo in itertools.product(*per_atom))


def locally_minimal_explanations(kb: KnowledgeBase, alpha: Atom,
                                 background: Iterable[Atom] = ()) -> list[Explanation]:
    """KB-closed locally minimal explanations of ``alpha`` wrt the rules.

    A branch's facts qualify when they are minimal for the branch's rule set
    and that rule set is itself minimal for those facts.
    """
    background = frozenset(background)
    found = set()
    for node in _successes(kb, alpha, background):
        rules, delta = node.used_rules, node.used_edb
        if any(alpha in fixpoint(rules, (delta - {e}) | background) for e in delta):
            continue
        if any(alpha in fixpoint(rules - {r}, delta | background) for r in rules):
            continue
        found.add(delta)
    return sorted((Explanation(d) for d in found), key=Explanation.sort_key)


def violation_family(kb: KnowledgeBase, background: Iterable[Atom] = (),
                     forbidden: Iterable[Atom] = ()) -> list[frozenset[Atom]]:
    """EDB parts of the minimal supports of every IC violation and forbidden atom.

    A valid repair deletes a hitting set of this family.  An empty member
    means the background alone is inconsistent.
    """
    background = frozenset(background)
    model = least_model(kb, background)
    family = []
    for clause, theta in violated_constraints(kb, model):
        body = [a.substitute(theta) for a in clause.body]
        family.extend(conjunction_explanations(kb, body, background))
    for a in forbidden:
        if a in model:
            family.extend(explanations(kb, a, background))
    return minimize_family(family)


def inconsistency_kernels(kb: KnowledgeBase, background: Iterable[Atom] = (),
                          forbidden: Iterable[Atom] = ()) -> list[frozenset[HornClause]]:
    """Minimal sets of ground rules and facts that, with ``background``,
    violate a constraint or derive a ``forbidden`` atom."""
    background = frozenset(background)
    model = least_model(kb, background)
    family: list[frozenset[HornClause]] = []
    for clause, theta in violated_constraints(kb, model):
        per_atom = [kernels(kb, a.substitute(theta), background) for a in clause.body]
        if all(per_atom):
            family.extend(frozenset().union(*c) for c in itertools.product(*per_atom))
    for a in forbidden:
        if a in model:
            family.extend(kernels(kb, a, background))
    return minimize_family(family)


def relevant_facts(kb: KnowledgeBase, background: Iterable[Atom] = (),
                   forbidden: Iterable[Atom] = ()) -> frozenset[Atom]:
    """EDB facts occurring in some inconsistency kernel."""
    return frozenset(c.head for k in inconsistency_kernels(kb, background, forbidden)
                     for c in k if not c.body and c.head in kb.kb_u)


def minimal_assumptions(kb: KnowledgeBase, alpha: Atom, raw: bool = False,
                        background: Iterable[Atom] = ()) -> list[frozenset[Atom]]:
    """Sets of absent base atoms whose assertion makes ``alpha`` derivable.

    With ``raw`` the per-branch assumption sets are returned as found;
    otherwise each is shrunk by dropping atoms one at a time.
    """
    background = frozenset(background)
    tree = abductive_tree(kb, alpha, background=background)
    sets = assumption_sets(tree)
    if raw:
        return sets
    out = []
    for hyps in sets:
        current = set(hyps)
        for h in sorted(hyps):
            if alpha in least_model(kb, (current - {h}) | background):
                current.discard(h)
        out.append(frozenset(current))
    return minimize_family(out) if out else []


def repairs(kb: KnowledgeBase, protected: Iterable[Atom], keep: Iterable[Atom] = (),
            forbidden: Iterable[Atom] = (), max_size: int | None = None
            ) -> list[frozenset[Atom]] | None:
    """Minimal EDB deletions restoring consistency once ``protected`` is added.

    ``keep`` atoms must stay derivable.  Returns ``None`` when the protected
    atoms by themselves clash with the constraints.
    """
    protected = frozenset(protected)
    keep = tuple(keep)
    rest = kb.with_edb(kb.kb_u - protected)
    family = violation_family(rest, protected, forbidden)
    if any(not m for m in family):
        return None
    out = []
    for d in minimal_hitting_sets(family):
        if max_size is not None and len(d) > max_size:
            continue
        model = least_model(rest.with_edb(rest.kb_u - d), protected)
        if all(a in model for a in keep):
            out.append(d)
    return out


def constrained_explanations(kb: KnowledgeBase, alpha: Atom, max_del_repair: int | None = 4
                             ) -> list[Explanation]:
    """Explanations of ``alpha`` that can be made consistent with the ICs.

    Each candidate assumption set is paired with every subset-minimal set of
    deletions (up to ``max_del_repair`` atoms) that removes all violations
    without losing ``alpha``.  Candidates without such a repair are dropped.
    """
    candidates = [e.delta_plus for e in locally_minimal_explanations(kb, alpha)]
    if not candidates:
        candidates = minimal_assumptions(kb, alpha)
    out = set()
    for plus in candidates:
        fixes = repairs(kb, plus, keep=(alpha,), max_size=max_del_repair)
        for d in fixes or ():
            out.add(Explanation(plus, d))
    return sorted(out, key=Explanation.sort_key)
