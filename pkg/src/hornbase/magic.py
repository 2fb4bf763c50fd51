"""Goal seeds and the insertion-side realization search.

Rather than rewriting the program, the search starts from each seed atom and
explores only the SLD tree below it, abducing missing base facts on the way.
"""
from __future__ import annotations

from dataclasses import dataclass

from .abduction import Explanation, constrained_explanations, minimal_assumptions
from .core import Atom, KnowledgeBase
from .errors import PreconditionError
from .semantics import entails, least_model
from .text_format import UpdateRequest

PLUS = "+"
MINUS = "-"


@dataclass(frozen=True, order=True)
class Seed:
    predicate: str
    args: tuple[str, ...]
    sign: str

    @property
    def atom(self) -> Atom:
        return Atom(self.predicate, self.args)

    def __str__(self):
        return f"{self.sign}{self.atom}"


def vu_seeds(request: UpdateRequest) -> set[Seed]:
    seeds = {Seed(a.pred, a.args, PLUS) for a in request.insertions}
    seeds |= {Seed(a.pred, a.args, MINUS) for a in request.deletions}
    return seeds


def _dominated(e: Explanation, others: list[Explanation]) -> bool:
    return any(o != e and o.delta_plus <= e.delta_plus and o.delta_minus <= e.delta_minus
               for o in others)


def insertion_realizations(kb: KnowledgeBase, goal: Atom, max_del_repair: int | None = 4
                           ) -> list[Explanation]:
    """Signed explanations that make ``goal`` derivable under the ICs.

    Results are subset-minimal on both the assumed and the denied side and
    sorted by total size.  An empty list means no realization exists within
    the deletion cap.
    """
    if entails(kb, goal):
        raise PreconditionError(f"{goal} is already derivable; nothing to insert")
    found = constrained_explanations(kb, goal, max_del_repair)
    return [e for e in found if not _dominated(e, found)]


def insertion_candidates(kb: KnowledgeBase, goal: Atom, background: frozenset[Atom] = frozenset()
                         ) -> list[frozenset[Atom]]:
    """Raw per-branch assumption sets for ``goal``, before any minimization."""
    if goal in least_model(kb, background):
        return [frozenset()]
    return minimal_assumptions(kb, goal, raw=True, background=background)

