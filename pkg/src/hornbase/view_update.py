"""Translating view-update requests into base-fact transactions.

Two strategies share one pipeline:

* ``minimality``: deletion candidates come from the IDB* tableau after the
  strong minimality test, and the final transaction set is subset-minimal.
* ``materialized``: deletion candidates come from the IDB⁺ tableau built
  against the least model, with no minimality filtering.

Insertions are handled by abducing missing base facts along the SLD tree of
each requested atom; any IC violation the insertions cause is repaired by a
minimal hitting set of the violation supports.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable

from .abduction import relevant_facts, violation_family
from .core import Atom, KnowledgeBase, base_herbrand_base
from .errors import IterationCapError, NoRealizationError, PreconditionError
from .hitting_sets import minimal_hitting_sets, minimize_family, set_key
from .semantics import least_model, violated_constraints
from .sld import abductive_tree, assumption_sets
from .tableaux import MATERIALIZED, MINIMALITY, Tableau, deletion_candidates
from .text_format import UpdateRequest


@dataclass(frozen=True)
class Transaction:
    t_ins: frozenset[Atom] = frozenset()
    t_del: frozenset[Atom] = frozenset()

    def __post_init__(self):
        if self.t_ins & self.t_del:
            raise ValueError("a transaction cannot insert and delete the same fact")

    @property
    def toggles(self) -> frozenset[Atom]:
        return self.t_ins | self.t_del

    @property
    def size(self) -> int:
        return len(self.t_ins) + len(self.t_del)

    def sort_key(self):
        return (self.size, set_key(self.t_ins), set_key(self.t_del))

    def touches(self, atom: Atom) -> bool:
        return atom in self.t_ins or atom in self.t_del

    def to_json(self) -> dict:
        return {"insert": sorted(map(str, self.t_ins)), "delete": sorted(map(str, self.t_del))}

    def __str__(self):
        ins = ", ".join(f"+{a}" for a in sorted(self.t_ins))
        dels = ", ".join(f"-{a}" for a in sorted(self.t_del))
        return "{" + ", ".join(x for x in (ins, dels) if x) + "}"


@dataclass
class UpdateResult:
    transactions: list[Transaction]
    new_edbs: list[frozenset[Atom]]
    algorithm: str
    stats: dict = field(default_factory=dict)
    tableaux: list[Tableau] = field(default_factory=list)
    models: list[frozenset[Atom]] = field(default_factory=list)

    def __bool__(self):
        return bool(self.transactions)

    def to_json(self) -> dict:
        return {"solutions": [t.to_json() for t in self.transactions],
                "algorithm": self.algorithm, "stats": dict(self.stats)}


def apply_transaction(kb: KnowledgeBase, t: Transaction) -> KnowledgeBase:
    return kb.with_edb((kb.kb_u - t.t_del) | t.t_ins)


def satisfies(kb: KnowledgeBase, request: UpdateRequest, t: Transaction) -> bool:
    """The updated database derives every insertion, no deletion, and no violation."""
    new = apply_transaction(kb, t)
    model = least_model(new)
    return (request.insertions <= model and not (request.deletions & model)
            and not violated_constraints(new, model))


def check_true_update(kb: KnowledgeBase, request: UpdateRequest) -> None:
    model = least_model(kb)
    for a in sorted(request.insertions):
        if a in model:
            raise PreconditionError(f"{a} is already derivable; not a true insertion")
    for a in sorted(request.deletions):
        if a not in model:
            raise PreconditionError(f"{a} is not derivable; not a true deletion")


def _request_kb(kb: KnowledgeBase, request: UpdateRequest) -> KnowledgeBase:
    return kb.with_constants(t for a in request.atoms for t in a.args)


def _insertion_choices(kb: KnowledgeBase, request: UpdateRequest, stats: dict
                       ) -> list[frozenset[Atom]]:
    """Union of one raw abductive branch per requested insertion."""
    per_atom = []
    for goal in sorted(request.insertions):
        tree = abductive_tree(kb, goal)
        stats["sld_nodes"] += tree.node_count
        sets = assumption_sets(tree)
        if not sets:
            return []
        per_atom.append(sets)
    return sorted({frozenset().union(*c) for c in itertools.product(*per_atom)}, key=set_key)


def _combine(families: list[list[frozenset[Atom]]]) -> list[frozenset[Atom]]:
    # a union that contains another union only repeats work done for one atom
    if any(not f for f in families):
        return []
    return minimize_family(frozenset().union(*c) for c in itertools.product(*families))


def view_update(kb: KnowledgeBase, request: UpdateRequest, mode: str = MINIMALITY,
                max_del_repair: int | None = None, trace: bool = False) -> UpdateResult:
    """Every transaction realizing ``request`` under the chosen strategy.

    Raises PreconditionError unless the request is a true update.  An empty
    result means the request has no realization, except for the empty
    request, which asks for nothing and leaves the database as it is.
    """
    started = time.perf_counter()
    kb = _request_kb(kb, request)
    check_true_update(kb, request)
    stats = {"sld_nodes": 0, "tableau_branches": 0, "ic_rounds": 0}
    if not request:
        stats["elapsed_ms"] = 0.0
        return UpdateResult([], [], mode, stats)
    tableaux: list[Tableau] = []
    minimal = mode == MINIMALITY
    cap = len(base_herbrand_base(kb)) + 1

    found: set[Transaction] = set()
    inserts = _insertion_choices(kb, request, stats) if request.insertions else [frozenset()]
    for ins in inserts:
        # deletions for the requested atoms, with the new facts held fixed
        trace_into: list[Tableau] = []
        del_families = [deletion_candidates(kb, g, mode, ins, trace_into)
                        for g in sorted(request.deletions)]
        stats["tableau_branches"] += sum(len(t.branches) for t in trace_into)
        if trace:
            tableaux.extend(trace_into)
        for base in _combine(del_families):
            # IC loop: recompute the violations after each repair round
            pending = [base]
            rounds = 0
            while pending:
                rounds += 1
                if rounds > cap:
                    raise IterationCapError(f"IC repair did not settle within {cap} rounds")
                nxt = []
                for dels in pending:
                    current = kb.with_edb(kb.kb_u - dels - ins)
                    family = violation_family(current, ins)
                    if not family:
                        t = Transaction(ins, dels)
                        if satisfies(kb, request, t):
                            found.add(t)
                        continue
                    for fix in minimal_hitting_sets(family):
                        if max_del_repair is not None and len(fix) > max_del_repair:
                            continue
                        nxt.append(dels | fix)
                pending = minimize_family(nxt) if minimal else sorted(set(nxt), key=set_key)
            stats["ic_rounds"] = max(stats["ic_rounds"], rounds)

    transactions = sorted(found, key=Transaction.sort_key)
    if minimal:
        transactions = [t for t in transactions
                        if not any(o.toggles < t.toggles for o in transactions)]
    else:
        # combining per-atom candidates can add deletions that serve an atom
        # another deletion already removed; keep only relevant deletions
        relevant: dict[frozenset[Atom], frozenset[Atom]] = {}
        for t in transactions:
            if t.t_ins not in relevant:
                relevant[t.t_ins] = relevant_facts(kb, request.insertions | t.t_ins,
                                                   request.deletions)
        transactions = [t for t in transactions if t.t_del <= relevant[t.t_ins]]
    new_edbs = [apply_transaction(kb, t).kb_u for t in transactions]
    models = [] if minimal else [least_model(kb.with_edb(e)) for e in new_edbs]
    stats["elapsed_ms"] = round((time.perf_counter() - started) * 1000, 3)
    return UpdateResult(transactions, new_edbs, mode, stats, tableaux, models)


def view_update_minimality(kb: KnowledgeBase, request: UpdateRequest,
                           max_del_repair: int | None = None, trace: bool = False) -> UpdateResult:
    return view_update(kb, request, MINIMALITY, max_del_repair, trace)


def view_update_materialized(kb: KnowledgeBase, request: UpdateRequest,
                             max_del_repair: int | None = None, trace: bool = False) -> UpdateResult:
    return view_update(kb, request, MATERIALIZED, max_del_repair, trace)


def require_realization(result: UpdateResult) -> UpdateResult:
    if not result.transactions:
        raise NoRealizationError("the request has no realization")
    return result


def brute_force_updates(kb: KnowledgeBase, request: UpdateRequest,
                        universe: Iterable[Atom] | None = None) -> list[Transaction]:
    """Subset-minimal valid transactions by exhaustive search over toggle sets."""
    kb = _request_kb(kb, request)
    atoms = sorted(base_herbrand_base(kb) if universe is None else universe)
    valid: list[frozenset[Atom]] = []
    for k in range(len(atoms) + 1):
        for combo in itertools.combinations(atoms, k):
            toggles = frozenset(combo)
            if any(v <= toggles for v in valid):
                continue
            t = Transaction(toggles - kb.kb_u, toggles & kb.kb_u)
            if satisfies(kb, request, t):
                valid.append(toggles)
    out = [Transaction(v - kb.kb_u, v & kb.kb_u) for v in valid]
    return sorted(out, key=Transaction.sort_key)
