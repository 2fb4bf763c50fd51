"""Complete SLD trees with leftmost selection and an ancestor loop check.

The depth bound limits proof-tree nesting: the number of view atoms on the
chain of ancestors of a selected subgoal.  Resolving against a fact does not
deepen a branch.

Besides plain refutation the engine can run *abductively*: a selected base
atom with no matching fact may be assumed instead.  Assumptions that still
contain variables when a branch closes are free assignments of fresh values
and are discarded.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .core import Atom, HornClause, KnowledgeBase, fact, is_variable, unify
from .errors import HornbaseError, ResourceCapError

SUCCESS = "success"
FAILURE = "failure"
INTERNAL = "internal"
LOOP = "loop"
CUT = "cut"

DEFAULT_NODE_CAP = 10**6


@dataclass(frozen=True)
class _Item:
    atom: Atom | None
    guard: tuple[str, str] | None = None
    ancestors: tuple[Atom, ...] = ()


@dataclass
class SldNode:
    goal: tuple[Atom, ...]
    binding: dict[str, str]
    used_edb: frozenset[Atom]
    used_rules: frozenset[HornClause]
    status: str = INTERNAL
    assumed: frozenset[Atom] = frozenset()
    selected: Atom | None = None
    step: str = ""
    depth: int = 0
    children: list[SldNode] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class SldTree:
    kb: KnowledgeBase
    goal: Atom
    root: SldNode
    depth_bound: int
    node_count: int
    abductive: bool = False

    def nodes(self) -> Iterator[SldNode]:
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def leaves(self) -> list[SldNode]:
        return [n for n in self.nodes() if n.is_leaf]

    def successes(self) -> list[SldNode]:
        return [n for n in self.leaves() if n.status == SUCCESS]

    def failures(self) -> list[SldNode]:
        return [n for n in self.leaves() if n.status in (FAILURE, LOOP)]

    @property
    def bound_cut(self) -> bool:
        return any(n.status == CUT for n in self.leaves())

    def render(self) -> str:
        lines = []

        def walk(n: SldNode, indent: int):
            goal = ", ".join(map(str, n.goal)) or "□"
            extra = f"  [{n.step}]" if n.step else ""
            mark = "" if n.status == INTERNAL else f"  ({n.status})"
            lines.append(f"{'  ' * indent}<- {goal}{extra}{mark}")
            for c in n.children:
                walk(c, indent + 1)

        walk(self.root, 0)
        return "\n".join(lines)


def default_depth_bound(kb: KnowledgeBase, goal_len: int = 1) -> int:
    n = len(kb.constants)
    size = sum(n ** a for a in kb.arities.values())
    return size + goal_len + 1


def node_cap() -> int:
    return int(os.environ.get("HORNBASE_NODE_CAP", DEFAULT_NODE_CAP))


def _is_variant(a: Atom, b: Atom) -> bool:
    if a.pred != b.pred or a.arity != b.arity:
        return False
    fwd: dict[str, str] = {}
    back: dict[str, str] = {}
    for s, t in zip(a.args, b.args):
        if is_variable(s) != is_variable(t):
            return False
        if not is_variable(s):
            if s != t:
                return False
            continue
        if fwd.setdefault(s, t) != t or back.setdefault(t, s) != s:
            return False
    return True


class _Engine:
    def __init__(self, kb: KnowledgeBase, depth_bound: int,
                 background: Iterable[Atom] = (),
                 hypothesize: Callable[[Atom], bool] | None = None):
        self.kb = kb
        self.depth_bound = depth_bound
        self.hypothesize = hypothesize
        self.background = frozenset(background)
        self.facts_by_pred: dict[str, list[tuple[Atom, bool]]] = {}
        for a in kb.edb:
            self.facts_by_pred.setdefault(a.pred, []).append((a, True))
        for a in sorted(self.background - kb.kb_u):
            self.facts_by_pred.setdefault(a.pred, []).append((a, False))
        self.rules_by_pred: dict[str, list[HornClause]] = {}
        for r in kb.rules:
            self.rules_by_pred.setdefault(r.head.pred, []).append(r)
        self.fresh = itertools.count()
        self.count = 0
        self.cap = node_cap()

    def _new(self, **kw) -> SldNode:
        self.count += 1
        if self.count > self.cap:
            raise ResourceCapError(f"SLD tree exceeds node cap {self.cap}")
        return SldNode(**kw)

    def _rename(self, rule: HornClause) -> tuple[HornClause, dict[str, str]]:
        n = next(self.fresh)
        ren = {v: f"{v}_{n}" for v in rule.variables()}
        return rule.substitute(ren), ren

    def run(self, goal: Atom) -> SldNode:
        root = self._new(goal=(goal,), binding={}, used_edb=frozenset(), used_rules=frozenset())
        items = (_Item(goal),)
        # explicit stack: (node, items, theta, edb, rule_apps, assumed, pending guards)
        stack = [(root, items, {}, frozenset(), (), (), ())]
        while stack:
            node, items, theta, edb, apps, assumed, pending = stack.pop()
            children = self._expand(node, items, theta, edb, apps, assumed, pending)
            node.children = [c[0] for c in children]
            stack.extend(c for c in reversed(children) if c[1] is not None)
        return root

    def _close(self, node, theta, edb, apps, assumed, pending):
        """Finalize an empty goal list."""
        ground_apps = []
        for rule, ren in apps:
            full = {v: theta.get(r, r) for v, r in ren.items()}
            ground_apps.append(rule.substitute(full))
        hyps = frozenset(a.substitute(theta) for a in assumed)
        guards = [(theta.get(s, s), theta.get(t, t)) for s, t in pending]
        node.used_rules = frozenset(ground_apps)
        node.assumed = hyps
        node.used_edb = edb
        if any(not h.is_ground for h in hyps) or any(not r.is_ground for r in ground_apps):
            node.status = FAILURE
            node.step = "unbound assumption"
            return
        if any(is_variable(s) or is_variable(t) or s == t for s, t in guards):
            node.status = FAILURE
            node.step = "guard"
            return
        if any(h in self.kb.kb_u or h in self.background for h in hyps):
            # duplicates a branch that resolves against the stored fact
            node.status = FAILURE
            node.step = "assumption already a fact"
            return
        node.status = SUCCESS

    def _stop(self, node, out, status):
        if not out:
            node.status = status
            return out
        # keep the fact resolutions, and show the pruned rule steps as a leaf
        leaf = self._new(goal=node.goal, binding=node.binding, used_edb=node.used_edb,
                         used_rules=frozenset(), status=status, depth=node.depth)
        return out + [(leaf, None, None, None, None, None, None)]

    def _expand(self, node, items, theta, edb, apps, assumed, pending):
        if not items:
            self._close(node, theta, edb, apps, assumed, pending)
            return []
        item, rest = items[0], items[1:]
        if item.guard is not None:
            s, t = (theta.get(x, x) for x in item.guard)
            if is_variable(s) or is_variable(t):
                pending = pending + ((s, t),)
            elif s == t:
                node.status = FAILURE
                node.step = f"{s} != {t} fails"
                return []
            child = self._new(goal=tuple(i.atom for i in rest if i.atom is not None),
                              binding=theta, used_edb=edb, used_rules=frozenset(),
                              depth=node.depth, step=f"{s} != {t}")
            return [(child, rest, theta, edb, apps, assumed, pending)]

        atom = item.atom.substitute(theta)
        node.selected = atom
        out = []
        for f, recorded in self.facts_by_pred.get(atom.pred, ()):
            t = unify(atom, f, theta)
            if t is None:
                continue
            new_edb = edb | {f} if recorded else edb
            child = self._new(
                goal=tuple(i.atom.substitute(t) for i in rest if i.atom is not None),
                binding=t, used_edb=new_edb, used_rules=frozenset(), depth=node.depth,
                step=f"{f}." if recorded else f"{f}. (background)")
            out.append((child, rest, t, new_edb, apps, assumed, pending))
        if self.kb.is_view(atom):
            if any(_is_variant(atom, anc.substitute(theta)) for anc in item.ancestors):
                return self._stop(node, out, LOOP)
            ancestors = item.ancestors + (atom,)
            if len(ancestors) > self.depth_bound:
                return self._stop(node, out, CUT)
            for rule in self.rules_by_pred.get(atom.pred, ()):
                renamed, ren = self._rename(rule)
                t = unify(atom, renamed.head, theta)
                if t is None:
                    continue
                new_items = tuple(_Item(b, None, ancestors) for b in renamed.body)
                new_items += tuple(_Item(None, g, ancestors) for g in renamed.guards)
                new_items += rest
                child = self._new(
                    goal=tuple(i.atom.substitute(t) for i in new_items if i.atom is not None),
                    binding=t, used_edb=edb, used_rules=frozenset(), depth=len(ancestors),
                    step=str(rule))
                out.append((child, new_items, t, edb, apps + ((rule, ren),), assumed, pending))
        elif self.hypothesize is not None and self.hypothesize(atom) and not (
                atom.is_ground and (atom in self.kb.kb_u or atom in self.background)):
            child = self._new(
                goal=tuple(i.atom.substitute(theta) for i in rest if i.atom is not None),
                binding=theta, used_edb=edb, used_rules=frozenset(), depth=node.depth,
                step=f"assume {atom}")
            out.append((child, rest, theta, edb, apps, assumed + (item.atom,), pending))
        if not out:
            node.status = FAILURE
        return out


def sld_tree(kb: KnowledgeBase, goal: Atom, depth_bound: int | None = None, *,
             background: Iterable[Atom] = (),
             hypothesize: Callable[[Atom], bool] | None = None) -> SldTree:
    """Build the complete SLD tree for ``<- goal``.

    ``background`` facts resolve like EDB facts but are not recorded as used.
    ``hypothesize`` enables the abductive mode described in the module doc.
    """
    if not goal.is_ground:
        raise HornbaseError(f"goal {goal} is not ground")
    if depth_bound is None:
        depth_bound = default_depth_bound(kb)
    if depth_bound < 1:
        raise HornbaseError("depth bound must be at least 1")
    engine = _Engine(kb, depth_bound, background, hypothesize)
    root = engine.run(goal)
    return SldTree(kb, goal, root, depth_bound, engine.count, hypothesize is not None)


def branch_explanations(tree: SldTree) -> set[frozenset[Atom]]:
    """EDB facts consumed by each successful branch."""
    return {n.used_edb for n in tree.successes() if not n.assumed}


def branch_supports(tree: SldTree) -> list[frozenset[HornClause]]:
    """Input clauses (ground rule instances and facts) per successful branch."""
    return [n.used_rules | {fact(a) for a in n.used_edb}
            for n in tree.successes() if not n.assumed]


def abductive_tree(kb: KnowledgeBase, goal: Atom, depth_bound: int | None = None,
                   background: Iterable[Atom] = ()) -> SldTree:
    """SLD tree in which any base atom may be assumed."""
    return sld_tree(kb, goal, depth_bound, background=background, hypothesize=kb.is_base)


def assumption_sets(tree: SldTree) -> list[frozenset[Atom]]:
    """Distinct non-empty assumption sets of an abductive tree, in tree order."""
    seen, out = set(), []
    for n in tree.successes():
        if n.assumed and n.assumed not in seen:
            seen.add(n.assumed)
            out.append(n.assumed)
    return out


def missing_support(tree: SldTree) -> set[frozenset[Atom]]:
    """Base atoms whose addition would let a failed branch succeed.

    Re-runs the goal abductively and minimizes each branch's assumptions by
    dropping them one at a time.
    """
    from .semantics import least_model

    if tree.successes():
        return set()
    kb = tree.kb
    rerun = abductive_tree(kb, tree.goal, tree.depth_bound)
    out = set()
    for hyps in assumption_sets(rerun):
        current = set(hyps)
        for h in sorted(hyps):
            trial = current - {h}
            if tree.goal in least_model(kb, trial):
                current = trial
        out.add(frozenset(current))
    return out
