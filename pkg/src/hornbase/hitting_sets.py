"""Minimal hitting sets via a pruned HS-tree.

The family is minimized first (supersets of other members are dropped, they
never change the minimal hitting sets), then a breadth-first HS-tree is grown
with node reuse and closing, as in model-based diagnosis.
"""
from __future__ import annotations

from collections import deque
from typing import Collection, Hashable, Iterable, TypeVar

T = TypeVar("T", bound=Hashable)


def _order(s: Iterable) -> tuple:
    return tuple(sorted(s, key=str))


def set_key(s: Collection) -> tuple:
    """Canonical order: cardinality, then lexicographic on element strings."""
    return (len(s), tuple(sorted(map(str, s))))


def minimize_family(family: Iterable[Collection[T]]) -> list[frozenset[T]]:
    """Drop duplicates and every member that strictly contains another."""
    members = sorted({frozenset(m) for m in family}, key=set_key)
    out: list[frozenset[T]] = []
    for m in members:
        if not any(k <= m for k in out):
            out.append(m)
    return out


def is_hitting_set(h: Collection[T], family: Iterable[Collection[T]]) -> bool:
    h = set(h)
    return all(h & set(m) for m in family)


def is_minimal_hitting_set(h: Collection[T], family: Iterable[Collection[T]]) -> bool:
    family = [frozenset(m) for m in family]
    h = frozenset(h)
    if not is_hitting_set(h, family):
        return False
    # minimal iff every element is the sole hit of some member
    return all(any(m & h == {e} for m in family) for e in h)


def is_hittable(family: Iterable[Collection[T]]) -> bool:
    return all(len(m) > 0 for m in family)


def minimal_hitting_sets(family: Iterable[Collection[T]]) -> list[frozenset[T]]:
    """All minimal hitting sets, sorted by (size, lexicographic).

    An empty result means some member is empty and nothing can hit it; the
    empty family is hit by the empty set alone.
    """
    members = minimize_family(family)
    if any(not m for m in members):
        return []
    found: list[frozenset[T]] = []
    seen: set[frozenset[T]] = set()
    queue: deque[frozenset[T]] = deque([frozenset()])
    while queue:
        path = queue.popleft()
        if any(f <= path for f in found):
            continue  # closed: superset of a known hitting set
        unhit = next((m for m in members if not (m & path)), None)
        if unhit is None:
            found.append(path)
            continue
        for e in _order(unhit):
            child = path | {e}
            if child not in seen:
                seen.add(child)
                queue.append(child)
    return sorted(found, key=set_key)


def brute_force_minimal_hitting_sets(family: Iterable[Collection[T]]) -> list[frozenset[T]]:
    """Exhaustive reference used by tests and small-instance checks."""
    from itertools import combinations

    family = [frozenset(m) for m in family]
    universe = _order(set().union(*family)) if family else ()
    hitting = [frozenset(c) for k in range(len(universe) + 1)
               for c in combinations(universe, k) if is_hitting_set(c, family)]
    return sorted((h for h in hitting if not any(g < h for g in hitting)), key=set_key)
