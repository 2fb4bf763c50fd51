import math

from hypothesis import assume, given, settings, strategies as st

from hornbase.abduction import explanations, locally_minimal_explanations
from hornbase.core import Atom, HornClause
from hornbase.generate import random_instance
from hornbase.hitting_sets import is_hitting_set, is_minimal_hitting_set, minimal_hitting_sets
from hornbase.tableaux import (MATERIALIZED, MINIMALITY, Branch, DisjunctiveClause, Tableau,
                               branch_hitting_set, build_tableau, build_update_tableau,
                               deletion_candidates, edb_cuts, idb_plus, idb_star,
                               strong_minimality_filter, transform_clause, transform_idb)
from hornbase.text_format import parse_atom, parse_program

import oracles

p, q, r = Atom("p"), Atom("q"), Atom("r")


def neg(text):
    return parse_atom(text).tagged()


def test_transform_moves_selected_body_atom():
    clause = HornClause(p, (q, r))
    assert transform_clause(clause, frozenset({q})) == DisjunctiveClause.make([p, q.tagged()], [r])


def test_transform_identity():
    assert transform_idb([HornClause(p, (q,))], ()) == {DisjunctiveClause.make([p], [q])}


def test_idb_star_staff(staff, atom):
    star = idb_star(staff)
    expected = DisjunctiveClause.make(
        [neg("staff_group(delhibabu,infor1)"), neg("group_chair(infor1,matthias)")],
        [neg("staff_chair(delhibabu,matthias)")])
    assert expected in star
    assert all(c.body for c in star)
    assert idb_star(parse_program("#EDB\na.\n")) == set()


def test_idb_plus_partial_flip(staff):
    plus = idb_plus(staff)
    assert DisjunctiveClause.make(
        [parse_atom("staff_chair(aravindan,gerhard)"), neg("group_chair(infor2,gerhard)")],
        [parse_atom("staff_group(aravindan,infor2)")]) in plus


def test_idb_plus_without_facts_is_untouched():
    kb = parse_program("#IDB\np :- q.\n")
    assert idb_plus(kb) == transform_idb([HornClause(p, (q,))], ())


def test_hand_traced_tableau():
    a, b, c = Atom("a"), Atom("b"), Atom("c")
    tab = build_tableau([DisjunctiveClause.make([a, b]), DisjunctiveClause.make([c], [a])])
    assert {frozenset(br.literals) for br in tab.open_branches()} == {frozenset({a, c}),
                                                                       frozenset({b})}
    assert all(br.finished for br in tab.open_branches())


def test_denial_closes_branch():
    tab = build_tableau([DisjunctiveClause.make([p]), DisjunctiveClause.make([], [p])])
    assert tab.open_branches() == []


def test_deletion_tableau_staff(staff, atom):
    goal = atom("staff_chair(delhibabu,matthias)")
    tab = build_update_tableau(staff, goal, MINIMALITY)
    hs = {branch_hitting_set(b, staff) for b in tab.open_branches()}
    assert hs == {frozenset({atom("staff_group(delhibabu,infor1)")}),
                  frozenset({atom("group_chair(infor1,matthias)")})}
    filtered = strong_minimality_filter(tab, staff, goal)
    assert len(filtered.open_branches()) == 2
    assert edb_cuts(tab, staff) == [frozenset().union(*hs)]


def test_branch_hitting_set(staff):
    b = Branch([neg("staff_chair(delhibabu,matthias)"), neg("staff_group(delhibabu,infor1)")])
    assert branch_hitting_set(b, staff) == {parse_atom("staff_group(delhibabu,infor1)")}
    assert branch_hitting_set(Branch([p]), staff) == frozenset()


def test_filter_closes_non_minimal_branch():
    kb = parse_program("#IDB\np :- a.\np :- b.\n#EDB\na.\nb.\nc.\n")
    tab = Tableau((), [Branch([p.tagged(), neg("a"), neg("b")]),
                       Branch([p.tagged(), neg("a"), neg("b"), neg("c")])])
    filtered = strong_minimality_filter(tab, kb, p)
    assert [b.is_open for b in filtered.branches] == [True, False]
    assert strong_minimality_filter(Tableau(()), kb, p).branches == []


def test_edb_cuts_cartesian(staff):
    x1, x2, y = (parse_atom(t) for t in ("staff_group(delhibabu,infor1)",
                                         "staff_group(aravindan,infor1)",
                                         "group_chair(infor1,matthias)"))
    tab = Tableau((), [Branch([x1.tagged(), x2.tagged()]), Branch([y.tagged()])])
    assert set(edb_cuts(tab, staff)) == {frozenset({x1, y}), frozenset({x2, y})}
    assert edb_cuts(Tableau(()), staff) == []


def test_cyclic_views_let_cuts_escape_the_explanations():
    # v0 and v1 support each other, so the IDB+ tableau must also refute the
    # non-minimal cyclic derivation of v0, which mentions b3 and b5
    kb = parse_program("#IDB\nv0 :- b2.\nv0 :- b3, b5, v1.\nv1 :- b2, b3, v0.\n"
                       "#EDB\nb2.\nb3.\nb5.\n")
    goal = parse_atom("v0")
    (e,) = locally_minimal_explanations(kb, goal)
    assert e.delta_plus == {parse_atom("b2")}
    tab = build_update_tableau(kb, goal, MATERIALIZED)
    cuts = edb_cuts(tab, kb)
    assert frozenset({parse_atom("b2")}) in cuts
    assert not all(c <= e.delta_plus for c in cuts)
    assert deletion_candidates(kb, goal, MINIMALITY) == [frozenset({parse_atom("b2")})]


def _regular(tab):
    return all(len(set(b.literals)) == len(b.literals) for b in tab.branches)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_update_tableau_properties(seed):
    kb, request = random_instance(seed)
    for goal in sorted(request.deletions):
        s = explanations(kb, goal)
        union = frozenset().union(*(e.delta_plus for e in locally_minimal_explanations(kb, goal)))
        for mode in (MINIMALITY, MATERIALIZED):
            tab = build_update_tableau(kb, goal, mode)
            assert _regular(tab)
            # cuts are a cartesian product over open branches
            assume(math.prod(len(branch_hitting_set(b, kb)) for b in tab.open_branches()) < 20000)
            cuts = edb_cuts(tab, kb)
            assert set(s) <= set(cuts)
            assert all(any(d <= c for d in s) for c in cuts)
            if mode == MATERIALIZED and not oracles.has_cycle(kb):
                assert all(c <= union for c in cuts)
            assert all(is_hitting_set(branch_hitting_set(b, kb), s)
                       for b in tab.open_branches())
        survivors = set(deletion_candidates(kb, goal, MINIMALITY))
        assert all(is_minimal_hitting_set(h, s) for h in survivors)
        assert survivors == set(minimal_hitting_sets(s))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_open_branches_are_models(seed):
    kb, request = random_instance(seed)
    for goal in sorted(request.deletions):
        tab = build_update_tableau(kb, goal, MATERIALIZED)
        for b in tab.open_branches():
            lits = set(b.literals)
            for c in tab.program:
                if all(x in lits for x in c.body):
                    assert any(h in lits for h in c.head)
