import pytest

from hornbase.core import Atom, HornClause, KnowledgeBase
from hornbase.errors import HornbaseError
from hornbase.semantics import entails, is_consistent, least_model, violated_constraints

import oracles


def test_staff_model_matches_naive_oracle(staff, atom):
    derived = {atom("staff_chair(delhibabu,matthias)"), atom("staff_chair(aravindan,matthias)")}
    assert least_model(staff) == staff.kb_u | derived
    assert least_model(staff) == oracles.model_of(staff)


def test_chain():
    a, b, c = Atom("a"), Atom("b"), Atom("c")
    kb = KnowledgeBase.build([HornClause(a, (b,)), HornClause(b, (c,))], [c])
    assert least_model(kb) == {a, b, c}


def test_no_facts_no_model():
    kb = KnowledgeBase.build([HornClause(Atom("a"), (Atom("b"),))])
    assert least_model(kb) == frozenset()


def test_entails(staff, atom):
    assert entails(staff, atom("staff_chair(delhibabu,matthias)"))
    assert not entails(staff, atom("staff_chair(aravindan,gerhard)"))
    assert not entails(staff, atom("unknown(x)"))
    with pytest.raises(HornbaseError):
        entails(staff, atom("staff_chair(X,matthias)"))


def test_staff_is_consistent(staff):
    assert violated_constraints(staff) == []


def test_second_chair_violates_both_constraints(staff, atom):
    kb = staff.with_edb(staff.kb_u | {atom("group_chair(infor1,gerhard)")})
    violated = {c for c, _ in violated_constraints(kb)}
    assert violated == set(kb.kb_ic)
    assert not is_consistent(kb)


def test_forbidden_atoms(staff, atom):
    assert not is_consistent(staff, forbidden=[atom("staff_chair(delhibabu,matthias)")])
