"""Deductive databases over function-free Horn clauses, with view updates
computed by abduction, hyper tableaux and minimal hitting sets."""
from .core import Atom, HornClause, KnowledgeBase
from .errors import HornbaseError
from .revision import Alpha, check_postulates, generalized_revision, kr
from .semantics import entails, least_model, violated_constraints
from .text_format import UpdateRequest, parse_program, parse_request, read_program
from .view_update import (Transaction, UpdateResult, apply_transaction,
                          view_update_materialized, view_update_minimality)

__version__ = "0.1.0"

__all__ = [
    "Atom", "HornClause", "KnowledgeBase", "HornbaseError", "Alpha", "check_postulates",
    "generalized_revision", "kr", "entails", "least_model", "violated_constraints",
    "UpdateRequest", "parse_program", "parse_request", "read_program", "Transaction",
    "UpdateResult", "apply_transaction", "view_update_materialized", "view_update_minimality",
]
