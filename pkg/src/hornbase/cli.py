"""``hornbase`` command-line front end.

Exit codes: 0 success, 1 no realization, 2 input error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import __version__
from .errors import HornbaseError, NoRealizationError
from .generate import random_instance
from .revision import (POSTULATES, Alpha, check_postulates, generalized_revision,
                       revision_outcomes, revision_reviser)
from .semantics import least_model, violated_constraints
from .sld import abductive_tree, sld_tree
from .tableaux import MATERIALIZED, MINIMALITY
from .text_format import (parse_atom, parse_program, parse_request, read_program,
                          replace_edb_section, serialize_program, serialize_request)
from .view_update import Transaction, apply_transaction, view_update

ALGORITHMS = {"min": MINIMALITY, "mat": MATERIALIZED}


def _emit(args, payload, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text)


def _read_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    if os.path.exists(source):
        try:
            with open(source, encoding="utf-8") as fh:
                return fh.read()
        except OSError as e:
            raise HornbaseError(f"{source}: {e.strerror}") from None
    return source


def _trace(title: str, body: str) -> None:
    print(f"== {title}\n{body}", file=sys.stderr)


def _atom_arg(kb, text: str):
    atom = parse_atom(text.strip().rstrip("."))
    if not atom.is_ground:
        raise HornbaseError(f"{atom} is not ground")
    return atom


def _transaction_text(i: int, t: Transaction) -> str:
    return f"{i}. {t}"


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    kb = read_program(args.db)
    model = least_model(kb)
    violations = violated_constraints(kb, model)
    payload = {"valid": True, "rules": len(kb.kb_i), "facts": len(kb.kb_u),
               "constraints": len(kb.kb_ic), "consistent": not violations,
               "violations": [str(c.substitute(theta)) for c, theta in violations]}
    text = (f"ok: {payload['rules']} rules, {payload['facts']} facts, "
            f"{payload['constraints']} constraints; "
            + ("consistent" if not violations else f"{len(violations)} violation(s)"))
    for v in payload["violations"]:
        text += f"\n  violated: {v}"
    _emit(args, payload, text)
    return 0


def cmd_model(args) -> int:
    model = sorted(least_model(read_program(args.db)))
    _emit(args, [str(a) for a in model], "\n".join(f"{a}." for a in model))
    return 0


def cmd_query(args) -> int:
    kb = read_program(args.db)
    goal = _atom_arg(kb, args.atom)
    kb = kb.with_constants(goal.args)
    verdict = goal in least_model(kb)
    if args.trace_sld:
        _trace(f"SLD tree for <- {goal}", sld_tree(kb, goal, args.depth_bound).render())
    _emit(args, {"query": str(goal), "entailed": verdict}, "true" if verdict else "false")
    return 0


def cmd_update(args) -> int:
    kb = read_program(args.db)
    request = parse_request(_read_text(args.request), kb)
    mode = ALGORITHMS[args.algo]
    if args.trace_sld:
        for g in sorted(request.insertions):
            _trace(f"abductive SLD tree for <- {g}",
                   abductive_tree(kb, g, args.depth_bound).render())
        for g in sorted(request.deletions):
            _trace(f"SLD tree for <- {g}", sld_tree(kb, g, args.depth_bound).render())
    result = view_update(kb, request, mode, args.max_del_repair, trace=args.trace_tableau)
    for i, tab in enumerate(result.tableaux):
        _trace(f"update tableau {i}", tab.render())
    lines = [_transaction_text(i, t) for i, t in enumerate(result.transactions)]
    _emit(args, result.to_json(), "\n".join(lines) or ("no realization" if request else "nothing to do"))
    if request and not result.transactions:
        raise NoRealizationError("the request has no realization")
    return 0


def cmd_compare(args) -> int:
    kb = read_program(args.db)
    request = parse_request(_read_text(args.request), kb)
    runs = {m: view_update(kb, request, m, args.max_del_repair).transactions
            for m in (MINIMALITY, MATERIALIZED)}
    a, b = set(runs[MINIMALITY]), set(runs[MATERIALIZED])
    order = Transaction.sort_key
    payload = {
        MINIMALITY: [t.to_json() for t in runs[MINIMALITY]],
        MATERIALIZED: [t.to_json() for t in runs[MATERIALIZED]],
        "only_minimality": [t.to_json() for t in sorted(a - b, key=order)],
        "only_materialized": [t.to_json() for t in sorted(b - a, key=order)],
        "minimality_subset_of_materialized": a <= b,
    }
    text = "\n".join(
        [f"{MINIMALITY}: {len(a)}, {MATERIALIZED}: {len(b)}"]
        + [f"  only {MATERIALIZED}: {t}" for t in sorted(b - a, key=order)]
        + [f"  only {MINIMALITY}: {t}" for t in sorted(a - b, key=order)])
    _emit(args, payload, text)
    return 0


def _outcome_json(kb, o) -> dict:
    return {"insert": sorted(map(str, o.kb_prime.kb_u - kb.kb_u)),
            "delete": sorted(map(str, kb.kb_u - o.kb_prime.kb_u)),
            "edb": sorted(map(str, o.kb_prime.kb_u)), "iterations": o.iterations}


def cmd_revise(args) -> int:
    kb = read_program(args.db)
    alpha = _atom_arg(kb, args.atom)
    outcomes = revision_outcomes(kb, alpha) if args.all else [generalized_revision(kb, alpha)]
    payload = {"alpha": str(alpha), "outcomes": [_outcome_json(kb, o) for o in outcomes]}
    text = "\n".join(
        f"{i}. +{{{', '.join(o['insert'])}}} -{{{', '.join(o['delete'])}}}"
        for i, o in enumerate(payload["outcomes"]))
    _emit(args, payload, text)
    return 0


def cmd_check_postulates(args) -> int:
    kb = read_program(args.db)
    alpha = _atom_arg(kb, args.atom)
    if args.result:
        kb_prime = read_program(args.result)
    else:
        kb_prime = generalized_revision(kb, alpha).kb_prime
    report = check_postulates(kb, Alpha.of(alpha), kb_prime, revision_reviser)
    payload = report.to_json()
    _emit(args, payload, "\n".join(f"{n}: {payload[n]}" for n in POSTULATES))
    return 0


def cmd_apply(args) -> int:
    try:
        with open(args.db, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise HornbaseError(f"{args.db}: {e.strerror}") from None
    kb = parse_program(text, args.db)
    try:
        solutions = json.loads(_read_text(args.solutions))["solutions"]
    except (ValueError, KeyError, TypeError):
        raise HornbaseError("solutions must be the JSON output of 'update'") from None
    if not 0 <= args.index < len(solutions):
        raise HornbaseError(f"solution index {args.index} out of range "
                            f"(0..{len(solutions) - 1})")
    chosen = solutions[args.index]
    t = Transaction(frozenset(map(parse_atom, chosen.get("insert", []))),
                    frozenset(map(parse_atom, chosen.get("delete", []))))
    new = apply_transaction(kb, t)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(replace_edb_section(text, new.kb_u))
    except OSError as e:
        raise HornbaseError(f"{args.out}: {e.strerror}") from None
    _emit(args, {"out": args.out, "facts": len(new.kb_u)},
          f"wrote {args.out} ({len(new.kb_u)} facts)")
    return 0


def cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else random.randrange(2**31)
    kb, request = random_instance(seed)
    program = f"% generated with seed {seed}\n" + serialize_program(kb)
    if args.request_out:
        try:
            with open(args.request_out, "w", encoding="utf-8") as fh:
                fh.write(serialize_request(request))
        except OSError as e:
            raise HornbaseError(f"{args.request_out}: {e.strerror}") from None
    print(program, end="")
    if not args.request_out:
        print("% request:")
        print("".join(f"% {line}\n" for line in serialize_request(request).splitlines()), end="")
    return 0


# ---------------------------------------------------------------------------


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands must not reset flags already given before the command name
    def default(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=default("json"))
    common.add_argument("--depth-bound", type=int, default=default(None), metavar="N")
    common.add_argument("--max-del-repair", type=int, default=default(4), metavar="K")
    common.add_argument("--trace-sld", action="store_true", default=default(False))
    common.add_argument("--trace-tableau", action="store_true", default=default(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags(suppress=True)
    parser = argparse.ArgumentParser(prog="hornbase", parents=[_common_flags(suppress=False)],
                                     description="Deductive database with view updates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="parse and check a database")
    p.add_argument("db")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("model", parents=[common], help="print the least model")
    p.add_argument("db")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("query", parents=[common], help="test entailment of a ground atom")
    p.add_argument("db")
    p.add_argument("atom")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("update", parents=[common], help="translate a view-update request")
    p.add_argument("db")
    p.add_argument("request", help="request file, '-' for stdin, or inline text")
    p.add_argument("--algo", choices=tuple(ALGORITHMS), default="min")
    p.set_defaults(func=cmd_update)

    p = sub.add_parser("compare", parents=[common], help="run both update algorithms")
    p.add_argument("db")
    p.add_argument("request")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("revise", parents=[common], help="revise the database by an atom")
    p.add_argument("db")
    p.add_argument("atom")
    p.add_argument("--all", action="store_true", help="enumerate every repair choice")
    p.set_defaults(func=cmd_revise)

    p = sub.add_parser("check-postulates", parents=[common],
                       help="check the revision postulates for a revision result")
    p.add_argument("db")
    p.add_argument("atom")
    p.add_argument("--result", help="revised database (default: run 'revise')")
    p.set_defaults(func=cmd_check_postulates)

    p = sub.add_parser("apply", parents=[common], help="write a database with a solution applied")
    p.add_argument("db")
    p.add_argument("solutions", help="JSON from 'update', or '-' for stdin")
    p.add_argument("index", type=int)
    p.add_argument("out")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("gen", parents=[common], help="print a random database and request")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--request-out", metavar="PATH")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HornbaseError as e:
        print(f"hornbase: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
