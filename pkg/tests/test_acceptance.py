"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line verdict that is printed in the terminal summary.
"""
import itertools
import json
import random
import time

from hornbase.abduction import explanations, kernels, locally_minimal_explanations
from hornbase.cli import main
from hornbase.core import base_herbrand_base
from hornbase.generate import SMALL, chain_kb, random_instance, random_kb
from hornbase.hitting_sets import is_hitting_set, is_minimal_hitting_set, minimal_hitting_sets
from hornbase.revision import (POSTULATES, Alpha, check_postulates, generalized_revision,
                               rational_revisions, revision_reviser)
from hornbase.semantics import least_model
from hornbase.tableaux import (MATERIALIZED, MINIMALITY, branch_hitting_set,
                               build_update_tableau, edb_cuts, strong_minimality_filter)
from hornbase.text_format import parse_atom, parse_request, read_program
from hornbase.view_update import Transaction, apply_transaction, view_update

import oracles
from conftest import DATA, record

DB = str(DATA / "staff.ddb")
ORACLE_SEEDS = range(200)
POSTULATE_SEEDS = range(100)
CORE = POSTULATES[:8]


def _staff():
    kb = read_program(DB)
    ins = parse_request((DATA / "staff_insert.txt").read_text(), kb)
    dele = parse_request((DATA / "staff_delete.txt").read_text(), kb)
    return kb, ins, dele


def test_criterion_1_staff_insertion(capsys):
    started = time.perf_counter()
    code = main(["update", "--algo=min", DB, str(DATA / "staff_insert.txt")])
    elapsed = time.perf_counter() - started
    solutions = json.loads(capsys.readouterr().out)["solutions"]
    smallest = min(len(s["insert"]) + len(s["delete"]) for s in solutions)
    minimum = [s for s in solutions if len(s["insert"]) + len(s["delete"]) == smallest]
    case_one = {"insert": ["group_chair(infor1,gerhard)"],
                "delete": ["group_chair(infor1,matthias)", "group_chair(infor2,gerhard)"]}
    untouched = not any("staff_group(delhibabu,infor1)" in s["insert"] + s["delete"]
                        for s in solutions)
    ok = (code == 0
          and minimum == [{"insert": ["staff_group(aravindan,infor2)"], "delete": []}]
          and case_one in solutions and untouched and elapsed < 1.0)
    record(1, ok, f"{len(solutions)} solutions, minimum {minimum}, {elapsed * 1000:.0f} ms")
    assert ok


def test_criterion_2_staff_deletion():
    kb, _, request = _staff()
    found = set(view_update(kb, request).transactions)
    expected = {Transaction(t_del=frozenset({parse_atom("staff_group(delhibabu,infor1)")})),
                Transaction(t_del=frozenset({parse_atom("group_chair(infor1,matthias)")}))}
    # any valid deletion must break the single derivation, so size 2 bounds the search
    oracle = {Transaction(i, d)
              for i, d in oracles.minimal_updates(kb, (), request.deletions, limit=2)}
    ok = found == expected == oracle
    record(2, ok, f"engine {sorted(map(str, found))}, oracle {sorted(map(str, oracle))}")
    assert ok


def test_criterion_3_oracle_equivalence():
    started = time.perf_counter()
    mismatches = []
    for seed in ORACLE_SEEDS:
        kb, request = random_instance(seed)
        engine = {(t.t_ins, t.t_del) for t in view_update(kb, request).transactions}
        oracle = oracles.minimal_updates(kb, request.insertions, request.deletions)
        if engine != oracle:
            mismatches.append(seed)
    elapsed = time.perf_counter() - started
    ok = not mismatches and elapsed < 60
    record(3, ok, f"{len(ORACLE_SEEDS) - len(mismatches)}/{len(ORACLE_SEEDS)} agree, "
                  f"{elapsed:.1f} s, mismatching seeds {mismatches}")
    assert ok


def _kb6_skip_is_justified(kb, verdict):
    return verdict == "pass" or (verdict.startswith("skipped") and len(base_herbrand_base(kb)) > 12)


def test_criterion_4_postulate_suites():
    failures = {"revision": [], "minimality": [], "materialized": []}
    checked = dict.fromkeys(failures, 0)
    for seed in POSTULATE_SEEDS:
        kb, request = random_instance(seed)
        alpha = random.Random(seed).choice(sorted(base_herbrand_base(kb)))
        out = generalized_revision(kb, alpha)
        report = check_postulates(kb, alpha, out.kb_prime, revision_reviser)
        checked["revision"] += 1
        if report.failures(CORE + ("KB*7.3",)) or not _kb6_skip_is_justified(
                kb, report.verdicts["KB*6"]):
            failures["revision"].append((seed, report.failures()))
        for mode, relevance in ((MINIMALITY, "KB*7.1"), (MATERIALIZED, "KB*7.3")):
            for t in view_update(kb, request, mode).transactions:
                checked[mode] += 1
                alpha_t = Alpha(request.insertions | t.t_ins, request.deletions)
                report = check_postulates(kb, alpha_t, apply_transaction(kb, t),
                                          rational_revisions)
                if report.failures(CORE + (relevance,)) or not _kb6_skip_is_justified(
                        kb, report.verdicts["KB*6"]):
                    failures[mode].append((seed, str(t), report.failures()))
    ok = not any(failures.values())
    record(4, ok, ", ".join(f"{k}: {checked[k]} checked, {len(v)} failed"
                            for k, v in failures.items()))
    assert ok, failures


def _tableau_inputs():
    """Every deletion goal whose tableau criteria 1 to 4 build."""
    kb, _, dele = _staff()
    yield kb, sorted(dele.deletions)
    for seed in ORACLE_SEEDS:
        kb, request = random_instance(seed)
        yield kb, sorted(request.deletions)


def test_criterion_5_structural_properties():
    problems = []

    # kernels restricted to facts are exactly the local explanations
    kernel_checks = 0
    for seed in range(500):
        kb = random_kb(random.Random(seed), SMALL, consistent=False)
        for goal in sorted(least_model(kb)):
            kernel_checks += 1
            from_kernels = {frozenset(c.head for c in k if not c.body)
                            for k in kernels(kb, goal)}
            lme = {e.delta_plus | e.delta_minus for e in locally_minimal_explanations(kb, goal)}
            if from_kernels != lme:
                problems.append(("kernel correspondence", seed, str(goal)))

    # cut supersets and branch hitting sets on every update tableau
    tableaux = 0
    for kb, goals in _tableau_inputs():
        for goal in goals:
            s = explanations(kb, goal)
            union = frozenset().union(*(e.delta_plus
                                        for e in locally_minimal_explanations(kb, goal)))
            for mode in (MINIMALITY, MATERIALIZED):
                tab = build_update_tableau(kb, goal, mode)
                tableaux += 1
                cuts = set(edb_cuts(tab, kb))
                if not (set(s) <= cuts and all(any(d <= c for d in s) for c in cuts)):
                    problems.append(("cut superset", mode, str(goal)))
                if mode == MATERIALIZED and not all(c <= union for c in cuts):
                    problems.append(("cut containment", str(goal)))
                if not all(is_hitting_set(branch_hitting_set(b, kb), s)
                           for b in tab.open_branches()):
                    problems.append(("branch hits explanations", mode, str(goal)))
                if mode == MINIMALITY:
                    kept = strong_minimality_filter(tab, kb, goal).open_branches()
                    if not all(is_minimal_hitting_set(branch_hitting_set(b, kb), s)
                               for b in kept):
                        problems.append(("branch hits minimally", str(goal)))

    # hitting sets are unchanged by redundant members
    rng = random.Random(0)
    for _ in range(500):
        s = [frozenset(rng.sample(range(10), rng.randint(1, 4))) for _ in range(rng.randint(1, 5))]
        universe = sorted(set().union(*s))
        supersets = [m | frozenset(rng.sample(range(12), rng.randint(0, 3))) for m in s]
        if minimal_hitting_sets(s) != minimal_hitting_sets(s + supersets):
            problems.append(("redundant supersets", s))
        inside = [m | frozenset(rng.sample(universe, rng.randint(0, len(universe)))) for m in s]
        for k in range(len(universe) + 1):
            for h in itertools.combinations(universe, k):
                if is_hitting_set(h, s) != is_hitting_set(h, s + inside):
                    problems.append(("contained supersets", s))

    ok = not problems
    record(5, ok, f"{kernel_checks} kernel checks, {tableaux} tableaux, 500 family pairs, "
                  f"{len(problems)} failures")
    assert ok, problems[:5]


def test_criterion_6_chain_scaling():
    sizes = (10, 20, 40, 80)
    times = []
    for n in sizes:
        kb = chain_kb(n)
        request = parse_request(f"- p{n}.", kb)
        best = float("inf")
        for _ in range(3):
            started = time.perf_counter()
            result = view_update(kb, request, MATERIALIZED)
            best = min(best, time.perf_counter() - started)
        assert len(result.transactions) == 1
        times.append(best)
    factors = [b / a for a, b in zip(times, times[1:])]
    ok = all(f < 10 for f in factors)
    record(6, ok, "times " + ", ".join(f"n={n}: {t * 1000:.1f} ms" for n, t in zip(sizes, times))
           + "; growth " + ", ".join(f"{f:.2f}" for f in factors))
    assert ok


def _families_up_to_relabeling(max_members=3, universe=10):
    """One family per isomorphism class: element counts per Venn region."""
    for k in range(max_members + 1):
        regions = [r for r in itertools.product((0, 1), repeat=k) if any(r)]
        for total in range(universe + 1):
            for split in itertools.combinations_with_replacement(range(len(regions)), total):
                members = [set() for _ in range(k)]
                for element, region in enumerate(split):
                    for i, inside in enumerate(regions[region]):
                        if inside:
                            members[i].add(element)
                yield [frozenset(m) for m in members]


def test_criterion_7_hitting_sets():
    mismatches, exhaustive = [], 0
    for family in _families_up_to_relabeling():
        exhaustive += 1
        if set(minimal_hitting_sets(family)) != oracles.hitting_sets(family):
            mismatches.append(family)
    rng = random.Random(7)
    for _ in range(1000):
        family = [frozenset(rng.sample(range(10), rng.randint(0, 10)))
                  for _ in range(rng.randint(4, 6))]
        if set(minimal_hitting_sets(family)) != oracles.hitting_sets(family):
            mismatches.append(family)
    ok = not mismatches
    record(7, ok, f"{exhaustive} families exhaustive (3 members, 10 elements, up to relabeling)"
                  f" + 1000 sampled, {len(mismatches)} mismatches")
    assert ok, mismatches[:3]

