"""Clone closure engine against independent brute-force oracles.

The oracles here recompute everything from scratch with different
algorithms: a table-set fixpoint with no layer bookkeeping, and direct
enumeration of syntax trees by height and by exact length.  The engine
must agree with them on small instances.
"""

import itertools

import pytest

from clonelab.algebra import parse_algebra
from clonelab.clone import (
    assign_min_lengths,
    clone_equality,
    close_by_height,
    complexity_sequences,
    verify_general_bounds,
)
from clonelab.corpus import load_builtin
from clonelab.errors import BudgetExceededError, InputError
from clonelab.terms import App, Var, induced_table, parse_term, print_term, term_metrics

Z2 = load_builtin("z2-plus")
Z3 = load_builtin("z3-plus")
ANDNOT = load_builtin("bool-andnot")
SEMI = load_builtin("semilattice2")
MAJ = load_builtin("z2-plus-maj")


# ------------------------------------------------------------- oracles


def oracle_closure(algebra, n):
    """Fixpoint of composition over value tuples; no layers, no terms."""
    m = algebra.m
    size = m**n
    tables = set()
    for i in range(n):
        args = list(itertools.product(range(m), repeat=n))
        tables.add(tuple(a[i] for a in args))
    changed = True
    while changed:
        changed = False
        snapshot = list(tables)
        for _sym, table in algebra.operations:
            if table.arity == 0:
                candidate = (table.values[0],) * size
                if candidate not in tables:
                    tables.add(candidate)
                    changed = True
                continue
            for combo in itertools.product(snapshot, repeat=table.arity):
                candidate = []
                for cell in range(size):
                    idx = 0
                    for child in combo:
                        idx = idx * m + child[cell]
                    candidate.append(table.values[idx])
                candidate = tuple(candidate)
                if candidate not in tables:
                    tables.add(candidate)
                    changed = True
    return tables


def oracle_terms_by_height(algebra, n, max_height):
    """All terms of height <= max_height, grouped by exact height."""
    exact = {0: [Var(i) for i in range(1, n + 1)]}
    for h in range(1, max_height + 1):
        level = []
        lower = [t for hh in range(h) for t in exact[hh]]
        previous = exact[h - 1]
        for sym, table in algebra.operations:
            if table.arity == 0:
                if h == 1:
                    level.append(App(sym, ()))
                continue
            for children in itertools.product(lower, repeat=table.arity):
                if any(c in previous for c in children):
                    allowed = True
                else:
                    allowed = False
                if allowed and max(
                    0 if isinstance(c, Var) else term_metrics(c)[1] for c in children
                ) == h - 1:
                    level.append(App(sym, children))
        exact[h] = level
    return exact


def oracle_min_heights(algebra, n, max_height):
    seen = {}
    exact = oracle_terms_by_height(algebra, n, max_height)
    for h in range(max_height + 1):
        for t in exact[h]:
            key = induced_table(algebra, t, n).values
            seen.setdefault(key, h)
    return seen


def oracle_min_lengths(algebra, n, max_length):
    """All terms of each exact length; first length wins per table."""
    by_length = {1: [Var(i) for i in range(1, n + 1)]}
    for sym, table in algebra.operations:
        if table.arity == 0:
            by_length[1].append(App(sym, ()))
    for length in range(2, max_length + 1):
        level = []
        for sym, table in algebra.operations:
            k = table.arity
            if k == 0:
                continue

            def splits(total, parts):
                if parts == 1:
                    if total in by_length:
                        yield (total,)
                    return
                for first in range(1, total - parts + 2):
                    if first not in by_length:
                        continue
                    for rest in splits(total - first, parts - 1):
                        yield (first,) + rest

            for shape in splits(length - 1, k):
                for children in itertools.product(
                    *(by_length[piece] for piece in shape)
                ):
                    level.append(App(sym, children))
        by_length[length] = level
    seen = {}
    for length in range(1, max_length + 1):
        for t in by_length.get(length, []):
            key = induced_table(algebra, t, n).values
            seen.setdefault(key, length)
    return seen


# ------------------------------------------------------- closure engine


@pytest.mark.parametrize(
    "algebra,n",
    [(Z2, 1), (Z2, 2), (Z2, 3), (Z3, 1), (Z3, 2), (ANDNOT, 1), (ANDNOT, 2), (SEMI, 1), (SEMI, 3), (MAJ, 2), (MAJ, 3)],
)
def test_closure_matches_fixpoint_oracle(algebra, n):
    clone = close_by_height(algebra, n)
    assert clone.complete
    assert set(clone.entries) == oracle_closure(algebra, n)


@pytest.mark.parametrize("algebra,n,h", [(Z2, 2, 3), (ANDNOT, 1, 3), (SEMI, 2, 3), (Z3, 1, 3)])
def test_layers_match_syntactic_min_height(algebra, n, h):
    clone = close_by_height(algebra, n)
    oracle = oracle_min_heights(algebra, n, h)
    for key, entry in clone.entries.items():
        if entry.layer <= h:
            assert oracle[key] == entry.layer, key
        else:
            assert key not in oracle or oracle[key] > h


def test_entry_terms_induce_their_tables():
    clone = close_by_height(ANDNOT, 2)
    for key, entry in clone.entries.items():
        assert induced_table(ANDNOT, entry.min_height_term, 2).values == key
        _, height = term_metrics(entry.min_height_term)
        assert height == entry.layer


@pytest.mark.parametrize(
    "algebra,n,cap",
    [(Z2, 1, 5), (Z2, 2, 5), (SEMI, 2, 5), (ANDNOT, 1, 6)],
)
def test_min_lengths_match_syntactic_enumeration(algebra, n, cap):
    clone = close_by_height(algebra, n)
    assign_min_lengths(algebra, clone)
    oracle = oracle_min_lengths(algebra, n, cap)
    for key, entry in clone.entries.items():
        if entry.min_length <= cap:
            assert oracle[key] == entry.min_length, key
        else:
            assert key not in oracle
        got = induced_table(algebra, entry.min_length_term, n)
        assert got.values == key
        length, _ = term_metrics(entry.min_length_term)
        assert length == entry.min_length


def test_min_length_term_height_never_below_layer():
    clone = close_by_height(Z3, 2)
    assign_min_lengths(Z3, clone)
    for entry in clone.entries.values():
        assert entry.layer <= entry.min_length


def test_budget_abort_marks_incomplete():
    clone = close_by_height(ANDNOT, 3, budget=10)
    assert not clone.complete
    assert len(clone.entries) >= 10
    with pytest.raises(BudgetExceededError):
        assign_min_lengths(ANDNOT, clone)


def test_stop_predicate_halts_early():
    hits = []

    def stop(entry):
        hits.append(entry.table)
        return len(hits) == 3

    clone = close_by_height(ANDNOT, 2, stop=stop)
    assert not clone.complete
    assert len(hits) == 3


def test_projections_seed_layer_zero():
    clone = close_by_height(Z2, 3)
    for i in range(1, 4):
        key = induced_table(Z2, Var(i), 3).values
        assert clone.entries[key].layer == 0
        assert print_term(clone.entries[key].min_height_term) == f"x{i}"


def test_nullary_ops_enter_at_height_one():
    alg = parse_algebra("algebra c\nsize 2\nop one 0\n 1\nop and 2\n 0 0\n 0 1\n")
    clone = close_by_height(alg, 1)
    const1 = (1, 1)
    assert clone.entries[const1].layer == 1
    assert print_term(clone.entries[const1].min_height_term) == "one"


def test_representatives_are_deterministic():
    a = close_by_height(MAJ, 3)
    b = close_by_height(MAJ, 3)
    assert set(a.entries) == set(b.entries)
    for key in a.entries:
        assert print_term(a.entries[key].min_height_term) == print_term(
            b.entries[key].min_height_term
        )
    assign_min_lengths(MAJ, a)
    assign_min_lengths(MAJ, b)
    for key in a.entries:
        assert print_term(a.entries[key].min_length_term) == print_term(
            b.entries[key].min_length_term
        )


# ------------------------------------------------------- sequences, bounds


def test_z2_sequences_frozen_values():
    rows = complexity_sequences(Z2, 4)
    assert [r.fs for r in rows] == [2, 4, 8, 16]
    assert [r.ht for r in rows] == [1, 1, 2, 2]
    assert [r.len for r in rows] == [3, 3, 5, 7]


def test_sequences_incomplete_rows_carry_budget():
    rows = complexity_sequences(ANDNOT, 3, budget=20)
    assert rows[-1].complete is False
    assert rows[-1].budget == 20
    assert rows[-1].entries_found >= 20


def test_bounds_records_all_pass():
    report = verify_general_bounds(Z3, 3)
    assert report.all_passed
    assert [rec.n for rec in report.records] == [1, 2, 3]
    for rec in report.records:
        names = [c.name for c in rec.checks]
        assert names == [
            "fs < (n+r+1)^len",
            "ht <= fs",
            "ht <= len",
            "len <= 1+mbar+...+mbar^ht",
        ]
        for check in rec.checks:
            assert check.passed
    assert report.symbol_count == 1
    assert report.max_arity_of_ops == 2


def test_bounds_exact_integers_match_direct_computation():
    report = verify_general_bounds(Z2, 4)
    rec = {r.n: r for r in report.records}
    # n = 3: fs < (3+1+1)^5 and len 5 <= 1 + 2 + 4
    row = rec[3]
    assert row.checks[0].rhs == 5**5
    assert row.checks[3].rhs == 7
    assert rec[4].checks[0].rhs == 6**7


# ------------------------------------------------------------ equivalence


def test_equiv_reflexive_ratios_one():
    rep = clone_equality(Z2, Z2, 3)
    assert rep.status == "equivalent"
    assert rep.ht_ratio_min == 1.0
    assert rep.ht_ratio_max == 1.0
    assert all(row["passed"] for row in rep.length_relation_rows)


def test_equiv_z2_vs_maj_ratios_within_two():
    rep = clone_equality(Z2, MAJ, 4)
    assert rep.status == "equivalent"
    assert rep.ht_a == [1, 1, 2, 2]
    assert rep.ht_b == [1, 1, 1, 2]
    assert 1.0 <= rep.ht_ratio_min <= rep.ht_ratio_max <= 2.0
    assert all(row["passed"] for row in rep.length_relation_rows)


def test_equiv_negative_reports_every_disagreeing_arity():
    only3 = load_builtin("z2-ternary-only")
    rep = clone_equality(Z2, only3, 2)
    assert rep.status == "not-equivalent"
    assert rep.first_disagreement == 1
    by_n = {d.n: d for d in rep.disagreements}
    # parity of two variables is unreachable with a ternary-only signature
    assert (0, 1, 1, 0) in by_n[2].only_in_a
    assert by_n[2].only_in_b == []
    assert rep.witness.side == "a"
    assert rep.witness.n == 1
    table = induced_table(Z2, parse_term(rep.witness.term, Z2), rep.witness.n)
    assert table.values == rep.witness.table


def test_equiv_universe_mismatch():
    with pytest.raises(InputError):
        clone_equality(Z2, Z3, 2)


def test_equiv_inconclusive_on_budget():
    rep = clone_equality(ANDNOT, ANDNOT, 3, budget=10)
    assert rep.status == "inconclusive"
    assert 3 in rep.incomplete
