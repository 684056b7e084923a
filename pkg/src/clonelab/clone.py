"""Clone enumeration by height layers, with complexity bookkeeping.

For an algebra A and an arity n, the n-ary term operations are generated
as a layered closure: layer 0 holds the projections, and each sweep adds
every basic operation applied to already-known tables.  A table's layer is
therefore the minimal height of a term inducing it, and the closure is
complete exactly when a sweep adds nothing new.

Determinism: each sweep iterates basic operations in declaration order and
child tuples in lexicographic order of the children's value tuples, so the
first term producing a table is canonical.  Budgets count distinct stored
tables; running out aborts the sweep and leaves an honestly incomplete
table, never a silently truncated one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable

from .algebra import FiniteAlgebra, OpTable
from .errors import BudgetExceededError, InputError, MathInvariantError
from .terms import App, Term, Var, print_term

Key = tuple[int, ...]

DEFAULT_BUDGET = 20000


@dataclass
class CloneEntry:
    """One n-ary term operation: its table and cheapest known terms."""

    table: OpTable
    layer: int
    min_height_term: Term
    min_length: int | None = None
    min_length_term: Term | None = None

    @property
    def min_height(self) -> int:
        return self.layer


@dataclass
class CloneTable:
    """All n-ary term operations found for one algebra and arity."""

    algebra_name: str
    m: int
    arity: int
    entries: dict[Key, CloneEntry]
    complete: bool
    budget: int
    sweeps: int

    @property
    def fs(self) -> int:
        """Number of distinct term operations found."""
        return len(self.entries)

    @property
    def ht(self) -> int:
        """Largest minimal height over the found operations."""
        return max(entry.layer for entry in self.entries.values())

    @property
    def len(self) -> int:
        """Largest minimal length; requires assign_min_lengths first."""
        worst = 0
        for entry in self.entries.values():
            if entry.min_length is None:
                raise InputError("minimal lengths not assigned yet")
            worst = max(worst, entry.min_length)
        return worst

    def lookup(self, table: OpTable) -> CloneEntry | None:
        if table.m != self.m or table.arity != self.arity:
            return None
        return self.entries.get(table.values)

    def __contains__(self, table: OpTable) -> bool:
        return self.lookup(table) is not None


def _compose(values: tuple[int, ...], children: list[Key], m: int, size: int) -> Key:
    """Apply a basic operation pointwise to child value vectors."""
    if len(children) == 1:
        (a,) = children
        return tuple(values[x] for x in a)
    if len(children) == 2:
        a, b = children
        return tuple(values[x * m + y] for x, y in zip(a, b))
    out = []
    for i in range(size):
        idx = 0
        for child in children:
            idx = idx * m + child[i]
        out.append(values[idx])
    return tuple(out)


def close_by_height(
    algebra: FiniteAlgebra,
    arity: int,
    budget: int = DEFAULT_BUDGET,
    *,
    stop: Callable[[CloneEntry], bool] | None = None,
) -> CloneTable:
    """Layered closure of the projections under the basic operations.

    `stop` is an advanced hook: it sees every entry the moment it is
    stored, in canonical discovery order, and a truthy return halts the
    closure early (the result is then flagged incomplete).  The Mal'cev
    search uses it to stop at the first matching table.
    """
    if arity < 1:
        raise InputError(f"arity must be at least 1, got {arity}")
    if budget < arity:
        raise InputError(f"budget {budget} cannot even hold the {arity} projections")

    m = algebra.m
    size = m**arity
    entries: dict[Key, CloneEntry] = {}
    stopped = False

    for i in range(1, arity + 1):
        key = OpTable.projection(m, arity, i).values
        if key not in entries:
            entry = CloneEntry(OpTable(m, arity, key), 0, Var(i))
            entries[key] = entry
            if stop is not None and not stopped and stop(entry):
                stopped = True

    frontier = set(entries)
    complete = False
    sweeps = 0

    while frontier and not stopped:
        base = sorted(entries)
        base_terms = {key: entries[key].min_height_term for key in base}
        sweeps += 1
        added: list[Key] = []
        aborted = False

        for sym, table in algebra.operations:
            k = sym.arity
            if k == 0:
                combos: Iterable[tuple[Key, ...]] = [()] if sweeps == 1 else []
            else:
                combos = product(base, repeat=k)
            for combo in combos:
                if k > 0 and not any(c in frontier for c in combo):
                    continue
                if k == 0:
                    key = (table.values[0],) * size
                else:
                    key = _compose(table.values, [c for c in combo], m, size)
                if key in entries:
                    continue
                if len(entries) >= budget:
                    aborted = True
                    break
                term = App(sym, tuple(base_terms[c] for c in combo))
                entry = CloneEntry(OpTable(m, arity, key), sweeps, term)
                entries[key] = entry
                added.append(key)
                if stop is not None and stop(entry):
                    stopped = True
                    break
            if aborted or stopped:
                break

        if aborted or stopped:
            complete = False
            break
        frontier = set(added)
        if not frontier:
            complete = True
            break
    else:
        if not stopped:
            complete = True

    return CloneTable(
        algebra_name=algebra.name,
        m=m,
        arity=arity,
        entries=entries,
        complete=complete,
        budget=budget,
        sweeps=sweeps,
    )


def assign_min_lengths(algebra: FiniteAlgebra, clone: CloneTable) -> CloneTable:
    """Fill in minimal term lengths for every entry of a complete clone.

    Dynamic program over total length: length-1 terms are variables and
    bare nullary symbols; a length-L term applies a basic operation to
    minimal representatives whose lengths sum to L-1.  Ties break the same
    way as the height closure: operations in declaration order, child
    tuples lexicographic by value tuple.
    """
    if not clone.complete:
        raise BudgetExceededError(
            f"minimal lengths need a complete clone (algebra {clone.algebra_name!r}, "
            f"arity {clone.arity}, budget {clone.budget})"
        )

    m = algebra.m
    arity = clone.arity
    size = m**arity
    entries = clone.entries

    length_of: dict[Key, int] = {}
    by_length: dict[int, list[Key]] = {}
    assigned = 0

    def assign(key: Key, length: int, term: Term) -> None:
        nonlocal assigned
        entry = entries[key]
        entry.min_length = length
        entry.min_length_term = term
        length_of[key] = length
        by_length.setdefault(length, []).append(key)
        assigned += 1

    for i in range(1, arity + 1):
        key = OpTable.projection(m, arity, i).values
        if key not in length_of:
            assign(key, 1, Var(i))
    for sym, table in algebra.operations:
        if sym.arity == 0:
            key = (table.values[0],) * size
            if key in entries and key not in length_of:
                assign(key, 1, App(sym, ()))

    positive_ops = [(sym, table) for sym, table in algebra.operations if sym.arity > 0]
    total = len(entries)
    length = 1
    while assigned < total:
        length += 1
        current_max = max(by_length) if by_length else 0
        if length > 1 + algebra.max_arity * current_max:
            raise MathInvariantError(
                f"length assignment stalled at {assigned}/{total} entries "
                f"(arity {arity}, algebra {clone.algebra_name!r})"
            )
        base = sorted(length_of)
        target = length - 1
        for sym, table in positive_ops:
            k = sym.arity
            values = table.values

            def enumerate_tuples(prefix: list[Key], remaining: int, slots: int) -> None:
                if slots == 1:
                    bucket = by_length.get(remaining)
                    if not bucket:
                        return
                    for last in sorted(bucket):
                        combo = prefix + [last]
                        key = _compose(values, combo, m, size)
                        if key not in length_of:
                            term = App(
                                sym,
                                tuple(entries[c].min_length_term for c in combo),
                            )
                            assign(key, length, term)
                    return
                for child in base:
                    rest = remaining - length_of[child]
                    if rest < slots - 1:
                        continue
                    enumerate_tuples(prefix + [child], rest, slots - 1)

            if k <= target:
                enumerate_tuples([], target, k)

    for key, entry in entries.items():
        if entry.layer > entry.min_length:
            raise MathInvariantError(
                f"minimal height {entry.layer} exceeds minimal length {entry.min_length} "
                f"for a table at arity {arity}"
            )
    return clone


@dataclass
class SequenceRow:
    """Complexity data for one arity; incomplete rows carry no numbers."""

    n: int
    complete: bool
    fs: int | None = None
    ht: int | None = None
    len: int | None = None
    entries_found: int | None = None
    budget: int | None = None


def _assert_standing_bounds(algebra: FiniteAlgebra, row: SequenceRow) -> None:
    """Inequalities every complete computation must satisfy."""
    n, fs, ht, length = row.n, row.fs, row.ht, row.len
    r = algebra.symbol_count
    mbar = algebra.max_arity
    checks = [
        (fs < (n + r + 1) ** length, f"fs {fs} < (n+r+1)^len {(n + r + 1) ** length}"),
        (ht <= fs, f"ht {ht} <= fs {fs}"),
        (ht <= length, f"ht {ht} <= len {length}"),
        (
            length <= sum(mbar**i for i in range(ht + 1)),
            f"len {length} <= geometric sum of max-arity powers up to ht {ht}",
        ),
    ]
    for ok, text in checks:
        if not ok:
            raise MathInvariantError(
                f"standing bound violated for {algebra.name!r} at n={n}: {text}"
            )


def complexity_sequences(
    algebra: FiniteAlgebra, max_arity: int, budget: int = DEFAULT_BUDGET
) -> list[SequenceRow]:
    """fs/ht/len for n = 1..max_arity; incomplete closures yield markers."""
    if max_arity < 1:
        raise InputError(f"max arity must be at least 1, got {max_arity}")
    rows = []
    for n in range(1, max_arity + 1):
        clone = close_by_height(algebra, n, budget)
        if not clone.complete:
            rows.append(
                SequenceRow(
                    n=n, complete=False, entries_found=len(clone.entries), budget=budget
                )
            )
            continue
        assign_min_lengths(algebra, clone)
        row = SequenceRow(n=n, complete=True, fs=clone.fs, ht=clone.ht, len=clone.len)
        _assert_standing_bounds(algebra, row)
        rows.append(row)
    return rows


@dataclass
class BoundRow:
    name: str
    lhs: int
    rhs: int
    passed: bool


@dataclass
class BoundsRecord:
    """One arity's sequence values plus its four inequality checks."""

    n: int
    fs: int
    ht: int
    len: int
    checks: list[BoundRow]


@dataclass
class BoundsReport:
    """Exact integer checks of the general complexity inequalities."""

    algebra_name: str
    symbol_count: int
    max_arity_of_ops: int
    records: list[BoundsRecord] = field(default_factory=list)
    incomplete: list[int] = field(default_factory=list)
    notes: tuple[str, ...] = (
        "the logarithmic form of the counting bound is implied by the "
        "first check and is not checked separately",
    )

    @property
    def all_passed(self) -> bool:
        return all(row.passed for rec in self.records for row in rec.checks)


def verify_general_bounds(
    algebra: FiniteAlgebra, max_arity: int, budget: int = DEFAULT_BUDGET
) -> BoundsReport:
    """Check the four general inequalities with exact integers per arity."""
    report = BoundsReport(
        algebra_name=algebra.name,
        symbol_count=algebra.symbol_count,
        max_arity_of_ops=algebra.max_arity,
    )
    r = algebra.symbol_count
    mbar = algebra.max_arity
    for row in complexity_sequences(algebra, max_arity, budget):
        if not row.complete:
            report.incomplete.append(row.n)
            continue
        n, fs, ht, length = row.n, row.fs, row.ht, row.len
        geometric = sum(mbar**i for i in range(ht + 1))
        checks = [
            BoundRow("fs < (n+r+1)^len", fs, (n + r + 1) ** length, fs < (n + r + 1) ** length),
            BoundRow("ht <= fs", ht, fs, ht <= fs),
            BoundRow("ht <= len", ht, length, ht <= length),
            BoundRow("len <= 1+mbar+...+mbar^ht", length, geometric, length <= geometric),
        ]
        report.records.append(BoundsRecord(n=n, fs=fs, ht=ht, len=length, checks=checks))
    return report


@dataclass
class EquivalenceWitness:
    """A table present in exactly one of two clones at the same arity."""

    n: int
    side: str
    table: tuple[int, ...]
    term: str


@dataclass
class ArityDisagreement:
    """Tables one clone has and the other lacks, at one arity."""

    n: int
    only_in_a: list[tuple[int, ...]]
    only_in_b: list[tuple[int, ...]]


@dataclass
class EquivalenceReport:
    algebra_a: str
    algebra_b: str
    max_arity: int
    status: str  # "equivalent" | "not-equivalent" | "inconclusive"
    first_disagreement: int | None = None
    witness: EquivalenceWitness | None = None
    disagreements: list[ArityDisagreement] = field(default_factory=list)
    incomplete: list[int] = field(default_factory=list)
    ht_a: list[int] = field(default_factory=list)
    ht_b: list[int] = field(default_factory=list)
    ht_ratio_min: float | None = None
    ht_ratio_max: float | None = None
    length_relation_d: float | None = None
    length_relation_rows: list[dict] = field(default_factory=list)


def clone_equality(
    algebra_a: FiniteAlgebra,
    algebra_b: FiniteAlgebra,
    max_arity: int,
    budget: int = DEFAULT_BUDGET,
) -> EquivalenceReport:
    """Compare the n-ary term operations of two same-universe algebras.

    Every arity up to max_arity is compared, so the report lists all
    disagreeing arities with their one-sided table sets, not just the
    first. The canonical witness is the lexicographically least missing
    table at the smallest disagreeing arity, taken from side a when both
    sides have extras. Equal clones everywhere yield the observed min/max
    ratios of the worst minimal heights and an empirical length relation
    derived from them.
    """
    if algebra_a.m != algebra_b.m:
        raise InputError(
            f"universes differ: {algebra_a.name!r} has size {algebra_a.m}, "
            f"{algebra_b.name!r} has size {algebra_b.m}"
        )
    report = EquivalenceReport(
        algebra_a=algebra_a.name,
        algebra_b=algebra_b.name,
        max_arity=max_arity,
        status="equivalent",
    )
    clones_a = []
    clones_b = []
    for n in range(1, max_arity + 1):
        ca = close_by_height(algebra_a, n, budget)
        cb = close_by_height(algebra_b, n, budget)
        if not (ca.complete and cb.complete):
            report.incomplete.append(n)
            continue
        if set(ca.entries) != set(cb.entries):
            only_a = sorted(set(ca.entries) - set(cb.entries))
            only_b = sorted(set(cb.entries) - set(ca.entries))
            report.disagreements.append(ArityDisagreement(n, only_a, only_b))
            if report.witness is None:
                if only_a:
                    report.witness = EquivalenceWitness(
                        n, "a", only_a[0], print_term(ca.entries[only_a[0]].min_height_term)
                    )
                else:
                    report.witness = EquivalenceWitness(
                        n, "b", only_b[0], print_term(cb.entries[only_b[0]].min_height_term)
                    )
            continue
        clones_a.append(ca)
        clones_b.append(cb)

    if report.disagreements:
        # A completed arity that differs settles the question even if some
        # other arity ran out of budget.
        report.status = "not-equivalent"
        report.first_disagreement = report.disagreements[0].n
        return report
    if report.incomplete:
        report.status = "inconclusive"
        return report

    ratios = []
    for ca, cb in zip(clones_a, clones_b):
        ht_a, ht_b = ca.ht, cb.ht
        report.ht_a.append(ht_a)
        report.ht_b.append(ht_b)
        if ht_a == 0 and ht_b == 0:
            ratios.append(1.0)
        elif ht_b == 0 or ht_a == 0:
            raise MathInvariantError(
                "equal clones disagree on whether any non-projection exists"
            )
        else:
            ratios.append(ht_a / ht_b)
    report.ht_ratio_min = min(ratios)
    report.ht_ratio_max = max(ratios)

    d = report.ht_ratio_max * math.log2(algebra_a.max_arity + 1)
    report.length_relation_d = d
    for ca, cb in zip(clones_a, clones_b):
        assign_min_lengths(algebra_a, ca)
        assign_min_lengths(algebra_b, cb)
        len_a, len_b = ca.len, cb.len
        bound = 2.0 ** (d * len_b)
        report.length_relation_rows.append(
            {
                "n": ca.arity,
                "len_a": len_a,
                "len_b": len_b,
                "bound": bound,
                "passed": len_a <= bound,
            }
        )
    return report
