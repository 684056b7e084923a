"""Term synthesis over a designated sum/product/indicator basis.

Given designated operations behaving like a disjunction-style sum (unit
element 0), a conjunction-style product (unit 1, absorbing 0) and one
indicator operation per element, any finite operation can be written down
directly: one product summand per argument tuple, folded together with a
balanced sum tree.  The resulting term has height logarithmic in the
table size, and that bound is certified on every synthesis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .algebra import FiniteAlgebra, OperationSymbol, OpTable
from .clone import DEFAULT_BUDGET, close_by_height, assign_min_lengths
from .errors import BasisError, BudgetExceededError, InputError, MathInvariantError
from .terms import App, Term, Var, induced_table, substitute, term_metrics


def _ceil_log2(x: int) -> int:
    if x < 1:
        raise InputError(f"ceil log2 needs a positive integer, got {x}")
    return (x - 1).bit_length()


def build_sigma(symbol: OperationSymbol, n: int) -> Term:
    """Balanced fold of x1..xn under a binary symbol; height ceil(log2 n).

    The left half always takes the extra leaf when n is odd.
    """
    if symbol.arity != 2:
        raise InputError(
            f"balanced fold needs a binary symbol, {symbol.name!r} has arity {symbol.arity}"
        )
    if n < 1:
        raise InputError(f"balanced fold needs n >= 1, got {n}")

    def fold(lo: int, hi: int) -> Term:
        if lo == hi:
            return Var(lo)
        mid = lo + (hi - lo + 2) // 2 - 1
        return App(symbol, (fold(lo, mid), fold(mid + 1, hi)))

    return fold(1, n)


@dataclass(frozen=True)
class PrimalBasis:
    """Validated designations plus the unary constant terms they admit.

    zero and one are universe elements (extracted from the designated
    constant operations); s is the largest minimal height among the
    per-element constant terms.
    """

    algebra: FiniteAlgebra
    plus: str
    times: str
    chi: tuple[str, ...]
    zero: int
    one: int
    constant_terms: tuple[Term, ...]
    s: int

    def plus_symbol(self) -> OperationSymbol:
        return self.algebra.operation(self.plus)[0]

    def times_symbol(self) -> OperationSymbol:
        return self.algebra.operation(self.times)[0]

    def chi_symbol(self, element: int) -> OperationSymbol:
        return self.algebra.operation(self.chi[element])[0]


def validate_basis(
    algebra: FiniteAlgebra,
    designations: dict[str, str] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> PrimalBasis:
    """Check every basis identity exhaustively and collect constant terms.

    Identity failures name the identity and a witness element.  Constant
    terms come from the minimal-height representatives of the unary
    closure, so the recorded s is as small as the algebra allows.
    """
    roles = algebra.designations if designations is None else designations
    m = algebra.m

    needed = ["plus", "times", "zero", "one"] + [f"chi{a}" for a in range(m)]
    missing = [role for role in needed if role not in roles]
    if missing:
        raise BasisError(f"missing designated roles: {', '.join(missing)}")

    def op_for(role: str) -> tuple[OperationSymbol, OpTable]:
        name = roles[role]
        if not algebra.has_operation(name):
            raise BasisError(f"role {role!r} names unknown operation {name!r}")
        return algebra.operation(name)

    plus_sym, plus_tab = op_for("plus")
    times_sym, times_tab = op_for("times")
    if plus_sym.arity != 2:
        raise BasisError(f"role 'plus' needs a binary operation, {plus_sym.name!r} has arity {plus_sym.arity}")
    if times_sym.arity != 2:
        raise BasisError(f"role 'times' needs a binary operation, {times_sym.name!r} has arity {times_sym.arity}")

    zero_sym, zero_tab = op_for("zero")
    one_sym, one_tab = op_for("one")
    if not zero_tab.is_constant():
        raise BasisError(f"role 'zero' needs a constant operation, {zero_sym.name!r} is not constant")
    if not one_tab.is_constant():
        raise BasisError(f"role 'one' needs a constant operation, {one_sym.name!r} is not constant")
    zero = zero_tab.values[0]
    one = one_tab.values[0]
    if m > 1 and zero == one:
        raise BasisError(f"zero and one designate the same element {zero}")

    chi_names = []
    chi_tabs = []
    for a in range(m):
        sym, tab = op_for(f"chi{a}")
        if sym.arity != 1:
            raise BasisError(
                f"role 'chi{a}' needs a unary operation, {sym.name!r} has arity {sym.arity}"
            )
        chi_names.append(sym.name)
        chi_tabs.append(tab)

    for x in range(m):
        if plus_tab.apply(x, zero) != x:
            raise BasisError(f"identity x+0 = x fails at x = {x} (operation {plus_sym.name!r})")
        if plus_tab.apply(zero, x) != x:
            raise BasisError(f"identity 0+x = x fails at x = {x} (operation {plus_sym.name!r})")
        if times_tab.apply(x, one) != x:
            raise BasisError(f"identity x*1 = x fails at x = {x} (operation {times_sym.name!r})")
        if times_tab.apply(x, zero) != zero:
            raise BasisError(f"identity x*0 = 0 fails at x = {x} (operation {times_sym.name!r})")
        for a in range(m):
            want = one if x == a else zero
            if chi_tabs[a].apply(x) != want:
                raise BasisError(
                    f"indicator identity fails: chi{a}({x}) = {chi_tabs[a].apply(x)}, expected {want}"
                )

    unary = close_by_height(algebra, 1, budget)
    if not unary.complete:
        raise BudgetExceededError(
            f"unary closure of {algebra.name!r} incomplete at budget {budget}; "
            "cannot collect constant terms"
        )
    constant_terms = []
    heights = []
    for v in range(m):
        entry = unary.entries.get((v,) * m)
        if entry is None:
            raise BasisError(
                f"constant {v} is not a unary term operation of {algebra.name!r}"
            )
        constant_terms.append(entry.min_height_term)
        heights.append(entry.layer)

    return PrimalBasis(
        algebra=algebra,
        plus=plus_sym.name,
        times=times_sym.name,
        chi=tuple(chi_names),
        zero=zero,
        one=one,
        constant_terms=tuple(constant_terms),
        s=max(heights),
    )


@dataclass(frozen=True)
class SynthesisResult:
    term: Term
    arity: int
    m: int
    s: int
    height: int
    height_bound: int


def synthesize_term(basis: PrimalBasis, target: OpTable) -> SynthesisResult:
    """Write the target table as a balanced sum of indicator products.

    One summand per argument tuple, in lexicographic tuple order: the
    constant for the target value times the chain of per-argument
    indicator applications (the chain itself associates left, and the
    constant multiplies the whole chain, keeping the summand height at
    1 + max(s, n)).  Exactness and the height bound are asserted, not
    assumed.
    """
    algebra = basis.algebra
    m = algebra.m
    if target.m != m:
        raise InputError(f"target is over universe size {target.m}, basis over {m}")
    n = target.arity
    if n < 1:
        raise InputError(f"synthesis target needs arity >= 1, got {n}")

    plus_sym = basis.plus_symbol()
    times_sym = basis.times_symbol()
    chi_syms = [basis.chi_symbol(a) for a in range(m)]

    chi_apps: dict[tuple[int, int], Term] = {}

    def chi_at(a: int, i: int) -> Term:
        app = chi_apps.get((a, i))
        if app is None:
            app = App(chi_syms[a], (Var(i),))
            chi_apps[(a, i)] = app
        return app

    summands = []
    for row, alpha in enumerate(product(range(m), repeat=n)):
        chain = chi_at(alpha[0], 1)
        for i in range(2, n + 1):
            chain = App(times_sym, (chain, chi_at(alpha[i - 1], i)))
        summands.append(App(times_sym, (basis.constant_terms[target.values[row]], chain)))

    term = substitute(build_sigma(plus_sym, m**n), summands)

    if induced_table(algebra, term, n).values != target.values:
        raise MathInvariantError(
            f"synthesized term does not induce its target (arity {n}, algebra {algebra.name!r})"
        )
    height = term_metrics(term)[1]
    bound = _ceil_log2(m**n) + 1 + max(basis.s, n)
    if height > bound:
        raise MathInvariantError(
            f"synthesized height {height} exceeds its certificate {bound}"
        )
    return SynthesisResult(
        term=term, arity=n, m=m, s=basis.s, height=height, height_bound=bound
    )


@dataclass
class PrimalityRow:
    """Free-spectrum count against the full function count at one arity."""

    n: int
    complete: bool
    fs: int | None = None
    full_count: int | None = None
    primal: bool | None = None
    len: int | None = None
    counting_rhs: int | None = None
    len_lower_bound: int | None = None
    implied_c1: float | None = None
    entries_found: int | None = None
    budget: int | None = None


def primality_probe(
    algebra: FiniteAlgebra, n_max: int, budget: int = DEFAULT_BUDGET
) -> list[PrimalityRow]:
    """Per arity: does the clone exhaust all m^(m^n) operations?

    Complete rows also carry the counting-bound instance: the worst
    minimal length, the smallest length the count forces, and the growth
    exponent that length implies.
    """
    if n_max < 1:
        raise InputError(f"max arity must be at least 1, got {n_max}")
    r = algebra.symbol_count
    m = algebra.m
    rows = []
    for n in range(1, n_max + 1):
        clone = close_by_height(algebra, n, budget)
        if not clone.complete:
            rows.append(
                PrimalityRow(
                    n=n, complete=False, entries_found=len(clone.entries), budget=budget
                )
            )
            continue
        assign_min_lengths(algebra, clone)
        fs = clone.fs
        base = n + r + 1
        lower = 1
        while base**lower <= fs:
            lower += 1
        rows.append(
            PrimalityRow(
                n=n,
                complete=True,
                fs=fs,
                full_count=m ** (m**n),
                primal=fs == m ** (m**n),
                len=clone.len,
                counting_rhs=base ** clone.len,
                len_lower_bound=lower,
                implied_c1=math.log2(lower) / n,
            )
        )
    return rows
