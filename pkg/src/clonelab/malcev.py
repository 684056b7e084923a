"""Mal'cev machinery: difference-style terms and what they buy.

A Mal'cev term q satisfies q(x,y,y) = x = q(y,y,x).  From one such term
this module derives, entirely constructively:

  - iterated cube terms q_n of arity 2^n - 1, whose defining identities
    let the all-real value of an operation be recovered from mixed
    real/fresh values;
  - a supernilpotency checker that tests those identities over every
    polynomial operation of a given arity;
  - a rewriter that flattens any term to logarithmic height by grouping
    variables and applying the cube identity, with a per-run height
    certificate;
  - a decomposition of high-arity operations into low-arity generators;
  - the chain terms whose induced operations depend on all arguments,
    giving the linear lower bound on minimal length.

The bit convention used throughout: argument j of q_n (j = 0..2^n-2)
takes the real value in component i exactly when bit i-1 of j is set,
and the fresh value otherwise; the omitted all-real index 2^n - 1 is the
right-hand side.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import product

from .algebra import FiniteAlgebra, OpTable, with_constants
from .clone import DEFAULT_BUDGET, close_by_height
from .errors import (
    BudgetExceededError,
    InputError,
    MalcevUnavailableError,
    MathInvariantError,
    MismatchError,
)
from .terms import (
    App,
    Term,
    Var,
    evaluate,
    induced_table,
    max_var_index,
    substitute,
    term_metrics,
)

# Above this table size the cube term is evaluated per instance instead
# of being precomputed as one big table.
_CUBE_TABLE_CAP = 1 << 20


def is_malcev_table(table: OpTable) -> bool:
    if table.arity != 3:
        return False
    m = table.m
    for x in range(m):
        for y in range(m):
            if table.values[table.index((x, y, y))] != x:
                return False
            if table.values[table.index((y, y, x))] != x:
                return False
    return True


@dataclass(frozen=True)
class MalcevCertificate:
    term: Term
    height: int


@dataclass
class MalcevSearchResult:
    """Three-valued search outcome over the ternary clone."""

    status: str  # "found" | "none" | "inconclusive"
    certificate: MalcevCertificate | None
    clone_complete: bool
    clone_size: int
    budget: int


def find_malcev_term(algebra: FiniteAlgebra, budget: int = DEFAULT_BUDGET) -> MalcevSearchResult:
    """Scan the ternary clone in height order for a Mal'cev table.

    The closure's canonical insertion order makes the first hit the
    minimal-height certificate; "none" is reported only after the full
    closure completed without one.
    """
    hits: list = []

    def stop(entry) -> bool:
        if is_malcev_table(entry.table):
            hits.append(entry)
            return True
        return False

    clone = close_by_height(algebra, 3, budget, stop=stop)
    if hits:
        entry = hits[0]
        cert = MalcevCertificate(term=entry.min_height_term, height=entry.layer)
        return MalcevSearchResult("found", cert, clone.complete, len(clone.entries), budget)
    if clone.complete:
        return MalcevSearchResult("none", None, True, len(clone.entries), budget)
    return MalcevSearchResult("inconclusive", None, False, len(clone.entries), budget)


def require_malcev(algebra: FiniteAlgebra, budget: int = DEFAULT_BUDGET) -> MalcevCertificate:
    """Designated Mal'cev operation if present and valid, else search."""
    designated = algebra.designated("malcev")
    if designated is not None:
        sym, table = designated
        if sym.arity != 3:
            raise InputError(
                f"designated malcev operation {sym.name!r} has arity {sym.arity}, need 3"
            )
        if not is_malcev_table(table):
            raise InputError(
                f"designated malcev operation {sym.name!r} violates the defining identities"
            )
        return MalcevCertificate(term=App(sym, (Var(1), Var(2), Var(3))), height=1)
    result = find_malcev_term(algebra, budget)
    if result.status == "found":
        return result.certificate
    if result.status == "none":
        raise MalcevUnavailableError(
            f"{algebra.name!r} has no Mal'cev term "
            f"(complete ternary clone of {result.clone_size} operations searched)"
        )
    raise BudgetExceededError(
        f"Mal'cev search on {algebra.name!r} inconclusive at budget {budget} "
        f"({result.clone_size} tables found)"
    )


@dataclass(frozen=True)
class CubeTerm:
    n: int
    term: Term
    built_from: MalcevCertificate
    height: int

    @property
    def arity(self) -> int:
        return 2**self.n - 1


def build_cube_term(algebra: FiniteAlgebra, q: MalcevCertificate, n: int) -> CubeTerm:
    """Iterate the argument-swapped Mal'cev term into a cube term.

    q_2 is q with its first two arguments exchanged; each further level
    wraps two shifted copies around one fresh middle variable, doubling
    the argument count plus one.  The level-2 identities are re-checked
    on the induced table, and the height growth bound is asserted.
    """
    if n < 2:
        raise InputError(f"cube terms start at level 2, got {n}")
    q2 = substitute(q.term, [Var(2), Var(1), Var(3)])

    q2_table = induced_table(algebra, q2, 3)
    m = algebra.m
    for x in range(m):
        for y in range(m):
            if q2_table.values[q2_table.index((x, x, y))] != y:
                raise MathInvariantError(
                    f"cube identity q2(x,x,y) = y fails at x = {x}, y = {y}"
                )
            if q2_table.values[q2_table.index((x, y, x))] != y:
                raise MathInvariantError(
                    f"cube identity q2(x,y,x) = y fails at x = {x}, y = {y}"
                )

    term = q2
    for level in range(3, n + 1):
        prev_arity = 2 ** (level - 1) - 1
        left = term
        right = substitute(term, [Var(prev_arity + 1 + i) for i in range(1, prev_arity + 1)])
        term = substitute(q2, [left, Var(prev_arity + 1), right])

    height = term_metrics(term)[1]
    q2_height = term_metrics(q2)[1]
    if height > (n - 1) * q2_height:
        raise MathInvariantError(
            f"cube height {height} exceeds ({n}-1) * {q2_height}"
        )
    if max_var_index(term) != 2**n - 1:
        raise MathInvariantError(
            f"cube term at level {n} uses {max_var_index(term)} variables, expected {2**n - 1}"
        )
    return CubeTerm(n=n, term=term, built_from=q, height=height)


@dataclass(frozen=True)
class SpnWitness:
    table: tuple[int, ...]
    a: tuple[int, ...]
    b: tuple[int, ...]
    lhs: int
    rhs: int


@dataclass
class SpnVerdict:
    degree: int
    holds: bool | None  # None when the polynomial enumeration was cut short
    witness: SpnWitness | None
    ops_enumerated: int
    instances_checked: int
    complete: bool


def check_supernilpotent(
    algebra: FiniteAlgebra, k: int, budget: int = DEFAULT_BUDGET
) -> SpnVerdict:
    """Test the degree-k cube identity over all (k+1)-ary polynomials.

    Polynomial operations are the clone of the constant expansion;
    deduplicating terms by induced table is enough because the identity
    only reads tables.  Operations are scanned in sorted table order and
    argument pairs lexicographically, so a failure witness is canonical.
    """
    if k < 1:
        raise InputError(f"supernilpotency degree must be at least 1, got {k}")
    q = require_malcev(algebra, budget)
    cube = build_cube_term(algebra, q, k + 1)
    width = k + 1
    cube_arity = 2**width - 1
    m = algebra.m

    poly = close_by_height(with_constants(algebra), width, budget)
    if not poly.complete:
        return SpnVerdict(
            degree=k,
            holds=None,
            witness=None,
            ops_enumerated=len(poly.entries),
            instances_checked=0,
            complete=False,
        )

    cube_values = None
    if m**cube_arity <= _CUBE_TABLE_CAP:
        cube_values = induced_table(algebra, cube.term, cube_arity).values

    def cube_apply(args: list[int]) -> int:
        if cube_values is not None:
            idx = 0
            for v in args:
                idx = idx * m + v
            return cube_values[idx]
        return evaluate(algebra, cube.term, args)

    def t_index(tup: tuple[int, ...]) -> int:
        idx = 0
        for v in tup:
            idx = idx * m + v
        return idx

    instances = 0
    for key in sorted(poly.entries):
        for pair in product(range(m), repeat=2 * width):
            a = pair[:width]
            b = pair[width:]
            args = []
            for j in range(cube_arity):
                w = tuple(b[i] if (j >> i) & 1 else a[i] for i in range(width))
                args.append(key[t_index(w)])
            lhs = cube_apply(args)
            rhs = key[t_index(b)]
            instances += 1
            if lhs != rhs:
                return SpnVerdict(
                    degree=k,
                    holds=False,
                    witness=SpnWitness(table=key, a=a, b=b, lhs=lhs, rhs=rhs),
                    ops_enumerated=len(poly.entries),
                    instances_checked=instances,
                    complete=True,
                )
    return SpnVerdict(
        degree=k,
        holds=True,
        witness=None,
        ops_enumerated=len(poly.entries),
        instances_checked=instances,
        complete=True,
    )


@dataclass(frozen=True)
class VariableGrouping:
    """Consecutive split of variables into k nearly equal groups."""

    groups: tuple[tuple[int, ...], ...]

    @classmethod
    def split(cls, variables: list[int], k: int) -> "VariableGrouping":
        n = len(variables)
        if k < 1 or k > n:
            raise InputError(f"cannot split {n} variables into {k} groups")
        q, r = divmod(n, k)
        groups = []
        pos = 0
        for g in range(k):
            size = q + 1 if g < r else q
            groups.append(tuple(variables[pos : pos + size]))
            pos += size
        return cls(groups=tuple(groups))


@dataclass
class RewriteCertificate:
    n: int
    k: int
    epsilon: float
    c: float
    base_arity: int
    cube_height: int
    base_worst_height: int
    input_height: int
    output_height: int
    bound: float
    nodes_expanded: int
    memo_hits: int
    verified: str


@dataclass
class RewriteResult:
    term: Term
    certificate: RewriteCertificate


def _parse_verify(mode: str) -> tuple[str, int]:
    if mode == "none" or mode == "exhaustive":
        return mode, 0
    if mode.startswith("sample:"):
        try:
            count = int(mode.split(":", 1)[1])
        except ValueError:
            count = 0
        if count < 1:
            raise InputError(f"bad sample count in verify mode {mode!r}")
        return "sample", count
    raise InputError(f"unknown verify mode {mode!r} (none, exhaustive, sample:N)")


def rewrite_log_height(
    algebra: FiniteAlgebra,
    cube: CubeTerm,
    input_term: Term,
    *,
    base_arity: int | None = None,
    epsilon: float | None = None,
    verify: str = "none",
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> RewriteResult:
    """Flatten a term to logarithmic height via the cube identity.

    Each step splits the live variables into k nearly equal consecutive
    groups and replaces the term by the cube term applied to copies in
    which some groups are overwritten with a single repeated variable
    (the lowest live one; valid because the identity is universally
    quantified).  Sub-problems are memoized on the whole identification
    pattern.  At most base_arity live variables remain: the sub-function
    is tabulated and swapped for its minimal-height clone representative.

    Soundness of the height certificate is enforced two ways: every
    expansion step must shrink the live count by the contraction factor
    c = 1 - 1/k + epsilon, and the final height must meet the
    logarithmic bound.  Verification compares input and output either
    exhaustively or on seeded samples; a mismatch is a constructive
    witness that the assumed supernilpotency degree was wrong.
    """
    k = cube.n
    if epsilon is None:
        epsilon = 1.0 / (2 * k)
    if not 0 < epsilon < 1.0 / k:
        raise InputError(f"epsilon must be in (0, 1/{k}), got {epsilon}")
    n0 = k + 2 if base_arity is None else base_arity
    if n0 < k + 2:
        raise InputError(f"base arity must be at least k+2 = {k + 2}, got {n0}")
    verify_kind, sample_count = _parse_verify(verify)

    c = 1.0 - 1.0 / k + epsilon
    m = algebra.m
    n = max(max_var_index(input_term), 1)

    base_clone = close_by_height(algebra, n0, budget)
    if not base_clone.complete:
        raise BudgetExceededError(
            f"base closure at arity {n0} incomplete at budget {budget}"
        )

    memo: dict[tuple[int, ...], Term] = {}
    stats = {"nodes": 0, "hits": 0}

    def solve(pattern: tuple[int, ...]) -> Term:
        cached = memo.get(pattern)
        if cached is not None:
            stats["hits"] += 1
            return cached
        stats["nodes"] += 1
        live = sorted(set(pattern))
        count = len(live)

        if count <= n0:
            rank = {v: j for j, v in enumerate(live)}
            values = []
            for combo in product(range(m), repeat=n0):
                assignment = [combo[rank[pattern[i]]] for i in range(n)]
                values.append(evaluate(algebra, input_term, assignment))
            entry = base_clone.entries.get(tuple(values))
            if entry is None:
                raise MathInvariantError(
                    "identified sub-function is missing from the complete base clone"
                )
            subs = [Var(live[j]) if j < count else Var(live[0]) for j in range(n0)]
            result = substitute(entry.min_height_term, subs)
            memo[pattern] = result
            return result

        grouping = VariableGrouping.split(live, k)
        group_of = {}
        for g, group in enumerate(grouping.groups):
            for v in group:
                group_of[v] = g
        y = live[0]
        limit = math.floor(c * count + 1e-9)
        children = []
        for j in range(2**k - 1):
            child = tuple(
                v if (j >> group_of[v]) & 1 else y for v in pattern
            )
            child_live = len(set(child))
            if child_live > limit:
                raise MathInvariantError(
                    f"contraction failed: child keeps {child_live} live variables, "
                    f"allowed {limit} at {count}"
                )
            children.append(solve(child))
        result = substitute(cube.term, children)
        memo[pattern] = result
        return result

    output = solve(tuple(range(1, n + 1)))

    input_height = term_metrics(input_term)[1]
    output_height = term_metrics(output)[1]
    log_part = math.log(n) / math.log(1.0 / c) if n > 1 else 0.0
    bound = cube.height * max(0.0, log_part) + base_clone.ht
    if output_height > bound + 1e-9:
        raise MathInvariantError(
            f"rewritten height {output_height} exceeds certificate {bound:.3f}"
        )

    if verify_kind == "exhaustive":
        if m**n > budget:
            raise BudgetExceededError(
                f"exhaustive verification needs m^n = {m**n} evaluations, budget {budget}"
            )
        got = induced_table(algebra, output, n).values
        want = induced_table(algebra, input_term, n).values
        if got != want:
            idx = next(i for i, (g, w) in enumerate(zip(got, want)) if g != w)
            assignment = []
            rest = idx
            for i in range(n):
                power = m ** (n - 1 - i)
                assignment.append(rest // power)
                rest %= power
            raise MismatchError(
                "rewritten term disagrees with input",
                assignment=tuple(assignment),
                expected=want[idx],
                got=got[idx],
            )
        verified = "exhaustive"
    elif verify_kind == "sample":
        rng = random.Random(seed)
        for _ in range(sample_count):
            assignment = [rng.randrange(m) for _ in range(n)]
            want = evaluate(algebra, input_term, assignment)
            got = evaluate(algebra, output, assignment)
            if want != got:
                raise MismatchError(
                    "rewritten term disagrees with input",
                    assignment=tuple(assignment),
                    expected=want,
                    got=got,
                )
        verified = f"sample:{sample_count}"
    else:
        verified = "none"

    certificate = RewriteCertificate(
        n=n,
        k=k,
        epsilon=epsilon,
        c=c,
        base_arity=n0,
        cube_height=cube.height,
        base_worst_height=base_clone.ht,
        input_height=input_height,
        output_height=output_height,
        bound=bound,
        nodes_expanded=stats["nodes"],
        memo_hits=stats["hits"],
        verified=verified,
    )
    return RewriteResult(term=output, certificate=certificate)


def essential_coords(table: OpTable) -> list[int]:
    """1-based coordinates the function actually depends on."""
    m = table.m
    vals = table.values
    coords = []
    for i in range(1, table.arity + 1):
        stride = m ** (table.arity - i)
        block = stride * m
        essential = False
        for base in range(0, len(vals), block):
            for off in range(stride):
                first = vals[base + off]
                if any(vals[base + off + t * stride] != first for t in range(1, m)):
                    essential = True
                    break
            if essential:
                break
        if essential:
            coords.append(i)
    return coords


def essential_arity(table: OpTable) -> int:
    return len(essential_coords(table))


def _project(table: OpTable, coords: list[int]) -> OpTable:
    """Restrict to the given coordinates, pinning the others to 0."""
    m = table.m
    values = []
    for combo in product(range(m), repeat=len(coords)):
        full = [0] * table.arity
        for c, v in zip(coords, combo):
            full[c - 1] = v
        values.append(table.values[table.index(tuple(full))])
    return OpTable(m, len(coords), tuple(values))


def _extend(table: OpTable, arity: int) -> OpTable:
    """Append dummy trailing coordinates up to the requested arity."""
    m = table.m
    shift = m ** (arity - table.arity)
    values = tuple(table.values[i // shift] for i in range(m**arity))
    return OpTable(m, arity, values)


def decompose_generators(
    algebra: FiniteAlgebra,
    q: MalcevCertificate,
    k: int,
    f: OpTable,
    budget: int = DEFAULT_BUDGET,
) -> Term:
    """Express a table through the cube term and low-arity operations.

    Variables are grouped as k singletons plus one tail; the fresh
    variable is the first tail variable, so every cube argument
    identifies at least two positions and strictly loses essential
    arity.  Recursion bottoms out in the complete clone at arity k+1.
    The result is verified exhaustively against the input table.
    """
    if k < 1:
        raise InputError(f"degree must be at least 1, got {k}")
    if f.m != algebra.m:
        raise InputError(f"table universe {f.m} does not match algebra universe {algebra.m}")
    if f.arity < 1:
        raise InputError("decomposition needs a table of arity >= 1")

    cube = build_cube_term(algebra, q, k + 1)
    width = k + 1
    base_clone = close_by_height(algebra, width, budget)
    if not base_clone.complete:
        raise BudgetExceededError(
            f"generator closure at arity {width} incomplete at budget {budget}"
        )
    m = algebra.m

    def lookup_base(table: OpTable, ambient: tuple[int, ...]) -> Term:
        a = table.arity
        extended = table if a == width else _extend(table, width)
        entry = base_clone.entries.get(extended.values)
        if entry is None:
            raise InputError(
                f"table is not a term operation: no arity-{width} representative found"
            )
        anchor = ambient[0] if ambient else 1
        subs = [Var(ambient[j]) if j < a else Var(anchor) for j in range(width)]
        return substitute(entry.min_height_term, subs)

    def decomp(table: OpTable, ambient: tuple[int, ...]) -> Term:
        coords = essential_coords(table)
        if len(coords) < table.arity:
            table = _project(table, coords)
            ambient = tuple(ambient[i - 1] for i in coords)
        a = table.arity
        if a <= width:
            return lookup_base(table, ambient)

        # groups: k singletons then the tail; fresh variable = first tail position
        def group_of(p: int) -> int:
            return p - 1 if p <= k else k

        fresh = k + 1
        children = []
        for j in range(2**width - 1):
            mapping = [
                p if (j >> group_of(p)) & 1 else fresh for p in range(1, a + 1)
            ]
            values = []
            for combo in product(range(m), repeat=a):
                args = tuple(combo[mapping[p - 1] - 1] for p in range(1, a + 1))
                values.append(table.values[table.index(args)])
            children.append(decomp(OpTable(m, a, tuple(values)), ambient))
        return substitute(cube.term, children)

    result = decomp(f, tuple(range(1, f.arity + 1)))

    got = induced_table(algebra, result, f.arity).values
    if got != f.values:
        idx = next(i for i, (g, w) in enumerate(zip(got, f.values)) if g != w)
        assignment = []
        rest = idx
        for i in range(f.arity):
            power = m ** (f.arity - 1 - i)
            assignment.append(rest // power)
            rest %= power
        raise MismatchError(
            "decomposition disagrees with the input table",
            assignment=tuple(assignment),
            expected=f.values[idx],
            got=got[idx],
        )
    return result


def malcev_chain(q: MalcevCertificate, k: int) -> Term:
    """Nested difference chain of arity 2k+1; depends on every argument."""
    if k < 0:
        raise InputError(f"chain level must be non-negative, got {k}")
    term: Term = Var(1)
    for i in range(1, k + 1):
        term = substitute(q.term, [term, Var(2 * i), Var(2 * i + 1)])
    return term


@dataclass
class CommutatorDemoRecord:
    n: int
    len_commutator_signature: int
    len_expanded: int
    height_commutator: int
    height_expanded: int
    exceeds_power: bool
    samples: int
    agree: bool


def commutator_growth_demo(
    n: int,
    group: FiniteAlgebra,
    commutator: FiniteAlgebra,
    *,
    mul: str = "mul",
    inv: str = "inv",
    comm: str = "comm",
    samples: int = 1000,
    seed: int = 0,
) -> CommutatorDemoRecord:
    """Left-nested commutator chain vs its group-word expansion.

    The chain has linear length in its own signature but the expansion
    through [x,y] = ((x^-1 * y^-1) * x) * y doubles per level; sharing
    the repeated subterm keeps the demo cheap while the measured length
    still counts the full tree.
    """
    if n < 1:
        raise InputError(f"demo needs n >= 1, got {n}")
    if group.m != commutator.m:
        raise InputError("group and commutator algebras have different universes")
    comm_sym = commutator.operation(comm)[0]
    mul_sym = group.operation(mul)[0]
    inv_sym = group.operation(inv)[0]

    chain: Term = Var(1)
    expanded: Term = Var(1)
    for i in range(2, n + 1):
        y = Var(i)
        chain = App(comm_sym, (chain, y))
        expanded = App(
            mul_sym,
            (
                App(
                    mul_sym,
                    (
                        App(mul_sym, (App(inv_sym, (expanded,)), App(inv_sym, (y,)))),
                        expanded,
                    ),
                ),
                y,
            ),
        )

    chain_len, chain_height = term_metrics(chain)
    exp_len, exp_height = term_metrics(expanded)

    rng = random.Random(seed)
    m = group.m
    agree = True
    for _ in range(samples):
        assignment = [rng.randrange(m) for _ in range(n)]
        if evaluate(commutator, chain, assignment) != evaluate(group, expanded, assignment):
            agree = False
            break
    if not agree:
        raise MathInvariantError(
            "commutator chain and its expansion disagree; the generated tables are inconsistent"
        )

    return CommutatorDemoRecord(
        n=n,
        len_commutator_signature=chain_len,
        len_expanded=exp_len,
        height_commutator=chain_height,
        height_expanded=exp_height,
        exceeds_power=exp_len > 2**n,
        samples=samples,
        agree=True,
    )
