"""Terms over an operation signature, and their interpretation.

A term is a variable x1, x2, ... (1-based) or an operation symbol applied
to child terms.  Terms are immutable; equal subtrees may be shared, so
every traversal here memoizes on node identity.  That keeps metrics and
evaluation linear in the number of distinct nodes even for terms whose
written-out length is exponential.

Length counts every symbol occurrence (a variable or a nullary symbol has
length 1); height is the longest chain of operation applications (a
variable has height 0, a bare nullary symbol height 1).
"""

from __future__ import annotations

from typing import Sequence, Union

from .algebra import FiniteAlgebra, OperationSymbol, OpTable, VAR_TOKEN_RE, valid_op_name
from .errors import EvaluationError, InputError, SubstitutionError, TermSyntaxError


class Var:
    __slots__ = ("index", "_hash")

    def __init__(self, index: int):
        if index < 1:
            raise InputError(f"variable index must be at least 1, got {index}")
        self.index = index
        self._hash = hash(("x", index))

    def __repr__(self):
        return f"Var({self.index})"

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Var) and other.index == self.index


class App:
    __slots__ = ("symbol", "children", "_hash")

    def __init__(self, symbol: OperationSymbol, children: Sequence["Term"]):
        children = tuple(children)
        if len(children) != symbol.arity:
            raise InputError(
                f"operation {symbol.name!r} has arity {symbol.arity}, got {len(children)} children"
            )
        self.symbol = symbol
        self.children = children
        self._hash = hash((symbol.name, symbol.arity, tuple(c._hash for c in children)))

    def __repr__(self):
        return f"App({self.symbol.name}, {self.children!r})"

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, App) or other._hash != self._hash:
            return False
        if other.symbol != self.symbol or len(other.children) != len(self.children):
            return False
        for a, b in zip(self.children, other.children):
            if a is not b and a != b:
                return False
        return True


Term = Union[Var, App]


def term_metrics(term: Term) -> tuple[int, int]:
    """Return (length, height) of a term, sharing-aware."""
    memo: dict[int, tuple[int, int]] = {}

    def walk(node: Term) -> tuple[int, int]:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Var):
            result = (1, 0)
        else:
            length = 1
            height = 0
            for child in node.children:
                cl, ch = walk(child)
                length += cl
                height = max(height, ch)
            result = (length, height + 1)
        memo[id(node)] = result
        return result

    return walk(term)


def max_var_index(term: Term) -> int:
    """Largest variable index occurring in the term; 0 if none occur."""
    memo: dict[int, int] = {}

    def walk(node: Term) -> int:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Var):
            result = node.index
        else:
            result = max((walk(c) for c in node.children), default=0)
        memo[id(node)] = result
        return result

    return walk(term)


def substitute(term: Term, subs: Sequence[Term]) -> Term:
    """Replace x_i by subs[i-1] throughout, preserving sharing."""
    subs = tuple(subs)
    memo: dict[int, Term] = {}

    def walk(node: Term) -> Term:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Var):
            if node.index > len(subs):
                raise SubstitutionError(
                    f"variable x{node.index} has no substitute (only {len(subs)} given)"
                )
            result = subs[node.index - 1]
        else:
            children = tuple(walk(c) for c in node.children)
            if all(a is b for a, b in zip(children, node.children)):
                result = node
            else:
                result = App(node.symbol, children)
        memo[id(node)] = result
        return result

    return walk(term)


def _resolve(algebra: FiniteAlgebra, symbol: OperationSymbol) -> OpTable:
    sym, table = algebra.operation(symbol.name)
    if sym.arity != symbol.arity:
        raise EvaluationError(
            f"term uses {symbol.name!r} with arity {symbol.arity}, "
            f"algebra {algebra.name!r} defines arity {sym.arity}"
        )
    return table


def evaluate(algebra: FiniteAlgebra, term: Term, assignment: Sequence[int]) -> int:
    """Evaluate a term under an assignment for x1..xn (0-based sequence)."""
    m = algebra.m
    for v in assignment:
        if not (0 <= v < m):
            raise EvaluationError(f"assignment value {v} outside universe 0..{m - 1}")
    memo: dict[int, int] = {}
    tables: dict[str, tuple[int, ...]] = {}

    def walk(node: Term) -> int:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Var):
            if node.index > len(assignment):
                raise EvaluationError(
                    f"assignment covers {len(assignment)} variables, term uses x{node.index}"
                )
            result = assignment[node.index - 1]
        else:
            values = tables.get(node.symbol.name)
            if values is None:
                values = _resolve(algebra, node.symbol).values
                tables[node.symbol.name] = values
            idx = 0
            for child in node.children:
                idx = idx * m + walk(child)
            result = values[idx]
        memo[id(node)] = result
        return result

    return walk(term)


def induced_table(algebra: FiniteAlgebra, term: Term, arity: int) -> OpTable:
    """The arity-ary operation a term induces on the algebra.

    Computed compositionally: each node gets its full value vector over
    all m**arity assignments, so the cost is (distinct nodes) * m**arity
    rather than (tree length) * m**arity.
    """
    if arity < 0:
        raise InputError("arity must be nonnegative")
    m = algebra.m
    size = m**arity
    memo: dict[int, tuple[int, ...]] = {}
    projections: dict[int, tuple[int, ...]] = {}

    def projection(i: int) -> tuple[int, ...]:
        vec = projections.get(i)
        if vec is None:
            stride = m ** (arity - i)
            vec = tuple((idx // stride) % m for idx in range(size))
            projections[i] = vec
        return vec

    def walk(node: Term) -> tuple[int, ...]:
        got = memo.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Var):
            if node.index > arity:
                raise EvaluationError(
                    f"term uses x{node.index} but an arity-{arity} table was requested"
                )
            result = projection(node.index)
        else:
            values = _resolve(algebra, node.symbol).values
            vecs = [walk(c) for c in node.children]
            if not vecs:
                result = (values[0],) * size
            elif len(vecs) == 1:
                a = vecs[0]
                result = tuple(values[x] for x in a)
            elif len(vecs) == 2:
                a, b = vecs
                result = tuple(values[x * m + y] for x, y in zip(a, b))
            else:
                out = []
                for idx in range(size):
                    pos = 0
                    for vec in vecs:
                        pos = pos * m + vec[idx]
                    out.append(values[pos])
                result = tuple(out)
        memo[id(node)] = result
        return result

    return OpTable(m, arity, walk(term))


def parse_term(text: str, algebra: FiniteAlgebra) -> Term:
    """Parse an S-expression term like (plus (plus x1 x2) x3).

    Variables are x1, x2, ...; nullary operations may be written bare or
    as (name).  Symbols must resolve in the algebra with matching arity.
    """
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def fail(message: str) -> TermSyntaxError:
        return TermSyntaxError(f"{message} in term {text!r}")

    def next_token() -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise fail("unexpected end of input")
        token = tokens[pos]
        pos += 1
        return token

    def atom(token: str, applied: bool, child_count: int | None) -> Term:
        if VAR_TOKEN_RE.match(token):
            index = int(token[1:], 10)
            if index < 1:
                raise fail(f"variable token {token!r} must have index at least 1")
            if applied:
                raise fail(f"variable {token!r} cannot take arguments")
            return Var(index)
        if not valid_op_name(token):
            raise fail(f"invalid token {token!r}")
        if not algebra.has_operation(token):
            raise fail(f"unknown operation {token!r}")
        sym, _ = algebra.operation(token)
        got = child_count if child_count is not None else 0
        if sym.arity != got:
            raise fail(f"operation {token!r} has arity {sym.arity}, got {got} arguments")
        return App(sym, ())

    def expr() -> Term:
        token = next_token()
        if token == ")":
            raise fail("unexpected ')'")
        if token != "(":
            return atom(token, applied=False, child_count=None)
        head = next_token()
        if head in ("(", ")"):
            raise fail("expected an operation name after '('")
        children: list[Term] = []
        while True:
            if pos >= len(tokens):
                raise fail("missing ')'")
            if tokens[pos] == ")":
                next_token()
                break
            children.append(expr())
        if VAR_TOKEN_RE.match(head):
            raise fail(f"variable {head!r} cannot take arguments")
        if not valid_op_name(head):
            raise fail(f"invalid token {head!r}")
        if not algebra.has_operation(head):
            raise fail(f"unknown operation {head!r}")
        sym, _ = algebra.operation(head)
        if sym.arity != len(children):
            raise fail(
                f"operation {head!r} has arity {sym.arity}, got {len(children)} arguments"
            )
        return App(sym, children)

    term = expr()
    if pos != len(tokens):
        raise fail(f"trailing input starting at {tokens[pos]!r}")
    return term


def print_term(term: Term) -> str:
    """Canonical S-expression text; bare names for nullary symbols."""
    parts: list[str] = []

    def walk(node: Term) -> None:
        if isinstance(node, Var):
            parts.append(f"x{node.index}")
        elif not node.children:
            parts.append(node.symbol.name)
        else:
            parts.append(f"({node.symbol.name}")
            for child in node.children:
                parts.append(" ")
                walk(child)
            parts.append(")")

    walk(term)
    return "".join(parts)
