"""Finite algebras presented by dense operation tables.

Elements of a size-m universe are the integers 0..m-1.  A k-ary operation
is stored as a flat tuple of m**k values in row-major order with the first
argument most significant: the argument tuple (a_1, ..., a_k) lives at
index sum(a_i * m**(k-i)).

Algebras are described by a small line-oriented text format (UTF-8, '#'
starts a comment anywhere on a line):

    algebra <name>
    size <m>
    op <name> <arity>
    <m**arity integers, whitespace separated, may span lines>
    ...
    designate <role> <opname>

Roles are plus, times, zero, one, malcev, or chi<element>.  Operation
names match [a-zA-Z][a-zA-Z0-9_]* and must not look like a variable
token (x1, x2, ...).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Callable, Iterator

from .errors import AlgebraFormatError, InputError

OP_NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")
VAR_TOKEN_RE = re.compile(r"x[0-9]+\Z")

ROLE_RE = re.compile(r"plus\Z|times\Z|zero\Z|one\Z|malcev\Z|chi[0-9]+\Z")


def valid_op_name(name: str) -> bool:
    return bool(OP_NAME_RE.match(name)) and not VAR_TOKEN_RE.match(name)


@dataclass(frozen=True)
class OperationSymbol:
    """A named operation slot: just a name and an arity."""

    name: str
    arity: int

    def __post_init__(self):
        if not valid_op_name(self.name):
            raise InputError(f"invalid operation name {self.name!r}")
        if self.arity < 0:
            raise InputError(f"operation {self.name!r} has negative arity")


@dataclass(frozen=True)
class OpTable:
    """A concrete k-ary operation on {0..m-1} as a flat value tuple."""

    m: int
    arity: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.m < 1:
            raise InputError("universe size must be at least 1")
        if self.arity < 0:
            raise InputError("arity must be nonnegative")
        if len(self.values) != self.m**self.arity:
            raise InputError(
                f"table needs {self.m ** self.arity} values, got {len(self.values)}"
            )
        for v in self.values:
            if not (0 <= v < self.m):
                raise InputError(f"table value {v} outside universe 0..{self.m - 1}")

    @classmethod
    def from_function(cls, m: int, arity: int, fn: Callable[..., int]) -> "OpTable":
        values = tuple(fn(*args) for args in product(range(m), repeat=arity))
        return cls(m, arity, values)

    @classmethod
    def projection(cls, m: int, arity: int, index: int) -> "OpTable":
        """The arity-ary projection onto argument `index` (1-based)."""
        if not (1 <= index <= arity):
            raise InputError(f"projection index {index} outside 1..{arity}")
        return cls.from_function(m, arity, lambda *args: args[index - 1])

    def index(self, args: tuple[int, ...]) -> int:
        idx = 0
        for a in args:
            idx = idx * self.m + a
        return idx

    def apply(self, *args: int) -> int:
        if len(args) != self.arity:
            raise InputError(f"expected {self.arity} arguments, got {len(args)}")
        return self.values[self.index(args)]

    def tuples(self) -> Iterator[tuple[int, ...]]:
        """All argument tuples in table order (first argument most significant)."""
        return product(range(self.m), repeat=self.arity)

    def is_constant(self) -> bool:
        first = self.values[0]
        return all(v == first for v in self.values)


@dataclass
class FiniteAlgebra:
    """A finite universe together with named basic operations.

    Treated as immutable after construction; helpers hand out views, never
    mutate.  `designations` optionally tags operations with the roles the
    synthesis and Mal'cev machinery look for.
    """

    name: str
    m: int
    operations: tuple[tuple[OperationSymbol, OpTable], ...]
    designations: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.m < 1:
            raise InputError("universe size must be at least 1")
        seen = set()
        for sym, table in self.operations:
            if sym.name in seen:
                raise InputError(f"duplicate operation name {sym.name!r}")
            seen.add(sym.name)
            if table.m != self.m or table.arity != sym.arity:
                raise InputError(f"table for {sym.name!r} does not match its symbol")
        for role, target in self.designations.items():
            self._check_role(role)
            if target not in seen:
                raise InputError(f"designation {role!r} names unknown operation {target!r}")

    def _check_role(self, role: str) -> None:
        if not ROLE_RE.match(role):
            raise InputError(f"unknown designation role {role!r}")
        if role.startswith("chi"):
            element = int(role[3:])
            if element >= self.m:
                raise InputError(f"role {role!r} names element outside universe")

    @cached_property
    def _by_name(self) -> dict[str, tuple[OperationSymbol, OpTable]]:
        return {sym.name: (sym, table) for sym, table in self.operations}

    def operation(self, name: str) -> tuple[OperationSymbol, OpTable]:
        try:
            return self._by_name[name]
        except KeyError:
            raise InputError(f"algebra {self.name!r} has no operation {name!r}") from None

    def has_operation(self, name: str) -> bool:
        return name in self._by_name

    def designated(self, role: str) -> tuple[OperationSymbol, OpTable] | None:
        target = self.designations.get(role)
        return self.operation(target) if target is not None else None

    @property
    def symbol_count(self) -> int:
        return len(self.operations)

    @property
    def max_arity(self) -> int:
        return max((sym.arity for sym, _ in self.operations), default=0)


def with_constants(algebra: FiniteAlgebra) -> FiniteAlgebra:
    """Expand an algebra by one nullary operation per element.

    Terms over the expansion induce exactly the polynomial operations of
    the original algebra.  Generated names are c0, c1, ... prefixed with
    as many extra 'c's as needed to dodge existing operation names.
    """
    taken = {sym.name for sym, _ in algebra.operations}
    prefix = "c"
    while any(f"{prefix}{v}" in taken for v in range(algebra.m)):
        prefix = "c" + prefix
    extra = tuple(
        (OperationSymbol(f"{prefix}{v}", 0), OpTable(algebra.m, 0, (v,)))
        for v in range(algebra.m)
    )
    return FiniteAlgebra(
        name=f"{algebra.name}+constants",
        m=algebra.m,
        operations=algebra.operations + extra,
        designations=dict(algebra.designations),
    )


class _TokenCursor:
    """Whitespace tokens with their 1-based source lines."""

    def __init__(self, text: str):
        self._items: list[tuple[str, int]] = []
        for lineno, line in enumerate(text.splitlines(), 1):
            body = line.split("#", 1)[0]
            for token in body.split():
                self._items.append((token, lineno))
        self._pos = 0
        self._last_line = self._items[-1][1] if self._items else 1

    def done(self) -> bool:
        return self._pos >= len(self._items)

    def peek_line(self) -> int:
        if self.done():
            return self._last_line
        return self._items[self._pos][1]

    def next(self, expected: str) -> tuple[str, int]:
        if self.done():
            raise AlgebraFormatError(f"unexpected end of input, expected {expected}", self._last_line)
        item = self._items[self._pos]
        self._pos += 1
        return item

    def next_int(self, expected: str) -> tuple[int, int]:
        token, line = self.next(expected)
        try:
            return int(token, 10), line
        except ValueError:
            raise AlgebraFormatError(f"expected {expected}, got {token!r}", line) from None


def parse_algebra(text: str) -> FiniteAlgebra:
    """Parse the text format described in the module docstring."""
    cursor = _TokenCursor(text)

    keyword, line = cursor.next("'algebra <name>' header")
    if keyword != "algebra":
        raise AlgebraFormatError(f"expected 'algebra <name>' header, got {keyword!r}", line)
    name, _ = cursor.next("algebra name")

    keyword, line = cursor.next("'size <m>'")
    if keyword != "size":
        raise AlgebraFormatError(f"expected 'size <m>', got {keyword!r}", line)
    m, line = cursor.next_int("universe size")
    if m < 1:
        raise AlgebraFormatError(f"universe size must be at least 1, got {m}", line)

    operations: list[tuple[OperationSymbol, OpTable]] = []
    names: set[str] = set()
    designations: dict[str, str] = {}
    designation_lines: dict[str, int] = {}

    while not cursor.done():
        keyword, line = cursor.next("'op' or 'designate'")
        if keyword == "op":
            op_name, nline = cursor.next("operation name")
            if not valid_op_name(op_name):
                raise AlgebraFormatError(f"invalid operation name {op_name!r}", nline)
            if op_name in names:
                raise AlgebraFormatError(f"duplicate operation {op_name!r}", nline)
            arity, aline = cursor.next_int(f"arity of {op_name!r}")
            if arity < 0:
                raise AlgebraFormatError(f"arity of {op_name!r} must be nonnegative", aline)
            count = m**arity
            values = []
            for i in range(count):
                value, vline = cursor.next_int(
                    f"value {i + 1} of {count} for operation {op_name!r}"
                )
                if not (0 <= value < m):
                    raise AlgebraFormatError(
                        f"value {value} for {op_name!r} outside universe 0..{m - 1}", vline
                    )
                values.append(value)
            names.add(op_name)
            operations.append(
                (OperationSymbol(op_name, arity), OpTable(m, arity, tuple(values)))
            )
        elif keyword == "designate":
            role, rline = cursor.next("designation role")
            if not ROLE_RE.match(role):
                raise AlgebraFormatError(f"unknown designation role {role!r}", rline)
            if role.startswith("chi") and int(role[3:]) >= m:
                raise AlgebraFormatError(f"role {role!r} names element outside universe", rline)
            if role in designations:
                raise AlgebraFormatError(f"duplicate designation for role {role!r}", rline)
            target, tline = cursor.next("designated operation name")
            designations[role] = target
            designation_lines[role] = tline
        else:
            raise AlgebraFormatError(f"expected 'op' or 'designate', got {keyword!r}", line)

    for role, target in designations.items():
        if target not in names:
            raise AlgebraFormatError(
                f"designation {role!r} names unknown operation {target!r}",
                designation_lines[role],
            )

    return FiniteAlgebra(name=name, m=m, operations=tuple(operations), designations=designations)
