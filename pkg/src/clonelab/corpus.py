"""Built-in example algebras, embedded in the text format.

Every builtin is stored as the same text parse_algebra accepts, so the
corpus doubles as format documentation.  The twelve-element group tables
are generated from permutation composition rather than typed by hand;
everything else is short enough to compute inline too.
"""

from __future__ import annotations

from itertools import permutations

from .algebra import FiniteAlgebra, parse_algebra
from .errors import InputError

Op = tuple[str, int, list[int]]


def _render(name: str, m: int, ops: list[Op], designations: list[tuple[str, str]]) -> str:
    lines = [f"algebra {name}", f"size {m}"]
    for op_name, arity, values in ops:
        lines.append(f"op {op_name} {arity}")
        if arity == 0:
            lines.append(f"  {values[0]}")
        else:
            width = len(str(m - 1))
            for start in range(0, len(values), m):
                cells = " ".join(str(v).rjust(width) for v in values[start : start + m])
                lines.append(f"  {cells}")
    for role, target in designations:
        lines.append(f"designate {role} {target}")
    return "\n".join(lines) + "\n"


def _table(m: int, arity: int, fn) -> list[int]:
    if arity == 0:
        return [fn()]
    if arity == 1:
        return [fn(x) for x in range(m)]
    if arity == 2:
        return [fn(x, y) for x in range(m) for y in range(m)]
    return [fn(x, y, z) for x in range(m) for y in range(m) for z in range(m)]


def _zn_plus(name: str, m: int) -> str:
    return _render(name, m, [("plus", 2, _table(m, 2, lambda x, y: (x + y) % m))], [])


def _z2_plus_maj() -> str:
    ops = [
        ("plus", 2, _table(2, 2, lambda x, y: (x + y) % 2)),
        ("xor3", 3, _table(2, 3, lambda x, y, z: (x + y + z) % 2)),
    ]
    return _render("z2-plus-maj", 2, ops, [("malcev", "xor3")])


def _z2_ternary_only() -> str:
    ops = [("xor3", 3, _table(2, 3, lambda x, y, z: (x + y + z) % 2))]
    return _render("z2-ternary-only", 2, ops, [("malcev", "xor3")])


def _bool_andnot() -> str:
    ops = [
        ("and", 2, _table(2, 2, lambda x, y: x & y)),
        ("not", 1, _table(2, 1, lambda x: 1 - x)),
    ]
    return _render("bool-andnot", 2, ops, [])


def _bool_post() -> str:
    ops = [
        ("or", 2, _table(2, 2, lambda x, y: x | y)),
        ("and", 2, _table(2, 2, lambda x, y: x & y)),
        ("not", 1, _table(2, 1, lambda x: 1 - x)),
        ("id", 1, _table(2, 1, lambda x: x)),
        ("zero", 0, [0]),
        ("one", 0, [1]),
    ]
    desigs = [
        ("plus", "or"),
        ("times", "and"),
        ("chi0", "not"),
        ("chi1", "id"),
        ("zero", "zero"),
        ("one", "one"),
    ]
    return _render("bool-post", 2, ops, desigs)


def _semilattice2() -> str:
    return _render("semilattice2", 2, [("and", 2, _table(2, 2, lambda x, y: x & y))], [])


def _three_post() -> str:
    ops = [
        ("max", 2, _table(3, 2, max)),
        ("mult", 2, _table(3, 2, lambda x, y: (x * y) % 3)),
        ("chi0", 1, _table(3, 1, lambda x: 1 if x == 0 else 0)),
        ("chi1", 1, _table(3, 1, lambda x: 1 if x == 1 else 0)),
        ("chi2", 1, _table(3, 1, lambda x: 1 if x == 2 else 0)),
        ("zero", 0, [0]),
        ("one", 0, [1]),
        ("two", 0, [2]),
    ]
    desigs = [
        ("plus", "max"),
        ("times", "mult"),
        ("chi0", "chi0"),
        ("chi1", "chi1"),
        ("chi2", "chi2"),
        ("zero", "zero"),
        ("one", "one"),
    ]
    return _render("three-post", 3, ops, desigs)


def _z4_plus_one_2xy() -> str:
    ops = [
        ("plus", 2, _table(4, 2, lambda x, y: (x + y) % 4)),
        ("one", 0, [1]),
        ("twoxy", 2, _table(4, 2, lambda x, y: (2 * x * y) % 4)),
    ]
    return _render("z4-plus-one-2xy", 4, ops, [])


def _even_permutations() -> list[tuple[int, ...]]:
    perms = []
    for p in permutations(range(4)):
        inversions = sum(
            1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j]
        )
        if inversions % 2 == 0:
            perms.append(p)
    return perms  # lexicographic, identity first


def _a4_tables() -> tuple[list[int], list[int], list[list[int]]]:
    perms = _even_permutations()
    index = {p: i for i, p in enumerate(perms)}

    def compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(p[q[x]] for x in range(4))

    mul = [[index[compose(perms[i], perms[j])] for j in range(12)] for i in range(12)]
    inv = [0] * 12
    for i, p in enumerate(perms):
        q = [0] * 4
        for x in range(4):
            q[p[x]] = x
        inv[i] = index[tuple(q)]
    flat_mul = [mul[i][j] for i in range(12) for j in range(12)]
    return flat_mul, inv, mul


def _a4_group() -> str:
    flat_mul, inv, _ = _a4_tables()
    ops = [("mul", 2, flat_mul), ("inv", 1, inv), ("one", 0, [0])]
    return _render("a4-group", 12, ops, [])


def _a4_commutator() -> str:
    flat_mul, inv, mul = _a4_tables()

    def comm(i: int, j: int) -> int:
        return mul[mul[mul[inv[i]][inv[j]]][i]][j]

    ops = [
        ("mul", 2, flat_mul),
        ("inv", 1, inv),
        ("one", 0, [0]),
        ("comm", 2, _table(12, 2, comm)),
    ]
    return _render("a4-commutator", 12, ops, [])


_TEXTS: dict[str, str] = {
    "z2-plus": _zn_plus("z2-plus", 2),
    "z3-plus": _zn_plus("z3-plus", 3),
    "z2-plus-maj": _z2_plus_maj(),
    "z2-ternary-only": _z2_ternary_only(),
    "bool-andnot": _bool_andnot(),
    "bool-post": _bool_post(),
    "semilattice2": _semilattice2(),
    "three-post": _three_post(),
    "z4-plus-one-2xy": _z4_plus_one_2xy(),
    "a4-group": _a4_group(),
    "a4-commutator": _a4_commutator(),
}


def builtin_names() -> list[str]:
    return list(_TEXTS)


def builtin_text(name: str) -> str:
    text = _TEXTS.get(name)
    if text is None:
        raise InputError(
            f"unknown builtin {name!r}; available: {', '.join(builtin_names())}"
        )
    return text


def load_builtin(name: str) -> FiniteAlgebra:
    return parse_algebra(builtin_text(name))
