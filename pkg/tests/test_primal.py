"""Balanced folds, basis validation, synthesis, primality probing."""

import itertools
import random

import pytest

from clonelab.algebra import OperationSymbol, OpTable
from clonelab.corpus import load_builtin
from clonelab.errors import BasisError, InputError, MathInvariantError
from clonelab.primal import build_sigma, primality_probe, synthesize_term, validate_basis
from clonelab.terms import Var, evaluate, induced_table, print_term, term_metrics

BOOL = load_builtin("bool-post")
THREE = load_builtin("three-post")
T = OperationSymbol("t", 2)


def leaves_left_to_right(term):
    if isinstance(term, Var):
        return [term.index]
    out = []
    for child in term.children:
        out.extend(leaves_left_to_right(child))
    return out


def test_sigma_small_shapes():
    assert print_term(build_sigma(T, 1)) == "x1"
    assert print_term(build_sigma(T, 2)) == "(t x1 x2)"
    assert print_term(build_sigma(T, 3)) == "(t (t x1 x2) x3)"
    assert print_term(build_sigma(T, 4)) == "(t (t x1 x2) (t x3 x4))"
    # odd split: left side takes the larger half
    assert print_term(build_sigma(T, 5)) == "(t (t (t x1 x2) x3) (t x4 x5))"


def test_sigma_heights_and_leaf_order():
    for n in list(range(1, 66)) + [100, 511, 512, 513, 1024]:
        term = build_sigma(T, n)
        length, height = term_metrics(term)
        assert height == (n - 1).bit_length()
        assert length == 2 * n - 1
        assert leaves_left_to_right(term) == list(range(1, n + 1))


def test_sigma_rejects_bad_input():
    with pytest.raises(InputError):
        build_sigma(T, 0)
    with pytest.raises(InputError):
        build_sigma(OperationSymbol("u", 1), 3)


@pytest.mark.parametrize(
    "algebra,plus_name",
    [(BOOL, "or"), (THREE, "max")],
)
def test_sigma_unit_absorption(algebra, plus_name):
    # folding the unit everywhere except one slot returns that slot's value
    sym, table = algebra.operation(plus_name)
    zero = 0
    assert table.apply(zero, 1) == 1 and table.apply(1, zero) == 1
    for n in range(1, 17):
        term = build_sigma(sym, n)
        for position in range(n):
            for a in range(algebra.m):
                env = [zero] * n
                env[position] = a
                assert evaluate(algebra, term, env) == a


def test_validate_basis_bool_post():
    basis = validate_basis(BOOL)
    assert basis.plus == "or"
    assert basis.times == "and"
    assert basis.chi == ("not", "id")
    assert basis.s == 1
    assert [print_term(t) for t in basis.constant_terms] == ["zero", "one"]


def test_validate_basis_three_post():
    basis = validate_basis(THREE)
    assert basis.chi == ("chi0", "chi1", "chi2")
    assert basis.s == 1
    consts = [induced_table(THREE, t, 1).values for t in basis.constant_terms]
    assert consts == [(0, 0, 0), (1, 1, 1), (2, 2, 2)]


def test_validate_basis_missing_roles():
    plain = load_builtin("z2-plus")
    with pytest.raises(BasisError) as err:
        validate_basis(plain)
    assert "times" in str(err.value)


def test_validate_basis_rejects_broken_identity():
    # swap plus and times: x*1 = x becomes or(x,1) = x, false at x=0
    overrides = dict(BOOL.designations)
    overrides["plus"], overrides["times"] = overrides["times"], overrides["plus"]
    with pytest.raises(BasisError):
        validate_basis(BOOL, overrides)


def test_validate_basis_rejects_wrong_chi():
    overrides = dict(BOOL.designations)
    overrides["chi0"], overrides["chi1"] = overrides["chi1"], overrides["chi0"]
    with pytest.raises(BasisError):
        validate_basis(BOOL, overrides)


def brute_min_height_bound(n, m, s):
    bits = 1
    total = m**n
    while 2**bits < total:
        bits += 1
    if total == 1:
        bits = 0
    return bits + 1 + max(s, n)


def test_synthesize_all_unary_and_binary_boolean_targets():
    basis = validate_basis(BOOL)
    for n in (1, 2):
        for values in itertools.product(range(2), repeat=2**n):
            target = OpTable(m=2, arity=n, values=values)
            result = synthesize_term(basis, target)
            assert induced_table(BOOL, result.term, n).values == values
            assert result.height <= n + 1 + max(1, n)
            assert result.height_bound == brute_min_height_bound(n, 2, 1)


def test_synthesize_seeded_ternary_targets_over_three_elements():
    basis = validate_basis(THREE)
    rng = random.Random(404)
    for _ in range(25):
        values = tuple(rng.randrange(3) for _ in range(9))
        target = OpTable(m=3, arity=2, values=values)
        result = synthesize_term(basis, target)
        assert induced_table(THREE, result.term, 2).values == values
        assert result.height <= 4 + 1 + 2


def test_synthesize_checks_universe():
    basis = validate_basis(BOOL)
    with pytest.raises(InputError):
        synthesize_term(basis, OpTable(m=3, arity=1, values=(0, 1, 2)))


def test_primality_probe_bool_andnot():
    rows = primality_probe(load_builtin("bool-andnot"), 2)
    assert [r.fs for r in rows] == [4, 16]
    assert [r.full_count for r in rows] == [4, 16]
    assert all(r.primal for r in rows)
    # counting bound: 16 < (2+2+1)^L forces L >= 2
    assert rows[1].len_lower_bound == 2
    assert rows[1].counting_rhs == 5 ** rows[1].len
    assert rows[1].implied_c1 == pytest.approx(0.5)
    assert rows[0].implied_c1 == pytest.approx(1.0)


def test_primality_probe_z2_not_primal():
    rows = primality_probe(load_builtin("z2-plus"), 2)
    assert rows[1].fs == 4
    assert rows[1].full_count == 16
    assert not rows[1].primal


def test_primality_probe_incomplete_row():
    rows = primality_probe(load_builtin("bool-andnot"), 3, budget=12)
    assert rows[-1].complete is False


def test_synthesis_height_equals_bound_on_full_tables():
    # exactness of the construction: every summand has the same shape
    basis = validate_basis(BOOL)
    xor = OpTable(m=2, arity=2, values=(0, 1, 1, 0))
    result = synthesize_term(basis, xor)
    assert result.height == result.height_bound == 5
    assert result.s == 1
    assert result.arity == 2


def test_synthesized_term_exactness_is_asserted(monkeypatch):
    import clonelab.primal as primal_mod

    basis = validate_basis(BOOL)
    real = primal_mod.build_sigma

    def sabotage(symbol, n):
        term = real(symbol, n)
        if n == 4:
            return real(symbol, 3)  # drop a summand
        return term

    monkeypatch.setattr(primal_mod, "build_sigma", sabotage)
    # dropping the (1,1) summand of the or-table changes the function
    with pytest.raises(MathInvariantError):
        synthesize_term(basis, OpTable(m=2, arity=2, values=(0, 1, 1, 1)))
