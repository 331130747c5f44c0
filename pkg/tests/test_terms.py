"""Canonical term algebra: normal forms, orderings, exact combinations."""
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from regstruct.algebra import ONE, XI, Combo, Hom, I, Scaling, X, prod
from regstruct.algebra.terms import (
    mi_add,
    mi_binom,
    mi_factorial,
    mi_range,
    mi_unit,
    mi_zero,
    noise_count,
    p_j,
    p_mul,
    p_one,
    p_x,
    subexpressions,
)

mindex = st.tuples(*([st.integers(0, 3)] * 3))


def test_unit_and_monomial_normalisation():
    assert X((0, 0, 0)) is ONE
    assert prod([ONE, ONE]) is ONE
    assert prod([X((1, 0, 0)), X((0, 2, 0))]) is X((1, 2, 0))
    assert prod([XI]) is XI


def test_integration_rejects_polynomials():
    with pytest.raises(ValueError):
        I((0, 0, 0), X((1, 0, 0)))
    with pytest.raises(ValueError):
        I((0, 0, 0), ONE)


def test_product_flattening_and_interning():
    a = prod([XI, I((0, 0, 0), XI)])
    b = prod([I((0, 0, 0), XI), XI])
    assert a is b
    c = prod([a, XI])
    assert noise_count(c) == 3
    assert XI in subexpressions(c)


@given(st.lists(st.sampled_from([XI, I((0, 0, 0), XI), X((1, 0, 0)), X((0, 1, 1))]), max_size=5))
def test_product_order_independence(factors):
    assert prod(factors) is prod(list(reversed(factors)))


@given(mindex, mindex)
def test_mi_binom_vandermonde_corner(a, b):
    total = mi_add(a, b)
    assert mi_binom(total, a) == mi_binom(total, b)
    assert mi_factorial(total) % (mi_factorial(a) * mi_factorial(b)) == 0


def test_mi_range_is_downward_closure():
    ks = list(mi_range((1, 2, 0)))
    assert len(ks) == 6
    assert all(k[2] == 0 for k in ks)


def test_scaling_validation():
    with pytest.raises(ValueError):
        Scaling((2, 2))
    with pytest.raises(ValueError):
        Scaling((0, 1))
    s = Scaling((2, 1, 1))
    assert s.total == 4
    assert s.degree((1, 1, 0)) == 3


@given(
    st.fractions(
        min_value=Fraction(1, 8), max_value=Fraction(47, 8), max_denominator=8
    )
)
def test_iter_degree_below_matches_filter(bound):
    s = Scaling((2, 1, 1))
    listed = set(s.iter_degree_below(bound))
    brute = {
        (a, b, c)
        for a in range(4)
        for b in range(7)
        for c in range(7)
        if 2 * a + b + c < bound
    }
    assert listed == brute


def test_hom_affine_arithmetic():
    h = Hom(Fraction(2), 1) + Hom(Fraction(1, 2), 2)
    assert h.eval(Fraction(-9, 8)) == Fraction(5, 2) - 3 * Fraction(9, 8)


def test_combo_cancellation():
    c = Combo.of(XI, Fraction(1, 3))
    c.add(XI, Fraction(-1, 3))
    assert not c
    c.add(XI, 2)
    c.add_combo(Combo.of(XI, 1), scale=-2)
    assert not c


def test_positive_algebra_products_commute():
    d = 3
    a = p_j((0, 0, 0), XI, d)
    b = p_x((1, 0, 0))
    assert p_mul(a, b) is p_mul(b, a)
    assert p_mul(a, p_one(d)) is a
    assert p_mul(p_one(d), p_one(d)).is_unit
