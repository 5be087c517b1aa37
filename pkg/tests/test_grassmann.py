from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from supercontact.grassmann import (
    ArityError, ParseError, SuperPoly, d_x, derive, eta, format_poly, mask_of, mul,
    parity, parity_bit, parse_poly, partial, theta_product,
)

from .strategies import monomials, polys


def sort_sign(word):
    """Sign of the permutation sorting a word of distinct indices (bubble sort oracle)."""
    w, s = list(word), 1
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                w[j], w[j + 1] = w[j + 1], w[j]
                s = -s
    return s


@given(st.lists(st.integers(1, 5), max_size=5), st.lists(st.integers(1, 5), max_size=5))
def test_theta_product_matches_sorting_oracle(a, b):
    a, b = sorted(set(a)), sorted(set(b))
    sign, m = theta_product(mask_of(a), mask_of(b))
    if set(a) & set(b):
        assert sign == 0
    else:
        assert m == mask_of(a + b)
        assert sign == sort_sign(a + b)


def test_theta_constructor_orders_with_sign():
    assert SuperPoly.theta(3, 2, 1) == -SuperPoly.theta(3, 1, 2)
    assert SuperPoly.theta(3, 3, 1, 2) == SuperPoly.theta(3, 1, 2, 3)
    assert not SuperPoly.theta(3, 2, 2)


@given(polys(3), polys(3), polys(3))
def test_ring_axioms(p, q, r):
    assert mul(mul(p, q), r) == mul(p, mul(q, r))
    assert mul(p, q + r) == mul(p, q) + mul(p, r)
    assert mul(p + q, r) == mul(p, r) + mul(q, r)
    assert mul(p, SuperPoly.const(3, 1)) == p
    assert p - p == SuperPoly(3)


@given(monomials(3), monomials(3))
def test_supercommutativity(a, b):
    s = -1 if parity_bit(a) & parity_bit(b) else 1
    assert mul(a, b) == mul(b, a) * s


@given(st.integers(1, 3), st.integers(1, 3), polys(3))
def test_eta_anticommutators(i, j, p):
    anti = eta(i, eta(j, p)) + eta(j, eta(i, p))
    assert anti == (d_x(p) * -2 if i == j else SuperPoly(3))


@given(st.integers(1, 3), monomials(3), monomials(3))
def test_left_derivative_sign(i, a, b):
    s = -1 if parity_bit(a) else 1
    assert partial(i, mul(a, b)) == mul(partial(i, a), b) + mul(a, partial(i, b)) * s


def test_left_derivative_examples():
    t = lambda *ix: SuperPoly.theta(2, *ix)
    assert partial(1, t(1, 2)) == t(2)
    assert partial(2, t(1, 2)) == -t(1)
    assert eta(1, SuperPoly.x(2) * t(1)) == SuperPoly.x(2)
    assert derive(("eta", 1), t(1)) == SuperPoly.const(2, 1)
    assert derive("x", SuperPoly.x(2, 3)) == SuperPoly.x(2, 2) * 3


@given(polys(4))
def test_format_parse_round_trip(p):
    assert parse_poly(format_poly(p), 4) == p


def test_parse_examples():
    p = parse_poly("3/2*x^2*t1*t3 - x*t2", 3)
    assert p.terms == {(2, 0b101): Fraction(3, 2), (1, 0b010): Fraction(-1)}
    assert parse_poly("t2*t1", 2) == -parse_poly("t1*t2", 2)
    assert parse_poly(" 1 /3 ", 1) == SuperPoly.const(1, Fraction(1, 3))
    assert format_poly(SuperPoly(2)) == "0"


@pytest.mark.parametrize("text,n", [("x*t4", 3), ("2**x", 2), ("x^", 1), ("1/0", 1), ("y", 1), ("x x", 1)])
def test_parse_errors(text, n):
    with pytest.raises(ParseError):
        parse_poly(text, n)


def test_arity_and_parity_errors():
    with pytest.raises(ArityError):
        mul(SuperPoly.x(1), SuperPoly.x(2))
    with pytest.raises(ArityError):
        SuperPoly(1, {(0, 0b10): 1})
    with pytest.raises(ArityError):
        partial(3, SuperPoly.x(2))
    mixed = parse_poly("1 + t1", 1)
    assert parity(mixed) == "mixed"
    with pytest.raises(ValueError):
        parity_bit(mixed)
    assert mixed.homogeneous_parts()[1] == SuperPoly.theta(1, 1)
