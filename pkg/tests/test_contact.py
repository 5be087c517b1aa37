from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from supercontact.cohomology import generating_set
from supercontact.contact import (
    ContactField, bracket_as_fields, contact_bracket, field, generators, lie_span_dims,
    vector_field_of,
)
from supercontact.diffops import apply, normal_compose
from supercontact.densities import Density
from supercontact.grassmann import ArityError, SuperPoly, d_x, eta, mul, parity_bit, parse_poly

from .strategies import monomials, polys


def slow_bracket(f, g):
    """The bracket written out term by term from its defining formula."""
    n = f.n
    s = Fraction(1, 2) if parity_bit(f) else Fraction(-1, 2)
    out = mul(f, d_x(g)) - mul(d_x(f), g)
    for i in range(1, n + 1):
        out = out + mul(eta(i, f), eta(i, g)) * s
    return out


@given(monomials(3), monomials(3))
def test_bracket_matches_formula(f, g):
    assert contact_bracket(f, g) == slow_bracket(f, g)


def test_bracket_examples():
    P = lambda s: parse_poly(s, 2)
    assert contact_bracket(P("1"), P("x")) == P("1")
    assert contact_bracket(P("t1"), P("t1")) == P("1/2")
    assert contact_bracket(P("x"), P("t1")) == P("-1/2*t1")
    # so(2) rotation: {t1 t2, t1} = -1/2 t2
    assert contact_bracket(P("t1*t2"), P("t1")) == P("-1/2*t2")


@given(monomials(2), monomials(2), monomials(2))
def test_jacobi_random(f, g, h):
    B = contact_bracket
    s = -1 if parity_bit(f) & parity_bit(g) else 1
    assert B(f, B(g, h)) == B(B(f, g), h) + B(g, B(f, h)) * s


@given(monomials(2), monomials(2), polys(2, xdeg=2))
def test_vector_fields_represent_bracket_on_functions(f, g, u):
    XF, XG = ContactField(2, f), ContactField(2, g)
    VF, VG = vector_field_of(XF), vector_field_of(XG)
    s = -1 if XF.parity & XG.parity else 1
    comm = normal_compose(VF, VG) - normal_compose(VG, VF).scale(s)
    b = bracket_as_fields(XF, XG)
    d = Density(u, 0)
    expect = apply(vector_field_of(b), d).coeff if b.generator else SuperPoly(2)
    assert apply(comm, d).coeff == expect


def test_generators_family():
    gens = generators(2, 1)
    # proper subsets of {1,2}: {}, {1}, {2}; x-degree 0, 1
    assert len(gens) == 6
    assert all(X.generator.terms for X in gens)
    assert not any(m == 0b11 for X in gens for (_, m) in X.generator.terms)
    assert len(generators(3, 3)) == 7 * 4


@pytest.mark.parametrize("n", [2, 3, 4])
def test_reduced_generating_set_spans(n):
    """{1, theta_a, x^2, x^3} plus rotations generate the same graded pieces as all monomials."""
    seeds = generating_set(n, reduced=False)
    full = lie_span_dims(n, seeds, 2)
    for w, dim in full.items():
        # weight w part of K(n): monomials x^m theta_S with m + |S|/2 - 1 = w
        count = sum(1 for m in range(6) for S in range(1 << n)
                    if m + Fraction(bin(S).count("1"), 2) - 1 == w)
        assert dim == count, (n, w)


def test_field_helpers_and_errors():
    X = field(2, "x*t1")
    assert X.parity == 1
    assert "x*t1" in repr(X)
    with pytest.raises(ValueError):
        field(2, "1 + t1").parity
    with pytest.raises(ArityError):
        contact_bracket(SuperPoly.x(1), SuperPoly.x(2))
    with pytest.raises(ArityError):
        ContactField(2, SuperPoly.x(3))
