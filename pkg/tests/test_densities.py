from fractions import Fraction

import pytest
from hypothesis import given

from supercontact.contact import ContactField, contact_bracket
from supercontact.densities import (
    Density, SplitDensity, act_density, lift_poly, parse_density, split_phi, unsplit_phi,
)
from supercontact.grassmann import ArityError, ParseError, SuperPoly, d_x, parse_poly

from .strategies import monomials, polys, weights


@given(polys(3), weights)
def test_split_round_trip(p, lam):
    d = Density(p, lam)
    s = split_phi(d)
    assert s.pi_part.weight == lam + Fraction(1, 2)
    assert unsplit_phi(s) == d


def test_split_example():
    s = split_phi(parse_density("x*t1*t2 + 3*t1 @ 1/3", 2))
    assert s.even_part.coeff == parse_poly("3*t1", 1)
    assert s.pi_part.coeff == parse_poly("x*t1", 1)
    assert s.pi_part.weight == Fraction(5, 6)


@given(monomials(2), monomials(2), polys(2, xdeg=2), weights)
def test_action_is_a_representation(f, g, u, lam):
    X, Y = ContactField(2, f), ContactField(2, g)
    d = Density(u, lam)
    s = -1 if X.parity & Y.parity else 1
    lhs = act_density(X, act_density(Y, d)).coeff - act_density(Y, act_density(X, d)).coeff * s
    b = contact_bracket(f, g)
    rhs = act_density(ContactField(2, b), d).coeff if b else SuperPoly(2)
    assert lhs == rhs


def test_action_of_translation_and_dilation():
    d = Density(parse_poly("x^2*t1", 1), Fraction(1, 3))
    assert act_density(ContactField(1, SuperPoly.const(1, 1)), d).coeff == d_x(d.coeff)
    # X_x = x dx + 1/2 t1 d_t1; on x^2 t1 with weight 1/3: (2 + 1/2 + 1/3) x^2 t1
    out = act_density(ContactField(1, SuperPoly.x(1)), d)
    assert out.coeff == d.coeff * Fraction(17, 6)


def test_density_errors():
    with pytest.raises(ValueError):
        Density(SuperPoly.x(1), 0) + Density(SuperPoly.x(1), 1)
    with pytest.raises(ParseError):
        parse_density("x*t1", 1)
    with pytest.raises(ParseError):
        parse_density("x @ 0.5", 1)
    with pytest.raises(ValueError):
        SplitDensity(Density(SuperPoly.x(1), 0), Density(SuperPoly.x(1), 1))
    with pytest.raises(ArityError):
        act_density(ContactField(2, SuperPoly.x(2)), Density(SuperPoly.x(1), 0))
    with pytest.raises(ArityError):
        lift_poly(SuperPoly.x(3), 2)
    assert str(parse_density("x @ -1/2", 1)) == "x @ -1/2"
