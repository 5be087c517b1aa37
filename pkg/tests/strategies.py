"""Hypothesis strategies for exact super-polynomials and operators."""
from fractions import Fraction

from hypothesis import strategies as st

from supercontact.diffops import DiffOp, OpMonomial
from supercontact.grassmann import SuperPoly

small_int = st.integers(-4, 4)
rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 5))
weights = st.sampled_from([Fraction(x) for x in ("-3/2", "-1", "-1/2", "-1/3", "0", "1/4", "1/2", "1", "2")])


@st.composite
def polys(draw, n, xdeg=3, max_terms=4, homogeneous=None):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        d = draw(st.integers(0, xdeg))
        m = draw(st.integers(0, (1 << n) - 1))
        if homogeneous is not None and bin(m).count("1") % 2 != homogeneous:
            continue
        terms[(d, m)] = draw(rationals)
    return SuperPoly(n, terms)


@st.composite
def monomials(draw, n, xdeg=3):
    return SuperPoly.monomial(n, draw(st.integers(0, xdeg)), draw(st.integers(0, (1 << n) - 1)),
                              draw(st.integers(1, 3)))


@st.composite
def op_monomials(draw, n, max_x=2):
    etas = tuple(i for i in range(1, n + 1) if draw(st.booleans()))
    return OpMonomial(draw(st.integers(0, max_x)), etas)


@st.composite
def diffops(draw, n, lam=None, mu=None, parity=None, max_terms=3):
    lam = draw(weights) if lam is None else lam
    mu = draw(weights) if mu is None else mu
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        m = draw(op_monomials(n))
        hom = None if parity is None else (parity + m.parity) % 2
        a = draw(polys(n, xdeg=2, max_terms=2, homogeneous=hom))
        if a:
            terms[m] = a
    return DiffOp(n, lam, mu, terms)
