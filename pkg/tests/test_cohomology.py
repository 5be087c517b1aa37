from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from supercontact import forms as F
from supercontact.cocycles import (
    CATALOG, catalog_entries, chi, coboundary_catalog_k2, coboundary_of, cohomologous_to_span,
    delta1_defect, entry, is_coboundary, is_cocycle, match_report, theta_lift, ups3_l_lhalf,
    make_cochain, verify_identity_ni,
)
from supercontact.cohomology import (
    Cochain1, _parity_of_key, cochain_keys, generating_set, h1_dim, operator_keys, relative_h1_dim,
)
from supercontact.contact import ContactField, generators
from supercontact.diffops import DiffOp, format_op
from supercontact.grassmann import SuperPoly


Q = Fraction
H = Q(1, 2)


@given(st.sampled_from([(Q(1, 3), Q(1, 3)), (Q(1, 3), Q(5, 6)), (Q(-1), Q(0))]), st.data())
@settings(max_examples=10)
def test_coboundaries_are_cocycles(lm, data):
    lam, mu = lm
    keys = operator_keys(2, lam, mu, xdeg_max=1, max_order=Q(3, 2))
    p = _parity_of_key(data.draw(st.sampled_from(keys)))
    keys = [k for k in keys if _parity_of_key(k) == p]
    chosen = data.draw(st.lists(st.sampled_from(keys), min_size=1, max_size=3, unique=True))
    coeffs = data.draw(st.lists(st.integers(1, 3), min_size=len(chosen), max_size=len(chosen)))
    A = DiffOp.from_form(F.Form(2, (), dict(zip(chosen, map(Q, coeffs)))), lam, mu)
    B = coboundary_of(A)
    assert is_cocycle(B, dmax=2)
    # a potential is recovered, possibly differing from A by an invariant operator
    P = is_coboundary(B, max_order=Q(3, 2), xdeg_max=1)
    assert P is not None and coboundary_of(P).form == B.form


def test_delta1_defect_on_concrete_fields():
    Y = entry("Y2(l,l+1)").build(Q(1, 3))
    gens = generators(2, 2)
    for X in gens[:6]:
        for Z in gens[:6]:
            assert delta1_defect(Y, X, Z).is_zero()


def test_zeta_readings_agree_and_theta3_version_matches():
    for lam in (Q(1, 3), Q(-2, 5)):
        a = make_cochain(3, lam, lam + H, ups3_l_lhalf(lam, "eta"))
        b = make_cochain(3, lam, lam + H, ups3_l_lhalf(lam, "d"))
        assert a.form == b.form
    assert entry("Y3(-1/2,0)").build(-H).form == entry("Y3,3(-1/2,0)").build(-H).form


def test_catalog_cocycles_are_not_coboundaries():
    for ent in CATALOG:
        lam = -H if ent.condition(-H) and not ent.condition(Q(1, 3)) else Q(1, 3)
        Y = ent.build(lam)
        assert is_coboundary(Y, max_order=ent.order + 2) is None, ent.name


def test_mutated_cocycle_has_witness():
    Y = entry("Y4(l,l+1)").build(Q(1, 3))
    k = min(Y.form.terms, key=repr)
    terms = dict(Y.form.terms)
    terms[k] = -terms[k]
    bad = Cochain1(4, Y.lam, Y.mu, Y.form.copy_with(terms), Y.parity)
    r = is_cocycle(bad)
    assert not r
    g, h = r.witness
    assert g is not None and h is not None
    XF, XG = ContactField(4, g), ContactField(4, h)
    for part in (XF, XG):
        assert part.generator.terms


def test_identity_sign_mutation_fails():
    assert verify_identity_ni(1) and verify_identity_ni(2)
    assert not verify_identity_ni(2, _rhs_sign=-1)
    with pytest.raises(ValueError):
        verify_identity_ni(3)


@pytest.mark.parametrize("n,lam,mu", [
    (2, Q(1, 3), Q(1, 3)), (2, Q(1, 3), Q(4, 3)), (2, Q(1, 3), Q(5, 6)), (2, Q(-2, 5), Q(8, 5)),
    (3, Q(1, 3), Q(1, 3)), (3, -H, 0), (3, Q(1, 3), Q(11, 6)), (3, Q(1, 3), Q(4, 3)),
])
def test_reduced_matches_unreduced(n, lam, mu):
    red = h1_dim(n, lam, mu, max_order=3)
    full = h1_dim(n, lam, mu, max_order=3, reduced=False)
    assert red.h1_dim == full.h1_dim


def test_h1_examples_and_representatives():
    r = h1_dim(3, Q(1, 4), Q(1, 4), max_order=3)
    assert (r.h1_dim, len(r.representatives)) == (1, 1)
    assert all(Y.x_independent() and is_cocycle(Y) for Y in r.representatives)
    assert h1_dim(3, 0, 1).h1_dim == 0
    # mu - lam not a half-integer: no cochains of weight zero
    assert h1_dim(2, 0, Q(1, 3)).h1_dim == 0
    assert cochain_keys(2, 0, Q(1, 3)) == []


@pytest.mark.parametrize("n,lam,mu,names", [
    (2, Q(1, 3), Q(1, 3), {"Y2(l,l)", "Y2~(l,l)"}),
    (2, Q(1, 3), Q(7, 3), {"Y2(l,l+2)", "Y2~(l,l+2)"}),
    (3, -H, 0, {"Y3(-1/2,0)", "Y3,1(-1/2,0)", "Y3,2(-1/2,0)", "Y3,3(-1/2,0)"}),
    (3, Q(1, 3), Q(11, 6), {"Y3(l,l+3/2)"}),
    (4, -1, 0, {"Y4(l,l+1)"}),
])
def test_catalog_matches_computed_classes(n, lam, mu, names):
    r = h1_dim(n, lam, mu, max_order=3)
    assert set(match_report(r)) == names


def test_theta_lifts():
    """Lifts of the K(2) cocycles into the three-variable module: cocycles on
    K(2) of parity k mod 2, none a coboundary there."""
    count = 0
    for ent in catalog_entries(2):
        for k in range(-1, 7):
            for j in (0, 1):
                for l in (0, 1):
                    try:
                        Y = theta_lift(ent.name, Q(1, 3), k, j, l)
                    except ValueError:
                        continue
                    count += 1
                    assert Y.parity == k % 2
                    assert is_cocycle(Y, exclude=0b100), Y.name
                    assert is_coboundary(Y, exclude=0b100) is None, Y.name
    assert count == 20


def test_chi_transport():
    Y = entry("Y2(l,l+1)").build(Q(1, 3))
    cY = chi(Y)
    assert cY.parity == 1 - Y.parity and cY.pi
    assert is_cocycle(cY)
    assert is_coboundary(cY) is None
    A = DiffOp.symbol(2, Q(1, 3), Q(1, 3), etas=(1,), coeff=SuperPoly.theta(2, 2))
    assert is_coboundary(chi(coboundary_of(A))) is not None


def test_cohomologous_to_span():
    Y = entry("Y2(l,l)").build(Q(1, 3))
    A = DiffOp.symbol(2, Q(1, 3), Q(1, 3), etas=(1,), coeff=SuperPoly.theta(2, 1))
    shifted = Y.scale(3) + coboundary_of(A)
    assert cohomologous_to_span(shifted, [Y]) == [3]
    other = entry("Y2~(l,l)").build(Q(1, 3))
    assert cohomologous_to_span(other, [Y]) is None


def test_relative_representatives_vanish_on_subalgebra():
    for i in (1, 2, 3):
        r = relative_h1_dim(3, i, -H, 0)
        assert r.h1_dim == 1
        Y = r.representatives[0]
        gens = [X.generator for X in generators(3, 2)
                if not any(S & (1 << (i - 1)) for _, S in X.generator.terms)]
        assert all(not Y(g).terms for g in gens)
    with pytest.raises(ValueError):
        relative_h1_dim(2, 3, 0, 0)


@pytest.mark.parametrize("lam,mu,expect", [
    (Q(1, 3), Q(-1, 6), "t"), (Q(1, 3), Q(1, 3), "e"), (Q(1, 3), Q(5, 6), "dx"),
])
def test_coboundary_catalog_shapes(lam, mu, expect):
    pots = coboundary_catalog_k2(3, 1, lam, mu)
    assert len(pots) == 1 and expect in format_op(pots[0])
    with pytest.raises(ValueError):
        coboundary_catalog_k2(1, 1, lam, mu)


def test_generating_sets():
    red = generating_set(3, reduced=True)
    full = generating_set(3, reduced=False)
    assert len(red) == 4
    assert all(g in full for g in red)
