from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from supercontact import forms as F
from supercontact.contact import ContactField, contact_bracket, generators
from supercontact.densities import Density, lift_poly
from supercontact.diffops import (
    BinaryDiffOp, DiffOp, OpMonomial, WeightError, apply, binary_action_form,
    binary_module_action, format_binary, format_op, module_action, normal_compose,
    operator_from_value, parse_binary, parse_op, phi_lift, phi_signatures, psi_lift,
    psi_lift_form, psi_signatures,
)
from supercontact.grassmann import ArityError, ParseError, SuperPoly, parse_poly

from .strategies import diffops, monomials, polys, weights

Q = Fraction


@given(diffops(3))
def test_format_parse_round_trip(A):
    assert parse_op(format_op(A), 3, A.source_weight, A.target_weight) == A


def test_parse_examples():
    A = parse_op("-1/2 * t1 * dx * e2", 2)
    assert A.terms == {OpMonomial(1, (2,)): parse_poly("-1/2*t1", 2)}
    # eta_2 eta_1 = -eta_1 eta_2
    assert parse_op("e2*e1", 2) == parse_op("-e1*e2", 2)
    # eta_1 eta_1 = -dx
    assert parse_op("e1*e1", 1) == parse_op("-dx", 1)
    T = parse_binary("x * [dx | e1] - [1 | 1]", 1, (0, 0, 0))
    assert format_binary(T) in ("x * [dx | e1] - [1 | 1]", "-[1 | 1] + x * [dx | e1]")


@pytest.mark.parametrize("text", ["e3", "dx^", "2 * [dx | ]", "t1 ** dx", "q"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        if "[" in text:
            parse_binary(text, 2)
        else:
            parse_op(text, 2)


@given(diffops(2, 0, 0), diffops(2, 0, 0), diffops(2, 0, 0))
def test_composition_is_associative(A, B, C):
    assert normal_compose(normal_compose(A, B), C) == normal_compose(A, normal_compose(B, C))


@given(diffops(2, Q(1, 3), Q(1, 3)), diffops(2, Q(1, 3), Q(1, 3)), polys(2, xdeg=3))
def test_composition_matches_application(A, B, u):
    d = Density(u, Q(1, 3))
    assert apply(normal_compose(A, B), d) == apply(A, apply(B, d))


@given(st.integers(0, 1), monomials(2, xdeg=2), monomials(2, xdeg=2), weights, weights, st.data())
@settings(max_examples=25)
def test_module_action_is_a_representation(p, f, g, lam, mu, data):
    A = data.draw(diffops(2, lam, mu, parity=p))
    X, Y = ContactField(2, f), ContactField(2, g)
    s = -1 if X.parity & Y.parity else 1
    lhs = module_action(X, module_action(Y, A)) - module_action(Y, module_action(X, A)).scale(s)
    b = contact_bracket(f, g)
    rhs = module_action(ContactField(2, b), A) if b else DiffOp(2, lam, mu)
    assert lhs == rhs


def test_identity_is_invariant_at_equal_weights():
    for X in generators(2, 2):
        assert module_action(X, DiffOp.identity(2, Q(2, 7))).is_zero()
    assert not module_action(ContactField(2, SuperPoly.x(2, 2)), DiffOp.identity(2, 0, 1)).is_zero()


@given(diffops(3))
def test_operator_from_value_inverts_application(A):
    value = F.compose(A.form(), F.generic_all(3, "F"))
    assert DiffOp.from_form(operator_from_value(value), A.source_weight, A.target_weight) == A


def _phi_parts(n, lam, mu, p):
    parts = []
    for (a, b), pi in phi_signatures(lam, mu):
        odd = (p + pi) & 1
        coeff = SuperPoly.x(n - 1) + 1
        parts.append(DiffOp.symbol(n - 1, a, b, xorder=1, etas=(1,) if odd else (), coeff=coeff))
    return parts


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("p", [0, 1])
def test_phi_is_equivariant(n, p):
    lam, mu = Q(1, 3), Q(-1, 4)
    parts = _phi_parts(n, lam, mu, p)
    lifted = phi_lift(parts, lam, mu)
    for X in generators(n - 1, 2):
        Xl = ContactField(n, lift_poly(X.generator, n))
        acted = [module_action(X, A, pi=bool(pi)) for A, (_, pi) in zip(parts, phi_signatures(lam, mu))]
        assert module_action(Xl, lifted) == phi_lift(acted, lam, mu), X


def _psi_parts(n, lam, mu, nu, p):
    parts = []
    for w, pi in psi_signatures(lam, mu, nu):
        m1 = OpMonomial(1, (1,) if (p + pi) & 1 else ())
        parts.append(BinaryDiffOp(n - 1, w, {(m1, OpMonomial()): SuperPoly.x(n - 1) + 2}))
    return parts


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("p", [0, 1])
def test_psi_is_equivariant(n, p):
    lam, mu, nu = Q(1, 3), Q(-1, 4), Q(2, 5)
    sigs = psi_signatures(lam, mu, nu)
    parts = _psi_parts(n, lam, mu, nu, p)
    lifted = psi_lift_form([T.form() for T in parts], n)
    for X in generators(n - 1, 2):
        Xl = F.Form.from_poly(lift_poly(X.generator, n))
        lhs = binary_action_form(Xl, X.parity, lifted, p, lam, mu, nu)
        acted = [binary_action_form(X.form(), X.parity, T.form(), T.parity ^ pi, *w)
                 for T, (w, pi) in zip(parts, sigs)]
        assert lhs == psi_lift_form(acted, n), X


def test_psi_lift_operator_level_at_n2():
    lam, mu, nu = Q(1, 3), Q(-1, 4), Q(2, 5)
    parts = _psi_parts(2, lam, mu, nu, 0)
    lifted = psi_lift(parts, lam, mu, nu)
    assert lifted.n == 2 and lifted.weights == (lam, mu, nu)
    for X in generators(1, 2):
        Xl = ContactField(2, lift_poly(X.generator, 2))
        acted = [binary_module_action(X, T, pi=bool(pi))
                 for T, (_, pi) in zip(parts, psi_signatures(lam, mu, nu))]
        assert binary_module_action(Xl, lifted) == psi_lift(acted, lam, mu, nu)


def test_binary_call_on_densities():
    T = parse_binary("[dx | 1] - [1 | dx]", 1, (0, 0, 1))
    f = Density(parse_poly("x^2", 1), 0)
    g = Density(parse_poly("x*t1", 1), 0)
    assert T(f, g).coeff == parse_poly("x^2*t1", 1)
    with pytest.raises(WeightError):
        T(Density(f.coeff, 1), g)


def test_weight_and_arity_errors():
    A = DiffOp.identity(1, 0, 1)
    B = DiffOp.identity(1, 0, 0)
    with pytest.raises(WeightError):
        A + B
    with pytest.raises(WeightError):
        normal_compose(B, A)
    with pytest.raises(WeightError):
        apply(A, Density(SuperPoly.x(1), 1))
    with pytest.raises(ArityError):
        DiffOp(1, 0, 0, {OpMonomial(0, (2,)): SuperPoly.const(1, 1)})
    with pytest.raises(ValueError):
        OpMonomial(0, (2, 1))
    with pytest.raises(ValueError):
        (parse_op("1 + e1", 1)).parity
