"""The contact Lie superalgebra K(n) on R^{1|n}."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List

from . import forms as F
from .grassmann import (
    ArityError,
    SuperPoly,
    d_x,
    eta,
    mask_of,
    mul,
    parity,
    parity_bit,
)


def _hom_parity(p: SuperPoly, what: str) -> int:
    if parity(p) == "mixed":
        raise ValueError(f"{what} has mixed parity; split it into homogeneous parts")
    return parity_bit(p)


def contact_bracket(Fp: SuperPoly, G: SuperPoly) -> SuperPoly:
    """{F,G} = FG' - F'G - 1/2 (-1)^{|F|} sum_i eta_i(F) eta_i(G)."""
    if Fp.n != G.n:
        raise ArityError(f"arity mismatch: {Fp.n} vs {G.n}")
    pf = _hom_parity(Fp, "F")
    _hom_parity(G, "G")
    out = mul(Fp, d_x(G)) - mul(d_x(Fp), G)
    acc = SuperPoly(Fp.n)
    for i in range(1, Fp.n + 1):
        acc = acc + mul(eta(i, Fp), eta(i, G))
    half = SuperPoly.const(Fp.n, F.HALF if pf else -F.HALF)
    return out + mul(half, acc)


@dataclass(frozen=True)
class ContactField:
    """The field X_F, stored through its generating function F."""

    n: int
    generator: SuperPoly

    def __post_init__(self):
        if self.generator.n != self.n:
            raise ArityError("generator arity differs from n")

    @property
    def parity(self) -> int:
        return _hom_parity(self.generator, "generator")

    def form(self) -> F.Form:
        return F.Form.from_poly(self.generator)

    def __repr__(self):
        from .grassmann import format_poly
        return f"X[{format_poly(self.generator)}]"


def field(n: int, text_or_poly) -> ContactField:
    from .grassmann import parse_poly
    p = parse_poly(text_or_poly, n) if isinstance(text_or_poly, str) else text_or_poly
    return ContactField(n, p)


def vector_field_of(X: ContactField):
    """X_F as a first-order operator on R[x, theta] (weights 0 -> 0)."""
    from .diffops import DiffOp
    return DiffOp.from_form(F.field_operator(X.form(), X.parity), 0, 0)


def bracket_as_fields(X: ContactField, Y: ContactField) -> ContactField:
    if X.n != Y.n:
        raise ArityError(f"arity mismatch: {X.n} vs {Y.n}")
    return ContactField(X.n, contact_bracket(X.generator, Y.generator))


def generators(n: int, dmax: int) -> List[ContactField]:
    """X_F for F = x^m theta_S, m <= dmax, S a proper subset of {1..n}."""
    out = []
    for size in range(n):
        for S in combinations(range(1, n + 1), size):
            for m in range(dmax + 1):
                out.append(ContactField(n, SuperPoly.monomial(n, m, mask_of(S))))
    out.sort(key=lambda X: (min(X.generator.terms)[0], min(X.generator.terms)[1]))
    return out


def lie_span_dims(n: int, seeds: List[SuperPoly], weight_max) -> Dict:
    """Dimensions, per Euler weight, of the Lie subalgebra generated by ``seeds``.

    The weight of x^m theta_S is m + |S|/2 - 1; brackets add weights, so
    the span up to ``weight_max`` is computed by closing under brackets.
    """
    from fractions import Fraction
    from .exactla import Eliminator

    def wt(p):
        (m, S), = [next(iter(p.terms))]
        return m + Fraction(bin(S).count("1"), 2) - 1

    pieces = []
    for s in seeds:
        for part in s.homogeneous_parts().values():
            pieces.append(part)
    index: Dict = {}
    elims: Dict = {}
    found: Dict = {}

    def add(p):
        if not p:
            return False
        w = wt(p)
        if w > weight_max:
            return False
        vec = {index.setdefault(k, len(index)): c for k, c in p.terms.items()}
        el = elims.setdefault(w, Eliminator())
        if el.add(vec):
            found.setdefault(w, []).append(p)
            return True
        return False

    frontier = [p for p in pieces if add(p)]
    while frontier:
        new = []
        allp = [q for v in found.values() for q in v]
        for p in frontier:
            for q in allp:
                b = contact_bracket(p, q)
                for part in b.homogeneous_parts().values():
                    # the bracket of monomials need not be a monomial: split by weight
                    byw: Dict = {}
                    for (m, S), c in part.terms.items():
                        byw.setdefault(m + Fraction(bin(S).count("1"), 2), {})[(m, S)] = c
                    for t in byw.values():
                        r = SuperPoly(n, t)
                        if add(r):
                            new.append(r)
        frontier = new
    return {w: el.rank for w, el in elims.items()}
