"""Weighted densities F alpha^lambda and the splitting F = F1 + F2 theta_n."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import forms as F
from .contact import ContactField
from .grassmann import ArityError, ParseError, SuperPoly, format_poly, format_rat, parse_poly

HALF = Fraction(1, 2)
_WEIGHT = re.compile(r"^-?\d+(/[1-9]\d*)?$")


@dataclass(frozen=True)
class Density:
    coeff: SuperPoly
    weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "weight", Fraction(self.weight))

    @property
    def n(self) -> int:
        return self.coeff.n

    def __add__(self, other: "Density") -> "Density":
        if other.weight != self.weight:
            raise ValueError("densities of different weights")
        return Density(self.coeff + other.coeff, self.weight)

    def __str__(self):
        return f"{format_poly(self.coeff)} @ {format_rat(self.weight)}"


def parse_density(text: str, n: int) -> Density:
    """Parse ``"poly @ lambda"``, e.g. ``"x*t1 @ -1/2"``."""
    if "@" not in text:
        raise ParseError("missing '@ weight'", len(text))
    poly, _, w = text.rpartition("@")
    if not _WEIGHT.match(w.strip()):
        raise ParseError(f"bad weight {w.strip()!r}", len(poly) + 1)
    weight = Fraction(w.strip())
    return Density(parse_poly(poly, n), weight)


def act_density(X: ContactField, d: Density) -> Density:
    """L^lambda_{X_F} = X_F + lambda F'."""
    if X.n != d.n:
        raise ArityError(f"arity mismatch: {X.n} vs {d.n}")
    L = F.field_operator(X.form(), X.parity, d.weight)
    return Density(F.compose(L, F.Form.from_poly(d.coeff)).to_poly(), d.weight)


@dataclass(frozen=True)
class SplitDensity:
    """(F1 at lambda, Pi(F2 at lambda + 1/2)) over n-1 odd variables."""

    even_part: Density
    pi_part: Density

    def __post_init__(self):
        if self.pi_part.weight != self.even_part.weight + HALF:
            raise ValueError("weights of the two parts must differ by exactly 1/2")
        if self.pi_part.n != self.even_part.n:
            raise ArityError("parts have different arity")


def split_phi(d: Density) -> SplitDensity:
    n = d.n
    if n < 1:
        raise ValueError("need at least one odd variable")
    bit = 1 << (n - 1)
    f1, f2 = {}, {}
    for (m, S), c in d.coeff.terms.items():
        # theta_S theta_n is already in ascending order
        (f2 if S & bit else f1)[(m, S & ~bit)] = c
    return SplitDensity(Density(SuperPoly(n - 1, f1), d.weight),
                       Density(SuperPoly(n - 1, f2), d.weight + HALF))


def unsplit_phi(s: SplitDensity) -> Density:
    n = s.even_part.n + 1
    bit = 1 << (n - 1)
    terms = {k: c for k, c in s.even_part.coeff.terms.items()}
    for (m, S), c in s.pi_part.coeff.terms.items():
        terms[(m, S | bit)] = c
    return Density(SuperPoly(n, terms), s.even_part.weight)


def lift_poly(p: SuperPoly, n: int) -> SuperPoly:
    """View a polynomial in fewer odd variables inside R[x, theta_1..theta_n]."""
    if p.n > n:
        raise ArityError("cannot lift to fewer variables")
    return SuperPoly(n, dict(p.terms))
