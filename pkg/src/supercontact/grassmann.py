"""Supercommutative polynomials in x, t1..tn with exact rational coefficients.

Odd variables are stored as bitmasks: bit ``i-1`` set means theta_i is present.
Monomials are always kept with theta factors in ascending index order, so two
polynomials are equal exactly when their term maps are equal.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Tuple, Union

Rat = Fraction
Number = Union[int, Fraction]
Mono = Tuple[int, int]  # (xdeg, mask)


class ArityError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at offset {pos}")
        self.pos = pos


# -- mask combinatorics -----------------------------------------------------

def popcount(m: int) -> int:
    return bin(m).count("1")


def mask_indices(m: int) -> Tuple[int, ...]:
    """1-based theta indices present in ``m``, ascending."""
    out = []
    i = 1
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << (i - 1)
    return m


@lru_cache(maxsize=None)
def theta_product(a: int, b: int) -> Tuple[int, int]:
    """theta_A * theta_B = sign * theta_{A|B}; returns (sign, mask), sign 0 if they overlap."""
    if a & b:
        return 0, 0
    inv = 0
    bb = b
    while bb:
        low = bb & -bb
        # elements of A larger than this element of B
        inv += popcount(a & ~((low << 1) - 1))
        bb ^= low
    return (-1 if inv & 1 else 1), a | b


@lru_cache(maxsize=None)
def theta_left(i: int, m: int) -> Tuple[int, int]:
    """theta_i * theta_m."""
    bit = 1 << (i - 1)
    if m & bit:
        return 0, 0
    return (-1 if popcount(m & (bit - 1)) & 1 else 1), m | bit


@lru_cache(maxsize=None)
def dtheta(i: int, m: int) -> Tuple[int, int]:
    """Left derivative d/dtheta_i of theta_m."""
    bit = 1 << (i - 1)
    if not m & bit:
        return 0, 0
    return (-1 if popcount(m & (bit - 1)) & 1 else 1), m ^ bit


# -- polynomials -------------------------------------------------------------

def _q(c: Number) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class SuperPoly:
    """Element of R[x, theta_1..theta_n]; immutable."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Dict[Mono, Number] | None = None):
        self.n = n
        clean: Dict[Mono, Fraction] = {}
        full = (1 << n) - 1
        for (d, m), c in (terms or {}).items():
            if m & ~full or d < 0:
                raise ArityError(f"monomial {(d, m)} out of range for n={n}")
            if c:
                clean[(d, m)] = _q(c)
        self.terms = clean
        self._hash = None

    # constructors
    @classmethod
    def const(cls, n: int, c: Number) -> "SuperPoly":
        return cls(n, {(0, 0): c})

    @classmethod
    def x(cls, n: int, power: int = 1) -> "SuperPoly":
        return cls(n, {(power, 0): 1})

    @classmethod
    def theta(cls, n: int, *indices: int) -> "SuperPoly":
        """theta_{i1} ... theta_{ik} in the order given (sign applied)."""
        sign, m = 1, 0
        for i in reversed(indices):
            if not 1 <= i <= n:
                raise ArityError(f"theta index {i} out of range for n={n}")
            s, m = theta_left(i, m)
            sign *= s
        return cls(n, {(0, m): sign} if sign else {})

    @classmethod
    def monomial(cls, n: int, xdeg: int, mask: int, c: Number = 1) -> "SuperPoly":
        return cls(n, {(xdeg, mask): c})

    # basic protocol
    def __eq__(self, other):
        if isinstance(other, SuperPoly):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0, 0): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self) -> Iterator[Tuple[Mono, Fraction]]:
        return iter(self.terms.items())

    def __repr__(self):
        return f"SuperPoly({self.n}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    def _check(self, other: "SuperPoly"):
        if self.n != other.n:
            raise ArityError(f"arity mismatch: {self.n} vs {other.n}")

    def _coerce(self, other) -> "SuperPoly":
        if isinstance(other, SuperPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return SuperPoly.const(self.n, other)
        raise TypeError(type(other))

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return SuperPoly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return SuperPoly(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SuperPoly(self.n, {k: c * other for k, c in self.terms.items()})
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def coeff(self, xdeg: int, mask: int) -> Fraction:
        return self.terms.get((xdeg, mask), Fraction(0))

    def homogeneous_parts(self) -> Dict[int, "SuperPoly"]:
        parts: Dict[int, dict] = {0: {}, 1: {}}
        for (d, m), c in self.terms.items():
            parts[popcount(m) & 1][(d, m)] = c
        return {p: SuperPoly(self.n, t) for p, t in parts.items() if t}

    @property
    def xdegree(self) -> int:
        return max((d for d, _ in self.terms), default=0)


def mul(p: SuperPoly, q: SuperPoly) -> SuperPoly:
    if p.n != q.n:
        raise ArityError(f"arity mismatch: {p.n} vs {q.n}")
    out: Dict[Mono, Fraction] = {}
    for (d1, m1), c1 in p.terms.items():
        for (d2, m2), c2 in q.terms.items():
            s, m = theta_product(m1, m2)
            if s:
                k = (d1 + d2, m)
                out[k] = out.get(k, 0) + s * c1 * c2
    return SuperPoly(p.n, out)


def d_x(p: SuperPoly) -> SuperPoly:
    return SuperPoly(p.n, {(d - 1, m): c * d for (d, m), c in p.terms.items() if d})


def partial(i: int, p: SuperPoly) -> SuperPoly:
    if not 1 <= i <= p.n:
        raise ArityError(f"derivation index {i} out of range for n={p.n}")
    out = {}
    for (d, m), c in p.terms.items():
        s, m2 = dtheta(i, m)
        if s:
            out[(d, m2)] = s * c
    return SuperPoly(p.n, out)


def eta(i: int, p: SuperPoly) -> SuperPoly:
    """eta_i = d/dtheta_i - theta_i d/dx."""
    return partial(i, p) - SuperPoly.theta(p.n, i) * d_x(p)


def derive(kind, p: SuperPoly) -> SuperPoly:
    """``kind`` is ``"x"``, ``("partial", i)`` or ``("eta", i)``."""
    if kind in ("x", "d_x"):
        return d_x(p)
    name, i = kind
    if name == "partial":
        return partial(i, p)
    if name == "eta":
        return eta(i, p)
    raise ValueError(f"unknown derivation {kind!r}")


EVEN, ODD, MIXED = "even", "odd", "mixed"


def parity(p: SuperPoly) -> str:
    ps = {popcount(m) & 1 for _, m in p.terms}
    if not ps or ps == {0}:
        return EVEN
    if ps == {1}:
        return ODD
    return MIXED


def parity_bit(p: SuperPoly) -> int:
    """0/1 parity of a homogeneous polynomial; raises on mixed parity."""
    par = parity(p)
    if par == MIXED:
        raise ValueError(f"polynomial {p} is not parity-homogeneous")
    return 1 if par == ODD else 0


# -- text format --------------------------------------------------------------

def format_rat(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(d: int, m: int) -> str:
    parts = []
    if d == 1:
        parts.append("x")
    elif d > 1:
        parts.append(f"x^{d}")
    parts.extend(f"t{i}" for i in mask_indices(m))
    return "*".join(parts)


def _mask_key(m: int):
    return mask_indices(m)


def format_terms(items, fmt_mono) -> str:
    """Join (coef, monomial-string) pairs into ``a*m + b*m2 - ...``."""
    out = []
    for c, mono in items:
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        if mono:
            body = mono if a == 1 else f"{format_rat(a)}*{mono}"
        else:
            body = format_rat(a)
        if not out:
            out.append(body if sign == "+" else "-" + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out) if out else "0"


def format_poly(p: SuperPoly) -> str:
    keys = sorted(p.terms, key=lambda k: (k[0], _mask_key(k[1])), reverse=True)
    return format_terms(((p.terms[k], format_monomial(*k)) for k in keys), None)


_TOKEN = re.compile(r"\s*(?:(\d+)|(x)|t(\d+)|(\^)|(\*)|(/)|(\+)|(-))")


class _Tokens:
    def __init__(self, text: str):
        self.toks = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            mt = _TOKEN.match(text, pos)
            if not mt:
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            start = mt.start(0) + (len(mt.group(0)) - len(mt.group(0).lstrip()))
            kinds = ["int", "x", "t", "^", "*", "/", "+", "-"]
            for g, kind in enumerate(kinds, 1):
                if mt.group(g) is not None:
                    self.toks.append((kind, mt.group(g), start))
                    break
            pos = mt.end(0)
        self.end = len(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self.end)

    def take(self, kind=None):
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}", tok[2])
        self.i += 1
        return tok


def _parse_coef(tk: _Tokens) -> Fraction:
    _, v, _ = tk.take("int")
    num = int(v)
    if tk.peek()[0] == "/":
        tk.take("/")
        _, v2, pos = tk.take("int")
        if int(v2) == 0:
            raise ParseError("zero denominator", pos)
        return Fraction(num, int(v2))
    return Fraction(num)


def _parse_factor(tk: _Tokens, n: int) -> SuperPoly:
    kind, v, pos = tk.peek()
    if kind == "x":
        tk.take()
        if tk.peek()[0] == "^":
            tk.take()
            _, e, _ = tk.take("int")
            return SuperPoly.x(n, int(e))
        return SuperPoly.x(n)
    if kind == "t":
        tk.take()
        i = int(v)
        if not 1 <= i <= n:
            raise ParseError(f"theta index {i} exceeds n={n}", pos)
        return SuperPoly.theta(n, i)
    raise ParseError("expected factor", pos)


def _parse_term(tk: _Tokens, n: int) -> SuperPoly:
    kind = tk.peek()[0]
    if kind == "int":
        c = _parse_coef(tk)
        if tk.peek()[0] != "*":
            return SuperPoly.const(n, c)
        tk.take("*")
        acc = SuperPoly.const(n, c)
    else:
        acc = SuperPoly.const(n, 1)
    acc = acc * _parse_factor(tk, n)
    while tk.peek()[0] == "*":
        tk.take()
        acc = acc * _parse_factor(tk, n)
    return acc


def parse_poly(text: str, n: int) -> SuperPoly:
    """Parse e.g. ``"3/2*x^2*t1*t3 - x*t2"``; ``t2*t1`` reorders with a sign."""
    tk = _Tokens(text)
    sign = 1
    if tk.peek()[0] == "-":
        tk.take()
        sign = -1
    total = _parse_term(tk, n) * sign
    while tk.peek()[0] in ("+", "-"):
        s = -1 if tk.take()[0] == "-" else 1
        total = total + _parse_term(tk, n) * s
    if tk.peek()[0] is not None:
        raise ParseError("unexpected token", tk.peek()[2])
    return total


def all_monomials(n: int, xdeg_max: int) -> Iterator[SuperPoly]:
    for d in range(xdeg_max + 1):
        for m in range(1 << n):
            yield SuperPoly.monomial(n, d, m)
