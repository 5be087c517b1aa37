"""Multilinear differential expressions in normal form.

A :class:`Form` is a finite sum of terms

    q * x^d * theta_C * f_{T1}^{(k1)} * ... * [d_x^k eta_S]

where the f's are *component functions* of formal arguments and the optional
trailing bracket is an operator symbol acting on one further argument (the
density an operator is applied to).

A formal argument F is written F = sum_T theta_T f_T(x) with each f_T an
ordinary (even) function of x. The f's commute with everything, so a Form has a
unique normal form and no sign depends on the parity of a formal argument:
every sign is carried by the explicit theta monomials. The operator symbol
uses the eta-basis d_x^k eta_{i1}..eta_{im}, i1 < ... < im, which is a basis
of differential operators as a left module.

Term keys are ``(d, C, fs, op)``: ``fs`` is a tuple of ``(T, k)`` aligned
with ``Form.slots``; ``op`` is ``None`` (a value) or ``(k, S)``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Optional, Tuple

from .grassmann import (
    SuperPoly,
    dtheta,
    mask_indices,
    popcount,
    theta_left,
    theta_product,
)

Key = tuple
Terms = Dict[Key, Fraction]
OpSym = Tuple[int, int]

HALF = Fraction(1, 2)


@lru_cache(maxsize=None)
def eta_times(i: int, k: int, S: int) -> Tuple[int, int, int]:
    """eta_i o (d_x^k eta_S) = sign * d_x^k' eta_S'."""
    bit = 1 << (i - 1)
    sign = -1 if popcount(S & (bit - 1)) & 1 else 1
    if S & bit:
        return -sign, k + 1, S ^ bit
    return sign, k, S | bit


@lru_cache(maxsize=None)
def eta_word_product(S1: int, k1: int, S2: int, k2: int) -> Tuple[int, int, int]:
    """(d_x^k1 eta_S1) o (d_x^k2 eta_S2) in normal form."""
    sign, k, S = 1, k1 + k2, S2
    for i in reversed(mask_indices(S1)):
        s, k, S = eta_times(i, k, S)
        sign *= s
    return sign, k, S


def _add(out: Terms, key, c):
    v = out.get(key)
    if v is None:
        out[key] = c
    else:
        v += c
        if v:
            out[key] = v
        else:
            del out[key]


class Form:
    __slots__ = ("n", "slots", "terms")

    def __init__(self, n: int, slots: Tuple[str, ...] = (), terms: Optional[Terms] = None):
        self.n = n
        self.slots = tuple(slots)
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_poly(cls, p: SuperPoly) -> "Form":
        return cls(p.n, (), {(d, m, (), None): c for (d, m), c in p.terms.items()})

    @classmethod
    def op_symbol(cls, n: int, k: int, S: int, coeff: Optional[SuperPoly] = None) -> "Form":
        if coeff is None:
            return cls(n, (), {(0, 0, (), (k, S)): Fraction(1)})
        return cls(n, (), {(d, m, (), (k, S)): c for (d, m), c in coeff.terms.items()})

    @classmethod
    def identity(cls, n: int) -> "Form":
        return cls.op_symbol(n, 0, 0)

    @classmethod
    def generic(cls, n: int, slot: str, T: int) -> "Form":
        """The component theta_T f_T of a formal argument in ``slot``."""
        return cls(n, (slot,), {(0, T, ((T, 0),), None): Fraction(1)})

    # -- basic algebra -----------------------------------------------------
    def copy_with(self, terms: Terms, slots=None) -> "Form":
        f = Form.__new__(Form)
        f.n = self.n
        f.slots = self.slots if slots is None else slots
        f.terms = terms
        return f

    def __add__(self, other: "Form") -> "Form":
        if not other.terms:
            return self
        if not self.terms:
            return other
        self._match(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add(out, k, c)
        return self.copy_with(out)

    def __sub__(self, other: "Form") -> "Form":
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "Form":
        if not c:
            return self.copy_with({})
        return self.copy_with({k: v * c for k, v in self.terms.items()})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.n == other.n and self.slots == other.slots and self.terms == other.terms

    def __repr__(self):
        return f"Form(n={self.n}, slots={self.slots}, {len(self.terms)} terms)"

    def _match(self, other: "Form"):
        if self.n != other.n:
            raise ValueError(f"arity mismatch: {self.n} vs {other.n}")
        if self.slots != other.slots and self.terms and other.terms:
            raise ValueError(f"slot mismatch: {self.slots} vs {other.slots}")

    @property
    def is_value(self) -> bool:
        return all(k[3] is None for k in self.terms)

    def parities(self) -> set:
        """Set of term parities (theta count plus eta count of the symbol)."""
        out = set()
        for d, C, fs, op in self.terms:
            out.add((popcount(C) + (popcount(op[1]) if op else 0)) & 1)
        return out

    def to_poly(self) -> SuperPoly:
        if self.slots:
            raise ValueError("form still has formal arguments")
        out = {}
        for (d, C, fs, op), c in self.terms.items():
            if op is not None:
                raise ValueError("form is an operator, not a value")
            out[(d, C)] = c
        return SuperPoly(self.n, out)


# -- derivations ---------------------------------------------------------------

def dx(f: Form) -> Form:
    out: Terms = {}
    for (d, C, fs, op), c in f.terms.items():
        if d:
            _add(out, (d - 1, C, fs, op), c * d)
        for j, (T, k) in enumerate(fs):
            _add(out, (d, C, fs[:j] + ((T, k + 1),) + fs[j + 1:], op), c)
        if op is not None:
            _add(out, (d, C, fs, (op[0] + 1, op[1])), c)
    return f.copy_with(out)


def eta(i: int, f: Form) -> Form:
    """eta_i applied to the value (or, for operator forms, post-composed)."""
    out: Terms = {}
    for (d, C, fs, op), c in f.terms.items():
        s, C2 = dtheta(i, C)
        if s:
            _add(out, (d, C2, fs, op), c if s > 0 else -c)
        s, C3 = theta_left(i, C)
        if s:
            nc = -c if s > 0 else c
            if d:
                _add(out, (d - 1, C3, fs, op), nc * d)
            for j, (T, k) in enumerate(fs):
                _add(out, (d, C3, fs[:j] + ((T, k + 1),) + fs[j + 1:], op), nc)
        if op is not None:
            s, k2, S2 = eta_times(i, op[0], op[1])
            if popcount(C) & 1:
                s = -s
            _add(out, (d, C, fs, (k2, S2)), c if s > 0 else -c)
    return f.copy_with(out)


def apply_symbol(k: int, S: int, f: Form) -> Form:
    """(d_x^k eta_S)(f) with eta_S = eta_{i1} o ... o eta_{im}."""
    for i in reversed(mask_indices(S)):
        f = eta(i, f)
    for _ in range(k):
        f = dx(f)
    return f


# -- products ------------------------------------------------------------------

def _merge_slots(a: Tuple[str, ...], b: Tuple[str, ...]):
    if not a:
        return b, None
    if not b:
        return a, None
    if set(a) & set(b):
        raise ValueError(f"formal arguments overlap: {a} / {b}")
    merged = tuple(sorted(a + b))
    pos_a = tuple(merged.index(s) for s in a)
    pos_b = tuple(merged.index(s) for s in b)
    return merged, (len(merged), pos_a, pos_b)


def mul(v: Form, f: Form) -> Form:
    """Product of a value form ``v`` with ``f`` (value or operator)."""
    if v.n != f.n:
        raise ValueError(f"arity mismatch: {v.n} vs {f.n}")
    slots, plan = _merge_slots(v.slots, f.slots)
    out: Terms = {}
    for (d1, C1, fs1, op1), c1 in v.terms.items():
        if op1 is not None:
            raise ValueError("left factor of mul must be a value")
        for (d2, C2, fs2, op2), c2 in f.terms.items():
            s, C = theta_product(C1, C2)
            if not s:
                continue
            if plan is None:
                fs = fs1 or fs2
            else:
                tmp = [None] * plan[0]
                for p, x in zip(plan[1], fs1):
                    tmp[p] = x
                for p, x in zip(plan[2], fs2):
                    tmp[p] = x
                fs = tuple(tmp)
            c = c1 * c2
            _add(out, (d1 + d2, C, fs, op2), c if s > 0 else -c)
    res = Form(f.n, slots)
    res.terms = out
    return res


def _split_by_symbol(f: Form):
    groups: Dict[OpSym, Terms] = {}
    for (d, C, fs, op), c in f.terms.items():
        if op is None:
            raise ValueError("operator form expected")
        groups.setdefault(op, {})[(d, C, fs, None)] = c
    return groups


def compose(A: Form, B: Form) -> Form:
    """A o B where A is an operator form; B is an operator or a value form."""
    if A.n != B.n:
        raise ValueError(f"arity mismatch: {A.n} vs {B.n}")
    total: Optional[Form] = None
    for (k, S), coeffs in _split_by_symbol(A).items():
        inner = apply_symbol(k, S, B)
        piece = mul(Form(A.n, A.slots, coeffs), inner)
        total = piece if total is None else total + piece
    if total is None:
        slots, _ = _merge_slots(A.slots, B.slots)
        return Form(A.n, slots)
    return total


# -- standard building blocks ---------------------------------------------------

def field_operator(g: Form, parity: int, weight=0) -> Form:
    """L^weight_{X_g} = g d_x - 1/2 (-1)^|g| sum eta_i(g) eta_i + weight g'."""
    n = g.n
    out = mul(g, Form.op_symbol(n, 1, 0))
    s = HALF if parity else -HALF
    for i in range(1, n + 1):
        out = out + mul(eta(i, g), Form.op_symbol(n, 0, 1 << (i - 1))).scale(s)
    if weight:
        out = out + mul(dx(g), Form.identity(n)).scale(weight)
    return out


def bracket(f: Form, pf: int, g: Form) -> Form:
    """Contact bracket {f, g} of value forms; ``pf`` is the parity of f."""
    out = mul(f, dx(g)) - mul(dx(f), g)
    s = HALF if pf else -HALF
    for i in range(1, f.n + 1):
        out = out + mul(eta(i, f), eta(i, g)).scale(s)
    return out


def act(g: Form, pg: int, A: Form, pA: int, lam, mu) -> Form:
    """X_g . A = L^mu o A - (-1)^{|A||g|} A o L^lam for an operator form A."""
    left = compose(field_operator(g, pg, mu), A)
    right = compose(A, field_operator(g, pg, lam))
    return left + right if (pA & pg) else left - right


def generic_pieces(n: int, slot: str, parity: Optional[int] = None, exclude: int = 0):
    """Yield (piece, parity) over theta_T f_T, optionally restricting |T| mod 2
    or excluding components that involve the thetas in mask ``exclude``."""
    for T in range(1 << n):
        if T & exclude:
            continue
        p = popcount(T) & 1
        if parity is None or p == parity:
            yield Form.generic(n, slot, T), p


def poly_pieces(p: SuperPoly):
    """Yield (value form, parity) for the homogeneous parts of p."""
    for par, part in sorted(p.homogeneous_parts().items()):
        yield Form.from_poly(part), par


def symbol_order(op: OpSym) -> Fraction:
    return op[0] + Fraction(popcount(op[1]), 2)


# -- formal arguments ------------------------------------------------------------

def generic_all(n: int, slot: str, exclude: int = 0) -> Form:
    """The whole generic argument sum_T theta_T f_T (T avoiding ``exclude``)."""
    return Form(n, (slot,), {(0, T, ((T, 0),), None): Fraction(1)
                             for T in range(1 << n) if not T & exclude})


def rename_slot(f: Form, old: str, new: str) -> Form:
    if old not in f.slots:
        return f
    names = [new if s == old else s for s in f.slots]
    if sorted(names) == names:
        return f.copy_with(f.terms, tuple(names))
    order = sorted(range(len(names)), key=lambda j: names[j])
    out = {(d, C, tuple(fs[j] for j in order), op): c for (d, C, fs, op), c in f.terms.items()}
    return f.copy_with(out, tuple(names[j] for j in order))


def label_parity_split(f: Form, slot: str) -> Dict[int, Form]:
    """Split f by the parity of the argument component feeding ``slot``."""
    j = f.slots.index(slot)
    parts: Dict[int, Terms] = {0: {}, 1: {}}
    for key, c in f.terms.items():
        parts[popcount(key[2][j][0]) & 1][key] = c
    return {p: f.copy_with(t) for p, t in parts.items()}


def sign_by_label(f: Form, slot: str, odd: bool = True) -> Form:
    """Multiply each term by (-1)^{|component in slot|} (if ``odd``)."""
    if not odd:
        return f
    j = f.slots.index(slot)
    return f.copy_with({k: (-c if popcount(k[2][j][0]) & 1 else c) for k, c in f.terms.items()})


def _components(F: Form) -> Dict[int, list]:
    comp: Dict[int, Terms] = {}
    for (d, C, fs, op), c in F.terms.items():
        if op is not None:
            raise ValueError("substituted argument must be a value")
        comp.setdefault(C, {})[(d, 0, fs, None)] = c
    return {C: [F.copy_with(t)] for C, t in comp.items()}


def substitute(U: Form, slot: str, F: Form) -> Form:
    """Evaluate U with the formal argument ``slot`` replaced by the value F.

    Writing F = sum_T theta_T F_T with theta-free (hence even) F_T, each
    f_T^{(k)} in U becomes d_x^k F_T.
    """
    if U.n != F.n:
        raise ValueError(f"arity mismatch: {U.n} vs {F.n}")
    j = U.slots.index(slot)
    rest = U.slots[:j] + U.slots[j + 1:]
    slots, plan = _merge_slots(rest, F.slots)
    comps = _components(F)
    out: Terms = {}
    for (d, C, fs, op), c in U.terms.items():
        T, k = fs[j]
        chain = comps.get(T)
        if chain is None:
            continue
        while len(chain) <= k:
            chain.append(dx(chain[-1]))
        fr = fs[:j] + fs[j + 1:]
        for (d2, _, fs2, _), c2 in chain[k].terms.items():
            if plan is None:
                nfs = fr or fs2
            else:
                tmp = [None] * plan[0]
                for p, x in zip(plan[1], fr):
                    tmp[p] = x
                for p, x in zip(plan[2], fs2):
                    tmp[p] = x
                nfs = tuple(tmp)
            _add(out, (d + d2, C, nfs, op), c * c2)
    res = Form(U.n, slots)
    res.terms = out
    return res
