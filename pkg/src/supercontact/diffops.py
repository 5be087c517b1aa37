"""Differential operators between weighted densities.

A :class:`DiffOp` is sum a(x,theta) d_x^k eta_{i1}..eta_{im} (coefficients on
the left, i1 < ... < im). A :class:`BinaryDiffOp` is (F,G) -> sum a D1(F) D2(G).
Both convert to the component normal form of :mod:`supercontact.forms`,
where composition, module actions and the splitting isomorphisms are
computed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import forms as F
from .contact import ContactField
from .densities import Density
from .exactla import CONST, Eliminator, LinExpr
from .grassmann import (
    ArityError,
    ParseError,
    SuperPoly,
    format_monomial,
    format_rat,
    mask_indices,
    mask_of,
    popcount,
)


class WeightError(ValueError):
    """Raised when operator weights do not chain."""


@dataclass(frozen=True, order=True)
class OpMonomial:
    """The symbol d_x^xorder o eta_{etas[0]} o ... (etas ascending)."""

    xorder: int = 0
    etas: Tuple[int, ...] = ()

    def __post_init__(self):
        if list(self.etas) != sorted(set(self.etas)):
            raise ValueError("eta indices must be strictly increasing")

    @property
    def mask(self) -> int:
        return mask_of(self.etas)

    @property
    def parity(self) -> int:
        return len(self.etas) & 1

    @property
    def order(self) -> Fraction:
        return self.xorder + Fraction(len(self.etas), 2)

    @classmethod
    def of(cls, sym: Tuple[int, int]) -> "OpMonomial":
        return cls(sym[0], mask_indices(sym[1]))

    def sym(self) -> Tuple[int, int]:
        return (self.xorder, self.mask)

    def __str__(self):
        parts = []
        if self.xorder == 1:
            parts.append("dx")
        elif self.xorder > 1:
            parts.append(f"dx^{self.xorder}")
        parts.extend(f"e{i}" for i in self.etas)
        return "*".join(parts) if parts else "1"


ID = OpMonomial()


def _poly_from(n: int, terms: Dict[Tuple[int, int], Fraction]) -> SuperPoly:
    return SuperPoly(n, terms)


# -- unary operators ------------------------------------------------------------------

@dataclass
class DiffOp:
    n: int
    source_weight: Fraction
    target_weight: Fraction
    terms: Dict[OpMonomial, SuperPoly] = field(default_factory=dict)

    def __post_init__(self):
        self.source_weight = Fraction(self.source_weight)
        self.target_weight = Fraction(self.target_weight)
        clean = {}
        for m, a in self.terms.items():
            if a.n != self.n:
                raise ArityError("coefficient arity differs from n")
            if max(m.etas, default=0) > self.n:
                raise ArityError(f"eta index in {m} exceeds n={self.n}")
            if a:
                clean[m] = a
        self.terms = clean

    # conversions
    @classmethod
    def from_form(cls, f: F.Form, lam, mu) -> "DiffOp":
        if f.slots:
            raise ValueError("operator form still has formal arguments")
        acc: Dict[OpMonomial, Dict] = {}
        for (d, C, fs, op), c in f.terms.items():
            if op is None:
                raise ValueError("value form is not an operator")
            acc.setdefault(OpMonomial.of(op), {})[(d, C)] = c
        return cls(f.n, lam, mu, {m: _poly_from(f.n, t) for m, t in acc.items()})

    def form(self) -> F.Form:
        out = {}
        for m, a in self.terms.items():
            for (d, C), c in a.terms.items():
                out[(d, C, (), m.sym())] = c
        return F.Form(self.n, (), out)

    @classmethod
    def identity(cls, n, lam, mu=None) -> "DiffOp":
        return cls(n, lam, lam if mu is None else mu, {ID: SuperPoly.const(n, 1)})

    @classmethod
    def symbol(cls, n, lam, mu, xorder=0, etas=(), coeff: Optional[SuperPoly] = None) -> "DiffOp":
        a = SuperPoly.const(n, 1) if coeff is None else coeff
        return cls(n, lam, mu, {OpMonomial(xorder, tuple(etas)): a})

    # algebra
    def _same(self, o: "DiffOp"):
        if self.n != o.n:
            raise ArityError(f"arity mismatch: {self.n} vs {o.n}")
        if (self.source_weight, self.target_weight) != (o.source_weight, o.target_weight):
            raise WeightError("operators live in different modules")

    def __add__(self, o: "DiffOp") -> "DiffOp":
        self._same(o)
        return DiffOp.from_form(self.form() + o.form(), self.source_weight, self.target_weight)

    def __sub__(self, o: "DiffOp") -> "DiffOp":
        self._same(o)
        return DiffOp.from_form(self.form() - o.form(), self.source_weight, self.target_weight)

    def scale(self, c) -> "DiffOp":
        return DiffOp.from_form(self.form().scale(Fraction(c)), self.source_weight, self.target_weight)

    def __eq__(self, o):
        if not isinstance(o, DiffOp):
            return NotImplemented
        return (self.n == o.n and self.terms == o.terms
                and (not self.terms or (self.source_weight, self.target_weight)
                     == (o.source_weight, o.target_weight)))

    def is_zero(self) -> bool:
        return not self.terms

    def parities(self) -> set:
        return self.form().parities()

    @property
    def parity(self) -> int:
        ps = self.parities()
        if len(ps) > 1:
            raise ValueError("operator is not parity-homogeneous")
        return ps.pop() if ps else 0

    def order(self) -> Fraction:
        return max((m.order for m in self.terms), default=Fraction(0))

    def __str__(self):
        return format_op(self)

    __repr__ = __str__


def normal_compose(A: DiffOp, B: DiffOp) -> DiffOp:
    """A o B renormalised (eta_i^2 = -d_x, eta's anticommute, Leibniz)."""
    if A.n != B.n:
        raise ArityError(f"arity mismatch: {A.n} vs {B.n}")
    if A.source_weight != B.target_weight:
        raise WeightError(f"cannot compose: {A.source_weight} != {B.target_weight}")
    return DiffOp.from_form(F.compose(A.form(), B.form()), B.source_weight, A.target_weight)


def apply(A: DiffOp, d: Density) -> Density:
    if d.weight != A.source_weight:
        raise WeightError(f"density weight {d.weight} != source weight {A.source_weight}")
    if d.coeff.n != A.n:
        raise ArityError("arity mismatch")
    out = F.compose(A.form(), F.Form.from_poly(d.coeff))
    return Density(out.to_poly(), A.target_weight)


def _hom(X: ContactField) -> Tuple[F.Form, int]:
    return X.form(), X.parity


def module_action(X: ContactField, A: DiffOp, pi: bool = False) -> DiffOp:
    """X_F . A = L^mu o A - (-1)^{|A||F|} A o L^lam (parity |A|+1 when Pi-twisted)."""
    if X.n != A.n:
        raise ArityError("arity mismatch")
    g, pg = _hom(X)
    pA = A.parity ^ int(pi)
    out = F.act(g, pg, A.form(), pA, A.source_weight, A.target_weight)
    return DiffOp.from_form(out, A.source_weight, A.target_weight)


# -- binary operators ------------------------------------------------------------------

BSLOTS = ("F", "G")


@dataclass
class BinaryDiffOp:
    n: int
    weights: Tuple[Fraction, Fraction, Fraction]
    terms: Dict[Tuple[OpMonomial, OpMonomial], SuperPoly] = field(default_factory=dict)

    def __post_init__(self):
        self.weights = tuple(Fraction(w) for w in self.weights)
        clean = {}
        for (m1, m2), a in self.terms.items():
            if a.n != self.n:
                raise ArityError("coefficient arity differs from n")
            if max(m1.etas + m2.etas, default=0) > self.n:
                raise ArityError("eta index exceeds n")
            if a:
                clean[(m1, m2)] = a
        self.terms = clean

    def form(self) -> F.Form:
        """Component normal form: the value T(F, G) on generic arguments."""
        return binary_form(self.n, {k: (a, None) for k, a in self.terms.items()})

    def parities(self) -> set:
        return {(popcount(C) + m1.parity + m2.parity) & 1
                for (m1, m2), a in self.terms.items() for (_, C) in a.terms}

    @property
    def parity(self) -> int:
        ps = self.parities()
        if len(ps) > 1:
            raise ValueError("operator is not parity-homogeneous")
        return ps.pop() if ps else 0

    def is_zero(self):
        return not self.terms

    def __eq__(self, o):
        if not isinstance(o, BinaryDiffOp):
            return NotImplemented
        return self.n == o.n and self.terms == o.terms

    def __str__(self):
        return format_binary(self)

    __repr__ = __str__

    def __call__(self, f: Density, g: Density) -> Density:
        lam, mu, nu = self.weights
        if (f.weight, g.weight) != (lam, mu):
            raise WeightError("argument weights do not match")
        T = self.form()
        val = F.substitute(F.substitute(T, "F", F.Form.from_poly(f.coeff)), "G",
                           F.Form.from_poly(g.coeff))
        return Density(val.to_poly(), nu)


_SYM_CACHE: Dict = {}


def _applied(n: int, slot: str, m: OpMonomial) -> F.Form:
    key = (n, slot, m)
    f = _SYM_CACHE.get(key)
    if f is None:
        f = F.apply_symbol(m.xorder, m.mask, F.generic_all(n, slot))
        _SYM_CACHE[key] = f
    return f


def binary_form(n: int, terms) -> F.Form:
    """sum a D1(F) D2(G); ``terms`` maps (m1, m2) to (SuperPoly, unknown index or None)."""
    total = F.Form(n, BSLOTS)
    for (m1, m2), (a, j) in terms.items():
        prod = F.mul(_applied(n, "F", m1), _applied(n, "G", m2))
        coeff = F.Form.from_poly(a)
        if j is not None:
            coeff = coeff.copy_with({k: LinExpr.var(j, c) for k, c in coeff.terms.items()})
        total = total + F.mul(coeff, prod)
    return total


def binary_action_form(g: F.Form, pg: int, T: F.Form, tau: int, lam, mu, nu) -> F.Form:
    """X_g . T = L^nu o T - (-1)^{|T||g|} [T(L^lam F, G) + (-1)^{|g||F|} T(F, L^mu G)]."""
    n = T.n
    t1 = F.compose(F.field_operator(g, pg, nu), T)
    LF = F.compose(F.field_operator(g, pg, lam), F.generic_all(n, "F"))
    LG = F.compose(F.field_operator(g, pg, mu), F.generic_all(n, "G"))
    t2 = F.substitute(T, "F", LF)
    t3 = F.sign_by_label(F.substitute(T, "G", LG), "F", odd=bool(pg))
    inner = t2 + t3
    return t1 - (inner.scale(-1) if (tau & pg) else inner)


def binary_module_action(X: ContactField, T: BinaryDiffOp, pi: bool = False) -> BinaryDiffOp:
    if X.n != T.n:
        raise ArityError("arity mismatch")
    g, pg = _hom(X)
    lam, mu, nu = T.weights
    out = binary_action_form(g, pg, T.form(), T.parity ^ int(pi), lam, mu, nu)
    return binary_from_form(out, T.weights)


# -- back to the eta basis ----------------------------------------------------------------

def _eta_grade(d, C, ords):
    return d + Fraction(popcount(C), 2) - sum(ords, Fraction(0))


def binary_from_form(f: F.Form, weights) -> BinaryDiffOp:
    """Rewrite a component normal form (slots F, G) in the eta basis."""
    n = f.n
    if not f.terms:
        return BinaryDiffOp(n, weights)
    if f.slots != BSLOTS:
        raise ValueError("expected a binary value form")
    grades, parities, maxd, maxk = set(), set(), 0, [0, 0]
    for (d, C, fs, op), c in f.terms.items():
        ords = [k + Fraction(popcount(T), 2) for T, k in fs]
        grades.add(_eta_grade(d, C, ords))
        parities.add((popcount(C) + sum(popcount(T) for T, _ in fs)) & 1)
        maxd = max(maxd, d)
        for j, (T, k) in enumerate(fs):
            maxk[j] = max(maxk[j], k)
    # extracting a theta_T component costs up to |T| <= n extra d_x in the eta basis
    maxk = [k + n for k in maxk]
    cand = {}
    for d in range(maxd + 1):
        for C in range(1 << n):
            for k1 in range(maxk[0] + 1):
                for S1 in range(1 << n):
                    for k2 in range(maxk[1] + 1):
                        for S2 in range(1 << n):
                            o1 = k1 + Fraction(popcount(S1), 2)
                            o2 = k2 + Fraction(popcount(S2), 2)
                            if _eta_grade(d, C, (o1, o2)) not in grades:
                                continue
                            if (popcount(C) + popcount(S1) + popcount(S2)) & 1 not in parities:
                                continue
                            m1, m2 = OpMonomial(k1, mask_indices(S1)), OpMonomial(k2, mask_indices(S2))
                            cand[len(cand)] = (d, C, m1, m2)
    terms = {}
    for j, (d, C, m1, m2) in cand.items():
        terms[(m1, m2, d, C)] = (SuperPoly.monomial(n, d, C), j)
    # group by symbol pair so binary_form sees SuperPoly coefficients
    total = F.Form(n, BSLOTS)
    for (m1, m2, d, C), (a, j) in terms.items():
        total = total + binary_form(n, {(m1, m2): (a, j)})
    sol = _solve_equal(total, f, len(cand))
    acc: Dict = {}
    for j, c in sol.items():
        d, C, m1, m2 = cand[j]
        acc.setdefault((m1, m2), {})[(d, C)] = c
    return BinaryDiffOp(n, weights, {k: SuperPoly(n, t) for k, t in acc.items()})


def _solve_equal(lin: F.Form, target: F.Form, nvars: int) -> Dict[int, Fraction]:
    """Solve lin(u) = target for the unknowns of ``lin``."""
    keys = set(lin.terms) | set(target.terms)
    el = Eliminator(avoid=(CONST,))
    for k in keys:
        row = dict(lin.terms[k].d) if k in lin.terms else {}
        t = target.terms.get(k)
        if t:
            row[CONST] = row.get(CONST, 0) - t
        el.add(row)
    if CONST in el.pivots:
        raise ValueError("form is not in the span of the eta basis ansatz")
    sol = {}
    for p, row in el.pivots.items():
        v = -row.get(CONST, 0)
        if v:
            sol[p] = v
    return sol


def cochain_eta_terms(form: F.Form, slot: str = "G"):
    """Rewrite a one-slot operator form in the eta basis.

    Returns {(arg OpMonomial, op OpMonomial): SuperPoly coefficient}.
    """
    n = form.n
    if not form.terms:
        return {}
    grades, maxd, maxk, ops = set(), 0, 0, set()
    for (d, C, fs, op), c in form.terms.items():
        T, k = fs[0]
        grades.add((_eta_grade(d, C, [k + Fraction(popcount(T), 2)]), op))
        maxd, maxk = max(maxd, d), max(maxk, k)
        ops.add(op)
    maxk += n
    cand = []
    for d in range(maxd + 1):
        for C in range(1 << n):
            for k in range(maxk + 1):
                for S in range(1 << n):
                    for op in ops:
                        g = _eta_grade(d, C, [k + Fraction(popcount(S), 2)])
                        if (g, op) in grades:
                            cand.append((d, C, OpMonomial(k, mask_indices(S)), op))
    total = F.Form(n, (slot,))
    gen = F.generic_all(n, slot)
    for j, (d, C, m, op) in enumerate(cand):
        val = F.apply_symbol(m.xorder, m.mask, gen)
        coeff = F.Form(n, (), {(d, C, (), None): LinExpr.var(j)})
        total = total + F.mul(coeff, F.mul(val, F.Form.op_symbol(n, op[0], op[1])))
    sol = _solve_equal(total, form, len(cand))
    acc: Dict = {}
    for j, c in sol.items():
        d, C, m, op = cand[j]
        acc.setdefault((m, OpMonomial.of(op)), {})[(d, C)] = c
    return {k: SuperPoly(n, t) for k, t in acc.items()}


# -- text format ---------------------------------------------------------------------

def _fmt_term(c: Fraction, parts: List[str]) -> Tuple[str, str]:
    body = [p for p in parts if p and p != "1"]
    return c, " * ".join(body)


def _join(items) -> str:
    out = []
    for c, body in items:
        a = -c if c < 0 else c
        s = body if (a == 1 and body) else (format_rat(a) + (" * " + body if body else ""))
        if not out:
            out.append(("-" if c < 0 else "") + s)
        else:
            out.append((" - " if c < 0 else " + ") + s)
    return "".join(out) if out else "0"


def _coef_items(a: SuperPoly):
    for (d, C) in sorted(a.terms, key=lambda k: (k[0], mask_indices(k[1])), reverse=True):
        yield a.terms[(d, C)], format_monomial(d, C)


def format_op(A: DiffOp) -> str:
    items = []
    for m in sorted(A.terms, reverse=True):
        for c, mono in _coef_items(A.terms[m]):
            items.append(_fmt_term(c, [mono, str(m)]))
    return _join(items)


def format_binary(T: BinaryDiffOp) -> str:
    items = []
    for (m1, m2) in sorted(T.terms, reverse=True):
        for c, mono in _coef_items(T.terms[(m1, m2)]):
            items.append(_fmt_term(c, [mono, f"[{m1} | {m2}]"]))
    return _join(items)


def format_cochain_terms(terms) -> str:
    items = []
    for (m1, m2) in sorted(terms, reverse=True):
        for c, mono in _coef_items(terms[(m1, m2)]):
            items.append(_fmt_term(c, [mono, f"{{{m1}}}(G)", str(m2)]))
    return _join(items)


_OPTOK = re.compile(r"\s*(?:(\d+)|(dx)|(x)|t(\d+)|e(\d+)|(\^)|(\*)|(/)|(\+)|(-)|(\[)|(\|)|(\]))")
_KINDS = ["int", "dx", "x", "t", "e", "^", "*", "/", "+", "-", "[", "|", "]"]


def _op_tokens(text: str):
    toks, pos = [], 0
    while pos < len(text):
        if not text[pos:].strip():
            break
        mt = _OPTOK.match(text, pos)
        if not mt:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = mt.end(0) - len(mt.group(0).lstrip())
        for g, kind in enumerate(_KINDS, 1):
            if mt.group(g) is not None:
                toks.append((kind, mt.group(g), start))
                break
        pos = mt.end(0)
    toks.append((None, None, len(text)))
    return toks


class _OpParser:
    def __init__(self, text, n):
        self.toks = _op_tokens(text)
        self.i = 0
        self.n = n

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        t = self.toks[self.i]
        if kind is not None and t[0] != kind:
            raise ParseError(f"expected {kind}", t[2])
        self.i += 1
        return t

    def integer(self):
        return int(self.take("int")[1])

    def index(self, v, pos):
        i = int(v)
        if not 1 <= i <= self.n:
            raise ParseError(f"index {i} exceeds n={self.n}", pos)
        return i

    def symbol(self):
        """Parse a product of dx^k and e_i factors; returns (sign, k, mask)."""
        sign, k, S = 1, 0, 0
        first = True
        while True:
            kind, v, pos = self.peek()
            if kind == "dx":
                self.take()
                e = 1
                if self.peek()[0] == "^":
                    self.take()
                    e = self.integer()
                # d_x is central among the symbols
                k += e
            elif kind == "e":
                self.take()
                s, k2, S = F.eta_word_product(S, 0, 1 << (self.index(v, pos) - 1), 0)
                # S was the word so far; appending eta_i on the right
                sign *= s
                k += k2
            elif kind == "int" and self.peek()[1] == "1" and first:
                self.take()
            else:
                raise ParseError("expected dx or e<i>", pos)
            first = False
            if self.peek()[0] == "*" and self.toks[self.i + 1][0] in ("dx", "e"):
                self.take()
                continue
            return sign, k, S

    def term(self):
        """[coef *] coefficient factors * (symbol | [sym | sym])."""
        n = self.n
        c = Fraction(1)
        kind, v, pos = self.peek()
        if kind == "int":
            c = Fraction(self.integer())
            if self.peek()[0] == "/":
                self.take()
                den = self.integer()
                if den == 0:
                    raise ParseError("zero denominator", pos)
                c /= den
            if self.peek()[0] != "*":
                return SuperPoly.const(n, c), None
            self.take("*")
        coeff = SuperPoly.const(n, c)
        while True:
            kind, v, pos = self.peek()
            if kind == "x":
                self.take()
                e = 1
                if self.peek()[0] == "^":
                    self.take()
                    e = self.integer()
                coeff = coeff * SuperPoly.x(n, e)
            elif kind == "t":
                self.take()
                coeff = coeff * SuperPoly.theta(n, self.index(v, pos))
            elif kind in ("dx", "e"):
                return coeff, ("u", self.symbol())
            elif kind == "[":
                self.take()
                s1 = self.symbol()
                self.take("|")
                s2 = self.symbol()
                self.take("]")
                return coeff, ("b", s1, s2)
            else:
                raise ParseError("expected factor", pos)
            if self.peek()[0] == "*":
                self.take()
                continue
            return coeff, None

    def expr(self):
        out = []
        sign = 1
        if self.peek()[0] == "-":
            self.take()
            sign = -1
        while True:
            coeff, sym = self.term()
            out.append((coeff * sign, sym))
            kind = self.peek()[0]
            if kind in ("+", "-"):
                self.take()
                sign = -1 if kind == "-" else 1
                continue
            if kind is not None:
                raise ParseError("unexpected token", self.peek()[2])
            return out


def parse_op(text: str, n: int, lam=0, mu=0) -> DiffOp:
    """Parse e.g. ``"-1/2 * t1 * dx * e2 + x"``."""
    acc = F.Form(n)
    for coeff, sym in _OpParser(text, n).expr():
        if sym is None:
            s, k, S = 1, 0, 0
        elif sym[0] == "u":
            s, k, S = sym[1]
        else:
            raise ParseError("binary symbol in unary operator", 0)
        acc = acc + F.Form.op_symbol(n, k, S, coeff).scale(s)
    return DiffOp.from_form(acc, lam, mu)


def parse_binary(text: str, n: int, weights=(0, 0, 0)) -> BinaryDiffOp:
    """Parse e.g. ``"t1 * [dx | e1] - [1 | dx]"``."""
    acc: Dict = {}
    for coeff, sym in _OpParser(text, n).expr():
        if sym is None:
            s1, s2 = (1, 0, 0), (1, 0, 0)
        elif sym[0] == "b":
            s1, s2 = sym[1], sym[2]
        else:
            raise ParseError("unary symbol in binary operator", 0)
        key = (OpMonomial(s1[1], mask_indices(s1[2])), OpMonomial(s2[1], mask_indices(s2[2])))
        a = coeff * (s1[0] * s2[0])
        acc[key] = acc[key] + a if key in acc else a
    return BinaryDiffOp(n, weights, acc)


# -- parity twists and the splitting isomorphisms ------------------------------------------

@dataclass(frozen=True)
class PiTag:
    """Parity twists of (first input, second input, output); twice is trivial."""

    twist: Tuple[int, ...] = (0, 0, 0)

    def compose(self, other: "PiTag") -> "PiTag":
        return PiTag(tuple(a ^ b for a, b in zip(self.twist, other.twist)))

    @property
    def total(self) -> int:
        return sum(self.twist) & 1


def _embed(f: F.Form, n: int) -> F.Form:
    """View an (n-1)-variable form as an n-variable one."""
    if f.n == n:
        return f
    if f.n != n - 1:
        raise ArityError(f"expected arity {n - 1}, got {f.n}")
    return F.Form(n, f.slots, f.terms)


def _relabel(f: F.Form, slot: str, bit: int) -> F.Form:
    """Feed the slot from the components carrying theta_n (F = F1 + F2 theta_n)."""
    j = f.slots.index(slot)
    out = {}
    for (d, C, fs, op), c in f.terms.items():
        T, k = fs[j]
        out[(d, C, fs[:j] + ((T | bit, k),) + fs[j + 1:], op)] = c
    return f.copy_with(out)


def _times_theta_n(f: F.Form, bit: int) -> F.Form:
    """Right multiplication by theta_n of a value whose thetas avoid n."""
    return f.copy_with({(d, C | bit, fs, op): c for (d, C, fs, op), c in f.terms.items()})


def _unary_value(A: DiffOp) -> F.Form:
    return F.compose(A.form(), F.generic_all(A.n, "F"))


PHI_SLOTS = ("11", "22", "21", "12")  # (input part -> output part)


def phi_signatures(lam, mu):
    h = Fraction(1, 2)
    lam, mu = Fraction(lam), Fraction(mu)
    return [((lam, mu), 0), ((lam + h, mu + h), 0), ((lam, mu + h), 1), ((lam + h, mu), 1)]


def phi_lift_form(parts: Sequence[Optional[F.Form]], n: int) -> F.Form:
    """phi_mu^{-1} o (A1, A2, Pi A3, Pi A4) o phi_lam as a value form in slot F.

    The n-variable operator sends F1 + F2 theta_n to
    (A1 F1 + A4 F2) + (A3 F1 + A2 F2) theta_n.
    """
    bit = 1 << (n - 1)
    out = F.Form(n, ("F",))
    A1, A2, A3, A4 = parts
    if A1 is not None:
        out = out + _embed(A1, n)
    if A4 is not None:
        out = out + _relabel(_embed(A4, n), "F", bit)
    if A3 is not None:
        out = out + _times_theta_n(_embed(A3, n), bit)
    if A2 is not None:
        out = out + _times_theta_n(_relabel(_embed(A2, n), "F", bit), bit)
    return out


def operator_from_value(f: F.Form, slot: str = "F") -> F.Form:
    """Invert ``A -> compose(A, generic F)``.

    ``f`` is linear in the argument ``slot``; the other slots are carried along
    as coefficients. Returns the operator form in the remaining slots.
    """
    n = f.n
    j = f.slots.index(slot)
    rest = f.slots[:j] + f.slots[j + 1:]
    groups: Dict[tuple, Dict] = {}
    for (d, C, fs, op), c in f.terms.items():
        if op is not None:
            raise ValueError("value form expected")
        groups.setdefault(fs[:j] + fs[j + 1:], {})[(d, C, (fs[j],), None)] = c
    gen = F.generic_all(n, slot)
    out: Dict[tuple, Fraction] = {}
    for r, terms in groups.items():
        target = F.Form(n, (slot,), terms)
        grades = {d + Fraction(popcount(C), 2) - k - Fraction(popcount(T), 2)
                  for (d, C, ((T, k),), _) in terms}
        maxd = max(d for (d, *_rest) in terms)
        # d/d theta_i = eta_i + theta_i d_x: one extra d_x per odd variable
        maxk = max(k for (_, _, ((_, k),), _) in terms) + n
        cand = []
        for d in range(maxd + 1):
            for C in range(1 << n):
                for k in range(maxk + 1):
                    for S in range(1 << n):
                        if d + Fraction(popcount(C), 2) - k - Fraction(popcount(S), 2) in grades:
                            cand.append((d, C, (k, S)))
        lin = F.Form(n, (), {(d, C, (), op): LinExpr.var(i) for i, (d, C, op) in enumerate(cand)})
        sol = _solve_equal(F.compose(lin, gen), target, len(cand))
        for i, c in sol.items():
            d, C, op = cand[i]
            out[(d, C, r, op)] = c
    return F.Form(n, rest, out)


def unary_from_value(f: F.Form, lam, mu, slot: str = "F") -> DiffOp:
    """Recover the operator A from its value A(F) on a generic argument."""
    terms = cochain_eta_terms(F.Form(f.n, (slot,), {k[:3] + ((0, 0),): c for k, c in f.terms.items()}), slot)
    acc = {}
    for (m, _), a in terms.items():
        acc[m] = a
    return DiffOp(f.n, lam, mu, acc)


def phi_lift(parts: Sequence[Optional[DiffOp]], lam, mu) -> DiffOp:
    """Phi_{lam,mu}: D_{lam,mu} + D_{lam',mu'} + Pi(D_{lam,mu'} + D_{lam',mu}) -> D^n_{lam,mu}."""
    sigs = phi_signatures(lam, mu)
    n = None
    forms = []
    for A, ((a, b), _) in zip(parts, sigs):
        if A is None or A.is_zero():
            forms.append(None)
            continue
        if (A.source_weight, A.target_weight) != (a, b):
            raise WeightError(f"part has weights {(A.source_weight, A.target_weight)}, expected {(a, b)}")
        n = A.n + 1
        forms.append(_unary_value(A))
    if n is None:
        n = next((A.n + 1 for A in parts if A is not None), None)
        if n is None:
            raise ValueError("cannot infer arity from all-empty parts")
        return DiffOp(n, lam, mu)
    return unary_from_value(phi_lift_form(forms, n), lam, mu)


def psi_signatures(lam, mu, nu):
    """The eight weight signatures, in order, with their Pi flags."""
    h = Fraction(1, 2)
    l, m, v = Fraction(lam), Fraction(mu), Fraction(nu)
    return [
        ((l, m, v), 0), ((l + h, m + h, v), 0), ((l, m + h, v + h), 0), ((l + h, m, v + h), 0),
        ((l, m, v + h), 1), ((l, m + h, v), 1), ((l + h, m, v), 1), ((l + h, m + h, v + h), 1),
    ]


def psi_lift_form(parts: Sequence[Optional[F.Form]], n: int) -> F.Form:
    """phi_nu^{-1} o A o psi_{lam,mu} on generic arguments.

    Part j feeds from (F1 or F2, G1 or G2) into output part 1 or 2, with
    sigma(G) = (-1)^{|G|} G inserted as in the identification table.
    """
    bit = 1 << (n - 1)
    # (F part, G part, output part, sign rule)
    # Pi is applied without a Koszul sign; sigma sits on G whenever the first
    # input is Pi(F2). Other sign choices break K(n-1)-equivariance.
    plan = [
        (1, 1, 1, None), (2, 2, 1, "sG"), (1, 2, 2, None), (2, 1, 2, "sG"),
        (1, 1, 2, None), (1, 2, 1, None), (2, 1, 1, "sG"), (2, 2, 2, "sG"),
    ]
    out = F.Form(n, BSLOTS)
    for A, (fp, gp, op, rule) in zip(parts, plan):
        if A is None or not A.terms:
            continue
        f = _embed(A, n)
        if rule == "sG":
            # parity of G1 or G2 as an (n-1)-variable function
            f = F.sign_by_label(f, "G")
        if fp == 2:
            f = _relabel(f, "F", bit)
        if gp == 2:
            f = _relabel(f, "G", bit)
        if op == 2:
            f = _times_theta_n(f, bit)
        out = out + f
    return out


def psi_lift(parts: Sequence[Optional[BinaryDiffOp]], lam, mu, nu) -> BinaryDiffOp:
    sigs = psi_signatures(lam, mu, nu)
    if len(parts) != 8:
        raise ValueError("expected eight parts")
    n = None
    forms = []
    for T, (w, _) in zip(parts, sigs):
        if T is None or T.is_zero():
            forms.append(None)
            continue
        if tuple(T.weights) != w:
            raise WeightError(f"part has weights {T.weights}, expected {w}")
        n = T.n + 1
        forms.append(T.form())
    if n is None:
        n = next((T.n + 1 for T in parts if T is not None), None)
        if n is None:
            raise ValueError("cannot infer arity from all-empty parts")
        return BinaryDiffOp(n, (lam, mu, nu))
    return binary_from_form(psi_lift_form(forms, n), (lam, mu, nu))
