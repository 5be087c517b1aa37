"""First cohomology of K(n) with coefficients in D_{lambda,mu}.

A 1-cochain is stored in the normal form of :mod:`supercontact.forms` with a
single formal argument ``G`` (the generator of the field it is evaluated on):
Upsilon(X_G) = sum q theta_C g_T^{(k1)} [d_x^k2 eta_S]. Catalog cocycles are
written as builders ``(G, |G|) -> operator form`` and normalised by feeding
them every generic component theta_T g_T.

Dimension counts use three reductions:

* translation gauge: every class has a representative with x-independent
  coefficients; the matching coboundaries come from operators of x-degree
  at most one;
* Euler grading: only cochains of weight zero for X_x carry cohomology;
* so(n): the invariant subcomplex has the same H^1, and a cochain whose
  defect vanishes on {1, theta_1, x^2, x^3} (plus rotations) is a cocycle,
  because these generate K(n).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import forms as F
from . import rotations
from .exactla import (
    CONST,
    ContainmentError,
    Eliminator,
    LinExpr,
    Subspace,
    nullspace_rows,
    quotient_dim,
    rows_of,
)
from .grassmann import SuperPoly, popcount
from .rotations import masks_of_size

SLOT = "G"
Builder = Callable[[F.Form, int], F.Form]


# -- cochains ---------------------------------------------------------------------

@dataclass
class Cochain1:
    """A differential 1-cochain K(n) -> D_{lam,mu} in normal form."""

    n: int
    lam: Fraction
    mu: Fraction
    form: F.Form
    parity: int = 0
    name: str = ""
    pi: bool = False     # values in Pi(D): the module parity is the operator parity + 1

    @classmethod
    def from_builder(cls, n, lam, mu, builder: Builder, parity: int, name="", exclude=0):
        total = F.Form(n, (SLOT,))
        for piece, p in F.generic_pieces(n, SLOT, exclude=exclude):
            total = total + builder(piece, p)
        return cls(n, Fraction(lam), Fraction(mu), total, parity, name)

    def __call__(self, g: SuperPoly) -> F.Form:
        """The operator Upsilon(X_g) for a polynomial g."""
        return F.substitute(self.form, SLOT, F.Form.from_poly(g))

    def __add__(self, other):
        return Cochain1(self.n, self.lam, self.mu, self.form + other.form, self.parity, pi=self.pi)

    def __sub__(self, other):
        return Cochain1(self.n, self.lam, self.mu, self.form - other.form, self.parity, pi=self.pi)

    def scale(self, c):
        return Cochain1(self.n, self.lam, self.mu, self.form.scale(c), self.parity, self.name, self.pi)

    def is_zero(self) -> bool:
        return not self.form.terms

    def x_independent(self) -> bool:
        return all(k[0] == 0 for k in self.form.terms)


def _lin_form(n, slots, keys, vectors=None) -> F.Form:
    """Ansatz form: coefficient of key = sum_b u_b v_b[key] (unit vectors if None)."""
    if vectors is None:
        return F.Form(n, slots, {k: LinExpr.var(j) for j, k in enumerate(keys)})
    acc: Dict[tuple, Dict[int, Fraction]] = {}
    for b, v in enumerate(vectors):
        for k, c in v.items():
            acc.setdefault(k, {})[b] = c
    return F.Form(n, slots, {k: LinExpr(d) for k, d in acc.items()})


def _field_parts(h: F.Form):
    """Split a generic argument by parity of its components."""
    parts = F.label_parity_split(h, h.slots[0])
    return [(p, parts[p]) for p in (0, 1) if parts[p].terms]


def cocycle_defect(Y: F.Form, tau: int, g: F.Form, pg: int, lam, mu, exclude: int = 0) -> F.Form:
    """delta Upsilon(X_g, X_h) for a fixed homogeneous g and generic h (slot G).

    (-1)^{|g||Y|} g.Y(h) - (-1)^{|h|(|g|+|Y|)} h.Y(g) - Y([g,h]).
    """
    n = Y.n
    out = F.Form(n, (SLOT,))
    split = F.label_parity_split(Y, SLOT)
    for p in (0, 1):
        part = split[p]
        if not part.terms:
            continue
        t = F.act(g, pg, part, (tau + p) & 1, lam, mu)
        out = out + (t.scale(-1) if (pg & tau) else t)
    Yg = F.substitute(Y, SLOT, g)
    pY = (pg + tau) & 1
    h_all = F.generic_all(n, SLOT, exclude)
    for q, hq in _field_parts(h_all):
        left = F.compose(F.field_operator(hq, q, mu), Yg)
        right = F.compose(Yg, F.field_operator(hq, q, lam))
        s = -1 if (q & pY) else 1
        out = out - (left - right.scale(s)).scale(s)
    out = out - F.substitute(Y, SLOT, F.bracket(g, pg, h_all))
    return out


def delta0_form(A: F.Form, tau: int, lam, mu, exclude: int = 0) -> F.Form:
    """delta A (X_G) = (-1)^{|G||A|} X_G . A on a generic G."""
    out = F.Form(A.n, (SLOT,))
    for q, hq in _field_parts(F.generic_all(A.n, SLOT, exclude)):
        t = F.compose(F.field_operator(hq, q, mu), A)
        r = F.compose(A, F.field_operator(hq, q, lam))
        s = -1 if (q & tau) else 1
        out = out + (t - r.scale(s)).scale(s)
    return out


def delta0(A: F.Form, lam, mu, parity: Optional[int] = None) -> Cochain1:
    ps = A.parities()
    if parity is None:
        if len(ps) > 1:
            raise ValueError("operator is not parity-homogeneous")
        parity = ps.pop() if ps else 0
    return Cochain1(A.n, Fraction(lam), Fraction(mu), delta0_form(A, parity, lam, mu), parity)


def generating_set(n: int, reduced: bool) -> List[SuperPoly]:
    """Generators of K(n) as a Lie superalgebra (with so(n) if ``reduced``)."""
    gens = [SuperPoly.const(n, 1), SuperPoly.x(n, 2), SuperPoly.x(n, 3)]
    if reduced:
        return gens + ([SuperPoly.theta(n, 1)] if n else [])
    gens += [SuperPoly.theta(n, a) for a in range(1, n + 1)]
    gens += [SuperPoly.theta(n, a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
    return gens


def _hom_parts(g: SuperPoly):
    return list(F.poly_pieces(g))


# -- the x-independent weight-zero ansatz -----------------------------------------

def _half2(q: Fraction) -> Optional[int]:
    t = 2 * Fraction(q)
    return int(t) if t.denominator == 1 else None


def cochain_keys(n: int, lam, mu, max_order=None, require: int = 0) -> List[tuple]:
    """Keys (0, C, ((T,k1),), (k2,S)) of weight zero.

    Weight zero reads k1 + k2 + (|S| + |T| - |C|)/2 = 1 + mu - lam; ``require``
    restricts to components T containing that mask (relative cochains).
    """
    w2 = _half2(1 + Fraction(mu) - Fraction(lam))
    if w2 is None or w2 < 0:
        return []
    keys = []
    sizes = range(n + 1)
    for c in sizes:
        for t in sizes:
            for s in sizes:
                r = w2 - s - t + c
                if r < 0 or r & 1:
                    continue
                ksum = r // 2
                for k2 in range(ksum + 1):
                    if max_order is not None and k2 + Fraction(s, 2) > max_order:
                        continue
                    k1 = ksum - k2
                    for C in masks_of_size(n, c):
                        for T in masks_of_size(n, t):
                            if T & require != require:
                                continue
                            for S in masks_of_size(n, s):
                                keys.append((0, C, ((T, k1),), (k2, S)))
    return keys


def operator_keys(n: int, lam, mu, xdeg_max: int = 1, max_order=None) -> List[tuple]:
    """Operator keys (d, C, (), (k,S)) of weight zero: d + |C|/2 - k - |S|/2 + mu - lam = 0."""
    m2 = _half2(Fraction(mu) - Fraction(lam))
    if m2 is None:
        return []
    keys = []
    for d in range(xdeg_max + 1):
        for c in range(n + 1):
            for s in range(n + 1):
                r = 2 * d + c - s + m2
                if r < 0 or r & 1:
                    continue
                k = r // 2
                if max_order is not None and k + Fraction(s, 2) > max_order:
                    continue
                for C in masks_of_size(n, c):
                    for S in masks_of_size(n, s):
                        keys.append((d, C, (), (k, S)))
    return keys


def _parity_of_key(key) -> int:
    d, C, fs, op = key
    p = popcount(C) + (popcount(op[1]) if op else 0) - sum(popcount(T) for T, _ in fs)
    return p & 1


# -- reports --------------------------------------------------------------------------

@dataclass
class H1Report:
    n: int
    lam: Fraction
    mu: Fraction
    cocycle_space_dim: int
    coboundary_space_dim: int
    h1_dim: int
    max_order: Optional[Fraction]
    generator_dmax: int
    representatives: List[Cochain1] = field(default_factory=list)
    relative: Optional[int] = None
    reduced: bool = True
    matched: List[str] = field(default_factory=list)


@dataclass
class H1Config:
    """Knobs of the dimension computation."""

    max_order: Optional[Fraction] = None
    reduced: bool = True
    check_containment: bool = True


def _coords(form: F.Form, index: Dict[tuple, int]) -> Dict[int, Fraction]:
    out = {}
    for k, c in form.terms.items():
        j = index.get(k)
        if j is None:
            raise ContainmentError(f"term {k} outside the ansatz")
        out[j] = c
    return out


def _solve_cocycles(n, lam, mu, keys, tau, reduced, relative: int = 0):
    """Basis of cocycles (as key-coordinate vectors) inside span(keys)."""
    index = {k: j for j, k in enumerate(keys)}
    if reduced:
        vecs = rotations.invariant_basis(n, keys, skip=relative)
    else:
        vecs = [{k: Fraction(1)} for k in keys]
    if not vecs:
        return index, []
    Y = _lin_form(n, (SLOT,), keys, vecs)
    rows = []
    if relative:
        gens = _relative_generating_set(n, relative, reduced)
    else:
        gens = generating_set(n, reduced)
    for g in gens:
        for gf, pg in _hom_parts(g):
            rows.extend(rows_of(cocycle_defect(Y, tau, gf, pg, lam, mu).terms.values()))
    sub = nullspace_rows(rows, len(vecs))
    basis = []
    for z in sub.basis:
        v: Dict[int, Fraction] = {}
        for b, c in z.items():
            for k, a in vecs[b].items():
                j = index[k]
                nv = v.get(j, 0) + c * a
                if nv:
                    v[j] = nv
                else:
                    v.pop(j, None)
        basis.append(v)
    return index, basis


def _relative_generating_set(n, i, reduced):
    gens = [SuperPoly.const(n, 1), SuperPoly.x(n, 2), SuperPoly.x(n, 3)]
    gens += [SuperPoly.theta(n, a) for a in range(1, n + 1)]
    if not reduced:
        gens += [SuperPoly.theta(n, a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
    return gens


def _coboundaries(n, lam, mu, index, tau, max_order, reduced, relative: int = 0):
    """delta of weight-zero operators of x-degree <= 1 landing in span(index)."""
    xdeg = 0 if relative else 1
    akeys = [k for k in operator_keys(n, lam, mu, xdeg) if _parity_of_key(k) == tau]
    if reduced:
        avecs = rotations.invariant_basis(n, akeys, skip=relative)
    else:
        avecs = [{k: Fraction(1)} for k in akeys]
    if relative:
        avecs = _h_invariant(n, lam, mu, akeys, avecs, relative)
    if not avecs:
        return []
    A = _lin_form(n, (), akeys, avecs)
    dA = delta0_form(A, tau, lam, mu)
    rows, keep = [], []
    for k, c in dA.terms.items():
        if k in index:
            keep.append((index[k], c))
        else:
            rows.extend(rows_of([c]))
    sub = nullspace_rows(rows, len(avecs))
    out = []
    for v in sub.basis:
        img = {}
        for j, c in keep:
            val = sum((a * v[b] for b, a in c.d.items() if b in v), Fraction(0))
            if val:
                img[j] = val
        if img:
            out.append(img)
    return out


def _h_invariant(n, lam, mu, akeys, avecs, i):
    """Restrict to operators invariant under K(n-1)^i (theta_i-free fields)."""
    A = _lin_form(n, (), akeys, avecs)
    rows = []
    gens = [SuperPoly.const(n, 1), SuperPoly.x(n, 2), SuperPoly.x(n, 3)]
    gens += [SuperPoly.theta(n, a) for a in range(1, n + 1) if a != i]
    gens += [SuperPoly.theta(n, a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)
             if i not in (a, b)]
    tau = {_parity_of_key(k) for k in akeys}
    pA = tau.pop() if tau else 0
    for g in gens:
        for gf, pg in _hom_parts(g):
            rows.extend(rows_of(F.act(gf, pg, A, pA, lam, mu).terms.values()))
    sub = nullspace_rows(rows, len(avecs))
    out = []
    for z in sub.basis:
        v: Dict[tuple, Fraction] = {}
        for b, c in z.items():
            for k, a in avecs[b].items():
                v[k] = v.get(k, 0) + c * a
        out.append({k: c for k, c in v.items() if c})
    return out


def _vec_to_cochain(n, lam, mu, keys, v, tau) -> Cochain1:
    return Cochain1(n, Fraction(lam), Fraction(mu),
                    F.Form(n, (SLOT,), {keys[j]: c for j, c in v.items()}), tau)


def h1_dim(n: int, lam, mu, max_order=None, reduced: bool = True, dmax: int = 3) -> H1Report:
    """dim H^1(K(n); D_{lam,mu}) restricted to operators of order <= max_order."""
    lam, mu = Fraction(lam), Fraction(mu)
    m2 = _half2(mu - lam)
    mo = None if max_order is None else Fraction(max_order)
    if m2 is None:
        return H1Report(n, lam, mu, 0, 0, 0, mo, dmax, reduced=reduced)
    tau = m2 & 1
    keys = cochain_keys(n, lam, mu, mo)
    index, Z = _solve_cocycles(n, lam, mu, keys, tau, reduced)
    B = _coboundaries(n, lam, mu, index, tau, mo, reduced)
    dim = quotient_dim(Subspace(len(keys), Z), Subspace(len(keys), B))
    reps = _representatives(n, lam, mu, keys, Z, B, tau)
    bdim = len(Z) - dim
    return H1Report(n, lam, mu, len(Z), bdim, dim, mo, dmax, reps, reduced=reduced)


def relative_h1_dim(n: int, i: int, lam, mu, max_order=None, reduced: bool = True,
                    dmax: int = 3) -> H1Report:
    """Classes of cocycles vanishing on K(n-1)^i modulo delta of invariants."""
    if not 1 <= i <= n:
        raise ValueError(f"index {i} out of range 1..{n}")
    lam, mu = Fraction(lam), Fraction(mu)
    m2 = _half2(mu - lam)
    mo = None if max_order is None else Fraction(max_order)
    if m2 is None:
        return H1Report(n, lam, mu, 0, 0, 0, mo, dmax, relative=i, reduced=reduced)
    tau = m2 & 1
    keys = cochain_keys(n, lam, mu, mo, require=1 << (i - 1))
    index, Z = _solve_cocycles(n, lam, mu, keys, tau, reduced, relative=i)
    B = _coboundaries(n, lam, mu, index, tau, mo, reduced, relative=i)
    dim = quotient_dim(Subspace(len(keys), Z), Subspace(len(keys), B))
    reps = _representatives(n, lam, mu, keys, Z, B, tau)
    return H1Report(n, lam, mu, len(Z), len(Z) - dim, dim, mo, dmax, reps,
                    relative=i, reduced=reduced)


def _representatives(n, lam, mu, keys, Z, B, tau):
    """Class representatives, each reduced modulo the coboundaries."""
    el_b = Eliminator()
    for b in B:
        el_b.add(b)
    el = Eliminator()
    for b in B:
        el.add(b)
    reps = []
    for z in Z:
        if el.add(z):
            reps.append(_vec_to_cochain(n, lam, mu, keys, el_b.reduce(z), tau))
    return reps
