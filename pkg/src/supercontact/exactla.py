"""Exact sparse linear algebra over the rationals.

Vectors are dicts ``{index: Fraction}`` with no stored zeros. Elimination keeps
the pivot rows in reduced row echelon form as rows arrive, so very tall
systems (many more equations than unknowns) stream through in one pass.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional

Vec = Dict[int, Fraction]


class ContainmentError(ValueError):
    """Raised when a subspace expected to lie inside another does not."""


def _size(c: Fraction) -> int:
    return abs(c.numerator).bit_length() + c.denominator.bit_length()


@dataclass
class RatMatrix:
    rows: int
    cols: int
    entries: Dict[tuple, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise IndexError(f"entry {(r, c)} outside {self.rows}x{self.cols}")
            if v:
                clean[(r, c)] = Fraction(v)
        self.entries = clean

    @classmethod
    def from_dense(cls, data: List[List]) -> "RatMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        ent = {(i, j): Fraction(v) for i, row in enumerate(data) for j, v in enumerate(row) if v}
        return cls(rows, cols, ent)

    def row_dicts(self) -> List[Vec]:
        out: List[Vec] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def apply(self, v: Vec) -> Vec:
        out: Vec = {}
        for (r, c), a in self.entries.items():
            x = v.get(c)
            if x:
                out[r] = out.get(r, 0) + a * x
        return {r: x for r, x in out.items() if x}


@dataclass
class Subspace:
    ambient_dim: int
    basis: List[Vec]

    @property
    def dim(self) -> int:
        return len(self.basis)


class Eliminator:
    """Incremental RREF over Q.

    ``add(row)`` reduces the row against current pivots and, if anything is
    left, records it as a new pivot row.
    """

    def __init__(self, avoid: Iterable[int] = ()):
        self.avoid = frozenset(avoid)  # columns used as pivots only as a last resort
        self.pivots: Dict[int, Vec] = {}
        self.col_users: Dict[int, set] = {}  # column -> pivot cols whose row uses it

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Vec) -> Vec:
        row = {c: Fraction(v) for c, v in row.items() if v}
        hits = [c for c in row if c in self.pivots]
        for p in hits:
            a = row.get(p)
            if not a:
                continue
            for c, v in self.pivots[p].items():
                nv = row.get(c, 0) - a * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
        return row

    def add(self, row: Vec) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        p = min(row, key=lambda c: (c in self.avoid, _size(row[c]), c))
        inv = 1 / row[p]
        row = {c: v * inv for c, v in row.items()}
        # keep existing pivot rows free of the new pivot column
        for q in list(self.col_users.get(p, ())):
            prow = self.pivots[q]
            a = prow.get(p)
            if not a:
                continue
            for c, v in row.items():
                nv = prow.get(c, 0) - a * v
                if nv:
                    if c not in prow:
                        self.col_users.setdefault(c, set()).add(q)
                    prow[c] = nv
                else:
                    prow.pop(c, None)
                    self.col_users.get(c, set()).discard(q)
        self.pivots[p] = row
        for c in row:
            self.col_users.setdefault(c, set()).add(p)
        return True

    def contains(self, row: Vec) -> bool:
        return not self.reduce(row)

    def null_basis(self, ncols: int, columns: Optional[Iterable[int]] = None) -> List[Vec]:
        cols = range(ncols) if columns is None else columns
        basis = []
        for f in cols:
            if f in self.pivots:
                continue
            v = {f: Fraction(1)}
            for p in self.col_users.get(f, ()):
                a = self.pivots[p].get(f)
                if a:
                    v[p] = -a
            basis.append(v)
        return basis


def rank_of(rows: Iterable[Vec]) -> int:
    el = Eliminator()
    for r in rows:
        el.add(r)
    return el.rank


def rank(M: RatMatrix) -> int:
    return rank_of(M.row_dicts())


def dot(u: Vec, v: Vec) -> Fraction:
    if len(u) > len(v):
        u, v = v, u
    return sum((a * v[c] for c, a in u.items() if c in v), Fraction(0))


def nullspace_rows(rows: Iterable[Vec], ncols: int, verify: bool = True) -> Subspace:
    rows = list(rows)
    el = Eliminator()
    for r in rows:
        el.add(r)
    basis = el.null_basis(ncols)
    if verify:
        for v in basis:
            for r in rows:
                if dot(r, v):
                    raise AssertionError("nullspace vector fails re-verification")
    return Subspace(ncols, basis)


def nullspace(M: RatMatrix, verify: bool = True) -> Subspace:
    return nullspace_rows(M.row_dicts(), M.cols, verify=verify)


def solve(M: RatMatrix, b: Vec) -> Optional[Vec]:
    """One solution of M v = b, or None if inconsistent."""
    rows = M.row_dicts()
    aug = M.cols
    el = Eliminator(avoid=(aug,))
    for i, r in enumerate(rows):
        r = dict(r)
        if b.get(i):
            r[aug] = Fraction(b[i])
        el.add(r)
    if aug in el.pivots:
        return None
    sol = {}
    for p, row in el.pivots.items():
        val = row.get(aug, 0)
        if val:
            sol[p] = val
    return sol


def in_span(basis: List[Vec], v: Vec) -> bool:
    el = Eliminator()
    for b in basis:
        el.add(b)
    return el.contains(v)


def span_rank(vectors: Iterable[Vec]) -> int:
    return rank_of(vectors)


def quotient_dim(Z: Subspace, B: Subspace) -> int:
    """dim Z - dim span(B); raises ContainmentError unless span(B) lies in span(Z)."""
    if Z.ambient_dim != B.ambient_dim:
        raise ValueError("ambient dimensions differ")
    el = Eliminator()
    for z in Z.basis:
        el.add(z)
    dz = el.rank
    for b in B.basis:
        if not el.contains(b):
            raise ContainmentError("coboundary vector outside cocycle space")
    return dz - rank_of(B.basis)


class KeyIndex:
    """Assigns consecutive integer indices to hashable keys."""

    def __init__(self):
        self.index: Dict[Hashable, int] = {}
        self.keys: List[Hashable] = []

    def __call__(self, key) -> int:
        i = self.index.get(key)
        if i is None:
            i = self.index[key] = len(self.keys)
            self.keys.append(key)
        return i

    def __len__(self):
        return len(self.keys)


CONST = -1  # index of the constant part of a LinExpr


class LinExpr:
    """Immutable linear expression sum_j c_j u_j (+ constant at index CONST).

    Used as a coefficient inside forms so that an ansatz with unknown
    coefficients can be pushed through the algebra in a single pass.
    """

    __slots__ = ("d",)

    def __init__(self, d: Optional[Dict[int, Fraction]] = None):
        self.d = d or {}

    @classmethod
    def var(cls, j: int, c=1) -> "LinExpr":
        return cls({j: Fraction(c)})

    @staticmethod
    def _as(o) -> Dict[int, Fraction]:
        if isinstance(o, LinExpr):
            return o.d
        return {CONST: Fraction(o)} if o else {}

    def __add__(self, o):
        od = self._as(o)
        if not od:
            return self
        out = dict(self.d)
        for j, c in od.items():
            v = out.get(j, 0) + c
            if v:
                out[j] = v
            else:
                out.pop(j, None)
        return LinExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return LinExpr({j: -c for j, c in self.d.items()})

    def __sub__(self, o):
        return self + (-o if isinstance(o, LinExpr) else -Fraction(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, c):
        if isinstance(c, LinExpr):
            raise TypeError("product of two linear expressions")
        if not c:
            return LinExpr()
        return LinExpr({j: v * c for j, v in self.d.items()})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.d)

    def __eq__(self, o):
        return self.d == self._as(o)

    def __repr__(self):
        return f"LinExpr({self.d})"


def rows_of(coeffs: Iterable) -> List[Vec]:
    """Constraint rows (c = 0) from a collection of LinExpr/number coefficients."""
    out = []
    for c in coeffs:
        if isinstance(c, LinExpr):
            if c.d:
                out.append(dict(c.d))
        elif c:
            out.append({CONST: Fraction(c)})
    return out
