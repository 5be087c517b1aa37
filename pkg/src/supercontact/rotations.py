"""so(n) symmetry reduction.

The fields R_ij = X_{2 theta_i theta_j} span an so(n) inside K(n). They
commute with d_x and with multiplication by x, and act on theta-monomials,
eta-symbols and argument components through the exterior powers of the vector
representation. Cohomology (and invariance) problems can therefore be solved
on so(n)-invariant ansatz vectors, which are computed here once per shape and
reused for every weight.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, List, Tuple

from . import forms as F
from .exactla import LinExpr, nullspace_rows, rows_of
from .grassmann import SuperPoly, mask_of


def masks_of_size(n: int, k: int, exclude: int = 0) -> List[int]:
    return [mask_of(c) for c in combinations(range(1, n + 1), k) if not mask_of(c) & exclude]


def rotation_generators(n: int, skip: int = 0) -> List[SuperPoly]:
    """Generators 2 theta_a theta_b (adjacent a<b) of so(n), or of the so(n-1)
    fixing index ``skip``."""
    idx = [a for a in range(1, n + 1) if a != skip]
    return [SuperPoly.theta(n, a, b) * 2 for a, b in zip(idx, idx[1:])]


def rotation_defect(A: F.Form, R: SuperPoly, slot: str = None) -> F.Form:
    """R . A for an even rotation field R (R' = 0, so weights drop out)."""
    Rf = F.Form.from_poly(R)
    L = F.field_operator(Rf, 0)
    if A.is_value:
        out = F.compose(L, A)
    else:
        out = F.compose(L, A) - F.compose(A, L)
    for s in A.slots:
        h = F.generic_all(A.n, s)
        out = out - F.substitute(A, s, F.compose(L, h))
    return out


def _invariant_vectors(n: int, keys: List[tuple], skip: int) -> List[Dict[tuple, Fraction]]:
    if not keys:
        return []
    proto = keys[0]
    slots = tuple(f"s{j}" for j in range(len(proto[2])))
    A = F.Form(n, slots, {k: LinExpr.var(j) for j, k in enumerate(keys)})
    rows = []
    for R in rotation_generators(n, skip):
        rows.extend(rows_of(rotation_defect(A, R).terms.values()))
    sub = nullspace_rows(rows, len(keys))
    return [{keys[j]: c for j, c in v.items()} for v in sub.basis]


@lru_cache(maxsize=None)
def _block(n: int, shape: tuple, skip: int):
    """Invariant vectors for keys of the given (|C|, slot sizes, |S| or None)."""
    c, slot_sizes, s = shape
    keys = []
    for C in masks_of_size(n, c):
        for Ts in _slot_products(n, slot_sizes):
            fs = tuple((T, 0) for T in Ts)
            if s is None:
                keys.append((0, C, fs, None))
            else:
                for S in masks_of_size(n, s):
                    keys.append((0, C, fs, (0, S)))
    return tuple(tuple(sorted(v.items())) for v in _invariant_vectors(n, keys, skip))


def _slot_products(n, sizes):
    if not sizes:
        yield ()
        return
    for T in masks_of_size(n, sizes[0]):
        for rest in _slot_products(n, sizes[1:]):
            yield (T,) + rest


def _shape(key) -> tuple:
    d, C, fs, op = key
    from .grassmann import popcount
    return (popcount(C), tuple(popcount(T) for T, _ in fs), None if op is None else popcount(op[1]))


def _graft(base, proto):
    """Move the theta data of ``base`` (k's zero) onto the derivative data of ``proto``."""
    d, C, fs, op = base
    pd, _, pfs, pop = proto
    nfs = tuple((T, k) for (T, _), (_, k) in zip(fs, pfs))
    nop = None if op is None else (pop[0], op[1])
    return (pd, C, nfs, nop)


def _grade(key) -> tuple:
    d, C, fs, op = key
    return (d, tuple(k for _, k in fs), None if op is None else op[0])


def invariant_basis(n: int, keys: List[tuple], skip: int = 0) -> List[Dict[tuple, Fraction]]:
    """Basis of the so(n)- (or so(n-1)-) invariant vectors supported on ``keys``.

    ``keys`` must be closed under the rotation action (true for every ansatz
    built from full shape classes).
    """
    keyset = set(keys)
    classes: Dict[tuple, tuple] = {}
    for k in keys:
        classes.setdefault((_shape(k), _grade(k)), k)
    out = []
    for (shape, _), proto in sorted(classes.items(), key=lambda t: repr(t[0])):
        for vec in _block(n, shape, skip):
            v = {_graft(b, proto): c for b, c in vec}
            if all(k in keyset for k in v):
                out.append(v)
    return out
