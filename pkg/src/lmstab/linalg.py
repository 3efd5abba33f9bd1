"""Dense exact linear algebra for graded-piece dimension counts.

Over GF(p) row reduction runs on int64 numpy arrays (p < 2**31 keeps every
product in range); over QQ it falls back to Fraction lists.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import HomogeneityError
from .polyring import HPoly, grevlex_key, monomials, num_monomials


@dataclass(frozen=True)
class DenseMatrix:
    rows: int
    cols: int
    entries: tuple
    field: object

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows*cols")

    @classmethod
    def from_rows(cls, rows, field, cols=None):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else (cols or 0)
        return cls(len(rows), ncols, tuple(field(x) for r in rows for x in r), field)

    @classmethod
    def zeros(cls, rows, cols, field):
        return cls(rows, cols, (field(0),) * (rows * cols), field)

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def apply(self, vec):
        F = self.field
        return [F(sum(a * b for a, b in zip(self.row(i), vec))) for i in range(self.rows)]

    def is_zero(self):
        return all(x == 0 for x in self.entries)


def _rref_modp(m):
    p = m.field.p
    a = np.array(m.entries, dtype=np.int64).reshape(m.rows, m.cols) % p
    pivots = []
    r = 0
    for c in range(m.cols):
        if r == m.rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            a[rows] = (a[rows] - np.outer(col[rows], a[r])) % p
        pivots.append(c)
        r += 1
    entries = tuple(int(x) for x in a.ravel())
    return DenseMatrix(m.rows, m.cols, entries, m.field), pivots


def _rref_generic(m):
    F = m.field
    a = [[Fraction(x) for x in m.row(i)] for i in range(m.rows)]
    pivots = []
    r = 0
    for c in range(m.cols):
        if r == m.rows:
            break
        k = next((i for i in range(r, m.rows) if a[i][c] != 0), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return DenseMatrix(m.rows, m.cols, tuple(F(x) for row in a for x in row), F), pivots


def rref(m):
    """Reduced row echelon form and the (strictly increasing) pivot columns."""
    if m.rows == 0 or m.cols == 0:
        return m, []
    if getattr(m.field, "p", None):
        return _rref_modp(m)
    return _rref_generic(m)


def rank(m):
    return len(rref(m)[1])


def kernel_basis(m):
    """Basis of the right kernel, one vector per free column."""
    F = m.field
    red, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [F(0)] * m.cols
        v[free] = F(1)
        for i, pc in enumerate(pivots):
            v[pc] = F(-red[i, free])
        basis.append(v)
    return basis


def nullity(m):
    return m.cols - rank(m)


# -- graded multiplication maps ---------------------------------------------

def _reduce_monomials_mod(f, degree):
    """Normal form of every degree-``degree`` monomial modulo the single form f.

    Returns (standard monomial basis, {monomial: {standard monomial: coeff}}).
    """
    ring = f.ring
    F = ring.field
    lead, lc = f.lead()
    inv = F.inv(lc)
    tail = [(e, F(-c * inv)) for e, c in f.terms.items() if e != lead]
    mons = monomials(ring.nvars, degree)
    standard = [e for e in mons if not all(a >= b for a, b in zip(e, lead))]
    nf = {}
    # ascending grevlex so every tail product is already reduced
    for e in reversed(mons):
        if not all(a >= b for a, b in zip(e, lead)):
            nf[e] = {e: F(1)}
            continue
        q = tuple(a - b for a, b in zip(e, lead))
        acc = {}
        for te, tc in tail:
            m = tuple(a + b for a, b in zip(te, q))
            for se, sc in nf[m].items():
                acc[se] = acc.get(se, 0) + tc * sc
        nf[e] = {k: F(v) for k, v in acc.items() if F(v) != 0}
    return standard, nf


def quotient_dimension(nvars, degree, d):
    """dim (S/f)_degree for a single nonzero form f of degree d."""
    return num_monomials(nvars, degree) - num_monomials(nvars, degree - d)


def graded_mult_matrix(gens, k, modulus=None, ring=None):
    """Matrix of (a_1..a_r) -> sum a_i g_i (mod f) in degree k.

    ``gens`` is a list of (g_i, twist a_i); the domain is the direct sum of
    S_{k - a_i} and the codomain is the degree k - a_i + deg g_i piece of S
    (or of S/(f) when ``modulus`` is given).  Columns are ordered by
    generator, then by descending monomial; rows by descending standard
    monomial.
    """
    if ring is None:
        ring = gens[0][0].ring if gens else modulus.ring
    F = ring.field
    targets = {k - a + g.degree for g, a in gens if k - a >= 0}
    if len(targets) > 1:
        raise HomogeneityError(f"generators map to different degrees {sorted(targets)}")
    if targets:
        target = targets.pop()
    elif gens:
        g, a = gens[0]
        target = k - a + g.degree
    else:
        target = k
    if modulus is not None:
        row_basis, nf = _reduce_monomials_mod(modulus, target)
    else:
        row_basis = list(monomials(ring.nvars, target))
        nf = None
    row_index = {e: i for i, e in enumerate(row_basis)}
    nrows = len(row_basis)
    columns = []
    for g, a in gens:
        for mono in monomials(ring.nvars, k - a):
            col = [0] * nrows
            for e, c in g.terms.items():
                prod = tuple(x + y for x, y in zip(e, mono))
                if nf is None:
                    col[row_index[prod]] += c
                else:
                    for se, sc in nf[prod].items():
                        col[row_index[se]] += c * sc
            columns.append(col)
    ncols = len(columns)
    entries = [F(0)] * (nrows * ncols)
    for j, col in enumerate(columns):
        for i, v in enumerate(col):
            if v:
                entries[i * ncols + j] = F(v)
    return DenseMatrix(nrows, ncols, tuple(entries), F)


def vector_to_components(vec, twists, k, ring):
    """Split a domain vector of ``graded_mult_matrix`` into HPoly components."""
    out = []
    pos = 0
    for a in twists:
        mons = monomials(ring.nvars, k - a)
        terms = {e: c for e, c in zip(mons, vec[pos:pos + len(mons)]) if c != 0}
        out.append(HPoly.from_terms(ring, terms, degree=max(k - a, 0)))
        pos += len(mons)
    return out


def span_dimension(polys_vectors, field):
    """Rank of a list of coefficient vectors (rows)."""
    if not polys_vectors:
        return 0
    return rank(DenseMatrix.from_rows(polys_vectors, field))


def coefficient_vector(components, twists, k, ring):
    """Inverse of :func:`vector_to_components` (monomial coordinates)."""
    vec = []
    for comp, a in zip(components, twists):
        for mono in monomials(ring.nvars, k - a):
            vec.append(comp.terms.get(mono, ring.field(0)))
    return vec


__all__ = [
    "DenseMatrix", "rref", "rank", "kernel_basis", "nullity", "graded_mult_matrix",
    "quotient_dimension", "vector_to_components", "coefficient_vector",
    "span_dimension", "grevlex_key",
]
