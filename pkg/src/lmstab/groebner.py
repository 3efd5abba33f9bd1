"""Groebner bases for ideals and graded submodules of free modules.

Order: grevlex on monomials, position-over-term on module terms with
position 0 the largest.  Internally a module element is a dict mapping a
term key ``(-pos, deg, negrev)`` to its coefficient, where ``negrev`` is the
exponent vector reversed and negated.  Plain tuple comparison of keys is
then exactly the module order, and divisibility is a componentwise test.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import comb
from operator import add, sub

import numpy as np

from .errors import CharDividesDegree, HomogeneityError, RingMismatchError
from .polyring import HPoly, Ring, monomials, num_monomials

EMPTY = "empty"


# -- public element type ------------------------------------------------------

@dataclass(frozen=True)
class FreeModuleElem:
    """Homogeneous element of the free module with basis degrees ``twists``.

    Basis vector e_i has degree twists[i], so deg(component_i) + twists[i]
    is the same for every nonzero component.
    """

    ring: Ring
    twists: tuple
    components: tuple
    degree: int

    @classmethod
    def make(cls, ring, twists, components, degree=None):
        twists = tuple(int(a) for a in twists)
        if len(components) != len(twists):
            raise RingMismatchError("component count does not match twists")
        degs = set()
        for c, a in zip(components, twists):
            if c.ring != ring:
                raise RingMismatchError("component from another ring")
            if c.terms:
                degs.add(c.degree + a)
        if len(degs) > 1:
            raise HomogeneityError(f"inhomogeneous module element, degrees {sorted(degs)}")
        if degs:
            d = degs.pop()
            if degree is not None and degree != d:
                raise HomogeneityError(f"expected degree {degree}, got {d}")
            degree = d
        elif degree is None:
            degree = max(twists) if twists else 0
        comps = tuple(c if c.terms else ring.zero(max(degree - a, 0))
                      for c, a in zip(components, twists))
        return cls(ring, twists, comps, degree)

    @classmethod
    def basis(cls, ring, twists, i):
        comps = [ring.zero(0)] * len(twists)
        comps[i] = ring.one()
        return cls.make(ring, twists, comps)

    @property
    def rank(self):
        return len(self.twists)

    def is_zero(self):
        return not any(c.terms for c in self.components)

    def __add__(self, other):
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        return FreeModuleElem.make(self.ring, self.twists,
                                   [a + b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return FreeModuleElem(self.ring, self.twists, tuple(-c for c in self.components), self.degree)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, poly):
        """Multiply by a scalar or a homogeneous polynomial."""
        if isinstance(poly, HPoly):
            return FreeModuleElem.make(self.ring, self.twists, [poly * c for c in self.components],
                                       degree=self.degree + poly.degree)
        return FreeModuleElem(self.ring, self.twists, tuple(c.scale(poly) for c in self.components),
                              self.degree)

    def _check(self, other):
        if other.ring != self.ring or other.twists != self.twists:
            raise RingMismatchError("elements of different free modules")

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def _as_elem(x, ring=None):
    if isinstance(x, FreeModuleElem):
        return x
    if isinstance(x, HPoly):
        return FreeModuleElem.make(x.ring, (0,), [x], degree=x.degree)
    raise TypeError(f"cannot treat {type(x).__name__} as a module element")


# -- internal representation --------------------------------------------------

def _key(pos, exps):
    return (-pos, sum(exps), tuple(-e for e in reversed(exps)))


def _exps(key):
    return tuple(-e for e in reversed(key[2]))


def _to_internal(elem):
    out = {}
    for pos, comp in enumerate(elem.components):
        for e, c in comp.terms.items():
            out[_key(pos, e)] = c
    return out


def _from_internal(poly, ring, twists, degree):
    comps = [{} for _ in twists]
    for k, c in poly.items():
        comps[-k[0]][_exps(k)] = c
    hp = [HPoly(ring, max(degree - a, 0), t) for t, a in zip(comps, twists)]
    return FreeModuleElem(ring, tuple(twists), tuple(hp), degree)


def _axpy(f, c, dm, nrm, g, p):
    """f -= c * m * g in place, m the monomial (dm, nrm)."""
    get = f.get
    if p:
        for k, v in g.items():
            kk = (k[0], k[1] + dm, tuple(map(add, k[2], nrm)))
            nv = (get(kk, 0) - c * v) % p
            if nv:
                f[kk] = nv
            else:
                f.pop(kk, None)
    else:
        for k, v in g.items():
            kk = (k[0], k[1] + dm, tuple(map(add, k[2], nrm)))
            nv = get(kk, 0) - c * v
            if nv:
                f[kk] = nv
            else:
                f.pop(kk, None)


def _mul_mono(g, dm, nrm, c, p):
    if p:
        return {(k[0], k[1] + dm, tuple(map(add, k[2], nrm))): (v * c) % p for k, v in g.items()}
    return {(k[0], k[1] + dm, tuple(map(add, k[2], nrm))): v * c for k, v in g.items()}


def _divides(s, t):
    return s[0] == t[0] and s[1] <= t[1] and all(a >= b for a, b in zip(s[2], t[2]))


class _Basis:
    """Working basis: monic polynomials indexed by lead position."""

    def __init__(self, field):
        self.field = field
        self.p = field.p
        self.polys = []
        self.leads = []
        self.by_pos = {}

    def add(self, poly):
        lead = max(poly)
        inv = self.field.inv(poly[lead])
        if self.p:
            poly = {k: (v * inv) % self.p for k, v in poly.items()}
        else:
            poly = {k: v * inv for k, v in poly.items()}
        idx = len(self.polys)
        self.polys.append(poly)
        self.leads.append(lead)
        self.by_pos.setdefault(lead[0], []).append(idx)
        return idx

    def reducer(self, t, skip=None):
        for i in self.by_pos.get(t[0], ()):
            if i != skip and _divides(self.leads[i], t):
                return i
        return None

    def reduce(self, poly, skip=None):
        """Full normal form of ``poly`` (copied) with respect to the basis."""
        f = dict(poly)
        rem = {}
        p = self.p
        while f:
            t = max(f)
            c = f[t]
            i = self.reducer(t, skip)
            if i is None:
                rem[t] = c
                del f[t]
                continue
            s = self.leads[i]
            _axpy(f, c, t[1] - s[1], tuple(map(sub, t[2], s[2])), self.polys[i], p)
        return rem


def _buchberger(polys, twists, field, ideal=False):
    """Reduced Groebner basis of homogeneous internal polys.

    Pairs and generators are processed by increasing total degree with a
    fixed tie-break, so the output is deterministic for a fixed input order.
    """
    B = _Basis(field)
    twists = tuple(twists)

    def tdeg(k):
        return k[1] + twists[-k[0]]

    queue = []
    counter = 0
    for g in polys:
        if g:
            heapq.heappush(queue, (tdeg(max(g)), 0, counter, g))
            counter += 1
    pending = set()

    def new_pairs(j):
        nonlocal counter
        lj = B.leads[j]
        for i in B.by_pos.get(lj[0], ()):
            if i == j:
                continue
            li = B.leads[i]
            nr = tuple(map(min, li[2], lj[2]))
            lcm = (lj[0], -sum(nr), nr)
            if ideal and lcm[1] == li[1] + lj[1]:
                continue  # coprime leads
            pair = (i, j)
            pending.add(pair)
            heapq.heappush(queue, (tdeg(lcm), 1, counter, (pair, lcm)))
            counter += 1

    while queue:
        _, kind, _, item = heapq.heappop(queue)
        if kind == 0:
            h = B.reduce(item)
        else:
            (i, j), lcm = item
            pending.discard((i, j))
            if _chain_skip(B, i, j, lcm, pending):
                continue
            li, lj = B.leads[i], B.leads[j]
            f = _mul_mono(B.polys[i], lcm[1] - li[1], tuple(map(sub, lcm[2], li[2])), 1, B.p)
            _axpy(f, 1, lcm[1] - lj[1], tuple(map(sub, lcm[2], lj[2])), B.polys[j], B.p)
            h = B.reduce(f) if f else f
        if h:
            new_pairs(B.add(h))
    return _interreduce(B)


def _chain_skip(B, i, j, lcm, pending):
    for k in B.by_pos.get(lcm[0], ()):
        if k == i or k == j:
            continue
        if _divides(B.leads[k], lcm):
            if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                return True
    return False


def _interreduce(B):
    keep = []
    for idx, lead in enumerate(B.leads):
        if any(o != idx and _divides(B.leads[o], lead) and (B.leads[o] != lead or o < idx)
               for o in B.by_pos[lead[0]]):
            continue
        keep.append(idx)
    R = _Basis(B.field)
    for idx in keep:
        R.add(B.polys[idx])
    out = []
    for n, poly in enumerate(R.polys):
        out.append(R.reduce(poly, skip=n) if len(poly) > 1 else poly)
    # lead is untouched by reduce(skip=self), so this stays monic and reduced
    out.sort(key=lambda g: max(g), reverse=True)
    return out


# -- Groebner basis object ----------------------------------------------------

@dataclass
class GroebnerBasis:
    ring: Ring
    twists: tuple
    generators: list
    reduced: bool = True
    is_ideal: bool = False
    _polys: list = dc_field(default_factory=list, repr=False)

    @property
    def order(self):
        return "grevlex/position-over-term"

    def __len__(self):
        return len(self.generators)

    def _basis(self):
        B = _Basis(self.ring.field)
        for g in self._polys:
            B.add(g)
        return B

    def lead_terms(self):
        """(position, exponent tuple) of each lead term."""
        return [(-max(g)[0], _exps(max(g))) for g in self._polys]

    def normal_form(self, e):
        e = _as_elem(e)
        if e.twists != self.twists or e.ring != self.ring:
            raise RingMismatchError("element does not live in the basis' ambient module")
        rem = self._basis().reduce(_to_internal(e))
        return _from_internal(rem, self.ring, self.twists, e.degree)

    def contains(self, e):
        return self.normal_form(e).is_zero()

    def key(self):
        """Canonical hashable form; equal iff same submodule (reduced bases)."""
        return tuple(tuple(sorted(g.items())) for g in self._polys)

    def __eq__(self, other):
        return (isinstance(other, GroebnerBasis) and other.twists == self.twists
                and other.ring == self.ring and other.key() == self.key())

    def polys(self):
        """Ideal case: generators as HPoly."""
        return [g.components[0] for g in self.generators]


def _prepare(gens):
    elems = [_as_elem(g) for g in gens]
    if not elems:
        raise ValueError("need at least one generator (pass the ambient via submodule())")
    ring, twists = elems[0].ring, elems[0].twists
    for e in elems:
        if e.ring != ring or e.twists != twists:
            raise RingMismatchError("generators live in different free modules")
    return elems, ring, twists


def buchberger(gens, ring=None, twists=None):
    """Reduced Groebner basis of the submodule (or ideal) spanned by ``gens``."""
    is_ideal = bool(gens) and isinstance(gens[0], HPoly)
    if not gens:
        if ring is None or twists is None:
            raise ValueError("empty generator list needs ring and twists")
        return GroebnerBasis(ring, tuple(twists), [], True, False, [])
    elems, ring, twists = _prepare(gens)
    polys = _buchberger([_to_internal(e) for e in elems], twists, ring.field,
                        ideal=len(twists) == 1)
    return _wrap(polys, ring, twists, is_ideal)


def _wrap(polys, ring, twists, is_ideal=False):
    out = []
    for g in polys:
        lead = max(g)
        out.append(_from_internal(g, ring, twists, lead[1] + twists[-lead[0]]))
    return GroebnerBasis(ring, tuple(twists), out, True, is_ideal, polys)


def normal_form(e, gb):
    return gb.normal_form(e)


def spoly(a, b):
    """S-polynomial of two module elements with leads in one position (or None)."""
    a, b = _as_elem(a), _as_elem(b)
    fa, fb = _to_internal(a), _to_internal(b)
    la, lb = max(fa), max(fb)
    if la[0] != lb[0]:
        return None
    F = a.ring.field
    nr = tuple(map(min, la[2], lb[2]))
    lcm = (la[0], -sum(nr), nr)
    f = _mul_mono(fa, lcm[1] - la[1], tuple(map(sub, lcm[2], la[2])), F.inv(fa[la]), F.p)
    _axpy(f, F.inv(fb[lb]), lcm[1] - lb[1], tuple(map(sub, lcm[2], lb[2])), fb, F.p)
    return _from_internal(f, a.ring, a.twists, lcm[1] + a.twists[-lcm[0]])


def check_buchberger_criterion(gb):
    """Every S-pair of ``gb`` reduces to zero."""
    gens = gb.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            s = spoly(gens[i], gens[j])
            if s is not None and not gb.normal_form(s).is_zero():
                return False
    return True


# -- syzygies -----------------------------------------------------------------

def syzygies(gens, minimal=True):
    """Generators of {(c_1..c_m) : sum c_i gens_i = 0}.

    Elimination form of the lifted Buchberger algorithm: each generator is
    extended by a unit vector that records its cofactors, and the basis is
    computed in position-over-term order with the original block first.
    Elements whose original block reduces to zero are the syzygies.
    """
    elems, ring, twists = _prepare(gens)
    m = len(elems)
    r = len(twists)
    syz_twists = tuple(e.degree for e in elems)
    ext_twists = twists + syz_twists
    polys = []
    for j, e in enumerate(elems):
        g = _to_internal(e)
        g[_key(r + j, (0,) * ring.nvars)] = ring.field(1)
        polys.append(g)
    gb = _buchberger(polys, ext_twists, ring.field)
    out = []
    for g in gb:
        if -max(g)[0] < r:
            continue
        shifted = {(k[0] + r, k[1], k[2]): v for k, v in g.items()}
        lead = max(shifted)
        out.append(_from_internal(shifted, ring, syz_twists, lead[1] + syz_twists[-lead[0]]))
    if minimal:
        out = minimal_generators(out, ring, syz_twists)
    return out


def minimal_generators(elems, ring=None, twists=None):
    """Drop generators lying in the span of the others (graded Nakayama)."""
    elems = [e for e in elems if not e.is_zero()]
    if not elems:
        return []
    ring = ring or elems[0].ring
    twists = twists or elems[0].twists
    F = ring.field
    elems = sorted(elems, key=lambda e: e.degree)
    kept = []
    for D in sorted({e.degree for e in elems}):
        index = {}
        for pos, a in enumerate(twists):
            for mono in monomials(ring.nvars, D - a):
                index[(pos, mono)] = len(index)
        rows = []
        for k in kept:
            for mono in monomials(ring.nvars, D - k.degree):
                rows.append(_vector(k, mono, index, F))
        base_rank = _rank(rows, F, len(index))
        for e in (x for x in elems if x.degree == D):
            trial = rows + [_vector(e, (0,) * ring.nvars, index, F)]
            rk = _rank(trial, F, len(index))
            if rk > base_rank:
                kept.append(e)
                rows = trial
                base_rank = rk
    return kept


def _vector(elem, mono, index, F):
    v = [0] * len(index)
    for pos, comp in enumerate(elem.components):
        for e, c in comp.terms.items():
            v[index[(pos, tuple(a + b for a, b in zip(e, mono)))]] = c
    return v


def _rank(rows, F, ncols):
    from .linalg import DenseMatrix, rank
    if not rows:
        return 0
    return rank(DenseMatrix(len(rows), ncols, tuple(F(x) for r in rows for x in r), F))


# -- colon, saturation, intersection -----------------------------------------

def _gens_of(m):
    if isinstance(m, GroebnerBasis):
        return list(m.generators)
    return [_as_elem(g) for g in m]


def colon_maximal(gens, ring, twists):
    """Generators of M : (x_0, ..., x_N) for M spanned by ``gens``."""
    n = ring.nvars
    r = len(twists)
    big = tuple(twists) * n
    cols = []
    for j in range(r):
        comps = [ring.zero(0)] * (r * n)
        for i in range(n):
            comps[i * r + j] = ring.var(i)
        cols.append(FreeModuleElem.make(ring, big, comps))
    for i in range(n):
        for g in gens:
            comps = [ring.zero(0)] * (r * n)
            comps[i * r:(i + 1) * r] = g.components
            cols.append(FreeModuleElem.make(ring, big, comps, degree=g.degree))
    out = []
    for s in syzygies(cols, minimal=False):
        comps = s.components[:r]
        if any(c.terms for c in comps):
            out.append(FreeModuleElem.make(ring, twists, comps))
    return out


def saturate(m, ring=None, twists=None):
    """Saturation with respect to the irrelevant ideal, as a reduced GB.

    Iterates M <- M : (x_0..x_N) until the reduced basis stops changing.
    """
    gens = _gens_of(m)
    is_ideal = isinstance(m, GroebnerBasis) and m.is_ideal or (
        not isinstance(m, GroebnerBasis) and bool(m) and isinstance(m[0], HPoly))
    if not gens:
        return buchberger([], ring, twists)
    ring, twists = gens[0].ring, gens[0].twists
    gb = buchberger(gens)
    while True:
        bigger = buchberger(gb.generators + colon_maximal(gb.generators, ring, twists))
        if bigger == gb:
            gb.is_ideal = is_ideal
            return gb
        gb = bigger


def intersect(gens_a, gens_b):
    """Generators of the intersection of two submodules of one free module."""
    a, ring, twists = _prepare(_gens_of(gens_a))
    b = _gens_of(gens_b)
    r = len(twists)
    cols = list(a) + [FreeModuleElem.make(ring, twists, g.components, degree=g.degree) for g in b]
    out = []
    for s in syzygies(cols, minimal=False):
        acc = None
        for c, g in zip(s.components[:len(a)], a):
            if c.terms:
                term = g.scale(c)
                acc = term if acc is None else acc + term
        if acc is not None and not acc.is_zero():
            out.append(acc)
    return minimal_generators(out, ring, twists) if out else []


# -- Hilbert series -------------------------------------------------------------

def _minimalize(mons):
    mons = sorted(set(mons), key=sum)
    out = []
    for m in mons:
        if not any(all(a <= b for a, b in zip(g, m)) for g in out):
            out.append(m)
    return tuple(sorted(out))


def _poly_add(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


@lru_cache(maxsize=65536)
def _hs_numerator(gens):
    """Numerator of HS(S/I) over (1-t)^n for the monomial ideal with minimal ``gens``.

    Pivot recursion: N(I) = N(I + (p)) + t^deg(p) N(I : p).
    """
    if not gens:
        return (1,)
    if any(not any(g) for g in gens):
        return (0,)
    support = [tuple(i for i, e in enumerate(g) if e) for g in gens]
    used = set()
    coprime = True
    for s in support:
        if used.intersection(s):
            coprime = False
            break
        used.update(s)
    if coprime:
        out = [1]
        for g in gens:
            d = sum(g)
            factor = [1] + [0] * (d - 1) + [-1]
            out = _poly_mul(out, factor)
        return tuple(out)
    n = len(gens[0])
    counts = [sum(1 for g in gens if g[v]) for v in range(n)]
    v = max(range(n), key=lambda i: (counts[i], -i))
    exps = sorted(g[v] for g in gens if g[v])
    e = exps[(len(exps) - 1) // 2]
    pivot = tuple(e if i == v else 0 for i in range(n))
    left = _minimalize(list(gens) + [pivot])
    right = _minimalize([tuple(max(a - b, 0) for a, b in zip(g, pivot)) for g in gens])
    a = list(_hs_numerator(left))
    b = [0] * e + list(_hs_numerator(right))
    out = _poly_add(a, b)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class HilbertSeries:
    """HS(F/M) = numerator(t) / (1-t)^nvars, numerator as {power: coeff}."""

    nvars: int
    numerator: tuple  # sorted ((power, coeff), ...), may include negative powers

    def coefficient_dict(self):
        return dict(self.numerator)

    def numerator_list(self):
        """Dense coefficients when all powers are >= 0."""
        d = dict(self.numerator)
        if not d:
            return [0]
        if min(d) < 0:
            raise ValueError("numerator has negative powers")
        return [d.get(i, 0) for i in range(max(d) + 1)]

    def dim(self, j):
        """Dimension of the degree-j piece of the quotient."""
        n = self.nvars
        return sum(c * comb(j - k + n - 1, n - 1) for k, c in self.numerator if j - k >= 0)

    def krull_dimension(self):
        """Order of the pole at t = 1."""
        coeffs = dict(self.numerator)
        if not any(coeffs.values()):
            return 0
        shift = min(coeffs)
        poly = [coeffs.get(i + shift, 0) for i in range(max(coeffs) - shift + 1)]
        order = 0
        while sum(poly) == 0 and any(poly):
            # divide by (1 - t): q_i = sum_{k<=i} p_k
            q, acc = [], 0
            for c in poly[:-1]:
                acc += c
                q.append(acc)
            poly = q
            order += 1
        return self.nvars - order


def hilbert_series(gb):
    """Hilbert series of F/M read off the lead-term module of a Groebner basis."""
    if not isinstance(gb, GroebnerBasis):
        gb = buchberger(gb)
    n = gb.ring.nvars
    by_pos = {i: [] for i in range(len(gb.twists))}
    for pos, e in gb.lead_terms():
        by_pos[pos].append(e)
    total = {}
    for pos, a in enumerate(gb.twists):
        num = _hs_numerator(_minimalize(by_pos[pos]))
        for k, c in enumerate(num):
            if c:
                total[k + a] = total.get(k + a, 0) + c
    return HilbertSeries(n, tuple(sorted((k, c) for k, c in total.items() if c)))


def proj_dim_of_support(ideal):
    """Dimension of V(I) in P^N, or ``"empty"``.

    Uses Krull dim(S/I) - 1; saturation does not change the Hilbert
    polynomial, so no explicit saturation is needed.
    """
    gb = ideal if isinstance(ideal, GroebnerBasis) else buchberger(list(ideal))
    kd = hilbert_series(gb).krull_dimension()
    return EMPTY if kd == 0 else kd - 1


def smoothness_certificate(f):
    """True iff the Jacobian ideal of f has empty projective zero set."""
    ring = f.ring
    if f.is_zero():
        return False
    char = ring.field.characteristic
    if char and f.degree % char == 0:
        raise CharDividesDegree(f"characteristic {char} divides degree {f.degree}")
    partials = [f.derivative(i) for i in range(ring.nvars)]
    partials = [g for g in partials if g.terms]
    if not partials:
        return False
    return proj_dim_of_support(partials) == EMPTY


__all__ = [
    "EMPTY", "FreeModuleElem", "GroebnerBasis", "HilbertSeries", "buchberger", "normal_form",
    "syzygies", "minimal_generators", "saturate", "colon_maximal", "intersect",
    "hilbert_series", "proj_dim_of_support", "smoothness_certificate", "spoly",
    "check_buchberger_criterion",
]
