"""Graded submodules of free modules read as coherent sheaves on P^N."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from . import groebner as gb_mod
from .errors import SamplingError
from .groebner import EMPTY, FreeModuleElem
from .linalg import DenseMatrix, graded_mult_matrix, nullity, rref
from .polyring import HPoly, Ring, num_monomials, random_hpoly, substitute


@dataclass
class GradedSubmoduleOfFree:
    """Submodule of F = sum S(-a_i) given by generators.

    ``presentation`` optionally records that the module is the kernel of
    e_i -> g_i into S (or S/f); it is a pair (list of (g_i, a_i), f or None).
    Such kernels are saturated, and their graded pieces are exact kernels.
    """

    ring: Ring
    twists: tuple
    generators: list
    saturated: bool = False
    presentation: tuple | None = None
    _gb: object = field(default=None, repr=False)

    @property
    def N(self):
        return self.ring.N

    @property
    def ambient_rank(self):
        return len(self.twists)

    def gb(self):
        if self._gb is None:
            self._gb = gb_mod.buchberger(self.generators, self.ring, self.twists)
        return self._gb

    def quotient_series(self):
        return gb_mod.hilbert_series(self.gb())

    def ambient_dim(self, k):
        return sum(num_monomials(self.ring.nvars, k - a) for a in self.twists)

    def dim(self, k):
        """dim_k of the module itself (not the sheaf) in degree k."""
        return self.ambient_dim(k) - self.quotient_series().dim(k)

    def contains(self, elem):
        return self.gb().contains(elem)

    @classmethod
    def free(cls, ring, twists):
        gens = [FreeModuleElem.basis(ring, twists, i) for i in range(len(twists))]
        return cls(ring, tuple(twists), gens, saturated=True)


@dataclass(frozen=True)
class HilbertPoly:
    """Hilbert polynomial, in powers of t and in the basis C(t+N-i, N-i)."""

    N: int
    coefficients: tuple  # Fractions, ascending powers of t
    binomial: tuple      # ints b_0..b_N

    def __call__(self, t):
        return sum(c * t ** i for i, c in enumerate(self.coefficients))


@dataclass(frozen=True)
class ChernSlopeData:
    rank: int
    c1: int
    slope: Fraction | None

    def __post_init__(self):
        if self.rank and self.slope * self.rank != self.c1:
            raise ValueError("slope * rank must equal c1")


def _binom_poly(m):
    """Coefficients (ascending, Fractions) of C(t+m, m) as a polynomial in t."""
    out = [Fraction(1)]
    for j in range(1, m + 1):
        nxt = [Fraction(0)] * (len(out) + 1)
        for i, c in enumerate(out):
            nxt[i] += c * j
            nxt[i + 1] += c
        out = nxt
    return [c / factorial(m) for c in out]


def hilbert_polynomial(m):
    N = m.ring.N
    series = m.quotient_series()
    top = max([k for k, _ in series.numerator] + list(m.twists) + [0])
    ts = [top + 1 + i for i in range(N + 1)]
    QQ = _QQ()
    rows = []
    for t in ts:
        rows.append([comb(t + N - i, N - i) for i in range(N + 1)] + [m.dim(t)])
    red, piv = rref(DenseMatrix.from_rows(rows, QQ))
    b = tuple(int(red[i, N + 1]) for i in range(N + 1))
    coeffs = [Fraction(0)] * (N + 1)
    for i, bi in enumerate(b):
        for j, c in enumerate(_binom_poly(N - i)):
            coeffs[j] += bi * c
    return HilbertPoly(N, tuple(coeffs), b)


def _QQ():
    from .polyring import QQ
    return QQ


def rank_c1(m):
    """Rank and first Chern class from the binomial expansion b_0, b_1."""
    hp = hilbert_polynomial(m)
    r = hp.binomial[0]
    c1 = hp.binomial[1] if len(hp.binomial) > 1 else 0
    if r == 0:
        return ChernSlopeData(0, c1, None)
    return ChernSlopeData(r, c1, Fraction(c1, r))


def h0_twist(m, k):
    """dim H^0(P^N, M~(k)).

    Kernel presentations give this exactly as a nullity; otherwise the
    module is saturated first and its degree-k piece counted.
    """
    if m.presentation is not None:
        gens, modulus = m.presentation
        return nullity(graded_mult_matrix(gens, k, modulus=modulus, ring=m.ring))
    if not m.saturated:
        sat = gb_mod.saturate(m.generators, m.ring, m.twists)
        m = GradedSubmoduleOfFree(m.ring, m.twists, list(sat.generators), True, None, sat)
    return m.dim(k)


def normalize_twist(c1):
    """k with c1 + 2k in {0, -1}."""
    return -c1 // 2 if c1 % 2 == 0 else -(c1 + 1) // 2


# -- line restriction -----------------------------------------------------------

@dataclass(frozen=True)
class LineRestriction:
    splitting: tuple        # descending
    torsion: int            # c1(M) - sum(splitting)
    line: tuple             # two points spanning the line
    seed: object


def _line_forms(nvars, rng, line_ring):
    F = line_ring.field
    p = [F.random_nonzero(rng) for _ in range(nvars)]
    q = [F.random_nonzero(rng) for _ in range(nvars)]
    s, t = line_ring.gens()
    forms = [s.scale(a) + t.scale(b) for a, b in zip(p, q)]
    return forms, (tuple(p), tuple(q))


def restrict_once(m, rng, c1=None, rank=None):
    """Splitting type of M~ on one random line.

    Generators are pulled back to k[s,t]; their image in the restricted
    free module is saturated with respect to (s,t).  On P^1 a saturated
    submodule of a free module is free, and its generator degrees give the
    splitting type of the torsion-free part.
    """
    line_ring = Ring(2, m.ring.field)
    forms, pts = _line_forms(m.ring.nvars, rng, line_ring)
    images = []
    for g in m.generators:
        comps = [substitute(c, forms, line_ring) if c.terms else line_ring.zero(0)
                 for c in g.components]
        e = FreeModuleElem.make(line_ring, m.twists, comps, degree=g.degree)
        if not e.is_zero():
            images.append(e)
    if not images:
        return LineRestriction((), c1 or 0, pts, None)
    sat = gb_mod.saturate(images)
    free_gens = gb_mod.minimal_generators(list(sat.generators), line_ring, m.twists)
    split = tuple(sorted((-g.degree for g in free_gens), reverse=True))
    if c1 is None:
        cs = rank_c1(m)
        c1 = cs.c1
    return LineRestriction(split, c1 - sum(split), pts, None)


def restrict_to_line(m, seed=0, retries=8):
    """Splitting type on a random line; resamples lines through special loci."""
    if m.ring.N < 2:
        raise ValueError("line restriction needs N >= 2")
    cs = rank_c1(m)
    if cs.rank <= 0:
        raise ValueError("module has rank 0")
    last = None
    for attempt in range(retries):
        rng = random.Random(f"line:{seed}:{attempt}")
        res = restrict_once(m, rng, c1=cs.c1, rank=cs.rank)
        res = LineRestriction(res.splitting, res.torsion, res.line, (seed, attempt))
        if len(res.splitting) == cs.rank and res.torsion == 0:
            return res
        last = res
    raise SamplingError(f"no general line found in {retries} attempts (last {last})",
                        predicate="line avoids degeneracy locus")


def local_freeness_probe(base_locus_ideal):
    """One-sided: LocallyFree when the base locus is empty."""
    dim = gb_mod.proj_dim_of_support(base_locus_ideal)
    return "LocallyFree" if dim == EMPTY else "Undetermined"


__all__ = [
    "GradedSubmoduleOfFree", "HilbertPoly", "ChernSlopeData", "LineRestriction",
    "hilbert_polynomial", "rank_c1", "h0_twist", "normalize_twist", "restrict_to_line",
    "restrict_once", "local_freeness_probe",
]
