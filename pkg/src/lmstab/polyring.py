"""Coefficient fields and homogeneous polynomials over k[x0, ..., xN].

Monomials are exponent tuples.  The monomial order is graded reverse
lexicographic; ``grevlex_key`` turns an exponent tuple into a key whose
natural tuple ordering is grevlex.
"""
from __future__ import annotations

import random
import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

from .errors import HomogeneityError, ParseError, RingMismatchError

DEFAULT_PRIME = 32003


class PrimeField:
    """GF(p) with canonical representatives in [0, p)."""

    def __init__(self, p=DEFAULT_PRIME):
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p

    @property
    def characteristic(self):
        return self.p

    @property
    def name(self):
        return f"GF({self.p})"

    def __call__(self, value):
        if isinstance(value, Fraction):
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        return int(value) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def random_nonzero(self, rng):
        return rng.randrange(1, self.p)

    def to_str(self, c):
        return str(c)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


class RationalField:
    """Exact rationals backed by :class:`fractions.Fraction`."""

    p = None
    characteristic = 0
    name = "QQ"

    def __call__(self, value):
        return Fraction(value)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def random_nonzero(self, rng):
        c = rng.randint(1, 97)
        return Fraction(c if rng.random() < 0.5 else -c)

    def to_str(self, c):
        return str(c)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "RationalField()"


QQ = RationalField()


def field_from_spec(spec):
    """``"rational"``/``"QQ"`` or a prime given as int or string."""
    if isinstance(spec, (PrimeField, RationalField)):
        return spec
    if spec is None:
        return PrimeField(DEFAULT_PRIME)
    if isinstance(spec, str):
        s = spec.strip()
        if s.lower() in ("rational", "qq", "q"):
            return QQ
        m = re.fullmatch(r"(?:GF\()?(\d+)\)?", s)
        if not m:
            raise ValueError(f"unknown field spec {spec!r}")
        return PrimeField(int(m.group(1)))
    return PrimeField(int(spec))


def grevlex_key(exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


@lru_cache(maxsize=None)
def monomials(nvars, degree):
    """All exponent tuples of the given degree, descending in grevlex."""
    if degree < 0:
        return ()
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=grevlex_key, reverse=True)
    return tuple(out)


def num_monomials(nvars, degree):
    if degree < 0:
        return 0
    return comb(degree + nvars - 1, nvars - 1)


class Ring:
    """Polynomial ring k[x0..x_{n-1}]; ``N = nvars - 1`` is the projective dimension."""

    def __init__(self, nvars, field=None):
        if nvars < 1:
            raise ValueError("need at least one variable")
        self.nvars = nvars
        self.field = field if field is not None else PrimeField(DEFAULT_PRIME)

    @property
    def N(self):
        return self.nvars - 1

    def __eq__(self, other):
        return (isinstance(other, Ring) and other.nvars == self.nvars
                and other.field == self.field)

    def __hash__(self):
        return hash((self.nvars, self.field))

    def __repr__(self):
        return f"Ring({self.nvars}, {self.field.name})"

    def zero(self, degree=0):
        return HPoly(self, degree, {})

    def one(self):
        return HPoly(self, 0, {(0,) * self.nvars: self.field(1)})

    def const(self, c):
        return HPoly.from_terms(self, {(0,) * self.nvars: c}, degree=0)

    def var(self, i):
        e = [0] * self.nvars
        e[i] = 1
        return HPoly(self, 1, {tuple(e): self.field(1)})

    def gens(self):
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exps, coeff=1):
        exps = tuple(exps)
        if len(exps) != self.nvars:
            raise RingMismatchError("exponent vector has wrong length")
        return HPoly.from_terms(self, {exps: coeff}, degree=sum(exps))

    def parse(self, text, degree=None):
        return parse_hpoly(text, self.nvars, self.field, degree=degree)


class HPoly:
    """Homogeneous polynomial.  Treat instances as immutable."""

    __slots__ = ("ring", "degree", "terms", "_hash")

    def __init__(self, ring, degree, terms):
        # trusted constructor: terms already canonical and homogeneous
        self.ring = ring
        self.degree = degree
        self.terms = terms
        self._hash = None

    @classmethod
    def from_terms(cls, ring, terms, degree=None):
        F = ring.field
        clean = {}
        for e, c in terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != ring.nvars or any(x < 0 for x in e):
                raise RingMismatchError(f"bad exponent vector {e}")
            c = F(c)
            if c == 0:
                continue
            if e in clean:
                c = F(clean[e] + c)
                if c == 0:
                    del clean[e]
                    continue
            clean[e] = c
        degs = {sum(e) for e in clean}
        if len(degs) > 1:
            raise HomogeneityError(f"terms of mixed degrees {sorted(degs)}")
        if degs:
            d = degs.pop()
            if degree is not None and degree != d:
                raise HomogeneityError(f"expected degree {degree}, got {d}")
            degree = d
        elif degree is None:
            degree = 0
        return cls(ring, degree, clean)

    # -- basics ----------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def lead(self):
        """(exponents, coefficient) of the grevlex-largest term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=grevlex_key)
        return e, self.terms[e]

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), self.ring.field(0))

    def _check(self, other):
        if not isinstance(other, HPoly):
            raise TypeError(f"expected HPoly, got {type(other).__name__}")
        if other.ring != self.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def __eq__(self, other):
        if not isinstance(other, HPoly):
            return NotImplemented
        if other.ring != self.ring or other.terms != self.terms:
            return False
        return bool(self.terms) or self.degree == other.degree

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.degree, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        self._check(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        if other.degree != self.degree:
            raise HomogeneityError(f"cannot add degrees {self.degree} and {other.degree}")
        F = self.ring.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = F(out.get(e, 0) + c)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return HPoly(self.ring, self.degree, out)

    def __neg__(self):
        F = self.ring.field
        return HPoly(self.ring, self.degree, {e: F(-c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        F = self.ring.field
        c = F(c)
        if c == 0:
            return self.ring.zero(self.degree)
        return HPoly(self.ring, self.degree, {e: F(v * c) for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, HPoly):
            return self.scale(other)
        self._check(other)
        F = self.ring.field
        deg = self.degree + other.degree
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        out = {e: F(c) for e, c in out.items()}
        return HPoly(self.ring, deg, {e: c for e, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def mul_monomial(self, exps, coeff=1):
        F = self.ring.field
        coeff = F(coeff)
        if coeff == 0:
            return self.ring.zero(self.degree + sum(exps))
        return HPoly(self.ring, self.degree + sum(exps),
                     {tuple(a + b for a, b in zip(e, exps)): F(c * coeff)
                      for e, c in self.terms.items()})

    def derivative(self, i):
        F = self.ring.field
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                v = F(c * e[i])
                if v:
                    ee = list(e)
                    ee[i] -= 1
                    out[tuple(ee)] = v
        return HPoly(self.ring, max(self.degree - 1, 0), out)

    def evaluate(self, point):
        F = self.ring.field
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x ** k
            total += v
        return F(total)

    def to_ring(self, ring):
        """Reinterpret in another ring with the same number of variables."""
        if ring.nvars != self.ring.nvars:
            raise RingMismatchError("variable count differs")
        return HPoly.from_terms(ring, self.terms, degree=self.degree)

    # -- printing --------------------------------------------------------
    def __str__(self):
        return format_hpoly(self)

    def __repr__(self):
        return f"HPoly({format_hpoly(self)!r}, deg={self.degree})"


def _format_monomial(exps):
    parts = []
    for i, k in enumerate(exps):
        if k == 1:
            parts.append(f"x{i}")
        elif k > 1:
            parts.append(f"x{i}^{k}")
    return "*".join(parts)


def format_hpoly(poly):
    """Canonical text form, terms in descending grevlex order."""
    if not poly.terms:
        return "0"
    out = []
    for e, c in poly.sorted_terms():
        neg = isinstance(c, Fraction) and c < 0
        mag = -c if neg else c
        mono = _format_monomial(e)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|x(\d+)(?:\^(\d+))?|([+\-*])|(\S))")


def parse_hpoly(text, num_vars, field=None, degree=None):
    """Parse ``"x0^2 + 3*x1*x2"``-style text into an :class:`HPoly`.

    ``degree`` is only needed to tag the zero polynomial.
    """
    ring = Ring(num_vars, field)
    F = ring.field
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.group(5) is not None:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        if m.group(1) is not None:
            tokens.append(("num", Fraction(m.group(1))))
        elif m.group(2) is not None:
            idx = int(m.group(2))
            if idx >= num_vars:
                raise ParseError(f"variable x{idx} outside x0..x{num_vars - 1}")
            tokens.append(("var", (idx, int(m.group(3) or 1))))
        else:
            tokens.append(("op", m.group(4)))
    if not tokens:
        raise ParseError("empty polynomial text")

    terms = {}
    i = 0
    first = True
    while i < len(tokens):
        sign = 1
        if tokens[i] == ("op", "+") or tokens[i] == ("op", "-"):
            sign = -1 if tokens[i][1] == "-" else 1
            i += 1
        elif not first:
            raise ParseError(f"expected + or - in {text!r}")
        first = False
        coeff = Fraction(sign)
        exps = [0] * num_vars
        expect_factor = True
        while i < len(tokens):
            kind, val = tokens[i]
            if expect_factor:
                if kind == "num":
                    coeff *= val
                elif kind == "var":
                    exps[val[0]] += val[1]
                else:
                    raise ParseError(f"misplaced operator in {text!r}")
                expect_factor = False
                i += 1
            elif tokens[i] == ("op", "*"):
                expect_factor = True
                i += 1
            else:
                break
        if expect_factor:
            raise ParseError(f"dangling operator in {text!r}")
        e = tuple(exps)
        terms[e] = terms.get(e, 0) + coeff
    if len({sum(e) for e, c in terms.items() if F(c) != 0}) > 1:
        raise HomogeneityError(f"inhomogeneous polynomial {text!r}")
    return HPoly.from_terms(ring, terms, degree=degree)


def substitute(poly, forms, target_ring=None):
    """Replace variable y_i of ``poly`` by ``forms[i]``.

    All forms must share one degree; the result has degree deg(poly)*d.
    """
    if len(forms) != poly.ring.nvars:
        raise RingMismatchError(f"need {poly.ring.nvars} forms, got {len(forms)}")
    ring = target_ring or forms[0].ring
    for g in forms:
        if g.ring != ring:
            raise RingMismatchError("forms live in different rings")
    degs = {g.degree for g in forms}
    if len(degs) != 1:
        raise HomogeneityError(f"forms have mismatched degrees {sorted(degs)}")
    d = degs.pop()
    powers = [{0: ring.one()} for _ in forms]

    def power(i, k):
        cache = powers[i]
        if k not in cache:
            cache[k] = power(i, k - 1) * forms[i]
        return cache[k]

    F = ring.field
    out = {}
    for e, c in poly.terms.items():
        term = ring.const(F(c))
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        for ee, cc in term.terms.items():
            out[ee] = out.get(ee, 0) + cc
    out = {e: F(c) for e, c in out.items()}
    return HPoly(ring, poly.degree * d, {e: c for e, c in out.items() if c})


def random_hpoly(degree, num_vars, seed, field=None):
    """Dense form with every monomial present; deterministic in ``seed``."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    ring = num_vars if isinstance(num_vars, Ring) else Ring(num_vars, field)
    rng = random.Random(f"hpoly:{degree}:{ring.nvars}:{seed}")
    F = ring.field
    terms = {e: F.random_nonzero(rng) for e in monomials(ring.nvars, degree)}
    return HPoly(ring, degree, terms)


def random_combination(polys, rng):
    """Random linear combination with nonzero coefficients."""
    F = polys[0].ring.field
    acc = polys[0].ring.zero(polys[0].degree)
    for g in polys:
        acc = acc + g.scale(F.random_nonzero(rng))
    return acc
