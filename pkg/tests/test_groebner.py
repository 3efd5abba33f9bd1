import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from conftest import P
from lmstab.errors import CharDividesDegree, RingMismatchError
from lmstab.groebner import (EMPTY, FreeModuleElem, buchberger, check_buchberger_criterion,
                             colon_maximal, hilbert_series, intersect, minimal_generators,
                             normal_form, proj_dim_of_support, saturate, smoothness_certificate,
                             spoly, syzygies)
from lmstab.linalg import graded_mult_matrix, rank
from lmstab.polyring import QQ, HPoly, PrimeField, Ring, monomials, num_monomials, random_hpoly

F = PrimeField()


def monic(p):
    lead, c = p.lead()
    return p.scale(p.ring.field.inv(c))


def from_sympy(text, ring):
    xs = sp.symbols(f"x0:{ring.nvars}")
    poly = sp.Poly(sp.sympify(text.replace("^", "**"), locals={str(x): x for x in xs}), *xs)
    terms = {m: ring.field(sp.Rational(c).p) / ring.field(sp.Rational(c).q)
             for m, c in poly.terms()}
    return HPoly.from_terms(ring, terms)


def test_reduced_gb_matches_sympy_over_qq(fixtures):
    for case in fixtures["gb_qq"]:
        ring = Ring(case["nvars"], QQ)
        gb = buchberger([P(g, ring) for g in case["gens"]])
        ours = {monic(p) for p in gb.polys()}
        expected = {monic(from_sympy(t, ring)) for t in case["basis"]}
        assert ours == expected, case["gens"]


def test_small_gb_contains_cubic(R3):
    gb = buchberger([P("x0^2 - x1*x2", R3), P("x0*x1", R3)])
    assert P("x1^2*x2", R3) in {monic(p) for p in gb.polys()}
    assert check_buchberger_criterion(gb)


def test_normal_form_and_membership(R3):
    gb = buchberger([P("x0^2 - x1*x2", R3), P("x0*x1", R3)])
    assert gb.contains(P("x0^3", R3).__class__.from_terms(R3, {(0, 2, 1): 1}))
    nf = normal_form(FreeModuleElem.make(R3, (0,), [P("x0^2", R3)]), gb)
    assert nf.components[0] == P("x1*x2", R3)


def test_spoly_different_positions(R3):
    a = FreeModuleElem.make(R3, (0, 0), [P("x0", R3), R3.zero(1)])
    b = FreeModuleElem.make(R3, (0, 0), [R3.zero(1), P("x1", R3)])
    assert spoly(a, b) is None


def test_module_gb_mismatch(R3):
    gb = buchberger([FreeModuleElem.basis(R3, (0, 0), 0)])
    with pytest.raises(RingMismatchError):
        gb.normal_form(FreeModuleElem.basis(R3, (0,), 0))


def test_koszul_syzygies(R3):
    gens = [P("x1", R3), P("x2", R3), P("x0", R3)]
    syz = syzygies(gens)
    assert len(syz) == 3 and all(s.degree == 2 for s in syz)
    for s in syz:
        assert sum((c * g for c, g in zip(s.components, gens)), R3.zero(2)) == R3.zero(2)


def test_minimal_generators_drop_multiples(R3):
    tw = (0,)
    a = FreeModuleElem.make(R3, tw, [P("x0", R3)])
    b = FreeModuleElem.make(R3, tw, [P("x0*x1", R3)])
    c = FreeModuleElem.make(R3, tw, [P("x1^2", R3)])
    kept = minimal_generators([b, a, c], R3, tw)
    assert len(kept) == 2


def test_saturation_examples(R3):
    sat = saturate([P("x0^2", R3), P("x0*x1", R3), P("x0*x2", R3)])
    assert [monic(p) for p in sat.polys()] == [P("x0", R3)]
    unit = saturate([P("x0^2", R3), P("x1^2", R3), P("x2^2", R3)])
    assert [p.degree for p in unit.polys()] == [0]


def test_colon_maximal_of_irrelevant_power(R3):
    gens = [FreeModuleElem.make(R3, (0,), [m]) for m in
            (R3.monomial(e) for e in monomials(3, 2))]
    colon = colon_maximal(gens, R3, (0,))
    gb = buchberger(colon)
    assert gb.contains(FreeModuleElem.make(R3, (0,), [P("x0", R3)]))


def test_intersection_of_coordinate_ideals(R3):
    a = [FreeModuleElem.make(R3, (0,), [P("x0", R3)])]
    b = [FreeModuleElem.make(R3, (0,), [P("x1", R3)])]
    meet = intersect(a, b)
    assert len(meet) == 1 and monic(meet[0].components[0]) == P("x0*x1", R3)


def test_hilbert_series_examples(R3):
    hs = hilbert_series(buchberger([P("x0", R3), P("x1^2", R3)]))
    assert hs.numerator_list() == [1, -1, -1, 1]
    assert [hs.dim(k) for k in range(5)] == [1, 2, 2, 2, 2]
    assert hs.krull_dimension() == 1


@pytest.mark.parametrize("gens,expected", [
    (["x0", "x1"], 0),
    (["x0", "x1", "x2"], EMPTY),
    (["x0^2 + x1^2 + x2^2"], 1),
    (["x0^2", "x1^3"], 0),
])
def test_proj_dim(R3, gens, expected):
    assert proj_dim_of_support([P(g, R3) for g in gens]) == expected


def test_smoothness(R3):
    assert smoothness_certificate(P("x0^3 + x1^3 + x2^3", R3))
    assert not smoothness_certificate(P("x0*x1", R3))
    assert not smoothness_certificate(P("x0^2*x1 + x2^3", R3))
    small = Ring(3, PrimeField(3))
    with pytest.raises(CharDividesDegree):
        smoothness_certificate(small.parse("x0^3 + x1^3 + x2^3"))


# -- properties over random inputs --------------------------------------------------

def random_ideal(data, nvars=3):
    ring = Ring(nvars, F)
    k = data.draw(st.integers(1, 3))
    degs = [data.draw(st.integers(1, 3)) for _ in range(k)]
    out = []
    for i, d in enumerate(degs):
        mons = monomials(nvars, d)
        picks = data.draw(st.lists(st.sampled_from(mons), min_size=1, max_size=3, unique=True))
        cs = [data.draw(st.integers(1, 32002)) for _ in picks]
        out.append(HPoly.from_terms(ring, dict(zip(picks, cs)), degree=d))
    return ring, out


def dim_by_linear_algebra(ring, gens, k):
    cols = [(g, g.degree) for g in gens if k - g.degree >= 0]
    if not cols:
        return num_monomials(ring.nvars, k)
    # columns: monomial multiples of each generator landing in degree k
    rows = []
    index = {e: i for i, e in enumerate(monomials(ring.nvars, k))}
    for g, d in cols:
        for mono in monomials(ring.nvars, k - d):
            v = [0] * len(index)
            for e, c in g.terms.items():
                v[index[tuple(a + b for a, b in zip(e, mono))]] = c
            rows.append(v)
    from lmstab.linalg import DenseMatrix
    return num_monomials(ring.nvars, k) - rank(DenseMatrix.from_rows(rows, ring.field))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_buchberger_criterion_random(data):
    ring, gens = random_ideal(data)
    gb = buchberger(gens)
    assert check_buchberger_criterion(gb)
    assert all(gb.contains(FreeModuleElem.make(ring, (0,), [g])) for g in gens)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_hilbert_series_agrees_with_linear_algebra(data):
    ring, gens = random_ideal(data)
    hs = hilbert_series(buchberger(gens))
    for k in range(10):
        assert hs.dim(k) == dim_by_linear_algebra(ring, gens, k)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_syzygies_back_substitute(data):
    ring, gens = random_ideal(data)
    for s in syzygies(gens):
        total = None
        for c, g in zip(s.components, gens):
            if c.terms:
                t = c * g
                total = t if total is None else total + t
        assert total is None or total.is_zero()


@settings(max_examples=15, deadline=None)
@given(st.data())
def test_saturation_idempotent(data):
    ring, gens = random_ideal(data)
    once = saturate(gens)
    assert saturate(once) == once
    # saturation only grows the ideal
    assert all(once.contains(FreeModuleElem.make(ring, (0,), [g])) for g in gens)


def test_module_hilbert_series_agrees(R3):
    tw = (0, 0)
    g1 = FreeModuleElem.make(R3, tw, [P("x0", R3), P("x1", R3)])
    g2 = FreeModuleElem.make(R3, tw, [P("x2^2", R3), P("x0*x1", R3)])
    gb = buchberger([g1, g2])
    assert check_buchberger_criterion(gb)
    hs = hilbert_series(gb)
    from lmstab.linalg import DenseMatrix
    for k in range(10):
        index = {(p, e): i for i, (p, e) in enumerate(
            (p, e) for p in range(2) for e in monomials(3, k))}
        rows = []
        for g in (g1, g2):
            for mono in monomials(3, k - g.degree):
                v = [0] * len(index)
                for p, comp in enumerate(g.components):
                    for e, c in comp.terms.items():
                        v[index[(p, tuple(a + b for a, b in zip(e, mono)))]] = c
                rows.append(v)
        r = rank(DenseMatrix.from_rows(rows, F)) if rows else 0
        assert hs.dim(k) == 2 * num_monomials(3, k) - r


def test_module_syzygies_back_substitute(R3):
    tw = (0, 1)
    gens = [FreeModuleElem.make(R3, tw, [P("x0^2", R3), P("x1", R3)]),
            FreeModuleElem.make(R3, tw, [P("x0*x2", R3), P("x2", R3)]),
            FreeModuleElem.make(R3, tw, [P("x1^2", R3), R3.zero(1)])]
    syz = syzygies(gens)
    assert syz
    for s in syz:
        acc = None
        for c, g in zip(s.components, gens):
            if c.terms:
                t = g.scale(c)
                acc = t if acc is None else acc + t
        assert acc is None or acc.is_zero()


def test_random_forms_gb_over_qq_matches_sympy():
    ring = Ring(3, QQ)
    gens = [random_hpoly(2, ring, seed=s) for s in range(2)] + [random_hpoly(3, ring, seed=9)]
    gb = buchberger(gens)
    xs = sp.symbols("x0:3")
    exprs = [sp.sympify(str(g).replace("^", "**"), locals={str(x): x for x in xs}) for g in gens]
    G = sp.groebner(exprs, *xs, order="grevlex", domain=sp.QQ)
    expected = {monic(from_sympy(str(e).replace("**", "^"), ring)) for e in G.exprs}
    assert {monic(p) for p in gb.polys()} == expected
