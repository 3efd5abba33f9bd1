"""Lazarsfeld-Mukai kernel sheaves, kernel bundles and pullback instances on P^N."""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import (PreconditionError, SamplingError, WitnessUnavailable)
from .groebner import (EMPTY, FreeModuleElem, minimal_generators, proj_dim_of_support,
                       smoothness_certificate, syzygies)
from .linalg import graded_mult_matrix, quotient_dimension, rank as matrix_rank
from .polyring import (HPoly, Ring, field_from_spec, monomials, parse_hpoly, random_hpoly,
                       substitute)
from .sheafmodel import GradedSubmoduleOfFree, h0_twist, rank_c1

log = logging.getLogger(__name__)

DEFAULT_RETRIES = 32


@dataclass
class LMInstance:
    N: int
    d: int
    l: int
    r: int
    f: HPoly
    gens: list
    kernel: GradedSubmoduleOfFree
    tag: tuple = ("direct",)
    preconditions: dict = field(default_factory=dict)
    seed: object = None

    @property
    def ring(self):
        return self.f.ring

    @property
    def is_pullback(self):
        return self.tag[0] == "pullback"


@dataclass
class KernelBundleInstance:
    N: int
    d: int
    W: list
    module: GradedSubmoduleOfFree
    basepoint_free: bool
    seed: object = None

    @property
    def ring(self):
        return self.W[0].ring


def _kernel_of(gens, modulus, ring):
    """Kernel of e_i -> g_i into S(l) or S/(f)(l), as a submodule of S^r."""
    r = len(gens)
    cols = list(gens) + ([modulus] if modulus is not None else [])
    twists = (0,) * r
    out = []
    for s in syzygies(cols, minimal=False):
        comps = s.components[:r]
        if any(c.terms for c in comps):
            out.append(FreeModuleElem.make(ring, twists, comps))
    out = minimal_generators(out, ring, twists)
    pres = ([(g, 0) for g in gens], modulus)
    return GradedSubmoduleOfFree(ring, twists, out, saturated=True, presentation=pres)


def independent_mod(gens, f):
    """True iff the g_i are linearly independent in (S/f)_l."""
    m = graded_mult_matrix([(g, 0) for g in gens], 0, modulus=f)
    return matrix_rank(m) == len(gens)


def expected_codim(N, r):
    """codim_D Z(V) for general V: r, or empty once r exceeds dim D."""
    return r if r <= N - 1 else EMPTY


def codim_in(ambient_dim, dim):
    return EMPTY if dim == EMPTY else ambient_dim - dim


def codim_ZD(inst):
    dim = proj_dim_of_support([inst.f] + list(inst.gens))
    return codim_in(inst.N - 1, dim)


def construct_lm(N, d, l, r, f, gens, allow_singular=False, tag=("direct",), seed=None,
                 verify=True):
    """Build F_{D,A,V} for D = V(f), A = O(l)|_D, V = span(gens)."""
    if f.is_zero() or f.degree != d:
        raise PreconditionError(f"f must be a nonzero form of degree {d}")
    if f.ring.N != N:
        raise PreconditionError(f"f lives in {f.ring.nvars} variables, expected {N + 1}")
    if N < 2:
        raise PreconditionError("need N >= 2")
    if len(gens) != r or r < 2:
        raise PreconditionError(f"need r = len(gens) >= 2, got r={r}, {len(gens)} gens")
    for g in gens:
        if g.ring != f.ring or g.degree != l or g.is_zero():
            raise PreconditionError(f"every generator must be a nonzero form of degree {l}")
    pre = {}
    smooth = smoothness_certificate(f)
    pre["smooth_f"] = smooth
    if not smooth and not allow_singular:
        raise PreconditionError("f is not smooth (pass allow_singular to override)")
    if not independent_mod(gens, f):
        raise PreconditionError("generators are linearly dependent modulo f")
    pre["independent_mod_f"] = True
    kernel = _kernel_of(gens, f, f.ring)
    inst = LMInstance(N, d, l, r, f, list(gens), kernel, tuple(tag), pre, seed)
    pre["codim_ZD"] = codim_ZD(inst)
    pre["codim_ZX"] = codim_in(N, proj_dim_of_support(list(gens)))
    if verify:
        cs = rank_c1(kernel)
        h0 = h0_twist(kernel, 0)
        pre["rank"], pre["c1"], pre["h0"] = cs.rank, cs.c1, h0
        if (cs.rank, cs.c1) != (r, -d):
            raise PreconditionError(f"kernel has (rank, c1) = ({cs.rank}, {cs.c1}), expected ({r}, {-d})")
        if h0 != 0:
            raise PreconditionError(f"kernel has {h0} global sections")
    return inst


def _check_sample_params(N, d, l, r):
    if N < 2 or d < 1 or l < 1:
        raise SamplingError("need N >= 2, d >= 1, l >= 1", predicate="parameter sanity")
    avail = quotient_dimension(N + 1, l, d)
    if not 2 <= r <= avail:
        raise SamplingError(f"need 2 <= r <= dim (S/f)_{l} = {avail}, got r={r}",
                            predicate=f"r <= dim (S/f)_{l} = {avail}")


def sample_lm(N, d, l, r, seed, field=None, retries=DEFAULT_RETRIES):
    """Seeded random instance; retries until all genericity checks hold."""
    _check_sample_params(N, d, l, r)
    ring = Ring(N + 1, field_from_spec(field))
    want = expected_codim(N, r)
    attempts = []
    for attempt in range(retries):
        sub = f"{seed}:{attempt}"
        f = random_hpoly(d, ring, f"f:{sub}")
        gens = [random_hpoly(l, ring, f"g{i}:{sub}") for i in range(r)]
        if not smoothness_certificate(f):
            attempts.append((attempt, "smooth_f"))
            continue
        if not independent_mod(gens, f):
            attempts.append((attempt, "independent_mod_f"))
            continue
        codim = codim_in(N - 1, proj_dim_of_support([f] + gens))
        if codim != want:
            attempts.append((attempt, f"codim_ZD={codim}"))
            continue
        inst = construct_lm(N, d, l, r, f, gens, seed=seed)
        inst.preconditions["attempt"] = attempt
        inst.preconditions["retries"] = attempts
        return inst
    failed = attempts[-1][1] if attempts else "none"
    raise SamplingError(f"no admissible instance in {retries} attempts (last failure: {failed})",
                        predicate=failed)


def construct_kernel_bundle(N, d, W):
    """M_{O(d),W}: kernel of W (x) O -> O(d), as a submodule of S^|W|."""
    if not W:
        raise PreconditionError("W must be nonempty")
    ring = W[0].ring
    if ring.N != N:
        raise PreconditionError(f"forms live in {ring.nvars} variables, expected {N + 1}")
    for w in W:
        if w.ring != ring or w.degree != d or w.is_zero():
            raise PreconditionError(f"every form in W must be a nonzero form of degree {d}")
    module = _kernel_of(W, None, ring)
    bpf = proj_dim_of_support(list(W)) == EMPTY
    return KernelBundleInstance(N, d, list(W), module, bpf)


def full_linear_system(N, d, field=None):
    ring = Ring(N + 1, field_from_spec(field))
    return [ring.monomial(e) for e in monomials(ring.nvars, d)]


def sample_kernel_bundle(N, d, size, seed, field=None, retries=DEFAULT_RETRIES):
    """|W| = size general forms of degree d; retried until basepoint-free."""
    ring = Ring(N + 1, field_from_spec(field))
    for attempt in range(retries):
        W = [random_hpoly(d, ring, f"w{i}:{seed}:{attempt}") for i in range(size)]
        kb = construct_kernel_bundle(N, d, W)
        if kb.basepoint_free:
            kb.seed = seed
            return kb
    raise SamplingError("no basepoint-free W found", predicate="basepoint_free")


def pullback_bound(N, m):
    return comb(N - 1 + m, m)


def construct_pullback_instance(N, d_map, m, r, seed, field=None, retries=DEFAULT_RETRIES):
    """F_{D,A,V} with D = V(s_0), A = O(m d_map)|_D, V = phi^* V'.

    phi = (s_0 : ... : s_N) is a finite map given by degree-d_map forms and
    V' is spanned by r general degree-m forms in y_1..y_N.
    """
    bound = pullback_bound(N, m)
    if not 2 <= r <= bound:
        raise PreconditionError(f"need 2 <= r <= C(N-1+m, m) = {bound}, got r={r}")
    if N < 2 or d_map < 1 or m < 1:
        raise PreconditionError("need N >= 2, d_map >= 1, m >= 1")
    ring = Ring(N + 1, field_from_spec(field))
    hyper_ring = Ring(N + 1, ring.field)
    y0 = hyper_ring.var(0)
    want = expected_codim(N, r)
    sub_mons = [e for e in monomials(N + 1, m) if e[0] == 0]
    attempts = []
    for attempt in range(retries):
        sub = f"{seed}:{attempt}"
        s = [random_hpoly(d_map, ring, f"s{i}:{sub}") for i in range(N + 1)]
        if proj_dim_of_support(s) != EMPTY:
            attempts.append((attempt, "phi_finite"))
            continue
        if not smoothness_certificate(s[0]):
            attempts.append((attempt, "smooth_s0"))
            continue
        rng = random.Random(f"vprime:{sub}")
        F = ring.field
        vprime = [HPoly.from_terms(hyper_ring, {e: F.random_nonzero(rng) for e in sub_mons}, degree=m)
                  for _ in range(r)]
        if not independent_mod(vprime, y0):
            attempts.append((attempt, "independent_vprime"))
            continue
        codim_h = codim_in(N - 1, proj_dim_of_support([y0] + vprime))
        if codim_h != want:
            attempts.append((attempt, f"codim_H={codim_h}"))
            continue
        gens = [substitute(v, s, ring) for v in vprime]
        try:
            inst = construct_lm(N, d_map, m * d_map, r, s[0], gens,
                                tag=("pullback", d_map, m), seed=seed)
        except PreconditionError as exc:
            attempts.append((attempt, str(exc)))
            continue
        inst.preconditions.update({"phi_finite": True, "codim_H": codim_h, "attempt": attempt,
                                   "retries": attempts, "vprime": [str(v) for v in vprime],
                                   "map_forms": [str(x) for x in s]})
        return inst
    failed = attempts[-1][1] if attempts else "none"
    raise SamplingError(f"no admissible pullback instance in {retries} attempts "
                        f"(last failure: {failed})", predicate=failed)


@dataclass(frozen=True)
class Witness:
    module: GradedSubmoduleOfFree
    rank: int
    c1: int
    mu_M: Fraction
    mu_F: Fraction
    contained: bool


def destabilizer_witness(inst):
    """Syzygy sheaf of the g_i, a subsheaf of larger slope when l r < d (r - 1)."""
    if not inst.l * inst.r < inst.d * (inst.r - 1):
        return None
    codim_x = codim_in(inst.N, proj_dim_of_support(list(inst.gens)))
    want = inst.r if inst.r <= inst.N else EMPTY
    if codim_x != want:
        raise WitnessUnavailable(f"codim_X Z_X(V) = {codim_x}, expected {want}")
    M = _kernel_of(inst.gens, None, inst.ring)
    cs = rank_c1(M)
    if (cs.rank, cs.c1) != (inst.r - 1, -inst.l):
        raise WitnessUnavailable(f"syzygy sheaf has (rank, c1) = ({cs.rank}, {cs.c1})")
    contained = all(inst.kernel.contains(g) for g in M.generators)
    return Witness(M, cs.rank, cs.c1, Fraction(cs.c1, cs.rank), Fraction(-inst.d, inst.r),
                   contained)


# -- instance files ---------------------------------------------------------------

_FIELDS = ("N", "d", "l", "r", "field", "f", "gens", "seed", "tag")


def format_instance(inst):
    """Plain key = value text; parse_instance(format_instance(x)) round-trips."""
    lines = [f"N = {inst.N}", f"d = {inst.d}", f"l = {inst.l}", f"r = {inst.r}",
             f"field = {inst.ring.field.name}", f"f = {inst.f}",
             "gens = " + " ; ".join(str(g) for g in inst.gens)]
    if inst.seed is not None:
        lines.append(f"seed = {inst.seed}")
    lines.append("tag = " + " ".join(str(t) for t in inst.tag))
    return "\n".join(lines) + "\n"


def parse_instance_text(text):
    """Raw key/value dict from instance text (``#`` starts a comment)."""
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"expected 'key = value', got {raw!r}")
        k, v = (x.strip() for x in line.split("=", 1))
        if k not in _FIELDS:
            raise ValueError(f"unknown key {k!r}")
        out[k] = v
    return out


def parse_instance(text, allow_singular=False, verify=True):
    kv = parse_instance_text(text)
    for req in ("N", "d", "l", "f", "gens"):
        if req not in kv:
            raise ValueError(f"instance file lacks {req!r}")
    N, d, l = int(kv["N"]), int(kv["d"]), int(kv["l"])
    F = field_from_spec(kv.get("field"))
    f = parse_hpoly(kv["f"], N + 1, F)
    gens = [parse_hpoly(g, N + 1, F) for g in kv["gens"].split(";")]
    r = int(kv.get("r", len(gens)))
    tag = tuple(kv.get("tag", "direct").split())
    if tag[0] == "pullback":
        tag = ("pullback", int(tag[1]), int(tag[2]))
    seed = kv.get("seed")
    if seed is not None and seed.lstrip("-").isdigit():
        seed = int(seed)
    return construct_lm(N, d, l, r, f, gens, allow_singular=allow_singular, tag=tag,
                        seed=seed, verify=verify)


__all__ = [
    "LMInstance", "KernelBundleInstance", "Witness", "construct_lm", "sample_lm", "codim_ZD",
    "construct_kernel_bundle", "sample_kernel_bundle", "full_linear_system",
    "construct_pullback_instance", "pullback_bound", "destabilizer_witness",
    "independent_mod", "expected_codim", "format_instance", "parse_instance",
]
