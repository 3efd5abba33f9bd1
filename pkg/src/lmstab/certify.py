"""Stability verdicts backed by re-checkable certificates.

Each rule returns a :class:`Certificate` or None when it does not apply.
Evidence is plain integers, fractions-as-strings and lists, enough for
:func:`reverify` to recompute the rule's status without any Groebner work.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import InternalInconsistency, SamplingError, WitnessUnavailable
from .lmsheaf import KernelBundleInstance, LMInstance, destabilizer_witness, pullback_bound
from .sheafmodel import h0_twist, normalize_twist, rank_c1, restrict_to_line

STABLE = "Stable"
SEMISTABLE = "Semistable"
NOT_SEMISTABLE = "NotSemistable"
UNDETERMINED = "Undetermined"

_STRENGTH = {UNDETERMINED: 0, SEMISTABLE: 1, STABLE: 2}

CITATIONS = {
    "R1_CyclicD1": "cyclic cover with d = 1: det F = O(-1) and F^dual is generically globally generated, so H^0(F) = 0 forces stability",
    "R2_OkonekRank2": "Okonek-Schneider-Spindler criterion for rank 2 reflexive sheaves via sections of the normalized twist",
    "R3_Destabilizer": "the syzygy sheaf of V sits inside F with slope -l/(r-1), above -d/r when lr < d(r-1)",
    "R4_Pullback": "F is the pullback of a stable syzygy-type sheaf under a finite map, and finite pullback preserves semistability",
    "R5_CoprimeUpgrade": "semistable equals stable when gcd(rank, degree) = 1",
    "R6_LineProbe": "Grauert-Muelich: generic splitting gaps are at most 1 for semistable sheaves (corroboration only)",
    "R7_KernelBundleD1": "kernel bundles: M_O(1) is stable, general |W| = N+1 gives a polystable bundle, Flenner gives semistability of M_O(d)",
}


@dataclass
class Certificate:
    rule: str
    status: str
    evidence: dict
    citation: str = ""
    corroborating: bool = False

    def as_dict(self):
        return {"rule": self.rule, "status": self.status, "corroborating": self.corroborating,
                "evidence": self.evidence, "citation": self.citation}


@dataclass
class Verdict:
    status: str
    certificates: list
    invariants: dict = field(default_factory=dict)

    def rules(self):
        return [c.rule for c in self.certificates]

    def certificate(self, rule):
        return next((c for c in self.certificates if c.rule == rule), None)


def _frac(x):
    return str(Fraction(x))


# -- individual rules -----------------------------------------------------------

def rule_cyclic_d1(inst):
    if not isinstance(inst, LMInstance) or inst.d != 1:
        return None
    cs = rank_c1(inst.kernel)
    h0 = h0_twist(inst.kernel, 0)
    ev = {"d": inst.d, "rank": cs.rank, "c1": cs.c1, "h0": h0}
    if cs.c1 != -1 or h0 != 0:
        return None
    return Certificate("R1_CyclicD1", STABLE, ev, CITATIONS["R1_CyclicD1"])


def okonek_status(c1, h0_norm, h0_norm_minus1=None):
    """Rank 2 decision from the normalized section counts."""
    if h0_norm == 0:
        return STABLE
    if c1 % 2 == 0:
        return SEMISTABLE if h0_norm_minus1 == 0 else NOT_SEMISTABLE
    return NOT_SEMISTABLE


def rule_okonek_rank2(module, slope_identity=None):
    cs = rank_c1(module)
    if cs.rank != 2:
        return None
    k = normalize_twist(cs.c1)
    h_k = h0_twist(module, k)
    ev = {"rank": 2, "c1": cs.c1, "k": k, "h0_k": h_k}
    h_km1 = None
    if h_k > 0 and cs.c1 % 2 == 0:
        h_km1 = h0_twist(module, k - 1)
        ev["h0_k_minus_1"] = h_km1
    if slope_identity is not None:
        ev["restriction_degrees"] = list(slope_identity)
    status = okonek_status(cs.c1, h_k, h_km1)
    return Certificate("R2_OkonekRank2", status, ev, CITATIONS["R2_OkonekRank2"])


def rule_destabilizer(inst):
    if not isinstance(inst, LMInstance):
        return None
    try:
        w = destabilizer_witness(inst)
    except WitnessUnavailable:
        return None
    if w is None or not w.contained:
        return None
    ev = {"rank_M": w.rank, "c1_M": w.c1, "mu_M": _frac(w.mu_M), "rank_F": inst.r,
          "c1_F": -inst.d, "mu_F": _frac(w.mu_F), "contained": w.contained,
          "l": inst.l, "d": inst.d, "r": inst.r,
          "witness_generators": [str(g) for g in w.module.generators]}
    return Certificate("R3_Destabilizer", NOT_SEMISTABLE, ev, CITATIONS["R3_Destabilizer"])


def rule_pullback(inst):
    if not isinstance(inst, LMInstance) or not inst.is_pullback:
        return None
    _, d_map, m = inst.tag
    bound = pullback_bound(inst.N, m)
    if not 2 <= inst.r <= bound:
        return None
    ev = {"N": inst.N, "d_map": d_map, "m": m, "r": inst.r, "bound": bound,
          "d": inst.d, "l": inst.l}
    return Certificate("R4_Pullback", SEMISTABLE, ev, CITATIONS["R4_Pullback"])


def rule_coprime(status, r, d):
    """Upgrade a semistable verdict when rank and degree are coprime."""
    if status != SEMISTABLE:
        return None
    g = gcd(r, abs(d))
    if g != 1:
        return None
    return Certificate("R5_CoprimeUpgrade", STABLE, {"rank": r, "degree": d, "gcd": g},
                       CITATIONS["R5_CoprimeUpgrade"])


def line_probe_status(splitting):
    gaps = [a - b for a, b in zip(splitting, splitting[1:])]
    if gaps and max(gaps) >= 2:
        return NOT_SEMISTABLE
    if all(g == 0 for g in gaps):
        return SEMISTABLE
    return None


def rule_line_probe(module, trials=3, seed=0, trusted=False):
    """Generic splitting type over several random lines.

    The generic type is the most balanced one; special lines can only
    jump to less balanced types, so the lexicographic minimum is taken.
    """
    types = []
    for t in range(trials):
        try:
            res = restrict_to_line(module, seed=f"{seed}:{t}")
        except SamplingError:
            continue
        types.append(list(res.splitting))
    if not types:
        return None
    generic = min(types)
    status = line_probe_status(generic)
    if status is None:
        return None
    ev = {"splitting_types": types, "generic": generic,
          "gaps": [a - b for a, b in zip(generic, generic[1:])]}
    return Certificate("R6_LineProbe", status, ev, CITATIONS["R6_LineProbe"],
                       corroborating=not trusted)


def rule_kernel_bundle(kb):
    if not isinstance(kb, KernelBundleInstance) or not kb.basepoint_free:
        return None
    cs = rank_c1(kb.module)
    n_full = len(_monomial_count(kb))
    full = _spans_everything(kb)
    ev = {"N": kb.N, "d": kb.d, "size_W": len(kb.W), "full_W": full, "rank": cs.rank,
          "c1": cs.c1, "dim_S_d": n_full}
    if full and kb.d == 1:
        h0 = h0_twist(kb.module, 0)
        ev["h0"] = h0
        if h0 != 0 or cs.c1 != -1:
            return None
        return Certificate("R7_KernelBundleD1", STABLE, ev, CITATIONS["R7_KernelBundleD1"])
    if len(kb.W) == kb.N + 1:
        ev["note"] = "polystable (not machine-checked)"
        return Certificate("R7_KernelBundleD1", SEMISTABLE, ev, CITATIONS["R7_KernelBundleD1"])
    if full:
        return Certificate("R7_KernelBundleD1", SEMISTABLE, ev, CITATIONS["R7_KernelBundleD1"])
    return None


def _monomial_count(kb):
    from .polyring import monomials
    return monomials(kb.N + 1, kb.d)


def _spans_everything(kb):
    from .linalg import graded_mult_matrix, rank
    m = graded_mult_matrix([(w, 0) for w in kb.W], 0)
    return rank(m) == len(_monomial_count(kb))


def restriction_slope_identity(d, l):
    """Degrees on D of A^dual and det K in the restricted sequence; None unless d = 2l."""
    if d != 2 * l:
        return None
    deg_a_dual = -l * d
    deg_det_k = (l - 2 * l) * d
    assert deg_a_dual == deg_det_k
    return deg_a_dual, deg_det_k


# -- aggregation ------------------------------------------------------------------

def merge(certificates, trust_line_probe=False):
    """Strongest status wins; NotSemistable next to a (semi)stable one is a bug."""
    active = [c for c in certificates
              if not (c.rule == "R6_LineProbe" and not trust_line_probe)]
    statuses = {c.status for c in active}
    if NOT_SEMISTABLE in statuses:
        if statuses & {STABLE, SEMISTABLE}:
            detail = ", ".join(f"{c.rule}={c.status}" for c in active)
            raise InternalInconsistency(f"conflicting certificates: {detail}")
        return NOT_SEMISTABLE
    best = UNDETERMINED
    for s in statuses:
        if _STRENGTH[s] > _STRENGTH[best]:
            best = s
    return best


def certify(inst, trust_line_probe=False, line_trials=0, seed=0):
    """Apply every applicable rule and merge the statuses."""
    if isinstance(inst, LMInstance):
        module = inst.kernel
        r, d = inst.r, inst.d
    elif isinstance(inst, KernelBundleInstance):
        module = inst.module
        cs0 = rank_c1(module)
        r, d = cs0.rank, -cs0.c1
    else:
        raise TypeError(f"cannot certify {type(inst).__name__}")
    cs = rank_c1(module)
    invariants = {"rank": cs.rank, "c1": cs.c1, "slope": _frac(cs.slope)}
    certs = []
    if isinstance(inst, LMInstance):
        for rule in (rule_cyclic_d1, rule_destabilizer, rule_pullback):
            c = rule(inst)
            if c is not None:
                certs.append(c)
        c = rule_okonek_rank2(module, restriction_slope_identity(inst.d, inst.l)
                              if inst.r == 2 else None)
    else:
        c = rule_kernel_bundle(inst)
        if c is not None:
            certs.append(c)
        c = rule_okonek_rank2(module)
    if c is not None:
        certs.append(c)
    if line_trials > 0 and cs.rank > 0 and module.N >= 2:
        c = rule_line_probe(module, trials=line_trials, seed=seed, trusted=trust_line_probe)
        if c is not None:
            certs.append(c)
    status = merge(certs, trust_line_probe)
    up = rule_coprime(status, r, d)
    if up is not None:
        certs.append(up)
        status = merge(certs, trust_line_probe)
    return Verdict(status, certs, invariants)


# -- re-verification from evidence alone ----------------------------------------

def reverify(cert):
    """Recompute a certificate's status from its evidence; None if it fails."""
    ev = cert.evidence
    rule = cert.rule
    if rule == "R1_CyclicD1":
        ok = ev["d"] == 1 and ev["c1"] == -1 and ev["h0"] == 0 and ev["rank"] >= 2
        return STABLE if ok else None
    if rule == "R2_OkonekRank2":
        if ev["rank"] != 2 or ev["k"] != normalize_twist(ev["c1"]):
            return None
        if "restriction_degrees" in ev:
            a, b = ev["restriction_degrees"]
            if a != b:
                return None
        return okonek_status(ev["c1"], ev["h0_k"], ev.get("h0_k_minus_1"))
    if rule == "R3_Destabilizer":
        mu_m = Fraction(ev["mu_M"])
        mu_f = Fraction(ev["mu_F"])
        ok = (ev["contained"] and 0 < ev["rank_M"] < ev["rank_F"]
              and mu_m == Fraction(ev["c1_M"], ev["rank_M"])
              and mu_f == Fraction(ev["c1_F"], ev["rank_F"]) and mu_m > mu_f
              and 0 < ev["l"] * ev["r"] < ev["d"] * (ev["r"] - 1))
        return NOT_SEMISTABLE if ok else None
    if rule == "R4_Pullback":
        from math import comb
        ok = (ev["bound"] == comb(ev["N"] - 1 + ev["m"], ev["m"]) and 2 <= ev["r"] <= ev["bound"]
              and ev["d"] == ev["d_map"] and ev["l"] == ev["m"] * ev["d_map"])
        return SEMISTABLE if ok else None
    if rule == "R5_CoprimeUpgrade":
        return STABLE if gcd(ev["rank"], abs(ev["degree"])) == 1 else None
    if rule == "R6_LineProbe":
        return line_probe_status(ev["generic"])
    if rule == "R7_KernelBundleD1":
        if ev["full_W"] and ev["d"] == 1:
            return STABLE if ev.get("h0") == 0 and ev["c1"] == -1 else None
        if ev["size_W"] == ev["N"] + 1 or ev["full_W"]:
            return SEMISTABLE
        return None
    return None


def reverify_verdict(verdict, trust_line_probe=False):
    """True iff every certificate re-derives its status and the merge matches."""
    for c in verdict.certificates:
        if reverify(c) != c.status:
            return False
    rebuilt = [c for c in verdict.certificates if c.rule != "R5_CoprimeUpgrade"]
    status = merge(rebuilt, trust_line_probe)
    up = next((c for c in verdict.certificates if c.rule == "R5_CoprimeUpgrade"), None)
    if up is not None:
        if status != SEMISTABLE:
            return False
        status = STABLE
    return status == verdict.status


__all__ = [
    "STABLE", "SEMISTABLE", "NOT_SEMISTABLE", "UNDETERMINED", "Certificate", "Verdict",
    "certify", "rule_cyclic_d1", "rule_okonek_rank2", "rule_destabilizer", "rule_pullback",
    "rule_coprime", "rule_line_probe", "rule_kernel_bundle", "restriction_slope_identity",
    "merge", "reverify", "reverify_verdict", "okonek_status",
]
