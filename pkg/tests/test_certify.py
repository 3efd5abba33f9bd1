import copy

import pytest

from conftest import P
from lmstab import certify as C
from lmstab.errors import InternalInconsistency
from lmstab.lmsheaf import (construct_kernel_bundle, construct_lm, construct_pullback_instance,
                            full_linear_system, sample_kernel_bundle, sample_lm)
from lmstab.sheafmodel import GradedSubmoduleOfFree


def statuses(v):
    return {c.rule: c.status for c in v.certificates}


def test_r1_examples(R3):
    inst = construct_lm(2, 1, 1, 2, P("x0", R3), [P("x1", R3), P("x2", R3)])
    c = C.rule_cyclic_d1(inst)
    assert c.status == C.STABLE and c.evidence["h0"] == 0 and c.evidence["c1"] == -1
    assert C.rule_cyclic_d1(sample_lm(3, 1, 2, 3, seed=0)).status == C.STABLE
    assert C.rule_cyclic_d1(sample_lm(2, 2, 1, 2, seed=0)) is None


def test_r2_examples(R3):
    inst = construct_lm(2, 1, 1, 2, P("x0", R3), [P("x1", R3), P("x2", R3)])
    c = C.rule_okonek_rank2(inst.kernel)
    assert (c.status, c.evidence["k"], c.evidence["h0_k"]) == (C.STABLE, 0, 0)
    c = C.rule_okonek_rank2(sample_lm(2, 4, 2, 2, seed=0).kernel)
    assert (c.status, c.evidence["k"], c.evidence["h0_k_minus_1"]) == (C.SEMISTABLE, 2, 0)
    c = C.rule_okonek_rank2(sample_lm(2, 3, 1, 2, seed=0).kernel)
    assert (c.status, c.evidence["k"]) == (C.NOT_SEMISTABLE, 1)
    assert c.evidence["h0_k"] >= 1
    assert C.rule_okonek_rank2(sample_lm(2, 2, 1, 3, seed=0).kernel) is None


@pytest.mark.parametrize("c1,hk,hk1,expected", [
    (-2, 0, None, C.STABLE), (-2, 1, 0, C.SEMISTABLE), (-2, 1, 1, C.NOT_SEMISTABLE),
    (-3, 1, None, C.NOT_SEMISTABLE), (-1, 0, None, C.STABLE),
])
def test_okonek_status_table(c1, hk, hk1, expected):
    assert C.okonek_status(c1, hk, hk1) == expected


def test_r3_examples():
    c = C.rule_destabilizer(sample_lm(2, 3, 1, 2, seed=0))
    assert c.status == C.NOT_SEMISTABLE
    assert (c.evidence["mu_M"], c.evidence["mu_F"]) == ("-1", "-3/2")
    c = C.rule_destabilizer(sample_lm(3, 4, 1, 3, seed=0))
    assert (c.evidence["mu_M"], c.evidence["mu_F"]) == ("-1/2", "-4/3")
    assert C.rule_destabilizer(sample_lm(2, 2, 1, 2, seed=0)) is None


def test_r4_examples():
    pb = construct_pullback_instance(2, 2, 1, 2, seed=3)
    assert C.rule_pullback(pb).status == C.SEMISTABLE
    pb1 = construct_pullback_instance(2, 1, 1, 2, seed=0)
    assert C.rule_pullback(pb1).status == C.SEMISTABLE
    v = C.certify(pb1)
    assert v.status == C.STABLE and statuses(v)["R1_CyclicD1"] == C.STABLE
    assert C.rule_pullback(sample_lm(2, 2, 1, 2, seed=0)) is None


@pytest.mark.parametrize("r,d,upgrade", [(2, 3, True), (2, 4, False), (3, 2, True)])
def test_r5_examples(r, d, upgrade):
    c = C.rule_coprime(C.SEMISTABLE, r, d)
    assert (c is not None) == upgrade
    if upgrade:
        assert c.status == C.STABLE
    assert C.rule_coprime(C.STABLE, r, d) is None


def test_r6_examples(R3):
    kb = construct_kernel_bundle(2, 1, list(R3.gens()))
    assert C.rule_line_probe(kb.module, trials=3) is None          # [0, -1]
    split = GradedSubmoduleOfFree.free(R3, (0, 2))
    c = C.rule_line_probe(split, trials=2)
    assert c.status == C.NOT_SEMISTABLE and c.corroborating
    assert c.evidence["generic"] == [0, -2]
    balanced = GradedSubmoduleOfFree.free(R3, (1, 1))
    assert C.rule_line_probe(balanced, trials=2).status == C.SEMISTABLE
    # the cubic instance splits as [-1, -2]: gap 1, so no certificate
    assert C.rule_line_probe(sample_lm(2, 3, 1, 2, seed=0).kernel, trials=3) is None


def test_r6_is_corroboration_unless_trusted(R3):
    probe = C.Certificate("R6_LineProbe", C.NOT_SEMISTABLE, {"generic": [0, -2]})
    stable = C.Certificate("R1_CyclicD1", C.STABLE, {})
    assert C.merge([stable, probe]) == C.STABLE
    with pytest.raises(InternalInconsistency):
        C.merge([stable, probe], trust_line_probe=True)
    assert C.merge([probe], trust_line_probe=True) == C.NOT_SEMISTABLE
    assert C.merge([probe]) == C.UNDETERMINED


def test_r7_examples(R3):
    c = C.rule_kernel_bundle(construct_kernel_bundle(2, 1, list(R3.gens())))
    assert c.status == C.STABLE and c.evidence["h0"] == 0
    c = C.rule_kernel_bundle(sample_kernel_bundle(2, 2, 3, seed=0))
    assert c.status == C.SEMISTABLE and "polystable" in c.evidence["note"]
    c = C.rule_kernel_bundle(construct_kernel_bundle(2, 2, full_linear_system(2, 2)))
    assert c.status == C.SEMISTABLE and "Flenner" in c.citation
    assert C.rule_kernel_bundle(construct_kernel_bundle(2, 1, [P("x0", R3), P("x1", R3)])) is None


def test_restriction_slope_identity():
    assert C.restriction_slope_identity(2, 1) == (-2, -2)
    assert C.restriction_slope_identity(4, 2) == (-8, -8)
    assert C.restriction_slope_identity(3, 1) is None


def test_merge_conflict_raises():
    with pytest.raises(InternalInconsistency):
        C.merge([C.Certificate("R2_OkonekRank2", C.SEMISTABLE, {}),
                 C.Certificate("R3_Destabilizer", C.NOT_SEMISTABLE, {})])
    assert C.merge([]) == C.UNDETERMINED


def test_certify_examples():
    assert C.certify(sample_lm(2, 1, 1, 2, seed=0)).status == C.STABLE
    v = C.certify(sample_lm(2, 2, 1, 2, seed=0))
    assert v.status == C.SEMISTABLE and statuses(v) == {"R2_OkonekRank2": C.SEMISTABLE}
    v = C.certify(sample_lm(2, 3, 1, 2, seed=0))
    assert v.status == C.NOT_SEMISTABLE
    assert statuses(v) == {"R2_OkonekRank2": C.NOT_SEMISTABLE, "R3_Destabilizer": C.NOT_SEMISTABLE}
    assert v.invariants == {"rank": 2, "c1": -3, "slope": "-3/2"}


def test_rank3_outside_rules_is_undetermined():
    v = C.certify(sample_lm(2, 2, 2, 3, seed=0))
    # l r = 6 >= d (r - 1) = 4, no destabilizer, not a pullback, rank 3
    assert v.status == C.UNDETERMINED and v.certificates == []


@pytest.mark.parametrize("params", [(2, 2, 1, 2), (2, 2, 2, 2), (2, 3, 1, 2), (2, 3, 2, 2),
                                    (2, 4, 1, 2), (2, 4, 2, 2), (3, 2, 1, 2), (3, 3, 1, 2)])
def test_rank2_always_definitive(params):
    v = C.certify(sample_lm(*params, seed=2))
    assert v.status != C.UNDETERMINED


def test_reverify_roundtrip_and_tamper(R3):
    verdicts = [C.certify(sample_lm(2, 3, 1, 2, seed=1)),
                C.certify(sample_lm(2, 1, 2, 3, seed=1)),
                C.certify(construct_pullback_instance(2, 2, 1, 2, seed=3)),
                C.certify(sample_kernel_bundle(2, 2, 3, seed=0)),
                C.certify(construct_kernel_bundle(2, 2, full_linear_system(2, 2))),
                C.certify(sample_lm(2, 4, 2, 2, seed=0))]
    for v in verdicts:
        assert C.reverify_verdict(v)
        for c in v.certificates:
            assert C.reverify(c) == c.status
    bad = copy.deepcopy(verdicts[0].certificate("R2_OkonekRank2"))
    bad.evidence["h0_k"] = 0
    assert C.reverify(bad) != bad.status
    bad = copy.deepcopy(verdicts[0])
    bad.status = C.STABLE
    assert not C.reverify_verdict(bad)
