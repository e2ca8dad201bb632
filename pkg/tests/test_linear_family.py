from fractions import Fraction

import pytest

from peano_lab.errors import DegenerateSamplePlan, PrecisionExhausted
from peano_lab.line_tiling import PAIRING, TargetSpace, TiledLineMap
from peano_lab.linear_family import (
    DEFAULT_SEEDS,
    ENUMERATION,
    AdSet,
    Combination,
    FamilyMember,
    RationalEnumeration,
    Seed,
    ad_set,
    block_identity_residual,
    build_family,
    combo_eval,
    exclusive_channel,
    independence_test,
    intersection_certificate,
    member_eval,
)


def test_enumeration_prefix_golden():
    F = Fraction
    assert ENUMERATION.prefix(11) == [F(0), F(1), F(-1), F(2), F(-2), F(1, 2), F(-1, 2), F(3), F(-3), F(1, 3), F(-1, 3)]


def test_enumeration_injective_and_complete():
    e = RationalEnumeration()
    wanted = {Fraction(s * p, q) for p in range(0, 51) for q in range(1, 51) for s in (1, -1)}
    bound = max(e.index_of(q) for q in wanted)
    prefix = e.prefix(bound)
    assert len(set(prefix)) == len(prefix)
    assert wanted <= set(prefix)


def test_seed_precision():
    s = Seed.named("sqrt2")
    assert abs(s.approx ** 2 - 2) < Fraction(1, 2 ** 120)
    assert Seed.named("-sqrt2").approx == -s.approx
    assert float(Seed.named("pi-3")) == pytest.approx(0.14159265358979)
    with pytest.raises(ValueError):
        Seed.named("sqrt4")
    with pytest.raises(PrecisionExhausted):
        s.within(s.approx, Fraction(1, 2 ** 200))


def test_adset_sqrt2_golden():
    a = ad_set("sqrt2", 8)
    assert a.indices == [2, 14, 28, 48, 86, 150, 172, 218]


def test_adset_schedule_and_minimality():
    a = ad_set("phi", 30)
    assert all(x < y for x, y in zip(a.indices, a.indices[1:]))
    prev = 0
    for k, n in enumerate(a.indices, 1):
        assert abs(ENUMERATION[n] - a.seed.approx) < Fraction(1, k)
        # greedy: nothing strictly between prev and n qualifies
        assert all(abs(ENUMERATION[m] - a.seed.approx) >= Fraction(1, k) for m in range(prev + 1, n))
        prev = n


def test_intersection_stabilizes():
    a, b = ad_set("sqrt2", 1), ad_set("sqrt3", 1)
    cert = intersection_certificate(a, b)
    assert cert["stable_after"] < 10_000
    full = sorted(set(a.extend_past(10_000)) & set(b.extend_past(10_000)))
    assert full == cert["common"]


def test_membership():
    a = ad_set("sqrt2", 3)
    assert 14 in a and 15 not in a
    assert a.position(28) == 3


def test_member_eval_channels():
    m = FamilyMember({2, 5})
    t_in = PAIRING.encode(3, 5) + Fraction(1, 3)
    t_out = PAIRING.encode(3, 4) + Fraction(1, 3)
    f5 = TiledLineMap(m.target, m.depth, 5)
    assert member_eval(m, t_in) == f5.evaluate(t_in)
    assert member_eval(m, t_out) == (0, 0)
    assert member_eval(m, -1) == (0, 0)


def test_combination_identities():
    a, b = FamilyMember({1, 2}), FamilyMember({2, 3})
    t = PAIRING.encode(2, 2) + Fraction(2, 7)
    assert combo_eval([0, 0], [a, b], t) == (0, 0)
    assert combo_eval([1], [a], t) == member_eval(a, t)
    c = Combination([Fraction(1, 2), 3], [a, b])
    assert c.evaluate(t) == combo_eval([Fraction(1, 2), 3], [a, b], t)
    assert c.channel_scale(2) == Fraction(7, 2)


def test_block_identity_exact():
    fam = build_family(["sqrt2", "sqrt3", "phi"], 8, depth=12)
    n0 = exclusive_channel(fam, 2)
    ts = [PAIRING.encode(k, n0) + Fraction(q, 32) for k in (1, 2, 5) for q in range(32)]
    for diff in block_identity_residual([2, -1, Fraction(3, 7)], fam, n0, ts):
        assert all(x == 0 for x in diff)


def test_rank_reports():
    a, b = FamilyMember({1, 3, 5}), FamilyMember({2, 4, 6})
    rep = independence_test([a, b])
    assert rep["rank"] == 2 and rep["pass"]
    dup = independence_test([a, a])
    assert dup["rank"] == 1 and not dup["pass"]


def test_ten_seed_family_rank():
    fam = build_family(DEFAULT_SEEDS, 16)
    rep = independence_test(fam)
    assert rep["rank"] == 10 and rep["ratio"] > 1e-8


def test_degenerate_plan():
    a, b = FamilyMember({1, 3}), FamilyMember({2, 4})
    plan = [{"member": 0, "t": PAIRING.encode(1, 1) + Fraction(1, 2)}]
    with pytest.raises(DegenerateSamplePlan):
        independence_test([a, b], plan=plan)


def test_c00_members():
    m = FamilyMember({1, 2}, TargetSpace.c00(), 10)
    t = PAIRING.encode(3, 2) + Fraction(1, 2)
    assert len(member_eval(m, t)) <= 3


def test_adset_is_lazy():
    s = AdSet(Seed.named("e"))
    assert s.indices == []
    assert 3 not in s or 3 in s
    assert s.indices
