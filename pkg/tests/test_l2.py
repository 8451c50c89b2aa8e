from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ratmoore.l2 import (Chambers, L2Profile, Ledger, atom_f2, chi_gap, chi_gap_replayed,
                         complete_duality, cover_scale, davis_transfer, disjoint_union, euler,
                         free_product_power, kunneth, point, replay, run_pipeline, singer_verdict)


def test_single_atom_derivations():
    assert free_product_power(2).values == (0, 0, 1)
    p = free_product_power(4)
    assert p.b(4) == 1 and sum(p.values) == 1
    assert p.provenance[1] == "kunneth"


def test_point_is_unit():
    p = free_product_power(3)
    assert kunneth(p, point()).values == p.values


@pytest.mark.parametrize("d", range(1, 6))
def test_euler_of_powers(d):
    assert euler(free_product_power(d)) == (-1) ** d


def test_euler_zero_profile():
    assert euler(L2Profile("zero", ())) == 0


def test_cover_scale():
    f = atom_f2()
    assert cover_scale(f, 1).values == f.values
    assert cover_scale(f, 2).values == (0, 2)
    assert euler(cover_scale(f, 5)) == 5 * euler(f)
    with pytest.raises(ValueError):
        cover_scale(f, 0)


def test_disjoint_union_matches_cover():
    f = free_product_power(2)
    assert disjoint_union([f]).values == f.values
    assert disjoint_union([f] * 8).values == cover_scale(f, 8).values


def test_negative_entries_rejected():
    with pytest.raises(ValueError):
        L2Profile("bad", (1, -1))


def test_duality_violations_reported():
    p = L2Profile("M", (0, 1, 0), n=2, closed_manifold=True)
    assert p.duality_violations() == []
    q = L2Profile("N", (1, 0, 0), n=2, closed_manifold=True)
    assert q.duality_violations() == [0, 2]


def test_transfer_n7():
    cs = davis_transfer(free_product_power(4), "2^m", 7)
    e = cs.entries
    assert (e[4].rel, e[4].coef) == (">=", 1)
    assert all((e[k].rel, e[k].coef) == ("=", 0) for k in (5, 6, 7))
    assert (e[3].rel, e[3].coef) == (">=", 1)
    assert "b_4(U/G) >= 2^m  [transfer]" in cs.text()


def test_transfer_of_zero_profile():
    cs = davis_transfer(L2Profile("0", ()), 4, 7)
    assert all(c.coef == 0 for c in cs.entries.values())
    assert singer_verdict(cs) == "consistent"


def test_singer_verdicts():
    assert singer_verdict(davis_transfer(free_product_power(4), "2^m", 7)) == "violates"
    torus = L2Profile("T^2", (), n=2, closed_manifold=True, rationally_aspherical=True)
    assert singer_verdict(torus) == "consistent"
    middle = L2Profile("S", (0, 0, 3), n=4, closed_manifold=True, rationally_aspherical=True)
    assert singer_verdict(middle) == "consistent"
    assert singer_verdict(free_product_power(4), 4) == "not applicable"


@pytest.mark.parametrize("b4,chambers,value", [(0, 16, -32), (32, 16, 0), (40, 16, 8)])
def test_chi_gap(b4, chambers, value):
    v, sign = chi_gap(b4, chambers)
    assert v == value
    assert sign == {-32: "negative", 0: "zero", 8: "positive"}[value]
    assert chi_gap_replayed(b4, chambers) == v


def test_chambers_parse():
    assert Chambers.parse("2^4").value == 16
    assert Chambers.parse("2^m").symbol == "2^m"
    with pytest.raises(ValueError):
        Chambers.parse("0")


def test_pipeline_and_persistence():
    res = run_pipeline("f2^4,davis:n=7,chambers=2^m")
    assert res.verdict == "violates"
    led = Ledger()
    led.add(res.base)
    led.add(cover_scale(atom_f2(), 3))
    again = Ledger.loads(led.dumps())
    assert again.verify()
    assert again.get("F_2^4").values == res.base.values
    with pytest.raises(ValueError):
        led.add(res.base)


profiles = st.lists(st.fractions(min_value=0, max_value=5, max_denominator=3),
                    max_size=4).map(lambda v: L2Profile("p", v))


@given(profiles, profiles, profiles)
def test_kunneth_ring(p, q, r):
    assert kunneth(p, q).values == kunneth(q, p).values
    assert kunneth(kunneth(p, q), r).values == kunneth(p, kunneth(q, r)).values
    assert euler(kunneth(p, q)) == euler(p) * euler(q)
    assert euler(disjoint_union([p, q])) == euler(p) + euler(q)


@given(profiles, profiles)
def test_replay_reproduces(p, q):
    d = disjoint_union([kunneth(p, q), cover_scale(q, 3)])
    assert replay(d).values == d.values


@given(st.integers(0, 12))
def test_violates_for_every_m(m):
    cs = davis_transfer(free_product_power(4), Chambers(value=2 ** m), 7)
    assert singer_verdict(cs) == "violates"


@given(profiles, st.integers(1, 9), st.integers(1, 40))
def test_duality_completion(p, n, ch):
    cs = davis_transfer(p, ch, n, complete=False)
    done = complete_duality(cs)
    assert complete_duality(done).entries == done.entries
    for k, c in cs.entries.items():
        assert done.entries[k].coef >= c.coef
