from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mumford import groups
from mumford.groups import (
    InadmissibleGroup,
    NoRamification,
    admissible_groups,
    admissible_subgroup,
    canonicalize,
    classify_abelian_families,
    cyclic,
    elemab,
    klein4,
    order,
    ramification_profile,
    trivial,
)

PRIMES = [2, 3, 5, 7, 11]


def test_orders():
    assert order(trivial()) == 1
    assert order(cyclic(6)) == 6
    assert order(elemab(3, 2)) == 9
    assert order(klein4()) == 4


def test_families_p5():
    fams = classify_abelian_families(5)
    names = [f.name for f in fams]
    assert names == ["cyclic", "klein4", "elemab"]
    assert cyclic(6) in fams[0]
    assert cyclic(10) not in fams[0]
    assert elemab(5, 3) in fams[2]


def test_families_p2_has_no_klein4():
    fams = classify_abelian_families(2)
    assert "klein4" not in [f.name for f in fams]
    assert elemab(2, 2) in admissible_groups(2, 4)
    assert klein4() not in admissible_groups(2, 4)


def test_families_p3_excludes_cyclic3():
    gs = admissible_groups(3, 9)
    assert cyclic(3) not in gs
    assert elemab(3, 1) in gs and elemab(3, 2) in gs


def test_nonprime_rejected():
    with pytest.raises(ValueError):
        classify_abelian_families(4)


def test_ramification_examples():
    assert ramification_profile(cyclic(4)) == (4, 4)
    assert ramification_profile(klein4()) == (2, 2, 2)
    assert ramification_profile(elemab(3, 2)) == (9,)
    with pytest.raises(NoRamification):
        ramification_profile(trivial())


def test_subgroup_examples():
    assert admissible_subgroup(cyclic(2), klein4())
    assert admissible_subgroup(cyclic(3), cyclic(6))
    assert not admissible_subgroup(cyclic(2), cyclic(3))
    assert not admissible_subgroup(cyclic(3), klein4())


def test_canonicalize_examples():
    for p in PRIMES:
        assert canonicalize(cyclic(1), p) == trivial()
    assert canonicalize(klein4(), 2) == elemab(2, 2)
    assert canonicalize(cyclic(2), 2) == elemab(2, 1)
    with pytest.raises(InadmissibleGroup):
        canonicalize(cyclic(6), 3)


def test_json_round_trip():
    for g in [trivial(), cyclic(6), klein4(), elemab(3, 2)]:
        assert groups.GroupDesc.from_json(g.to_json()) == g
    assert cyclic(6).to_json() == {"kind": "cyclic", "n": 6}
    assert elemab(3, 2).to_json() == {"kind": "elemab", "p": 3, "r": 2}


def test_spherical_condition_exhaustive():
    for p in PRIMES:
        for g in admissible_groups(p, 1000):
            total = sum(1 - Fraction(1, e) for e in ramification_profile(g))
            assert total < 2, g


descs = st.one_of(
    st.just(trivial()),
    st.integers(1, 40).map(cyclic),
    st.just(klein4()),
    st.builds(elemab, st.sampled_from(PRIMES), st.integers(0, 4)),
)


@given(descs, st.sampled_from(PRIMES))
def test_canonicalize_idempotent(g, p):
    try:
        c = canonicalize(g, p)
    except InadmissibleGroup:
        return
    assert canonicalize(c, p) == c
    assert order(c) == order(g)


@given(st.sampled_from(PRIMES), st.data())
def test_subgroup_relation(p, data):
    pool = [trivial()] + admissible_groups(p, 30)
    a, b, c = (data.draw(st.sampled_from(pool)) for _ in range(3))
    assert admissible_subgroup(a, a)
    if admissible_subgroup(a, b):
        assert order(b) % order(a) == 0
        if admissible_subgroup(b, c):
            assert admissible_subgroup(a, c)


def test_elemab_rank_zero_is_trivial():
    assert groups.elemab(3, 0) == groups.trivial()
    assert groups.order(groups.elemab(5, 0)) == 1
