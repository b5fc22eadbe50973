from fractions import Fraction
from itertools import product

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mumford import groups
from mumford.enumeration import (
    EnumParams,
    NoPositiveVolume,
    StarConfig,
    bound_class,
    canonical_form,
    curvature_census,
    divisibility_check,
    elementary_abelian_scan,
    enumerate_trees,
    min_positive_volume,
    short_name,
    tree_record,
    verify_main_bound,
)
from mumford.graphs import DecoratedGraph, Edge, is_reduced, reduce, segment, tree_volume, validate

from .strategies import decorated_graphs

Z2, Z3, Z4, D2 = groups.cyclic(2), groups.cyclic(3), groups.cyclic(4), groups.klein4()
ONE = groups.trivial()


def names(params, jobs=1):
    return [short_name(g) for g in enumerate_trees(params, jobs)]


def test_single_vertex_examples():
    assert sorted(names(EnumParams(5, 1, 4))) == ["D2", "Z2", "Z3", "Z4"]
    assert sorted(names(EnumParams(3, 1, 3))) == ["E3", "Z2"]


def test_two_vertex_example():
    got = names(EnumParams(5, 2, 3))
    assert [n for n in got if "-" in n] == ["Z2-Z2", "Z2-Z3", "Z3-Z3"]


def test_min_volume_examples():
    mu, wit = min_positive_volume(EnumParams(5, 2, 6))
    assert mu == Fraction(1, 6) and [short_name(g) for g in wit] == ["Z2-Z3"]
    with pytest.raises(NoPositiveVolume):
        min_positive_volume(EnumParams(5, 1, 4))
    mu, wit = min_positive_volume(EnumParams(7, 3, 12))
    assert mu == Fraction(1, 6) and [short_name(g) for g in wit] == ["Z2-Z3"]


def test_census_examples():
    rep = curvature_census(EnumParams(5, 7, 12, 6))
    assert StarConfig(Z3, (ONE,)) in rep.bucket(Fraction(1, 6))
    assert StarConfig(D2, (Z2, Z2)) in rep.bucket(Fraction(1, 4))
    assert StarConfig(Z4, (ONE,)) in rep.bucket(Fraction(1, 4))
    assert rep.min_positive == Fraction(1, 6)
    assert not rep.violations
    assert any("Z4|s=1|1" in d for d in rep.discrepancies)


def test_census_p3_uses_e3():
    rep = curvature_census(EnumParams(3, 7, 12, 6))
    assert rep.bucket(Fraction(1, 6)) == {StarConfig(groups.elemab(3, 1), (ONE,))}


def test_census_without_rules_has_more_configs():
    strict = curvature_census(EnumParams(7, 4, 12, 3))
    loose = curvature_census(EnumParams(7, 4, 12, 3, False, False))
    n = lambda r: sum(len(v) for v in r.entries.values())
    assert n(loose) > n(strict)
    assert StarConfig(Z4, (Z2,)) in loose.bucket(0)


def test_bound_examples():
    assert bound_class(1 / tree_volume(segment(5, Z2, Z3))) == "gt4"
    assert tree_record(segment(5, Z2, Z4))["classification"] == "le4"
    rec = tree_record(segment(5, Z3, Z3))
    assert rec["ratio"] == "3/1" and rec["classification"] == "le3"


def test_verify_main_bound_small():
    rep = verify_main_bound(EnumParams(5, 3, 12))
    assert rep.ok
    assert set(rep.exceptional) == {"Z2-Z3"}
    assert rep.exceptional["Z2-Z3"] == 6


def test_d2_z3_ratio_is_not_above_4():
    rec = tree_record(segment(5, D2, Z3))
    assert rec["volume"] == "5/12" and rec["ratio"] == "12/5"


def test_divisibility_examples():
    assert divisibility_check(3, 2, 4)
    assert divisibility_check(2, 3, 3)
    assert not divisibility_check(5, 2, 2)


def test_scan_examples():
    rep = elementary_abelian_scan(EnumParams(5, 2, 4), 3, 2)
    rec = next(r for r in rep.records if r["name"] == "Z3-Z3")
    assert rec["genus"] == 4 and rec["divisible"]
    rep = elementary_abelian_scan(EnumParams(5, 2, 4), 2, 0)
    rec = next(r for r in rep.records if r["name"] == "D2-Z2")
    assert rec["volume"] == "1/4"
    assert rep.ok
    with pytest.raises(ValueError):
        elementary_abelian_scan(EnumParams(5, 2, 5), 5, 2)


def test_jobs_do_not_change_output():
    params = EnumParams(7, 4, 8)
    assert names(params, 1) == names(params, 3)


# -- naive oracle -----------------------------------------------------------


def labelled_trees(k):
    if k == 1:
        return [[]]
    if k == 2:
        return [[(0, 1)]]
    return [[(0, 1), (1, 2)], [(0, 1), (0, 2)], [(0, 2), (1, 2)]]


def follows_rules(labels, edges):
    for i, j, h in edges:
        for x in (labels[i], labels[j]):
            if x.kind in (groups.ELEMAB, groups.CYCLIC) and groups.order(h) != 1:
                return False
    return True


def naive_classes(p, k, max_order):
    pool = groups.admissible_groups(p, max_order)
    hs = [ONE] + pool
    found = {}
    for shape in labelled_trees(k):
        for labels in product(pool, repeat=k):
            for decos in product(hs, repeat=len(shape)):
                edges = [(i, j, h) for (i, j), h in zip(shape, decos)]
                ids = [f"v{i}" for i in range(k)]
                g = DecoratedGraph(p, dict(zip(ids, labels)), tuple(
                    Edge(ids[i], ids[j], h) for i, j, h in edges
                ))
                if validate(g) or not is_reduced(g) or not follows_rules(labels, edges):
                    continue
                G = nx.Graph()
                for i, lab in enumerate(labels):
                    G.add_node(i, group=lab)
                for i, j, h in edges:
                    G.add_edge(i, j, group=h)
                # bucket by a cheap invariant before the isomorphism test
                key = (tuple(sorted(map(str, labels))), tuple(sorted(str(h) for _, _, h in edges)))
                bucket = found.setdefault(key, [])
                if not any(nx.is_isomorphic(G, H, node_match=eq, edge_match=eq) for H in bucket):
                    bucket.append(G)
    return [G for bucket in found.values() for G in bucket]


def eq(a, b):
    return a["group"] == b["group"]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_enumeration_matches_naive_oracle(p):
    params = EnumParams(p, 3, 8)
    ours = list(enumerate_trees(params))
    by_size = {}
    for g in ours:
        by_size.setdefault(len(g.vertices), []).append(g)
    for k in (1, 2, 3):
        assert len(by_size.get(k, [])) == len(naive_classes(p, k, 8)), (p, k)
    assert len({canonical_form(g) for g in ours}) == len(ours)


def test_enumerated_trees_are_valid_and_reduced():
    for g in enumerate_trees(EnumParams(5, 4, 8)):
        assert validate(g) == []
        assert reduce(g) == g


@given(decorated_graphs(max_vertices=6, extra=False), st.randoms(use_true_random=False))
def test_canonical_form_ignores_labels(g, rnd):
    ids = list(g.vertices)
    new = ids[:]
    rnd.shuffle(new)
    ren = dict(zip(ids, [f"w{x}" for x in new]))
    h = DecoratedGraph(
        g.p,
        {ren[v]: g.vertices[v] for v in reversed(ids)},
        tuple(Edge(ren[e.v], ren[e.u], e.group) for e in reversed(g.tree_edges)),
    )
    assert canonical_form(h) == canonical_form(g)
