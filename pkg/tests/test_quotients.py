from fractions import Fraction
from itertools import product

import networkx as nx
import pytest
from hypothesis import given, settings

from mumford import groups
from mumford.graphs import DecoratedGraph, path, segment, volume
from mumford.quotients import (
    AbelianQuotient,
    CoveringGraph,
    DisconnectedCover,
    IncompatibleEdge,
    MissingEmbedding,
    NonInjectiveEmbedding,
    betti,
    check_gauss_bonnet,
    covering_graph,
    edge_images,
    elementary_quotient,
    product_quotient,
    rank_free_product_kernel,
    subgroup_type,
    span,
)

from .strategies import instances

Z2, Z3, Z4, D2 = groups.cyclic(2), groups.cyclic(3), groups.cyclic(4), groups.klein4()
E3 = groups.elemab(3, 1)
ONE = groups.trivial()


def oracle_cover(g, q):
    """Covering graph built from explicit coset sets, as a networkx multigraph."""
    f = q.factors
    elems = list(product(*[range(m) for m in f]))
    add = lambda x, y: tuple((a + b) % m for a, b, m in zip(x, y, f))
    vimg = {v: span(q.embeddings.get(v, ()), f) for v in g.vertices}
    eimg = {k: H for k, (H, _) in edge_images(g, q).items()}
    G = nx.MultiGraph()
    for v, H in vimg.items():
        for x in elems:
            G.add_node((v, frozenset(add(x, h) for h in H)))
    keyed = [(f"tree:{i}", e) for i, e in enumerate(g.tree_edges)]
    keyed += [(f"extra:{i}", e) for i, e in enumerate(g.extra_edges)]
    for key, e in keyed:
        done = set()
        for x in elems:
            c = frozenset(add(x, h) for h in eimg[key])
            if c in done:
                continue
            done.add(c)
            a = (e.u, frozenset(add(x, h) for h in vimg[e.u]))
            b = (e.v, frozenset(add(x, h) for h in vimg[e.v]))
            G.add_edge(a, b)
    return G


def z2z3_q6():
    return segment(5, Z2, Z3), AbelianQuotient((6,), {"v1": ((3,),), "v2": ((2,),)})


def test_cover_examples():
    g, q = z2z3_q6()
    c = covering_graph(g, q)
    assert (c.vertex_count, c.edge_count, c.connected) == (5, 6, True)
    assert betti(c) == 2

    g = segment(5, Z3, Z3)
    q = AbelianQuotient((3, 3), {"v1": ((1, 0),), "v2": ((0, 1),)})
    c = covering_graph(g, q)
    assert (c.vertex_count, c.edge_count) == (6, 9)
    assert betti(c) == 4

    g = DecoratedGraph.build(5, {"v1": Z2})
    c = covering_graph(g, AbelianQuotient((2,), {"v1": ((1,),)}))
    assert (c.vertex_count, c.edge_count) == (1, 0)
    assert betti(c) == 0


def test_betti_examples():
    assert betti(CoveringGraph(5, 6, True)) == 2
    assert betti(CoveringGraph(6, 9, True)) == 4
    assert betti(CoveringGraph(1, 0, True)) == 0
    with pytest.raises(DisconnectedCover):
        betti(CoveringGraph(2, 0, False, 2))


def test_rank_examples():
    assert rank_free_product_kernel(Z2, Z3) == 2
    assert rank_free_product_kernel(E3, E3) == 4
    assert rank_free_product_kernel(D2, Z4) == 9
    g = segment(5, D2, Z4)
    assert check_gauss_bonnet(g, product_quotient(g)).betti == 9
    with pytest.raises(ValueError):
        rank_free_product_kernel(ONE, Z3)


def test_gauss_bonnet_examples():
    g, q = z2z3_q6()
    rep = check_gauss_bonnet(g, q)
    assert rep.holds and rep.lhs == 1 and rep.rhs == 1
    g = segment(3, E3, E3)
    rep = check_gauss_bonnet(g, product_quotient(g))
    assert rep.betti == 4 and rep.rhs == 3
    g = segment(5, D2, Z4)
    rep = check_gauss_bonnet(g, product_quotient(g))
    assert rep.lhs == 8 and rep.rhs == 16 * Fraction(1, 2)


def test_errors():
    g = segment(5, Z2, Z3)
    with pytest.raises(NonInjectiveEmbedding):
        covering_graph(g, AbelianQuotient((6,), {"v1": ((0,),), "v2": ((2,),)}))
    with pytest.raises(MissingEmbedding):
        covering_graph(g, AbelianQuotient((6,), {"v1": ((3,),)}))
    # Z/2 x Z/2 is not generated by a single Z2 image plus another copy of it
    g2 = segment(5, Z2, Z2)
    c = covering_graph(g2, AbelianQuotient((2, 2), {"v1": ((1, 0),), "v2": ((1, 0),)}))
    assert not c.connected
    with pytest.raises(DisconnectedCover):
        check_gauss_bonnet(g2, AbelianQuotient((2, 2), {"v1": ((1, 0),), "v2": ((1, 0),)}))
    bad_edge = segment(5, D2, D2, Z2)
    q = AbelianQuotient((2, 2, 2, 2), {"v1": ((1, 0, 0, 0), (0, 1, 0, 0)), "v2": ((0, 0, 1, 0), (0, 0, 0, 1))})
    with pytest.raises(IncompatibleEdge):
        covering_graph(bad_edge, q)


def test_subgroup_type():
    f = (2, 2)
    assert subgroup_type(span([(1, 0), (0, 1)], f), f, 5) == D2
    assert subgroup_type(span([(1, 0), (0, 1)], f), f, 2) == groups.elemab(2, 2)
    assert subgroup_type(span([(1,)], (6,)), (6,), 5) == groups.cyclic(6)
    assert subgroup_type(span([(1,)], (6,)), (6,), 3) is None


def test_elementary_quotient_examples():
    g = path(5, [D2, D2, D2], [Z2, Z2])
    q = elementary_quotient(g, 2, 4)
    assert q is not None and check_gauss_bonnet(g, q).betti == 5
    assert elementary_quotient(g, 2, 6) is None
    assert elementary_quotient(segment(5, Z3, Z3), 3, 2) is not None


def test_quotient_json_round_trip():
    _, q = z2z3_q6()
    assert AbelianQuotient.from_json(q.to_json()) == q


@settings(max_examples=150)
@given(instances())
def test_gauss_bonnet_against_explicit_cosets(inst):
    g, q = inst.graph, inst.quotient
    rep = check_gauss_bonnet(g, q)
    G = oracle_cover(g, q)
    assert nx.is_connected(G)
    assert (G.number_of_nodes(), G.number_of_edges()) == (rep.cover.vertex_count, rep.cover.edge_count)
    rank = G.number_of_edges() - G.number_of_nodes() + 1
    assert rank == rep.betti
    assert rank - 1 == q.order * volume(g)


def test_free_product_rank_matches_cover():
    for p in (3, 5, 7):
        pool = groups.admissible_groups(p, 9)
        for a in pool:
            for b in pool:
                g = segment(p, a, b)
                q = product_quotient(g)
                if q.order > 81:
                    continue
                assert check_gauss_bonnet(g, q).betti == rank_free_product_kernel(a, b)
