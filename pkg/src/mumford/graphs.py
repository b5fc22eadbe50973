"""Decorated graphs of finite abelian groups: volume, curvature, reduction, genus.

A :class:`DecoratedGraph` is the quotient graph of a discrete group ``N``
acting on the Bruhat-Tits tree, split into a spanning tree plus the extra
edges that close up its loops.  All numbers are exact ``Fraction`` values.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable

from . import groups
from .groups import GroupDesc, admissible_subgroup, order


class NonIntegralGenus(ArithmeticError):
    """``1 + index * volume`` is not an integer, so no such subgroup exists."""


class LowGenusWarning(UserWarning):
    """The computed genus is below 2, outside the regime of the bounds."""


def rat_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s: str) -> Fraction:
    return Fraction(s)


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    group: GroupDesc

    def other(self, x: str) -> str:
        return self.v if x == self.u else self.u

    def to_json(self) -> dict:
        return {"from": self.u, "to": self.v, "group": self.group.to_json()}


@dataclass(frozen=True)
class DecoratedGraph:
    """Connected graph of groups: spanning tree edges plus extra edges.

    ``vertices`` maps an id to its stabilizer; insertion order is kept and
    used wherever a deterministic order is needed.
    """

    p: int
    vertices: dict = field(default_factory=dict)
    tree_edges: tuple = ()
    extra_edges: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", dict(self.vertices))
        object.__setattr__(self, "tree_edges", tuple(self.tree_edges))
        object.__setattr__(self, "extra_edges", tuple(self.extra_edges))

    @classmethod
    def build(cls, p: int, vertices: dict, tree_edges: Iterable = (), extra_edges: Iterable = ()):
        """Convenience constructor taking ``(u, v, group)`` triples; groups get canonicalized."""
        canon = lambda g: groups.canonicalize(g, p)
        return cls(
            p,
            {k: canon(g) for k, g in vertices.items()},
            tuple(Edge(u, v, canon(g)) for u, v, g in tree_edges),
            tuple(Edge(u, v, canon(g)) for u, v, g in extra_edges),
        )

    @property
    def all_edges(self) -> tuple:
        return self.tree_edges + self.extra_edges

    def star(self, v: str) -> list[Edge]:
        """Tree edges at ``v``."""
        return [e for e in self.tree_edges if v in (e.u, e.v)]

    def degree(self, v: str) -> int:
        return len(self.star(v))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "vertices": [{"id": k, "group": g.to_json()} for k, g in self.vertices.items()],
            "tree_edges": [e.to_json() for e in self.tree_edges],
            "extra_edges": [e.to_json() for e in self.extra_edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DecoratedGraph":
        def edges(key):
            return tuple(
                Edge(str(e["from"]), str(e["to"]), GroupDesc.from_json(e["group"]))
                for e in data.get(key, [])
            )

        vertices = {str(v["id"]): GroupDesc.from_json(v["group"]) for v in data["vertices"]}
        return cls(int(data["p"]), vertices, edges("tree_edges"), edges("extra_edges"))


def segment(p: int, a: GroupDesc, b: GroupDesc, edge: GroupDesc | None = None) -> DecoratedGraph:
    """Two vertices joined by one tree edge (trivial unless given)."""
    edge = groups.trivial() if edge is None else edge
    return DecoratedGraph.build(p, {"v1": a, "v2": b}, [("v1", "v2", edge)])


def path(p: int, vertex_groups: list, edge_groups: list | None = None) -> DecoratedGraph:
    k = len(vertex_groups)
    if edge_groups is None:
        edge_groups = [groups.trivial()] * (k - 1)
    ids = [f"v{i + 1}" for i in range(k)]
    return DecoratedGraph.build(
        p,
        dict(zip(ids, vertex_groups)),
        [(ids[i], ids[i + 1], edge_groups[i]) for i in range(k - 1)],
    )


def validate(g: DecoratedGraph) -> list[str]:
    """Return a list of violations; an empty list means the graph is valid."""
    problems = []
    try:
        groups.check_prime(g.p)
    except ValueError as exc:
        return [f"p: {exc}"]

    for vid, grp in g.vertices.items():
        if not groups.is_admissible(grp, g.p):
            problems.append(f"vertex {vid}: {grp} is not canonical/admissible for p={g.p}")

    for kind, edges in (("tree", g.tree_edges), ("extra", g.extra_edges)):
        for i, e in enumerate(edges):
            tag = f"{kind} edge {i} ({e.u}-{e.v})"
            missing = [x for x in (e.u, e.v) if x not in g.vertices]
            if missing:
                problems.append(f"{tag}: unknown endpoint(s) {', '.join(missing)}")
                continue
            if not groups.is_admissible(e.group, g.p):
                problems.append(f"{tag}: {e.group} is not canonical/admissible for p={g.p}")
            for x in (e.u, e.v):
                if not admissible_subgroup(e.group, g.vertices[x]):
                    problems.append(f"{tag}: {e.group} does not embed in {g.vertices[x]} at {x}")

    n = len(g.vertices)
    if n == 0:
        problems.append("graph has no vertices")
        return problems
    if len(g.tree_edges) != n - 1:
        problems.append(f"tree has {len(g.tree_edges)} edges, expected {n - 1}")

    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, e in enumerate(g.tree_edges):
        if e.u not in parent or e.v not in parent:
            continue
        a, b = find(e.u), find(e.v)
        if a == b:
            problems.append(f"tree edge {i} ({e.u}-{e.v}) closes a cycle")
        else:
            parent[a] = b
    if len({find(v) for v in g.vertices}) > 1:
        problems.append("tree edges do not connect all vertices")
    return problems


def is_valid(g: DecoratedGraph) -> bool:
    return not validate(g)


def volume(g: DecoratedGraph) -> Fraction:
    """Volume of the fundamental domain: sum 1/f_i + sum 1/e_i - sum 1/v_i."""
    extra = sum((Fraction(1, order(e.group)) for e in g.extra_edges), Fraction(0))
    return extra + tree_volume(g)


def tree_volume(g: DecoratedGraph) -> Fraction:
    """Volume restricted to the maximal tree (extra edges dropped)."""
    edges = sum((Fraction(1, order(e.group)) for e in g.tree_edges), Fraction(0))
    verts = sum((Fraction(1, order(x)) for x in g.vertices.values()), Fraction(0))
    return edges - verts


def curvature(g: DecoratedGraph, v: str) -> Fraction:
    """c(v) = 1/2 * sum over tree edges at v of 1/|N_e|  -  1/|N_v|."""
    if v not in g.vertices:
        raise KeyError(f"unknown vertex {v!r}")
    half = sum((Fraction(1, order(e.group)) for e in g.star(v)), Fraction(0)) / 2
    return half - Fraction(1, order(g.vertices[v]))


def curvatures(g: DecoratedGraph) -> dict[str, Fraction]:
    return {v: curvature(g, v) for v in g.vertices}


def is_reduced(g: DecoratedGraph) -> bool:
    return all(
        order(g.vertices[x]) > order(e.group) for e in g.tree_edges for x in (e.u, e.v)
    )


def contract_edge(g: DecoratedGraph, index: int) -> DecoratedGraph:
    """Contract tree edge ``index``; its group must equal one endpoint's group in order.

    The endpoint whose group equals the edge group disappears and everything
    attached to it is moved to the other endpoint.
    """
    e = g.tree_edges[index]
    if order(g.vertices[e.u]) == order(e.group):
        gone, keep = e.u, e.v
    elif order(g.vertices[e.v]) == order(e.group):
        gone, keep = e.v, e.u
    else:
        raise ValueError(f"tree edge {index} is not contractible")

    move = lambda x: keep if x == gone else x
    vertices = {k: grp for k, grp in g.vertices.items() if k != gone}
    tree = tuple(
        Edge(move(f.u), move(f.v), f.group) for i, f in enumerate(g.tree_edges) if i != index
    )
    extra = tuple(Edge(move(f.u), move(f.v), f.group) for f in g.extra_edges)
    return DecoratedGraph(g.p, vertices, tree, extra)


def reduce(g: DecoratedGraph) -> DecoratedGraph:
    """Contract tree edges until |N_v| > |N_e| everywhere; volume is unchanged."""
    while True:
        for i, e in enumerate(g.tree_edges):
            if order(e.group) in (order(g.vertices[e.u]), order(g.vertices[e.v])):
                g = contract_edge(g, i)
                break
        else:
            return g


def genus_from_index(g: DecoratedGraph, index: int) -> int:
    """Genus ``1 + index * volume`` of the curve uniformized by an index-``index`` subgroup.

    Raises :class:`NonIntegralGenus` when the value is not an integer and
    warns with :class:`LowGenusWarning` when it is below 2.
    """
    if index < 1:
        raise ValueError("index must be a positive integer")
    value = 1 + index * volume(g)
    if value.denominator != 1:
        raise NonIntegralGenus(f"1 + {index} * {rat_str(volume(g))} = {rat_str(value)} is not an integer")
    genus = int(value)
    if genus < 2:
        warnings.warn(f"genus {genus} < 2", LowGenusWarning, stacklevel=2)
    return genus


def orders_lcm(g: DecoratedGraph) -> int:
    orders = [order(x) for x in g.vertices.values()] + [order(e.group) for e in g.all_edges]
    return lcm(*orders) if orders else 1
