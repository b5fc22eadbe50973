"""Finite abelian quotients N -> Q and the covering-graph rank oracle.

Given a graph of groups and injective maps of its vertex groups into a
finite abelian group ``Q``, the kernel ``Gamma`` of ``N -> Q`` is free and
acts freely on the Bass-Serre tree.  The quotient ``Gamma \\ X`` is the
covering graph built here by coset enumeration; its first Betti number is
the rank of ``Gamma`` (the genus), computed without using the volume.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod

from . import groups
from .graphs import DecoratedGraph, rat_str, volume
from .groups import GroupDesc, order


class NonInjectiveEmbedding(ValueError):
    pass


class MissingEmbedding(KeyError):
    pass


class IncompatibleEdge(ValueError):
    """No subgroup of both endpoint images has the edge group's type."""


class DisconnectedCover(ArithmeticError):
    pass


# -- arithmetic in Q = Z/m_1 + ... + Z/m_k --------------------------------


def q_elements(factors) -> list[tuple]:
    return list(itertools.product(*(range(m) for m in factors)))


def q_add(x, y, factors) -> tuple:
    return tuple((a + b) % m for a, b, m in zip(x, y, factors))


def q_scale(k: int, x, factors) -> tuple:
    return tuple((k * a) % m for a, m in zip(x, factors))


def q_order(x, factors) -> int:
    out = 1
    for a, m in zip(x, factors):
        o = m // gcd(a % m, m)
        out = out * o // gcd(out, o)
    return out


def span(gens, factors) -> frozenset:
    zero = tuple(0 for _ in factors)
    seen = {zero}
    frontier = [zero]
    gens = [tuple(x % m for x, m in zip(g, factors)) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = q_add(x, g, factors)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def subgroup_type(H, factors, p: int) -> GroupDesc | None:
    """Canonical descriptor of the subgroup ``H`` in characteristic ``p``, or None."""
    n = len(H)
    if n == 1:
        return groups.trivial()
    orders = {q_order(x, factors) for x in H}
    try:
        if n in orders:
            return groups.canonicalize(groups.cyclic(n), p)
        nonzero = orders - {1}
        if len(nonzero) == 1:
            ell = nonzero.pop()
            if groups.is_prime(ell):
                r = 0
                while ell ** r < n:
                    r += 1
                return groups.canonicalize(groups.elemab(ell, r), p)
    except groups.InadmissibleGroup:
        return None
    return None


def standard_generators(H, desc: GroupDesc, factors) -> tuple | None:
    """Images of ``desc``'s standard generators, chosen inside ``H`` (deterministic), or None."""
    gen_orders = desc.generator_orders()
    if not gen_orders:
        return ()
    if desc.kind == groups.CYCLIC:
        for x in sorted(H):
            if q_order(x, factors) == desc.n:
                return (x,)
        return None
    ell = gen_orders[0]
    chosen = []
    current = span([], factors)
    for x in sorted(H):
        if q_order(x, factors) == ell and x not in current:
            chosen.append(x)
            current = span(chosen, factors)
            if len(chosen) == len(gen_orders):
                break
    if len(chosen) < len(gen_orders):
        return None
    return tuple(chosen)


def image_of(desc: GroupDesc, gens, factors, where: str = "") -> frozenset:
    """Image subgroup of the map sending ``desc``'s generators to ``gens``; checks injectivity."""
    gens = tuple(tuple(g) for g in gens)
    expected = desc.generator_orders()
    if len(gens) != len(expected):
        raise NonInjectiveEmbedding(
            f"{where}: {desc} needs {len(expected)} generator images, got {len(gens)}"
        )
    for g, o in zip(gens, expected):
        if len(g) != len(factors):
            raise ValueError(f"{where}: element {g} does not live in Z/{factors}")
        if o % q_order(g, factors) != 0:
            raise NonInjectiveEmbedding(f"{where}: image {g} has order not dividing {o}")
    H = span(gens, factors)
    if len(H) != order(desc):
        raise NonInjectiveEmbedding(
            f"{where}: image of {desc} has order {len(H)}, not {order(desc)}"
        )
    return H


def edge_key(kind: str, index: int) -> str:
    return f"{kind}:{index}"


@dataclass(frozen=True)
class AbelianQuotient:
    """Finite abelian ``Q = (+) Z/m_i`` with each vertex group mapped into it.

    ``embeddings[v]`` lists the images of the standard generators of the
    group at ``v`` (one generator for cyclic groups, two for Klein four,
    ``r`` for ``E(r)``).  ``edge_images`` optionally pins the image of an
    edge group under key ``"tree:i"`` / ``"extra:i"``; otherwise the first
    admissible subgroup in sorted order is used.
    """

    factors: tuple
    embeddings: dict
    edge_images: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(m) for m in self.factors))
        object.__setattr__(
            self,
            "embeddings",
            {k: tuple(tuple(x) for x in v) for k, v in self.embeddings.items()},
        )
        object.__setattr__(
            self,
            "edge_images",
            {k: tuple(tuple(x) for x in v) for k, v in self.edge_images.items()},
        )

    @property
    def order(self) -> int:
        return prod(self.factors)

    def to_json(self) -> dict:
        out = {
            "factors": list(self.factors),
            "embeddings": {k: [list(x) for x in v] for k, v in self.embeddings.items()},
        }
        if self.edge_images:
            out["edge_images"] = {k: [list(x) for x in v] for k, v in self.edge_images.items()}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "AbelianQuotient":
        return cls(data["factors"], data.get("embeddings", {}), data.get("edge_images", {}))


def vertex_images(g: DecoratedGraph, q: AbelianQuotient) -> dict[str, frozenset]:
    out = {}
    for v, desc in g.vertices.items():
        if v not in q.embeddings:
            if order(desc) == 1:
                out[v] = span([], q.factors)
                continue
            raise MissingEmbedding(f"no embedding given for vertex {v}")
        out[v] = image_of(desc, q.embeddings[v], q.factors, where=f"vertex {v}")
    return out


def edge_images(g: DecoratedGraph, q: AbelianQuotient, vimg=None) -> dict[str, tuple]:
    """Image subgroup and generators of each edge group, keyed ``"tree:i"``/``"extra:i"``."""
    vimg = vertex_images(g, q) if vimg is None else vimg
    out = {}
    for kind, edges in (("tree", g.tree_edges), ("extra", g.extra_edges)):
        for i, e in enumerate(edges):
            key = edge_key(kind, i)
            common = vimg[e.u] & vimg[e.v]
            if key in q.edge_images:
                gens = q.edge_images[key]
                H = image_of(e.group, gens, q.factors, where=f"edge {key}")
                if not H <= common:
                    raise IncompatibleEdge(f"edge {key}: image not inside both endpoint images")
            else:
                gens = standard_generators(common, e.group, q.factors)
                if gens is None:
                    raise IncompatibleEdge(
                        f"edge {key}: no copy of {e.group} inside the images of {e.u} and {e.v}"
                    )
                H = span(gens, q.factors)
            out[key] = (H, tuple(gens))
    return out


@dataclass(frozen=True)
class CoveringGraph:
    vertex_count: int
    edge_count: int
    connected: bool
    components: int = 1
    cycle_rank: int = 0

    def to_json(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
            "connected": self.connected,
            "components": self.components,
        }


def _coset(x, H, factors):
    return min(q_add(x, h, factors) for h in H)


def covering_graph(g: DecoratedGraph, q: AbelianQuotient) -> CoveringGraph:
    """Enumerate the quotient of the Bass-Serre tree by ``ker(N -> Q)``.

    One vertex per coset of the vertex image over each vertex, one edge per
    coset of the edge image over each edge; the conjugating elements of the
    extra edges are taken to map to the identity of ``Q``.
    """
    f = q.factors
    vimg = vertex_images(g, q)
    eimg = edge_images(g, q, vimg)
    elements = q_elements(f)

    nodes = set()
    for v, H in vimg.items():
        for x in elements:
            nodes.add((v, _coset(x, H, f)))

    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edge_count = 0
    cycles = 0
    for kind, edges in (("tree", g.tree_edges), ("extra", g.extra_edges)):
        for i, e in enumerate(edges):
            H = eimg[edge_key(kind, i)][0]
            seen = set()
            for x in elements:
                c = _coset(x, H, f)
                if c in seen:
                    continue
                seen.add(c)
                edge_count += 1
                a = find((e.u, _coset(x, vimg[e.u], f)))
                b = find((e.v, _coset(x, vimg[e.v], f)))
                if a == b:
                    cycles += 1
                else:
                    parent[a] = b
    components = len({find(n) for n in nodes})
    return CoveringGraph(len(nodes), edge_count, components == 1, components, cycles)


def betti(c: CoveringGraph) -> int:
    """First Betti number ``E - V + 1`` of a connected covering graph."""
    if not c.connected:
        raise DisconnectedCover(f"cover has {c.components} components")
    return c.edge_count - c.vertex_count + 1


def rank_free_product_kernel(a: GroupDesc, b: GroupDesc) -> int:
    """Rank of the kernel of ``A * B -> A x B``: ``(|A| - 1)(|B| - 1)``."""
    if order(a) == 1 or order(b) == 1:
        raise ValueError("both free factors must be nontrivial")
    return (order(a) - 1) * (order(b) - 1)


@dataclass(frozen=True)
class GaussBonnetReport:
    betti: int
    quotient_order: int
    volume: Fraction
    lhs: int
    rhs: Fraction
    holds: bool
    cover: CoveringGraph
    edge_images: dict

    @property
    def genus(self) -> int:
        return self.betti

    def to_json(self) -> dict:
        return {
            "betti": self.betti,
            "genus": self.betti,
            "quotient_order": self.quotient_order,
            "mu": rat_str(self.volume),
            "betti_minus_1": self.lhs,
            "order_times_mu": rat_str(self.rhs),
            "holds": self.holds,
            "cover": self.cover.to_json(),
            "edge_images": {k: [list(x) for x in v] for k, v in self.edge_images.items()},
        }


def check_gauss_bonnet(g: DecoratedGraph, q: AbelianQuotient) -> GaussBonnetReport:
    """Compare ``betti(cover) - 1`` with ``|Q| * volume(g)``."""
    cover = covering_graph(g, q)
    b = betti(cover)
    mu = volume(g)
    rhs = q.order * mu
    eimg = {k: gens for k, (_, gens) in edge_images(g, q).items()}
    return GaussBonnetReport(b, q.order, mu, b - 1, rhs, Fraction(b - 1) == rhs, cover, eimg)


# -- ready-made quotients ---------------------------------------------------


def product_quotient(g: DecoratedGraph) -> AbelianQuotient:
    """``Q`` = direct product of the vertex groups, each vertex in its own block.

    This is the abelianization-style target of a free product; it is only
    consistent when every edge group is trivial.
    """
    factors = []
    slots = {}
    for v, desc in g.vertices.items():
        slots[v] = []
        for o in desc.generator_orders():
            slots[v].append(len(factors))
            factors.append(o)
    k = len(factors)
    emb = {}
    for v, idx in slots.items():
        emb[v] = tuple(tuple(1 if j == i else 0 for j in range(k)) for i in idx)
    return AbelianQuotient(tuple(factors), emb)


def elementary_quotient(g: DecoratedGraph, ell: int, s: int) -> AbelianQuotient | None:
    """Deterministic embedding of ``g`` into ``(Z/ell)^s`` whose images generate, or None.

    Vertices are visited in tree order; each one reuses the image of the edge
    to its parent and then takes fresh basis vectors while any remain.
    """
    factors = (ell,) * s
    zero = (0,) * s
    basis = [tuple(1 if j == i else 0 for j in range(s)) for i in range(s)]
    elements = sorted(q_elements(factors))
    fresh = iter(basis)
    emb: dict[str, tuple] = {}
    pinned: dict[str, tuple] = {}

    first = next(iter(g.vertices))
    order_visit = [(first, None, None)]
    seen = {first}
    k = 0
    while k < len(order_visit):
        v, _, _ = order_visit[k]
        k += 1
        for i, e in enumerate(g.tree_edges):
            if v in (e.u, e.v):
                w = e.other(v)
                if w not in seen:
                    seen.add(w)
                    order_visit.append((w, v, i))

    for v, parent, ei in order_visit:
        desc = g.vertices[v]
        orders = desc.generator_orders()
        if any(o != ell for o in orders):
            return None
        gens: list = []
        if parent is not None:
            e = g.tree_edges[ei]
            H_parent = span(emb[parent], factors)
            egens = standard_generators(H_parent, e.group, factors)
            if egens is None:
                return None
            pinned[edge_key("tree", ei)] = egens
            gens.extend(egens)
        while len(gens) < len(orders):
            cur = span(gens, factors)
            nxt = next(fresh, None)
            if nxt is None or nxt in cur:
                nxt = next((x for x in elements if x != zero and x not in cur), None)
            if nxt is None:
                return None
            gens.append(nxt)
        if len(span(gens, factors)) != order(desc):
            return None
        emb[v] = tuple(gens)

    images = [x for gens in emb.values() for x in gens]
    if len(span(images, factors)) != ell ** s:
        return None
    q = AbelianQuotient(factors, emb, pinned)
    try:
        edge_images(g, q)
    except IncompatibleEdge:
        return None
    return q
