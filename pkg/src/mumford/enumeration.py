"""Exhaustive search over reduced trees of groups, and the censuses built on it.

Trees are grown one leaf at a time from single vertices; duplicates are
removed with a canonical string (minimum over all roots of a sorted
rooted encoding).  Every census is bounded-exhaustive at the scale given
by :class:`EnumParams`.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from . import groups
from .graphs import DecoratedGraph, Edge, curvatures, rat_str, tree_volume, volume
from .groups import CYCLIC, ELEMAB, GroupDesc, admissible_subgroup, order
from .quotients import check_gauss_bonnet, elementary_quotient


class NoPositiveVolume(LookupError):
    pass


@dataclass(frozen=True)
class EnumParams:
    p: int
    max_vertices: int
    max_group_order: int
    max_star: int | None = None
    enforce_p_edge_rule: bool = True
    enforce_cyclic_edge_rule: bool = True
    allowed_groups: tuple | None = None

    def __post_init__(self):
        groups.check_prime(self.p)
        if self.max_vertices < 1:
            raise ValueError("max_vertices must be positive")
        if self.max_group_order < 2:
            raise ValueError("max_group_order must be at least 2")
        if self.max_star is not None and self.max_star < 1:
            raise ValueError("max_star must be positive")

    def vertex_groups(self) -> list[GroupDesc]:
        if self.allowed_groups is not None:
            gs = [groups.canonicalize(g, self.p) for g in self.allowed_groups]
            return sorted(
                {g for g in gs if order(g) > 1 and order(g) <= self.max_group_order},
                key=groups.group_key,
            )
        return groups.admissible_groups(self.p, self.max_group_order)

    def star_limit(self) -> int:
        return self.max_vertices - 1 if self.max_star is None else self.max_star


def edge_choices(a: GroupDesc, b: GroupDesc, params: EnumParams) -> list[GroupDesc]:
    """Edge decorations allowed between vertex groups ``a`` and ``b`` (reduced, rule-respecting)."""
    forced_trivial = False
    for x in (a, b):
        if params.enforce_p_edge_rule and x.kind == ELEMAB:
            forced_trivial = True
        if params.enforce_cyclic_edge_rule and x.kind == CYCLIC:
            forced_trivial = True
    bound = min(order(a), order(b)) - 1
    cands = [groups.trivial()]
    if not forced_trivial and bound >= 2:
        cands += groups.admissible_groups(params.p, bound)
    return [
        h for h in cands
        if order(h) <= bound and admissible_subgroup(h, a) and admissible_subgroup(h, b)
    ]


# -- canonical forms ------------------------------------------------------


def _adjacency(labels, edges):
    adj = {i: [] for i in range(len(labels))}
    for i, j, h in edges:
        adj[i].append((j, h))
        adj[j].append((i, h))
    return adj


def _encode(v, parent, labels, adj) -> str:
    parts = sorted(f"{h}:{_encode(w, v, labels, adj)}" for w, h in adj[v] if w != parent)
    return f"{labels[v]}[{','.join(parts)}]"


def canonical_string(labels, edges) -> str:
    adj = _adjacency(labels, edges)
    return min(_encode(r, None, labels, adj) for r in range(len(labels)))


def canonical_form(g: DecoratedGraph) -> str:
    """Isomorphism invariant of a decorated tree (extra edges are not allowed)."""
    if g.extra_edges:
        raise ValueError("canonical forms are only defined for trees")
    ids = list(g.vertices)
    pos = {v: i for i, v in enumerate(ids)}
    labels = [g.vertices[v] for v in ids]
    edges = [(pos[e.u], pos[e.v], e.group) for e in g.tree_edges]
    return canonical_string(labels, edges)


def _canonical_relabel(labels, edges):
    """Vertex order and edges of the tree laid out from its canonical root."""
    adj = _adjacency(labels, edges)
    root = min(range(len(labels)), key=lambda r: _encode(r, None, labels, adj))
    order_ = []

    def walk(v, parent):
        order_.append(v)
        kids = sorted(
            ((f"{h}:{_encode(w, v, labels, adj)}", w) for w, h in adj[v] if w != parent)
        )
        for _, w in kids:
            walk(w, v)

    walk(root, None)
    pos = {v: i for i, v in enumerate(order_)}
    new_labels = tuple(labels[v] for v in order_)
    new_edges = tuple(
        sorted(
            (min(pos[i], pos[j]), max(pos[i], pos[j]), h) for i, j, h in edges
        )
    )
    return new_labels, new_edges


def _to_graph(p, labels, edges) -> DecoratedGraph:
    ids = [f"v{i + 1}" for i in range(len(labels))]
    return DecoratedGraph(
        p,
        dict(zip(ids, labels)),
        tuple(Edge(ids[i], ids[j], h) for i, j, h in edges),
    )


def short_name(g: DecoratedGraph) -> str:
    """Readable name: ``Z2-Z3`` for paths (``D2-(Z2)-D2`` for a nontrivial edge), else canonical form."""
    if g.extra_edges:
        return canonical_form(g) + f"+{len(g.extra_edges)}extra"
    if len(g.vertices) == 1:
        return str(next(iter(g.vertices.values())))
    degrees = {v: g.degree(v) for v in g.vertices}
    if max(degrees.values()) > 2:
        return canonical_form(g)
    ends = [v for v, d in degrees.items() if d == 1]
    names = []
    for start in ends:
        seq = [str(g.vertices[start])]
        prev, cur = None, start
        while True:
            nxt = [e for e in g.star(cur) if e.other(cur) != prev]
            if not nxt:
                break
            e = nxt[0]
            seq.append("-" if order(e.group) == 1 else f"-({e.group})-")
            prev, cur = cur, e.other(cur)
            seq.append(str(g.vertices[cur]))
        names.append("".join(seq))
    return min(names)


# -- enumeration ----------------------------------------------------------


def _children(args):
    (labels, edges), params = args
    vgroups = params.vertex_groups()
    limit = params.star_limit()
    deg = [0] * len(labels)
    for i, j, _ in edges:
        deg[i] += 1
        deg[j] += 1
    out = {}
    new = len(labels)
    for x in range(len(labels)):
        if deg[x] >= limit:
            continue
        for grp in vgroups:
            for h in edge_choices(labels[x], grp, params):
                lab = labels + (grp,)
                eds = edges + ((x, new, h),)
                key = canonical_string(lab, eds)
                if key not in out:
                    out[key] = (lab, eds)
    return out


def _layers(params: EnumParams, jobs: int = 1):
    level = {}
    for grp in params.vertex_groups():
        level[canonical_string((grp,), ())] = ((grp,), ())
    yield level
    for _ in range(params.max_vertices - 1):
        items = [level[k] for k in sorted(level)]
        if not items:
            return
        nxt: dict = {}
        work = [(item, params) for item in items]
        if jobs > 1 and len(work) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                parts = list(pool.map(_children, work, chunksize=max(1, len(work) // (4 * jobs))))
        else:
            parts = [_children(w) for w in work]
        for part in parts:
            for key, val in part.items():
                nxt.setdefault(key, val)
        level = nxt
        yield level


def enumerate_trees(params: EnumParams, jobs: int = 1) -> Iterator[DecoratedGraph]:
    """Every reduced admissible tree of groups within ``params``, up to isomorphism.

    Output is sorted by vertex count and then canonical string, so it does
    not depend on ``jobs``.
    """
    for level in _layers(params, jobs):
        for key in sorted(level):
            labels, edges = _canonical_relabel(*level[key])
            yield _to_graph(params.p, labels, edges)


# -- censuses -------------------------------------------------------------


def min_positive_volume(params: EnumParams, jobs: int = 1) -> tuple[Fraction, list[DecoratedGraph]]:
    best = None
    witnesses: list[DecoratedGraph] = []
    for g in enumerate_trees(params, jobs):
        mu = tree_volume(g)
        if mu <= 0:
            continue
        if best is None or mu < best:
            best, witnesses = mu, [g]
        elif mu == best:
            witnesses.append(g)
    if best is None:
        raise NoPositiveVolume(f"no tree with positive volume within {params}")
    return best, witnesses


@dataclass(frozen=True, order=True)
class StarConfig:
    """A vertex group together with the multiset of edge groups at it."""

    group: GroupDesc
    edges: tuple

    @property
    def s(self) -> int:
        return len(self.edges)

    @property
    def curvature(self) -> Fraction:
        half = sum((Fraction(1, order(h)) for h in self.edges), Fraction(0)) / 2
        return half - Fraction(1, order(self.group))

    def __str__(self) -> str:
        return f"{self.group}|s={self.s}|" + ",".join(str(h) for h in self.edges)

    def to_json(self) -> dict:
        return {"group": str(self.group), "s": self.s, "edges": [str(h) for h in self.edges]}


def star_configs(params: EnumParams) -> Iterator[StarConfig]:
    for grp in params.vertex_groups():
        choices = _star_edge_choices(grp, params)
        for s in range(1, params.star_limit() + 1):
            for combo in itertools.combinations_with_replacement(choices, s):
                yield StarConfig(grp, tuple(combo))


def _star_edge_choices(grp: GroupDesc, params: EnumParams) -> list[GroupDesc]:
    forced = (params.enforce_p_edge_rule and grp.kind == ELEMAB) or (
        params.enforce_cyclic_edge_rule and grp.kind == CYCLIC
    )
    cands = [groups.trivial()]
    if not forced and order(grp) > 2:
        cands += groups.admissible_groups(params.p, order(grp) - 1)
    return [h for h in cands if order(h) < order(grp) and admissible_subgroup(h, grp)]


def expected_buckets(p: int) -> dict[Fraction, set[StarConfig]]:
    """The classical list of star configurations with c = 0, 1/6 and 1/4."""
    one = groups.trivial()
    z2 = groups.canonicalize(groups.cyclic(2), p)
    z3 = groups.canonicalize(groups.cyclic(3), p)
    zero = {StarConfig(z2, (one,))}
    quarter = set()
    if p != 2:
        zero.add(StarConfig(groups.klein4(), (z2,)))
        quarter = {
            StarConfig(groups.klein4(), (z2, z2)),
            StarConfig(groups.klein4(), (one,)),
        }
    return {
        Fraction(0): zero,
        Fraction(1, 6): {StarConfig(z3, (one,))},
        Fraction(1, 4): quarter,
    }


@dataclass
class CensusReport:
    p: int
    entries: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    discrepancies: list = field(default_factory=list)

    @property
    def min_positive(self) -> Fraction | None:
        pos = [c for c in self.entries if c > 0]
        return min(pos) if pos else None

    def bucket(self, c) -> set:
        return set(self.entries.get(Fraction(c), []))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "buckets": {
                rat_str(c): [str(x) for x in sorted(v)] for c, v in sorted(self.entries.items())
            },
            "min_positive": None if self.min_positive is None else rat_str(self.min_positive),
            "violations": self.violations,
            "discrepancies": self.discrepancies,
        }


def curvature_census(params: EnumParams) -> CensusReport:
    """Bucket every star configuration by its curvature and compare with :func:`expected_buckets`."""
    report = CensusReport(params.p)
    for cfg in star_configs(params):
        report.entries.setdefault(cfg.curvature, []).append(cfg)
    for c, cfgs in report.entries.items():
        if 0 < c < Fraction(1, 6):
            report.violations.extend(f"c={rat_str(c)} < 1/6 at {x}" for x in cfgs)

    expected = expected_buckets(params.p)
    vg = set(params.vertex_groups())
    for c, want in expected.items():
        want = {x for x in want if x.group in vg and x.s <= params.star_limit()}
        got = report.bucket(c)
        missing, extra = want - got, got - want
        if c == Fraction(1, 4):
            for x in sorted(extra):
                report.discrepancies.append(
                    f"c=1/4 also attained by {x}, missing from the expected list"
                )
            for x in sorted(missing):
                report.violations.append(f"expected {x} at c=1/4 but the census disagrees")
        else:
            for x in sorted(extra):
                report.violations.append(f"c={rat_str(c)} attained by unlisted {x}")
            for x in sorted(missing):
                report.violations.append(f"expected {x} at c={rat_str(c)} but it is absent")
    return report


# -- bound verification ---------------------------------------------------

EXPECTED_EXCEPTIONS = ("Z2-Z3", "D2-Z3")


def bound_class(ratio: Fraction) -> str:
    if ratio <= 3:
        return "le3"
    if ratio <= 4:
        return "le4"
    return "gt4"


def tree_record(g: DecoratedGraph) -> dict:
    mu = volume(g)
    rec = {
        "name": short_name(g),
        "graph": g.to_json(),
        "volume": rat_str(mu),
        "curvatures": {v: rat_str(c) for v, c in curvatures(g).items()},
    }
    if mu > 0:
        ratio = 1 / mu
        rec["ratio"] = rat_str(ratio)
        rec["classification"] = bound_class(ratio)
    else:
        rec["ratio"] = None
        rec["classification"] = "nonpositive"
    return rec


@dataclass
class BoundReport:
    records: list = field(default_factory=list)
    exceptional: dict = field(default_factory=dict)
    unexpected: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.unexpected

    def to_json(self) -> dict:
        return {
            "counts": self.counts,
            "exceptional": {k: rat_str(v) for k, v in self.exceptional.items()},
            "unexpected": self.unexpected,
            "ok": self.ok,
        }


def verify_main_bound(params: EnumParams, jobs: int = 1) -> BoundReport:
    """Classify each positive-volume tree by ``|N/Gamma| / (g - 1) = 1 / mu``."""
    rep = BoundReport(counts={"le3": 0, "le4": 0, "gt4": 0, "nonpositive": 0})
    for g in enumerate_trees(params, jobs):
        rec = tree_record(g)
        rep.records.append(rec)
        rep.counts[rec["classification"]] += 1
        if rec["classification"] == "gt4":
            rep.exceptional[rec["name"]] = Fraction(rec["ratio"])
            if rec["name"] not in EXPECTED_EXCEPTIONS:
                rep.unexpected.append(rec["name"])
    return rep


# -- elementary abelian actions ------------------------------------------


def divisibility_check(ell: int, s: int, g: int) -> bool:
    """``ell^(s-1) | g-1`` for odd ``ell``; ``2^(s-2) | g-1`` for ``ell = 2``."""
    groups.check_prime(ell)
    if s < 2:
        raise ValueError("s must be at least 2")
    k = s - 2 if ell == 2 else s - 1
    return (g - 1) % ell ** k == 0


def elementary_stabilizers(ell: int) -> tuple:
    if ell == 2:
        return (groups.cyclic(2), groups.klein4())
    return (groups.cyclic(ell),)


@dataclass
class ScanReport:
    ell: int
    s: int
    records: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "s": self.s,
            "trees": len(self.records),
            "with_quotient": sum(1 for r in self.records if r["genus"] is not None),
            "records": self.records,
            "violations": self.violations,
            "ok": self.ok,
        }


def elementary_abelian_scan(params: EnumParams, ell: int, s: int, jobs: int = 1) -> ScanReport:
    """Volumes and genera of trees whose stabilizers live in ``(Z/ell)^2`` or ``Z/ell``."""
    groups.check_prime(ell)
    if ell == params.p:
        raise ValueError("ell must differ from the residue characteristic p")
    denom = 4 if ell == 2 else ell
    restricted = EnumParams(
        params.p,
        params.max_vertices,
        params.max_group_order,
        params.max_star,
        params.enforce_p_edge_rule,
        params.enforce_cyclic_edge_rule,
        elementary_stabilizers(ell),
    )
    rep = ScanReport(ell, s)
    for g in enumerate_trees(restricted, jobs):
        mu = volume(g)
        rec = {"name": short_name(g), "volume": rat_str(mu), "genus": None, "divisible": None}
        if denom % mu.denominator != 0:
            rep.violations.append(f"{rec['name']}: volume {rat_str(mu)} has denominator not dividing {denom}")
        q = elementary_quotient(g, ell, s) if s >= 1 else None
        if q is not None:
            gb = check_gauss_bonnet(g, q)
            rec["genus"] = gb.betti
            if not gb.holds:
                rep.violations.append(f"{rec['name']}: Gauss-Bonnet mismatch")
            if s >= 2 and gb.betti >= 2:
                rec["divisible"] = divisibility_check(ell, s, gb.betti)
                if not rec["divisible"]:
                    rep.violations.append(f"{rec['name']}: genus {gb.betti} breaks divisibility")
        rep.records.append(rec)
    return rep
