"""End-to-end checks, one function per acceptance criterion, plus the findings report.

Every check returns a :class:`CriterionResult`; ``run_all`` runs them in
order.  Random inputs come from seeded ``random.Random`` instances, so a
run is reproducible from its arguments.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from . import bttree as bt
from . import groups
from .enumeration import (
    EnumParams,
    StarConfig,
    curvature_census,
    elementary_abelian_scan,
    elementary_stabilizers,
    enumerate_trees,
    expected_buckets,
    short_name,
)
from .fields import GF
from .graphs import DecoratedGraph, genus_from_index, is_valid, path, rat_str, segment, volume
from .groups import order
from .padic import PadicApprox, vp
from .quotients import (
    AbelianQuotient,
    check_gauss_bonnet,
    elementary_quotient,
    product_quotient,
    rank_free_product_kernel,
)
from .subrao import gauss_bonnet_genus, subrao_genus, verify_translation_automorphism


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str = ""
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.name} -- {self.detail}"

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "data": self.data,
        }


# -- random (graph, quotient) instances ------------------------------------


@dataclass(frozen=True)
class Instance:
    graph: DecoratedGraph
    quotient: AbelianQuotient
    kind: str
    ell: int | None = None
    s: int | None = None


PRIMES = (2, 3, 5, 7)


def _random_tree(rng, k):
    return [(rng.randrange(i), i) for i in range(1, k)]


def _extra_pairs(rng, k, most=2):
    return [(rng.randrange(k), rng.randrange(k)) for _ in range(rng.randint(0, most))]


def _ids(k):
    return [f"v{i + 1}" for i in range(k)]


def _product_instance(rng):
    p = rng.choice(PRIMES)
    k = rng.randint(2, 4)
    pool = groups.admissible_groups(p, 6)
    ids = _ids(k)
    verts = {v: rng.choice(pool) for v in ids}
    one = groups.trivial()
    tree = [(ids[a], ids[b], one) for a, b in _random_tree(rng, k)]
    extra = [(ids[a], ids[b], one) for a, b in _extra_pairs(rng, k)]
    g = DecoratedGraph.build(p, verts, tree, extra)
    return Instance(g, product_quotient(g), "product")


def _cyclic_instance(rng):
    p = rng.choice(PRIMES)
    k = rng.randint(2, 4)
    pool = [x for x in groups.admissible_groups(p, 8) if x.kind == groups.CYCLIC]
    ids = _ids(k)
    ns = {v: rng.choice(pool).n for v in ids}

    def edge_group(a, b):
        ds = [d for d in range(1, gcd(ns[a], ns[b]) + 1) if gcd(ns[a], ns[b]) % d == 0]
        ds = [d for d in ds if d == 1 or groups.is_admissible(groups.cyclic(d), p)]
        d = rng.choice(ds)
        return groups.trivial() if d == 1 else groups.cyclic(d)

    tree = [(ids[a], ids[b]) for a, b in _random_tree(rng, k)]
    extra = [(ids[a], ids[b]) for a, b in _extra_pairs(rng, k)]
    g = DecoratedGraph.build(
        p,
        {v: groups.cyclic(n) for v, n in ns.items()},
        [(a, b, edge_group(a, b)) for a, b in tree],
        [(a, b, edge_group(a, b)) for a, b in extra],
    )
    big = lcm(*ns.values())
    q = AbelianQuotient((big,), {v: ((big // n,),) for v, n in ns.items()})
    return Instance(g, q, "cyclic")


def _elementary_instance(rng):
    ell = rng.choice(PRIMES)
    p = rng.choice([x for x in PRIMES if x != ell])
    smax = {2: 6, 3: 3, 5: 2, 7: 2}[ell]
    s = rng.randint(1, smax)
    k = rng.randint(2, 4)
    pool = [groups.canonicalize(x, p) for x in elementary_stabilizers(ell)]
    ids = _ids(k)
    verts = {v: rng.choice(pool) for v in ids}

    def edge_group(a, b):
        opts = [groups.trivial()]
        if ell == 2 and order(verts[a]) == 4 and order(verts[b]) == 4:
            opts.append(groups.cyclic(2))
        return rng.choice(opts)

    tree = [(ids[a], ids[b]) for a, b in _random_tree(rng, k)]
    extra = [(ids[a], ids[b]) for a, b in _extra_pairs(rng, k, most=1)]
    g = DecoratedGraph.build(
        p,
        verts,
        [(a, b, edge_group(a, b)) for a, b in tree],
        [(a, b, groups.trivial()) for a, b in extra],
    )
    q = elementary_quotient(g, ell, s)
    if q is None:
        return None
    return Instance(g, q, "elementary", ell, s)


def random_instances(count: int = 120, seed: int = 1, max_order: int = 64) -> list[Instance]:
    """Valid (graph, quotient) pairs with ``|Q| <= max_order``, cycling through three builders."""
    rng = random.Random(seed)
    builders = (_product_instance, _cyclic_instance, _elementary_instance)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 100 * count:
            raise RuntimeError("could not generate enough instances")
        inst = builders[len(out) % 3](rng)
        if inst is None or inst.quotient.order > max_order or not is_valid(inst.graph):
            continue
        out.append(inst)
    return out


# -- criteria -----------------------------------------------------------------


def criterion_1(count: int = 120, seed: int = 1, instances=None) -> CriterionResult:
    insts = random_instances(count, seed) if instances is None else instances
    bad = []
    for i, inst in enumerate(insts):
        rep = check_gauss_bonnet(inst.graph, inst.quotient)
        if Fraction(rep.betti - 1) != inst.quotient.order * volume(inst.graph):
            bad.append(i)
    kinds = {k: sum(1 for x in insts if x.kind == k) for k in ("product", "cyclic", "elementary")}
    ok = not bad and len(insts) >= 100 and all(x.quotient.order <= 64 for x in insts)
    return CriterionResult(
        1, "Gauss-Bonnet oracle equivalence", ok,
        f"{len(insts)} pairs, {len(bad)} mismatches",
        {
            "pairs": len(insts),
            "by_kind": kinds,
            "max_quotient_order": max((x.quotient.order for x in insts), default=0),
            "mismatches": bad,
        },
    )


def criterion_2() -> CriterionResult:
    g = segment(5, groups.cyclic(2), groups.cyclic(3))
    genus = genus_from_index(g, 6)
    q = AbelianQuotient((6,), {"v1": ((3,),), "v2": ((2,),)})
    rep = check_gauss_bonnet(g, q)
    rank = rank_free_product_kernel(groups.cyclic(2), groups.cyclic(3))
    ok = genus == 2 and rep.betti == 2 and rank == 2
    return CriterionResult(
        2, "genus-2 amalgam Z2*Z3", ok,
        f"genus from index {genus}, cover rank {rep.betti}, kernel rank {rank}",
        {"genus": genus, "cover_rank": rep.betti, "kernel_rank": rank},
    )


SUBRAO_CASES = ((2, 2), (3, 1), (5, 1), (3, 2))


def criterion_3(cases=SUBRAO_CASES) -> CriterionResult:
    rows = []
    ok = True
    for p, r in cases:
        q = p ** r
        gb = gauss_bonnet_genus(p, r)
        F = GF(p, r)
        els = F.elements()
        auts = all(verify_translation_automorphism(p, r, a, b) for a in els for b in els)
        good = gb == (q - 1) ** 2 == subrao_genus(p, r) and auts
        ok &= good
        rows.append({"p": p, "r": r, "genus": gb, "translations_ok": auts, "pairs": len(els) ** 2})
    return CriterionResult(
        3, "Subrao family genus and translations", ok,
        ", ".join(f"q={x['p'] ** x['r']}: g={x['genus']}" for x in rows),
        {"cases": rows},
    )


def criterion_4(primes=PRIMES, max_order: int = 48, max_star: int = 6) -> CriterionResult:
    one = groups.trivial()
    rows = []
    ok = True
    for p in primes:
        rep = curvature_census(EnumParams(p, max_star + 1, max_order, max_star))
        z3 = groups.canonicalize(groups.cyclic(3), p)
        checks = {
            "min_is_1/6": rep.min_positive == Fraction(1, 6),
            "min_witness": rep.bucket(Fraction(1, 6)) == {StarConfig(z3, (one,))},
            "zero_bucket": rep.bucket(0) == expected_buckets(p)[Fraction(0)],
            "all_positive_ge_1/6": not rep.violations,
        }
        if p != 2:
            z4 = StarConfig(groups.cyclic(4), (one,))
            checks["z4_recorded"] = z4 in rep.bucket(Fraction(1, 4)) and any(
                str(z4) in d for d in rep.discrepancies
            )
        ok &= all(checks.values())
        rows.append({"p": p, "checks": checks, "census": rep.to_json()})
    return CriterionResult(
        4, "curvature census", ok,
        "; ".join(f"p={r['p']}: {sum(r['checks'].values())}/{len(r['checks'])}" for r in rows),
        {"primes": rows},
    )


def criterion_5(primes=(5, 7), max_vertices: int = 4, max_order: int = 16, jobs: int = 1) -> CriterionResult:
    rows = []
    ok = True
    allowed_big = {"Z2-Z3": Fraction(6), "D2-Z3": Fraction(12, 5)}
    for p in primes:
        best, witnesses, big_ratio, count = None, [], {}, 0
        for g in enumerate_trees(EnumParams(p, max_vertices, max_order), jobs):
            count += 1
            mu = volume(g)
            if mu <= 0:
                continue
            name = short_name(g)
            if best is None or mu < best:
                best, witnesses = mu, [name]
            elif mu == best:
                witnesses.append(name)
            if 1 / mu > 4:
                big_ratio[name] = 1 / mu
        good = (
            best == Fraction(1, 6)
            and witnesses == ["Z2-Z3"]
            and all(allowed_big.get(n) == r for n, r in big_ratio.items())
        )
        ok &= good
        rows.append({
            "p": p,
            "trees": count,
            "min_volume": None if best is None else rat_str(best),
            "witnesses": witnesses,
            "ratio_gt_4": {n: rat_str(r) for n, r in sorted(big_ratio.items())},
        })
    return CriterionResult(
        5, "minimal volume and bound exclusions", ok,
        "; ".join(f"p={r['p']}: min {r['min_volume']} by {r['witnesses']}, ratio>4 {sorted(r['ratio_gt_4'])}" for r in rows),
        {"primes": rows},
    )


SCAN_CASES = ((5, 2), (7, 2), (5, 3), (7, 5), (5, 7))


def criterion_6(cases=SCAN_CASES, max_vertices: int = 5) -> CriterionResult:
    rows = []
    ok = True
    for p, ell in cases:
        rep = elementary_abelian_scan(EnumParams(p, max_vertices, max(4, ell)), ell, 0)
        denom = 4 if ell == 2 else ell
        bad = [r for r in rep.records if denom % Fraction(r["volume"]).denominator]
        ok &= not bad and bool(rep.records)
        rows.append({"p": p, "ell": ell, "trees": len(rep.records), "bad": [r["name"] for r in bad]})
    return CriterionResult(
        6, "volume denominators for elementary stabilizers", ok,
        "; ".join(f"p={r['p']} l={r['ell']}: {r['trees']} trees" for r in rows),
        {"cases": rows},
    )


def criterion_7(instances=None, count: int = 120, seed: int = 1) -> CriterionResult:
    insts = random_instances(count, seed) if instances is None else instances
    checked = []
    bad = []
    for i, inst in enumerate(insts):
        if inst.kind != "elementary" or inst.ell == inst.graph.p:
            continue
        ell, s = inst.ell, inst.s
        if ell == 2 and s < 2:
            continue
        g = check_gauss_bonnet(inst.graph, inst.quotient).genus
        k = s - 2 if ell == 2 else s - 1
        checked.append(i)
        if (g - 1) % ell ** k:
            bad.append({"instance": i, "ell": ell, "s": s, "genus": g})
    ok = not bad and len(checked) > 0
    return CriterionResult(
        7, "elementary abelian divisibility", ok,
        f"{len(checked)} instances checked, {len(bad)} failures",
        {"checked": len(checked), "failures": bad},
    )


TORSION = (
    bt.ProjMat(0, 1, 1, 0),
    bt.ProjMat(1, 0, 0, -1),
    bt.ProjMat(0, -1, 1, 0),
    bt.ProjMat(0, -1, 1, -1),
    bt.ProjMat(1, -1, 1, 1),
    bt.ProjMat(1, -1, 1, 0),
)


def _rand_rat(rng, bound=50):
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_matrix(rng, bound=50) -> bt.ProjMat:
    while True:
        entries = [_rand_rat(rng, bound) for _ in range(4)]
        if entries[0] * entries[3] != entries[1] * entries[2]:
            return bt.ProjMat(*entries)


def _random_vertex(rng, p, steps=4):
    v = bt.base_vertex(p)
    for _ in range(rng.randint(0, steps)):
        v = rng.choice(bt.neighbors(v))
    return v


def _random_end(rng, p):
    k = rng.randrange(6)
    if k == 0:
        return bt.INFINITY
    return Fraction(rng.randint(-30, 30), rng.choice([1, 1, p, p * p, 2, 3]))


def elliptic_samples(rng, p, per_prime: int, pool=()) -> list:
    """Elliptic elements with fixed points in P^1(Q_p): random finds plus conjugated torsion."""
    out = [M for M in pool if _rational_elliptic(M, p)]
    tries = 0
    while len(out) < per_prime and tries < 50 * per_prime:
        tries += 1
        T = TORSION[tries % len(TORSION)]
        C = random_matrix(rng, 6)
        M = C @ T @ C.inverse()
        if _rational_elliptic(M, p):
            out.append(M)
    return out


def _rational_elliptic(M, p):
    c = bt.classify(M, p)
    return c.kind == "elliptic" and c.rational_fixed_points


def mirror_scan(M, p, radius) -> frozenset:
    """Fixed vertices in the radius ball: exhaustive when the ball is small, else flood fill."""
    size = 1 + (p + 1) * (p ** radius - 1) // (p - 1)
    if size <= 20000:
        return bt.fixed_vertices_exhaustive(M, p, radius)
    return bt.fixed_vertices(M, p, radius)[0]


def criterion_8(samples: int = 1000, seed: int = 8, radius: int = 8, per_prime: int = 6, precision: int = 20) -> CriterionResult:
    rng = random.Random(seed)
    iso_fail = comp_fail = scalar_fail = shape_fail = hensel_fail = 0
    hensel_checked = 0
    by_prime: dict = {p: [] for p in PRIMES}
    shapes = {"empty": 0, "single_vertex": 0, "segment": 0}
    for i in range(samples):
        p = PRIMES[i % 4]
        M1, M2 = random_matrix(rng), random_matrix(rng)
        v, w = _random_vertex(rng, p), _random_vertex(rng, p)
        if bt.distance(bt.act(M1, v), bt.act(M1, w)) != bt.distance(v, w):
            iso_fail += 1
        if bt.act(M1 @ M2, v) != bt.act(M1, bt.act(M2, v)):
            comp_fail += 1
        lam = _rand_rat(rng) or Fraction(1)
        if bt.act(bt.ProjMat(lam, 0, 0, lam), v) != v:
            scalar_fail += 1
        by_prime[p].append(M1)

        ends = [_random_end(rng, p) for _ in range(4)]
        if ends[0] != ends[1] and ends[2] != ends[3]:
            res = bt.geodesic_intersection(ends[:2], ends[2:], 5, p)
            if res.kind not in shapes:
                shape_fail += 1
            else:
                shapes[res.kind] += 1

        cls = bt.classify(M1, p)
        if cls.kind not in ("identity", "parabolic") and bt.is_square(M1.discriminant, p):
            pts = bt.fixed_points(M1, p, precision)
            for z in pts:
                if isinstance(z, PadicApprox):
                    hensel_checked += 1
                    root = 2 * M1.c * z - (M1.a - M1.d)
                    square = root * root
                    if square.precision < precision or not square.agrees_with(M1.discriminant):
                        hensel_fail += 1

    mirror_rows = []
    mirror_fail = []
    for p in PRIMES:
        for M in elliptic_samples(rng, p, per_prime, by_prime[p]):
            scan = mirror_scan(M, p, radius)
            geo = bt.mirror_from_geodesic(M, p, radius)
            row = {"p": p, "matrix": str(M), "order": bt.order_in_pgl2(M), "scan": len(scan), "geodesic": len(geo)}
            mirror_rows.append(row)
            if scan != geo:
                mirror_fail.append(row)
    ok = not (iso_fail or comp_fail or scalar_fail or shape_fail or hensel_fail or mirror_fail)
    detail = (
        f"isometry {iso_fail}, composition {comp_fail}, scalar {scalar_fail}, shapes {shape_fail} "
        f"failures over {samples}; hensel {hensel_fail}/{hensel_checked}; "
        f"mirror {len(mirror_fail)}/{len(mirror_rows)} mismatches"
    )
    if mirror_fail:
        wild = sum(1 for r in mirror_fail if r["p"] == 2 and r["order"] == 2)
        detail += f" ({wild} are order-2 elements at p=2)"
    return CriterionResult(
        8, "tree geometry", ok, detail,
        {
            "isometry_failures": iso_fail,
            "composition_failures": comp_fail,
            "scalar_failures": scalar_fail,
            "shape_failures": shape_fail,
            "shapes": shapes,
            "hensel_checked": hensel_checked,
            "hensel_failures": hensel_fail,
            "mirror_samples": len(mirror_rows),
            "mirror_mismatches": mirror_fail,
        },
    )


def stabilizer_generators(p: int, rng=None, extra: int = 6) -> list:
    """Generators of PGL2(Z_p) (as rational matrices) plus random p-integral unimodular samples."""
    rng = random.Random(p) if rng is None else rng
    unit = next(u for u in range(2, p) if all(pow(u, k, p) != 1 for k in range(1, p - 1))) if p > 2 else 1
    gens = [
        bt.ProjMat(1, 1, 0, 1),
        bt.ProjMat(1, 0, 1, 1),
        bt.ProjMat(0, 1, 1, 0),
        bt.ProjMat(unit, 0, 0, 1),
        bt.ProjMat(1, p, 0, 1),
        bt.ProjMat(1, 0, p, 1),
    ]
    while len(gens) < 6 + extra:
        M = random_matrix(rng, 9)
        if all(vp(x, p) >= 0 for x in M.entries()) and vp(M.det, p) == 0:
            gens.append(M)
    return gens


def criterion_9(primes=(3, 5)) -> CriterionResult:
    rows = []
    ok = True
    for p in primes:
        base = bt.base_vertex(p)
        gens = stabilizer_generators(p)
        bad = 0
        for A in gens:
            for B in gens:
                lhs = bt.rho(base, A @ B, p)
                rhs = bt.fp_mul(bt.rho(base, A, p), bt.rho(base, B, p), p)
                bad += lhs != rhs
        kernel = [bt.ProjMat(1, p, 0, 1), bt.ProjMat(1, 0, p, 1), bt.ProjMat(1 + p, 0, 0, 1), bt.ProjMat(1, 2 * p, 0, 1)]
        in_kernel = all(bt.in_kernel(base, K, p) for K in kernel)
        ok &= bad == 0 and in_kernel
        rows.append({"p": p, "pairs": len(gens) ** 2, "failures": bad, "kernel_ok": in_kernel})
    return CriterionResult(
        9, "rho is a homomorphism", ok,
        "; ".join(f"p={r['p']}: {r['failures']}/{r['pairs']} failures, kernel {'ok' if r['kernel_ok'] else 'BAD'}" for r in rows),
        {"primes": rows},
    )


# -- findings ------------------------------------------------------------------


def _table_rows():
    p = 5
    z2, z4, d2 = groups.cyclic(2), groups.cyclic(4), groups.klein4()
    rows = [
        ("D2*Z4", segment(p, d2, z4), None, 2),
        ("Z2*Z4", segment(p, z2, z4), None, 2),
        ("D2*D2", segment(p, d2, d2), None, 4),
        ("Z2*D2", segment(p, z2, d2), None, 2),
        ("D2*_Z2 D2*_Z2 D2", path(p, [d2, d2, d2], [z2, z2]), (2, 4), 2),
    ]
    return rows


def findings() -> dict:
    """Genera for the exceptional groups, each computed by two independent routes."""
    table = []
    for name, g, elem, reference in _table_rows():
        q = product_quotient(g) if elem is None else elementary_quotient(g, *elem)
        cover = check_gauss_bonnet(g, q).genus
        formula = 1 + q.order * volume(g)
        row = {
            "group": name,
            "quotient_order": q.order,
            "mu": rat_str(volume(g)),
            "genus_cover": cover,
            "genus_formula": int(formula) if formula.denominator == 1 else rat_str(formula),
            "reference_genus": reference,
        }
        if len(g.vertices) == 2 and not any(order(e.group) > 1 for e in g.tree_edges):
            a, b = g.vertices.values()
            row["kernel_rank"] = rank_free_product_kernel(a, b)
        row["routes_agree"] = row["genus_cover"] == row["genus_formula"] and row.get("kernel_rank", cover) == cover
        row["matches_reference"] = cover == reference
        table.append(row)

    g = segment(5, groups.klein4(), groups.cyclic(3))
    q = product_quotient(g)
    cover = check_gauss_bonnet(g, q).genus
    rank = rank_free_product_kernel(groups.klein4(), groups.cyclic(3))
    formula = 1 + q.order * volume(g)
    d2z3 = {
        "group": "D2*Z3",
        "quotient_order": q.order,
        "mu": rat_str(volume(g)),
        "genus_cover": cover,
        "genus_formula": int(formula),
        "kernel_rank": rank,
        "reference_rank": 3,
        "reference_rank_expression": "(4-1)(2-1)",
        "routes_agree": cover == rank == formula,
        "matches_reference": cover == 3,
    }
    return {"table": table, "d2_z3": d2z3}


def criterion_10() -> CriterionResult:
    f = findings()
    rows = f["table"] + [f["d2_z3"]]
    agree = all(r["routes_agree"] for r in rows)
    mismatched = [r["group"] for r in rows if not r["matches_reference"]]
    return CriterionResult(
        10, "documented discrepancies", agree,
        f"independent routes agree on {len(rows)} groups; reference values differ for {', '.join(mismatched) or 'none'}",
        f,
    )


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_all(only=None, jobs: int = 1) -> list[CriterionResult]:
    out = []
    shared = None
    for k, fn in CRITERIA.items():
        if only and k not in only:
            continue
        if k in (1, 7):
            shared = random_instances() if shared is None else shared
            out.append(fn(instances=shared))
        elif k == 5:
            out.append(fn(jobs=jobs))
        else:
            out.append(fn())
    return out
