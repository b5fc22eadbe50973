"""The Bruhat-Tits tree of Q_p with exact PGL2(Q) actions.

Vertices are closed balls ``u + p^n Z_p`` (equivalently homothety classes of
lattices).  A ball is stored as ``(n, u)`` with ``u`` reduced to its
canonical residue, so equality is structural and distance has a closed
form.  Ends of the tree are points of ``P^1(Q_p)``: :data:`INFINITY`, exact
rationals, or :class:`~mumford.padic.PadicApprox` values.

Infinite objects are always viewed through a finite window: a level range
``(lo, hi)`` for geodesics, or a radius around a center vertex for scans.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

from .padic import (
    INF,
    InsufficientPrecision,
    PadicApprox,
    is_square,
    mod_p,
    padic_sqrt,
    parse_approx,
    rational_sqrt,
    residue,
    vp,
)


class ExtensionRequired(ArithmeticError):
    """The fixed points live in a quadratic extension of Q_p."""


class IndistinguishableEnds(InsufficientPrecision):
    pass


class NotAStabilizer(ValueError):
    pass


class NotEllipticOrParabolic(ValueError):
    pass


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"


INFINITY = _Infinity()

End = Union[Fraction, PadicApprox, _Infinity]


# -- matrices ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProjMat:
    """A 2x2 rational matrix with nonzero determinant, up to scalars."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.det == 0:
            raise ValueError("matrix is singular")

    @classmethod
    def parse(cls, text: str) -> "ProjMat":
        parts = [x.strip() for x in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected 'a,b,c,d', got {text!r}")
        return cls(*(Fraction(x) for x in parts))

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> Fraction:
        return self.a + self.d

    @property
    def discriminant(self) -> Fraction:
        return self.trace ** 2 - 4 * self.det

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def normalized(self) -> tuple:
        lead = next(x for x in self.entries() if x != 0)
        return tuple(x / lead for x in self.entries())

    def __eq__(self, other):
        return isinstance(other, ProjMat) and self.normalized() == other.normalized()

    def __hash__(self):
        return hash(self.normalized())

    def __matmul__(self, other: "ProjMat") -> "ProjMat":
        return ProjMat(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "ProjMat":
        return ProjMat(self.d, -self.b, -self.c, self.a)

    def __pow__(self, k: int) -> "ProjMat":
        if k < 0:
            return self.inverse() ** (-k)
        out = ProjMat(1, 0, 0, 1)
        for _ in range(k):
            out = out @ self
        return out

    def is_scalar(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def fixed_point_form(self) -> tuple:
        """Coefficients of ``c z^2 + (d - a) z - b``, whose roots are the fixed points."""
        return (self.c, self.d - self.a, -self.b)

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.entries())


IDENTITY = ProjMat(1, 0, 0, 1)


def mobius(M: ProjMat, z):
    if z is INFINITY:
        return INFINITY if M.c == 0 else M.a / M.c
    den = M.c * z + M.d
    if den == 0:
        return INFINITY
    return (M.a * z + M.b) / den


# -- vertices ---------------------------------------------------------------


@dataclass(frozen=True, order=True)
class BTVertex:
    """The ball ``u + p^n Z_p``; build with :func:`vertex` to get canonical ``u``."""

    n: int
    u: Fraction
    p: int = field(compare=True)

    def __str__(self) -> str:
        u = self.u
        us = str(u.numerator) if u.denominator == 1 else f"{u.numerator}/{u.denominator}"
        return f"(n={self.n},u={us})"


def vertex(n: int, u, p: int) -> BTVertex:
    if isinstance(u, PadicApprox):
        if n > u.precision:
            raise InsufficientPrecision(f"level {n} needs more than {u.precision} digits")
        u = u.value
    return BTVertex(int(n), residue(Fraction(u), p, n), p)


def base_vertex(p: int) -> BTVertex:
    return vertex(0, 0, p)


def rep_matrix(v: BTVertex) -> ProjMat:
    """``[[p^n, u], [0, 1]]``: maps the standard lattice class to ``v``."""
    return ProjMat(Fraction(v.p) ** v.n, v.u, 0, 1)


def vertex_from_matrix(M: ProjMat, p: int) -> BTVertex:
    """Vertex of the lattice spanned by the columns of ``M``.

    Column-reducing against the entry of smaller valuation in the bottom row
    gives an upper-triangular basis, read off as a ball.
    """
    a, b, c, d = M.entries()
    det = M.det
    if c != 0 and vp(c, p) <= vp(d, p):
        return vertex(vp(det, p) - 2 * vp(c, p), a / c, p)
    return vertex(vp(det, p) - 2 * vp(d, p), b / d, p)


def distance(v: BTVertex, w: BTVertex) -> int:
    m = min(v.n, w.n, vp(v.u - w.u, v.p))
    return int((v.n - m) + (w.n - m))


def neighbors(v: BTVertex) -> list[BTVertex]:
    p = v.p
    step = Fraction(p) ** v.n
    out = [vertex(v.n - 1, v.u, p)]
    out += [vertex(v.n + 1, v.u + k * step, p) for k in range(p)]
    return out


def ball(center: BTVertex, radius: int) -> list[BTVertex]:
    """All vertices within ``radius`` of ``center``, in BFS order."""
    seen = {center}
    out = [center]
    queue = deque([(center, 0)])
    while queue:
        v, d = queue.popleft()
        if d == radius:
            continue
        for w in neighbors(v):
            if w not in seen:
                seen.add(w)
                out.append(w)
                queue.append((w, d + 1))
    return out


def act(M: ProjMat, v: BTVertex) -> BTVertex:
    return vertex_from_matrix(M @ rep_matrix(v), v.p)


def inverts_edge(M: ProjMat, v: BTVertex, w: BTVertex) -> bool:
    return distance(v, w) == 1 and act(M, v) == w and act(M, w) == v


# -- element classification ---------------------------------------------


def order_in_pgl2(M: ProjMat) -> int | None:
    """Projective order (1, 2, 3, 4 or 6); None when the order is infinite."""
    power = IDENTITY
    for k in range(1, 7):
        power = power @ M
        if power.is_scalar():
            return k if k != 5 else None
    return None


@dataclass(frozen=True)
class ElementClass:
    kind: str  # identity | parabolic | hyperbolic | elliptic | nontorsion_unit
    order: int | None = None
    rational_fixed_points: bool | None = None

    def to_json(self) -> dict:
        out = {"class": self.kind}
        if self.kind == "elliptic":
            out["order"] = self.order
            out["rational_fixed_points"] = self.rational_fixed_points
        return out


def eigenvalue_valuations(M: ProjMat, p: int) -> tuple:
    """Valuations of the two eigenvalues, read off the Newton polygon of the char. polynomial."""
    vd = vp(M.det, p)
    vt = vp(M.trace, p)
    if 2 * vt >= vd:
        return (Fraction(vd, 2), Fraction(vd, 2))
    return (vt, vd - vt)


def classify(M: ProjMat, p: int) -> ElementClass:
    if M.is_scalar():
        return ElementClass("identity", 1)
    if M.discriminant == 0:
        return ElementClass("parabolic")
    v1, v2 = eigenvalue_valuations(M, p)
    if v1 != v2:
        return ElementClass("hyperbolic")
    k = order_in_pgl2(M)
    if k is None:
        return ElementClass("nontorsion_unit")
    return ElementClass("elliptic", k, is_square(M.discriminant, p))


def fixed_points(M: ProjMat, p: int, precision: int = 20) -> tuple:
    """Fixed ends of ``M`` in ``P^1(Q_p)``.

    Exact rationals when possible, otherwise approximations correct to
    ``precision`` digits.  Raises :class:`ExtensionRequired` when the
    fixed points are not in ``P^1(Q_p)``.
    """
    if M.is_scalar():
        raise ValueError("scalar matrices fix every end")
    a, b, c, d = M.entries()
    disc = M.discriminant
    if disc == 0:
        return (INFINITY,) if c == 0 else ((a - d) / (2 * c),)
    if c == 0:
        return (INFINITY, b / (d - a))
    root = rational_sqrt(disc)
    if root is not None:
        return tuple(sorted(((a - d) + s) / (2 * c) for s in (root, -root)))
    if not is_square(disc, p):
        raise ExtensionRequired(f"discriminant {disc} is not a square in Q_{p}")
    # extra digits so both the roots and 2cz - (a - d) keep ``precision`` digits
    s = padic_sqrt(disc, p, precision + abs(vp(2 * c, p)) + abs(vp(disc, p)))
    pts = [(s + (a - d)) / (2 * c), ((-s) + (a - d)) / (2 * c)]
    return tuple(sorted(pts, key=lambda z: z.value))


def is_stabilizer(M: ProjMat, v: BTVertex) -> bool:
    return act(M, v) == v


# -- geodesics ---------------------------------------------------------------


def _is_inf(e) -> bool:
    return e is INFINITY


def _precision(e) -> float:
    return e.precision if isinstance(e, PadicApprox) else INF


def _value(e) -> Fraction:
    return e.value if isinstance(e, PadicApprox) else Fraction(e)


def end_distance_level(e1, e2, p: int):
    """``vp(e1 - e2)`` for finite ends, raising when precision cannot decide it."""
    v = vp(_value(e1) - _value(e2), p)
    if v >= min(_precision(e1), _precision(e2)):
        raise IndistinguishableEnds(f"ends {e1} and {e2} agree to available precision")
    return v


def _window(window) -> tuple[int, int]:
    if isinstance(window, int):
        return (-window, window)
    lo, hi = window
    return (int(lo), int(hi))


def geodesic(e1, e2, window, p: int) -> list[BTVertex]:
    """Vertices of the geodesic from ``e1`` to ``e2`` with level in the window, in order."""
    lo, hi = _window(window)
    if _is_inf(e1) and _is_inf(e2):
        raise IndistinguishableEnds("both ends are infinity")
    if _is_inf(e1) or _is_inf(e2):
        a = e2 if _is_inf(e1) else e1
        path = [vertex(n, a, p) for n in range(hi, lo - 1, -1)]
        return path[::-1] if _is_inf(e1) else path
    m = end_distance_level(e1, e2, p)
    side_a = [vertex(n, e1, p) for n in range(hi, max(m, lo - 1), -1)]
    meet = [vertex(m, e1, p)] if lo <= m <= hi else []
    side_b = [vertex(n, e2, p) for n in range(max(m + 1, lo), hi + 1)]
    return side_a + meet + side_b


def _rays(e1, e2, p):
    """Geodesic as rays ``(center, lowest level)``: vertices ``(n, center)`` for n >= level."""
    if _is_inf(e1) or _is_inf(e2):
        a = e2 if _is_inf(e1) else e1
        return [(a, -INF)]
    m = end_distance_level(e1, e2, p)
    return [(e1, m), (e2, m)]


@dataclass(frozen=True)
class Intersection:
    kind: str  # empty | single_vertex | segment
    vertices: tuple = ()
    truncated: bool = False
    exact_kind: str | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "truncated": self.truncated}
        if self.kind == "single_vertex":
            out["vertex"] = str(self.vertices[0])
        elif self.kind == "segment":
            out["vertices"] = [str(v) for v in self.vertices]
        if self.exact_kind is not None:
            out["exact_kind"] = self.exact_kind
        return out


def _shape(n: int) -> str:
    return "empty" if n == 0 else "single_vertex" if n == 1 else "segment"


def geodesic_intersection(g1, g2, window, p: int) -> Intersection:
    """Common vertices of two geodesics, classified as empty, one vertex, or a segment.

    ``truncated`` is set when the full intersection reaches outside the
    window; ``exact_kind`` is the shape of the full intersection ("ray"
    when the geodesics share an end).
    """
    lo, hi = _window(window)
    inside = {}
    total = 0
    unbounded = False
    truncated = False
    for x, lx in _rays(*g1, p):
        for y, ly in _rays(*g2, p):
            top = vp(_value(x) - _value(y), p)
            top = min(top, _precision(x), _precision(y)) if top != INF else INF
            if top == INF or (lx == -INF and ly == -INF):
                unbounded = True
            bottom = max(lx, ly)
            if bottom > top:
                continue
            if bottom < lo or top > hi:
                truncated = True
            if bottom != -INF and top != INF:
                total += int(top - bottom) + 1
            for n in range(int(max(bottom, lo)), int(min(top, hi)) + 1):
                v = vertex(n, x, p)
                inside[v] = n
    along = geodesic(*g1, (lo, hi), p)
    common = tuple(v for v in along if v in inside)
    exact = "ray" if unbounded else None
    if not unbounded:
        # rays from the same geodesic share the vertex at its meeting level; count distinct only
        exact = _shape(len(_exact_common(g1, g2, p)))
    return Intersection(_shape(len(common)), common, truncated or unbounded, exact)


def _exact_common(g1, g2, p) -> set:
    out = set()
    for x, lx in _rays(*g1, p):
        for y, ly in _rays(*g2, p):
            top = vp(_value(x) - _value(y), p)
            top = min(top, _precision(x), _precision(y))
            bottom = max(lx, ly)
            for n in range(int(bottom), int(top) + 1) if bottom <= top else ():
                out.add(vertex(n, x, p))
    return out


def cross_ratio(p1, p2, q1, q2, p: int) -> tuple:
    """``(p1-q1)(p2-q2) / ((p1-q2)(p2-q1))`` with factors through infinity dropped, and its valuation."""
    pts = [p1, p2, q1, q2]
    for i in range(4):
        for j in range(i + 1, 4):
            if (_is_inf(pts[i]) and _is_inf(pts[j])) or (
                not _is_inf(pts[i]) and not _is_inf(pts[j]) and Fraction(pts[i]) == Fraction(pts[j])
            ):
                raise ValueError("cross ratio needs four distinct points")

    def diff(x, y):
        if _is_inf(x) or _is_inf(y):
            return Fraction(1)
        return Fraction(x) - Fraction(y)

    value = (diff(p1, q1) * diff(p2, q2)) / (diff(p1, q2) * diff(p2, q1))
    return value, vp(value, p)


# -- mirrors -----------------------------------------------------------------


@dataclass(frozen=True)
class Mirror:
    vertices: frozenset
    reason: str = ""
    truncated: bool = False

    def to_json(self) -> dict:
        return {
            "vertices": [str(v) for v in sorted(self.vertices)],
            "count": len(self.vertices),
            "reason": self.reason,
            "truncated": self.truncated,
        }


def displacement(M: ProjMat, v: BTVertex) -> int:
    return distance(v, act(M, v))


def fixed_vertices(M: ProjMat, p: int, radius: int, center: BTVertex | None = None) -> tuple:
    """Vertices within ``radius`` of ``center`` fixed by ``M``, plus a reason when there are none.

    Walks downhill on the displacement ``d(v, Mv)`` to the fixed vertex
    nearest the center, then floods through fixed neighbours.
    """
    center = base_vertex(p) if center is None else center
    v = center
    d = displacement(M, v)
    while d > 0:
        best = min(neighbors(v), key=lambda w: (displacement(M, w), w))
        bd = displacement(M, best)
        if bd >= d:
            reason = "inverts an edge" if d == 1 else "no fixed vertex (translation)"
            return frozenset(), reason
        v, d = best, bd
    if distance(center, v) > radius:
        return frozenset(), "fixed set lies outside the window"
    found = {v}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for w in neighbors(x):
            if w not in found and distance(center, w) <= radius and act(M, w) == w:
                found.add(w)
                queue.append(w)
    return frozenset(found), ""


def fixed_vertices_exhaustive(M: ProjMat, p: int, radius: int, center: BTVertex | None = None) -> frozenset:
    center = base_vertex(p) if center is None else center
    return frozenset(v for v in ball(center, radius) if act(M, v) == v)


def mirror(M: ProjMat, p: int, radius: int) -> Mirror:
    """Fixed vertices of an elliptic (rational fixed points) or parabolic element near the base."""
    cls = classify(M, p)
    if cls.kind == "hyperbolic":
        return Mirror(frozenset(), "HyperbolicNoFixedVertex")
    if cls.kind not in ("elliptic", "parabolic"):
        raise NotEllipticOrParabolic(f"{cls.kind} elements have no mirror")
    if cls.kind == "elliptic" and not cls.rational_fixed_points:
        raise ExtensionRequired("fixed points are not in P^1(Q_p)")
    verts, reason = fixed_vertices(M, p, radius)
    base = base_vertex(p)
    edge = any(distance(base, v) == radius for v in verts)
    return Mirror(verts, reason, edge)


def mirror_from_geodesic(M: ProjMat, p: int, radius: int) -> frozenset:
    """Geodesic between the two fixed ends, cut to the radius window."""
    base = base_vertex(p)
    precision = radius + 4
    while True:
        try:
            e1, e2 = fixed_points(M, p, precision)
            path = geodesic(e1, e2, (-radius, radius), p)
            break
        except InsufficientPrecision:
            precision *= 2
            if precision > 4096:
                raise
    return frozenset(v for v in path if distance(base, v) <= radius)


# -- the reduction map at a vertex -----------------------------------------


def _reduce_projective(entries: Iterable[Fraction], p: int) -> tuple:
    entries = list(entries)
    m = min(vp(x, p) for x in entries if x != 0)
    scaled = [x / Fraction(p) ** m for x in entries]
    red = [mod_p(x, p) for x in scaled]
    lead = next(x for x in red if x)
    inv = pow(lead, -1, p)
    return tuple((x * inv) % p for x in red)


def rho(v: BTVertex, M: ProjMat, p: int, rep: ProjMat | None = None) -> tuple:
    """Action of the stabilizer element ``M`` on the star of ``v``, as a matrix in PGL2(F_p).

    Returned as ``(a, b, c, d)`` scaled so the first nonzero entry is 1.
    """
    if act(M, v) != v:
        raise NotAStabilizer(f"{M} does not fix {v}")
    R = rep_matrix(v) if rep is None else rep
    A = R.inverse() @ M @ R
    return _reduce_projective(A.entries(), p)


def fp_mul(x: tuple, y: tuple, p: int) -> tuple:
    a, b, c, d = x
    e, f, g, h = y
    prod = [(a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p]
    return _reduce_projective([Fraction(t) for t in prod], p)


def in_kernel(v: BTVertex, M: ProjMat, p: int) -> bool:
    return rho(v, M, p) == (1, 0, 0, 1)


# -- pairs of torsion elements -------------------------------------------


def generated_group(gens: Iterable[ProjMat], limit: int = 24) -> set | None:
    """Closure of ``gens`` in PGL2(Q); None once it exceeds ``limit`` elements."""
    gens = list(gens)
    elems = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x @ g
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
                    if len(elems) > limit:
                        return None
        frontier = nxt
    return elems


def same_fixed_points(M1: ProjMat, M2: ProjMat) -> bool:
    f1, f2 = M1.fixed_point_form(), M2.fixed_point_form()
    return all(f1[i] * f2[j] == f1[j] * f2[i] for i in range(3) for j in range(3))


@dataclass(frozen=True)
class PairType:
    kind: str  # cyclic | klein_four | infinite_or_other
    evidence: dict = field(default_factory=dict)
    mirrors_meet: bool | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind, "evidence": self.evidence, "mirrors_meet": self.mirrors_meet}


def pair_type(M1: ProjMat, M2: ProjMat, p: int, radius: int = 4) -> PairType:
    o1, o2 = order_in_pgl2(M1), order_in_pgl2(M2)
    evidence = {"orders": [o1, o2]}
    if o1 is None or o2 is None:
        return PairType("infinite_or_other", evidence)
    prod = order_in_pgl2(M1 @ M2)
    evidence["product_order"] = prod
    group = generated_group([M1, M2])
    evidence["group_order"] = None if group is None else len(group)

    meet = None
    try:
        m1, m2 = (mirror(M, p, radius).vertices for M in (M1, M2))
        meet = bool(m1 & m2)
    except (ExtensionRequired, NotEllipticOrParabolic):
        meet = None

    if M1.is_scalar() or M2.is_scalar() or same_fixed_points(M1, M2):
        if group is not None:
            gen = next((g for g in sorted(group, key=str) if order_in_pgl2(g) == len(group)), None)
            evidence["generator"] = None if gen is None else str(gen)
        return PairType("cyclic", evidence, meet)
    if o1 == 2 and o2 == 2 and prod == 2:
        return PairType("klein_four", evidence, meet)
    return PairType("infinite_or_other", evidence, meet)


# -- text formats --------------------------------------------------------------


def parse_end(text: str):
    t = text.strip()
    if t.lower() in ("inf", "infinity", "oo"):
        return INFINITY
    if "O(" in t:
        return parse_approx(t)
    return Fraction(t)


def end_str(e) -> str:
    if e is INFINITY:
        return "inf"
    if isinstance(e, PadicApprox):
        return str(e)
    e = Fraction(e)
    return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"


_VERTEX_RE = re.compile(r"^\(n=(-?\d+),u=(-?\d+(?:/\d+)?)\)$")


def parse_vertex(text: str, p: int) -> BTVertex:
    m = _VERTEX_RE.match(text.replace(" ", ""))
    if not m:
        raise ValueError(f"cannot parse vertex {text!r}")
    return vertex(int(m.group(1)), Fraction(m.group(2)), p)
