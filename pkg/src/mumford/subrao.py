"""The curves (y^q - y)(x^q - x) = c over a field containing F_q.

Each has genus (q - 1)^2, with the translations (x, y) -> (x + a, y + b),
a, b in F_q, acting as automorphisms.  The translation group is modelled as
the amalgam of two copies of E(r) over a trivial edge, and its genus is
recomputed through Gauss-Bonnet on the covering graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import groups
from .fields import GF, FqElement, Poly2, irreducible_poly
from .graphs import DecoratedGraph, rat_str, segment, volume
from .quotients import check_gauss_bonnet, product_quotient


def subrao_genus(p: int, r: int) -> int:
    groups.check_prime(p)
    if r < 1:
        raise ValueError("r must be at least 1")
    return (p ** r - 1) ** 2


def subrao_graph(p: int, r: int) -> DecoratedGraph:
    """E(r) -- 1 -- E(r) at residue characteristic p."""
    groups.check_prime(p)
    e = groups.elemab(p, r)
    return segment(p, e, e)


def gauss_bonnet_genus(p: int, r: int) -> int:
    """Genus from the Betti number of the cover over (Z/p)^(2r)."""
    g = subrao_graph(p, r)
    return check_gauss_bonnet(g, product_quotient(g)).genus


def curve_polynomial(F: GF, q: int) -> Poly2:
    """``(y^q - y)(x^q - x)`` as a polynomial over ``F``."""
    x, y = Poly2.x(F), Poly2.y(F)
    return (y ** q - y) * (x ** q - x)


def substitute_shift(f: Poly2, a: FqElement, b: FqElement) -> Poly2:
    """``f(x + a, y + b)``."""
    F = f.field
    return f.substitute(Poly2.x(F) + a, Poly2.y(F) + b)


def verify_translation_automorphism(p: int, r: int, a: FqElement, b: FqElement) -> bool:
    """Does ``(x, y) -> (x + a, y + b)`` preserve ``(y^q - y)(x^q - x)``?

    The check expands both sides in ``K[x, y]`` where ``K`` is the field
    ``a`` and ``b`` live in, so ``a`` outside F_q gives False.
    """
    q = p ** r
    F = a.field
    if F.p != p:
        raise ValueError("field characteristic does not match p")
    f = curve_polynomial(F, q)
    return substitute_shift(f, a, b) == f


@dataclass
class SubraoReport:
    p: int
    r: int
    q: int
    genus: int
    subgroup_order: int
    full_aut_order: int
    gauss_bonnet_genus: int
    mu: Fraction
    bound_lhs: int
    bound_rhs: int
    modulus: tuple
    flags: list = field(default_factory=list)
    c: Fraction | None = None  # curve parameter; no formula depends on it

    @property
    def bound_holds(self) -> bool:
        return self.bound_lhs <= self.bound_rhs

    @property
    def nakajima_bound(self) -> int:
        return 4 * self.genus + 4

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "r": self.r,
            "q": self.q,
            "genus": self.genus,
            "gauss_bonnet_genus": self.gauss_bonnet_genus,
            "mu": rat_str(self.mu),
            "subgroup_order": self.subgroup_order,
            "full_aut_order": self.full_aut_order,
            "bound_2g_minus_2": {
                "lhs": self.bound_lhs,
                "rhs": self.bound_rhs,
                "holds": self.bound_holds,
                "equality": self.bound_lhs == self.bound_rhs,
            },
            "nakajima_4g_plus_4": self.nakajima_bound,
            "full_aut_exceeds_nakajima": self.full_aut_order > self.nakajima_bound,
            "fq_modulus": list(self.modulus),
            "flags": list(self.flags),
            "c": None if self.c is None else rat_str(self.c),
        }

    def table(self) -> str:
        b = self.to_json()["bound_2g_minus_2"]
        rows = [
            ("p, r, q", f"{self.p}, {self.r}, {self.q}"),
            ("genus (q-1)^2", str(self.genus)),
            ("genus via Gauss-Bonnet", str(self.gauss_bonnet_genus)),
            ("mu", rat_str(self.mu)),
            ("|G| = q^2", str(self.subgroup_order)),
            ("2(g-1)", str(self.bound_rhs)),
            ("q^2 <= 2(g-1)", "yes" if b["holds"] else "NO"),
            ("full Aut order 2q^2(q-1)", str(self.full_aut_order)),
            ("4g+4", str(self.nakajima_bound)),
            ("F_q modulus (low first)", ",".join(map(str, self.modulus))),
            ("flags", "; ".join(self.flags) or "-"),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def subrao_bound_report(p: int, r: int, c=None) -> SubraoReport:
    q = p ** r
    genus = subrao_genus(p, r)
    gb = gauss_bonnet_genus(p, r)
    lhs, rhs = q * q, 2 * (genus - 1)
    flags = []
    if genus < 2:
        flags.append(f"genus {genus} < 2")
    if lhs > rhs:
        flags.append(f"q^2 = {lhs} > 2(g-1) = {rhs}")
    if gb != genus:
        flags.append(f"Gauss-Bonnet genus {gb} differs from (q-1)^2 = {genus}")
    return SubraoReport(
        p, r, q, genus, q * q, 2 * q * q * (q - 1), gb,
        volume(subrao_graph(p, r)), lhs, rhs, irreducible_poly(p, r), flags,
        None if c is None else Fraction(c),
    )
