"""Finite abelian subgroups of PGL2 over a field of characteristic p.

Every stabilizer appearing in a graph of groups is described by a
:class:`GroupDesc`: the trivial group, a cyclic group of order prime to
``p``, the Klein four group (only when ``p != 2``), or an elementary
abelian ``p``-group ``E(r)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterator

TRIVIAL = "trivial"
CYCLIC = "cyclic"
KLEIN4 = "klein4"
ELEMAB = "elemab"

_KINDS = (TRIVIAL, CYCLIC, KLEIN4, ELEMAB)


class InadmissibleGroup(ValueError):
    """The descriptor is not an abelian subgroup of PGL2 in this characteristic."""


class NoRamification(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")
    return p


@dataclass(frozen=True, order=True)
class GroupDesc:
    """Isomorphism type of a finite abelian stabilizer.

    Use the constructors :func:`trivial`, :func:`cyclic`, :func:`klein4`
    and :func:`elemab` rather than building instances by hand.
    """

    kind: str
    n: int = 1
    p: int = 0
    r: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind == CYCLIC and self.n < 1:
            raise ValueError("cyclic order must be positive")
        if self.kind == ELEMAB:
            check_prime(self.p)
            if self.r < 0:
                raise ValueError("elementary abelian rank must be >= 0")

    @property
    def order(self) -> int:
        return order(self)

    def generator_orders(self) -> tuple[int, ...]:
        """Orders of the standard generators (the ones embeddings are given on)."""
        if self.kind == TRIVIAL:
            return ()
        if self.kind == CYCLIC:
            return () if self.n == 1 else (self.n,)
        if self.kind == KLEIN4:
            return (2, 2)
        return (self.p,) * self.r

    def __str__(self) -> str:
        if self.kind == TRIVIAL:
            return "1"
        if self.kind == CYCLIC:
            return f"Z{self.n}"
        if self.kind == KLEIN4:
            return "D2"
        if self.r == 1:
            return f"E{self.p}"
        return f"E{self.p}^{self.r}"

    def to_json(self) -> dict:
        if self.kind == CYCLIC:
            return {"kind": CYCLIC, "n": self.n}
        if self.kind == ELEMAB:
            return {"kind": ELEMAB, "p": self.p, "r": self.r}
        return {"kind": self.kind}

    @classmethod
    def from_json(cls, data: dict) -> "GroupDesc":
        kind = data.get("kind")
        if kind == TRIVIAL:
            return trivial()
        if kind == CYCLIC:
            return cyclic(int(data["n"]))
        if kind == KLEIN4:
            return klein4()
        if kind == ELEMAB:
            return elemab(int(data["p"]), int(data["r"]))
        raise ValueError(f"unknown group kind {kind!r}")


def trivial() -> GroupDesc:
    return GroupDesc(TRIVIAL)


def cyclic(n: int) -> GroupDesc:
    return GroupDesc(CYCLIC, n=n)


def klein4() -> GroupDesc:
    return GroupDesc(KLEIN4)


def elemab(p: int, r: int) -> GroupDesc:
    """(Z/p)^r; r = 0 is the trivial group."""
    if r == 0:
        return trivial()
    return GroupDesc(ELEMAB, p=p, r=r)


def order(g: GroupDesc) -> int:
    if g.kind == TRIVIAL:
        return 1
    if g.kind == CYCLIC:
        return g.n
    if g.kind == KLEIN4:
        return 4
    return g.p ** g.r


def canonicalize(g: GroupDesc, p: int) -> GroupDesc:
    """Rewrite ``g`` into the unique descriptor used in characteristic ``p``.

    Groups of order ``p`` and the Klein four group in characteristic 2 become
    elementary abelian; ``Cyclic(1)`` and ``E(0)`` become trivial.  Groups
    that are not abelian subgroups of PGL2 in characteristic ``p`` raise
    :class:`InadmissibleGroup`.
    """
    check_prime(p)
    if g.kind == TRIVIAL:
        return g
    if g.kind == CYCLIC:
        if g.n == 1:
            return trivial()
        if g.n == p:
            return elemab(p, 1)
        if g.n % p == 0:
            raise InadmissibleGroup(f"{g} has order divisible by p={p}")
        return g
    if g.kind == KLEIN4:
        return elemab(2, 2) if p == 2 else g
    # elementary abelian
    if g.r == 0:
        return trivial()
    if g.p == p:
        return g
    if g.r == 1:
        return cyclic(g.p)
    if g.p == 2 and g.r == 2:
        return klein4()
    raise InadmissibleGroup(f"{g} is not an abelian subgroup of PGL2 in characteristic {p}")


def is_admissible(g: GroupDesc, p: int) -> bool:
    """True when ``g`` is already in canonical admissible form for ``p``."""
    try:
        return canonicalize(g, p) == g
    except InadmissibleGroup:
        return False


def admissible_subgroup(h: GroupDesc, g: GroupDesc) -> bool:
    """Does ``h`` embed in ``g``?  (Abstract embedding, no marked inclusion.)"""
    if h.kind == TRIVIAL or (h.kind == CYCLIC and h.n == 1):
        return True
    if g.kind == CYCLIC:
        return h.kind == CYCLIC and g.n % h.n == 0
    if g.kind == KLEIN4:
        return (h.kind == CYCLIC and h.n == 2) or h.kind == KLEIN4
    if g.kind == ELEMAB:
        return h.kind == ELEMAB and h.p == g.p and h.r <= g.r
    return False


@dataclass(frozen=True)
class Family:
    """One of the abelian families in Dickson's list, for a fixed ``p``."""

    name: str
    p: int

    def __contains__(self, g: GroupDesc) -> bool:
        if not is_admissible(g, self.p):
            return False
        if self.name == CYCLIC:
            return g.kind == CYCLIC
        if self.name == KLEIN4:
            return g.kind == KLEIN4
        return g.kind == ELEMAB

    def members(self, max_order: int) -> Iterator[GroupDesc]:
        if self.name == CYCLIC:
            for n in range(2, max_order + 1):
                if gcd(n, self.p) == 1:
                    yield cyclic(n)
        elif self.name == KLEIN4:
            if max_order >= 4:
                yield klein4()
        else:
            r = 1
            while self.p ** r <= max_order:
                yield elemab(self.p, r)
                r += 1


def classify_abelian_families(p: int) -> list[Family]:
    """The nontrivial abelian families: cyclic prime to p, Klein four (p odd), E(r).

    The semidirect family ``E(r) x| Z/n`` is never abelian and is not listed.
    """
    check_prime(p)
    families = [Family(CYCLIC, p)]
    if p != 2:
        families.append(Family(KLEIN4, p))
    families.append(Family(ELEMAB, p))
    return families


def admissible_groups(p: int, max_order: int) -> list[GroupDesc]:
    """All nontrivial admissible descriptors of order <= ``max_order``, sorted by (order, str)."""
    out = [g for fam in classify_abelian_families(p) for g in fam.members(max_order)]
    return sorted(out, key=group_key)


def group_key(g: GroupDesc) -> tuple:
    return (order(g), str(g))


def ramification_profile(g: GroupDesc) -> tuple[int, ...]:
    """Ramification indices of P^1 -> G\\P^1, one per branch point."""
    if g.kind == TRIVIAL or (g.kind == CYCLIC and g.n == 1):
        raise NoRamification("the trivial group has no branch points")
    if g.kind == CYCLIC:
        return (g.n, g.n)
    if g.kind == KLEIN4:
        return (2, 2, 2)
    if g.r == 0:
        raise NoRamification("the trivial group has no branch points")
    return (g.p ** g.r,)
