"""Finite fields F_{p^m} in a polynomial basis, and bivariate polynomials over them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .groups import check_prime


def _poly_mod(coeffs: list, modulus: tuple, p: int) -> tuple:
    """Reduce a coefficient list (low degree first) modulo a monic polynomial."""
    c = [x % p for x in coeffs]
    m = len(modulus) - 1
    for i in range(len(c) - 1, m - 1, -1):
        t = c[i]
        if t:
            for j in range(m + 1):
                c[i - m + j] = (c[i - m + j] - t * modulus[j]) % p
    c = c[:m] + [0] * max(0, m - len(c))
    return tuple(c)


def _has_small_factor(poly: tuple, p: int) -> bool:
    """True when ``poly`` (monic, low degree first) has a factor of degree <= deg/2."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            f = tuple(tail) + (1,)
            if _poly_mod(list(poly), f, p) == (0,) * d:
                return True
    return False


@lru_cache(maxsize=None)
def irreducible_poly(p: int, m: int) -> tuple:
    """Lexicographically smallest monic irreducible of degree ``m`` (low degree first)."""
    check_prime(p)
    if m < 1:
        raise ValueError("degree must be at least 1")
    if m == 1:
        return (0, 1)
    for high in itertools.product(range(p), repeat=m):
        # lexicographic on (c_{m-1}, ..., c_0)
        poly = tuple(reversed(high)) + (1,)
        if poly[0] == 0:
            continue
        if not _has_small_factor(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")


@dataclass(frozen=True)
class GF:
    p: int
    m: int = 1

    @property
    def q(self) -> int:
        return self.p ** self.m

    @property
    def modulus(self) -> tuple:
        return irreducible_poly(self.p, self.m)

    def __call__(self, coeffs) -> "FqElement":
        if isinstance(coeffs, int):
            coeffs = [coeffs]
        return FqElement(_poly_mod(list(coeffs), self.modulus, self.p), self)

    def zero(self) -> "FqElement":
        return self(0)

    def one(self) -> "FqElement":
        return self(1)

    def gen(self) -> "FqElement":
        """The class of ``t``; 1 for a prime field."""
        return self([0, 1]) if self.m > 1 else self(1)

    def elements(self) -> list["FqElement"]:
        return [self(list(c)) for c in itertools.product(range(self.p), repeat=self.m)]

    def subfield(self, r: int) -> list["FqElement"]:
        """Elements fixed by ``x -> x^(p^r)``."""
        if self.m % r:
            raise ValueError(f"F_{self.p}^{r} is not a subfield of F_{self.p}^{self.m}")
        return [x for x in self.elements() if x ** (self.p ** r) == x]


@dataclass(frozen=True)
class FqElement:
    coeffs: tuple
    field: GF

    def _check(self, other):
        if isinstance(other, int):
            return self.field(other)
        if other.field != self.field:
            raise ValueError("elements of different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        p = self.field.p
        return FqElement(tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)), self.field)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FqElement(tuple((-a) % p for a in self.coeffs), self.field)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        m = self.field.m
        prod = [0] * (2 * m - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        return FqElement(_poly_mod(prod, self.field.modulus, self.field.p), self.field)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.field.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def frobenius(self):
        return self ** self.field.p

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else "t" if i == 1 else f"t^{i}"
                terms.append(mono if c == 1 and mono else f"{c}{mono}")
        return "+".join(reversed(terms)) or "0"


class Poly2:
    """Polynomial in x, y over a finite field, stored as ``{(i, j): coeff}`` for ``x^i y^j``."""

    def __init__(self, field: GF, terms=None):
        self.field = field
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    @classmethod
    def const(cls, c: FqElement) -> "Poly2":
        return cls(c.field, {(0, 0): c})

    @classmethod
    def x(cls, field: GF) -> "Poly2":
        return cls(field, {(1, 0): field.one()})

    @classmethod
    def y(cls, field: GF) -> "Poly2":
        return cls(field, {(0, 1): field.one()})

    def _lift(self, other):
        if isinstance(other, Poly2):
            return other
        if isinstance(other, int):
            other = self.field(other)
        return Poly2.const(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return Poly2(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly2(self.field, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        other = self._lift(other)
        out: dict = {}
        for (i, j), a in self.terms.items():
            for (k, l), b in other.terms.items():
                key = (i + k, j + l)
                out[key] = out[key] + a * b if key in out else a * b
        return Poly2(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly2.const(self.field.one())
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Poly2) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def substitute(self, fx: "Poly2", fy: "Poly2") -> "Poly2":
        """``f(fx, fy)``, expanded."""
        out = Poly2(self.field)
        for (i, j), c in self.terms.items():
            out = out + (fx ** i) * (fy ** j) * c
        return out
