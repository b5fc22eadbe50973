"""Exact p-adic valuations, residues and square roots of rationals.

Elements of Q_p that are not rational (square roots, mostly) are carried
as :class:`PadicApprox`: a rational value known modulo ``p**precision``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

INF = math.inf


class NotASquare(ValueError):
    pass


class InsufficientPrecision(ArithmeticError):
    pass


def vp(x, p: int):
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    x = Fraction(x)
    return x / Fraction(p) ** vp(x, p)


def residue(x, p: int, n: int) -> Fraction:
    """Canonical representative of ``x + p^n Z_p``.

    The result is ``m / p^d`` with ``0 <= m < p^(n+d)`` and ``d`` as small as
    possible, so two rationals give the same residue exactly when their
    difference has valuation at least ``n``.
    """
    x = Fraction(x)
    if x == 0 or vp(x, p) >= n:
        return Fraction(0)
    d = max(0, -n, -vp(x, p))
    y = x * p ** d
    modulus = p ** (n + d)
    m = (y.numerator * pow(y.denominator, -1, modulus)) % modulus
    return Fraction(m, p ** d)


def mod_p(x, p: int) -> int:
    """Reduction of a p-integral rational to ``Z/p``."""
    x = Fraction(x)
    if vp(x, p) < 0:
        raise ValueError(f"{x} is not p-integral for p={p}")
    return (x.numerator * pow(x.denominator, -1, p)) % p


def rational_sqrt(x) -> Fraction | None:
    x = Fraction(x)
    if x < 0:
        return None
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def is_square(x, p: int) -> bool:
    """Is the nonzero rational ``x`` a square in Q_p?"""
    x = Fraction(x)
    if x == 0:
        return True
    v = vp(x, p)
    if v % 2:
        return False
    w = unit_part(x, p)
    if p == 2:
        return mod_pk(w, 2, 3) == 1
    return pow(mod_p(w, p), (p - 1) // 2, p) == 1


def mod_pk(x, p: int, k: int) -> int:
    modulus = p ** k
    x = Fraction(x)
    return (x.numerator * pow(x.denominator, -1, modulus)) % modulus


def _sqrt_unit(w: Fraction, p: int, m: int) -> int:
    """Integer ``r`` with ``r**2 == w`` modulo ``p**m`` (``2**(m+1)`` when p = 2)."""
    if p == 2:
        target = mod_pk(w, 2, m + 1)
        r = 1
        # r^2 = w mod 2^k for k = 3 first, then fix one bit at a time
        for k in range(3, m + 1):
            if (r * r - target) % 2 ** (k + 1):
                r += 2 ** (k - 1)
        return r % 2 ** m
    w0 = mod_p(w, p)
    r = next(t for t in range(1, p) if (t * t - w0) % p == 0)
    k = 1
    while k < m:
        k = min(2 * k, m)
        modulus = p ** k
        wk = mod_pk(w, p, k)
        r = (r - (r * r - wk) * pow(2 * r, -1, modulus)) % modulus
    return r % p ** m


@dataclass(frozen=True)
class PadicApprox:
    """``value + O(p^precision)``, with ``value`` kept in canonical residue form."""

    value: Fraction
    precision: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", residue(self.value, self.p, self.precision))

    def __str__(self) -> str:
        return f"{_fmt(self.value)}+O({self.p}^{self.precision})"

    def valuation(self):
        v = vp(self.value, self.p)
        return v if v < self.precision else None

    def _parts(self, other):
        """(value, precision, valuation) with exact rationals at infinite precision."""
        if isinstance(other, PadicApprox):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other.value, other.precision, other.valuation()
        other = Fraction(other)
        return other, INF, vp(other, self.p)

    def __add__(self, other):
        b, pb, _ = self._parts(other)
        return PadicApprox(self.value + b, min(self.precision, pb), self.p)

    __radd__ = __add__

    def __neg__(self):
        return PadicApprox(-self.value, self.precision, self.p)

    def __sub__(self, other):
        b, pb, _ = self._parts(other)
        return PadicApprox(self.value - b, min(self.precision, pb), self.p)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        b, pb, vb = self._parts(other)
        va = self.valuation()
        va = self.precision if va is None else va
        vb = pb if vb is None else vb
        return PadicApprox(self.value * b, min(self.precision + vb, pb + va), self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b, pb, vb = self._parts(other)
        if vb is None or b == 0:
            raise InsufficientPrecision("division by an approximation indistinguishable from 0")
        va = self.valuation()
        va = self.precision if va is None else va
        return PadicApprox(self.value / b, min(self.precision - vb, pb + va - 2 * vb), self.p)

    def __rtruediv__(self, other):
        a = Fraction(other)
        vb = self.valuation()
        if vb is None:
            raise InsufficientPrecision("division by an approximation indistinguishable from 0")
        return PadicApprox(a / self.value, vp(a, self.p) + self.precision - 2 * vb, self.p)

    def agrees_with(self, other) -> bool:
        b, pb, _ = self._parts(other)
        return vp(self.value - b, self.p) >= min(self.precision, pb)


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def padic_sqrt(x, p: int, precision: int) -> PadicApprox:
    """A square root of ``x`` in Q_p, correct modulo ``p^precision`` (the other root is its negative)."""
    x = Fraction(x)
    if x == 0:
        return PadicApprox(Fraction(0), precision, p)
    if not is_square(x, p):
        raise NotASquare(f"{x} is not a square in Q_{p}")
    k = vp(x, p) // 2
    m = max(1, precision - k)
    r = _sqrt_unit(unit_part(x, p), p, m)
    return PadicApprox(Fraction(p) ** k * r, k + m, p)


_APPROX_RE = re.compile(r"^\s*(-?[0-9]+(?:/[0-9]+)?)\s*\+\s*O\(\s*([0-9]+)\s*\^\s*(-?[0-9]+)\s*\)\s*$")


def parse_approx(text: str) -> PadicApprox:
    m = _APPROX_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse p-adic approximation {text!r}")
    return PadicApprox(Fraction(m.group(1)), int(m.group(3)), int(m.group(2)))
