import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mumford.padic import (
    NotASquare, PadicApprox, InsufficientPrecision, is_square, mod_pk, padic_sqrt,
    parse_approx, rational_sqrt, residue, unit_part, vp,
)

primes = st.sampled_from([2, 3, 5, 7, 11])
nonzero = st.builds(
    Fraction,
    st.integers(-500, 500).filter(bool),
    st.integers(1, 500),
)


def test_vp_examples():
    assert vp(12, 2) == 2
    assert vp(Fraction(5, 9), 3) == -2
    assert vp(0, 7) == math.inf


@given(nonzero, nonzero, primes)
def test_vp_is_a_valuation(x, y, p):
    assert vp(x * y, p) == vp(x, p) + vp(y, p)
    if x + y != 0:
        assert vp(x + y, p) >= min(vp(x, p), vp(y, p))


@given(nonzero, primes)
def test_unit_part(x, p):
    assert vp(unit_part(x, p), p) == 0
    assert unit_part(x, p) * Fraction(p) ** vp(x, p) == x


@given(nonzero, nonzero, primes, st.integers(-3, 6))
def test_residue_detects_congruence(x, y, p, n):
    same = residue(x, p, n) == residue(y, p, n)
    assert same == (vp(x - y, p) >= n)
    # the representative is itself in the class
    assert vp(residue(x, p, n) - x, p) >= n


def _square_oracle(x: Fraction, p: int) -> bool:
    """Brute force: even valuation and the unit part a square modulo p^3 (2^5 when p = 2)."""
    v = vp(x, p)
    if v % 2:
        return False
    k = 5 if p == 2 else 3
    w = mod_pk(unit_part(x, p), p, k)
    return any((r * r - w) % p ** k == 0 for r in range(p ** k) if r % p)


@given(nonzero, primes)
def test_is_square_against_brute_force(x, p):
    assert is_square(x, p) == _square_oracle(x, p)


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(2) is None
    assert rational_sqrt(-1) is None


@given(nonzero, primes, st.integers(1, 12))
def test_padic_sqrt_squares_back(x, p, n):
    if not is_square(x, p):
        with pytest.raises(NotASquare):
            padic_sqrt(x, p, n)
        return
    r = padic_sqrt(x, p, n)
    assert r.precision >= n
    assert (r * r).agrees_with(x)
    assert (r * r).precision >= n + vp(x, p) // 2


def test_sqrt_minus_one_mod_25():
    r = padic_sqrt(-1, 5, 2)
    assert {r.value, (-r).value} == {7, 18}
    assert str(PadicApprox(Fraction(7), 2, 5)) == "7+O(5^2)"


# -- precision tracking ----------------------------------------------------

exact = st.builds(Fraction, st.integers(-300, 300), st.integers(1, 300))


def _perturb(x: Fraction, p: int, n: int, k: int) -> Fraction:
    return x + k * Fraction(p) ** n


@given(exact, exact, primes, st.integers(0, 8), st.integers(0, 8), st.integers(-20, 20), st.integers(-20, 20))
def test_tracked_precision_is_honest(x, y, p, nx, ny, kx, ky):
    """Any two lifts inside the stated precision give results that agree to the tracked precision."""
    X, Y = PadicApprox(x, nx, p), PadicApprox(y, ny, p)
    x2, y2 = _perturb(x, p, nx, kx), _perturb(y, p, ny, ky)
    for op, exact_op in (
        (X + Y, x2 + y2),
        (X - Y, x2 - y2),
        (X * Y, x2 * y2),
    ):
        assert op.agrees_with(exact_op)
    try:
        Q = X / Y
    except InsufficientPrecision:
        return
    assert y2 != 0
    assert Q.agrees_with(x2 / y2)


def test_division_by_indistinguishable_zero():
    with pytest.raises(InsufficientPrecision):
        PadicApprox(Fraction(5), 1, 5) / PadicApprox(Fraction(25), 2, 5)


def test_parse_roundtrip():
    a = parse_approx("18+O(5^2)")
    assert a == PadicApprox(Fraction(18), 2, 5)
    assert parse_approx(str(a)) == a
    with pytest.raises(ValueError):
        parse_approx("18 mod 25")
