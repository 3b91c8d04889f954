from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatlift.arith import (
    conductor,
    factorint,
    fundamental_discriminants,
    fundamental_pair,
    is_discriminant_pair,
    is_fundamental_pair,
    kronecker,
    legendre,
    primes_up_to,
)


def squares_table_legendre(d, p):
    squares = {x * x % p for x in range(1, p)}
    r = d % p
    if r == 0:
        return 0
    return 1 if r in squares else -1


def is_fund_oracle(d):
    """Fundamental discriminant test by scanning square divisors."""
    if d % 4 not in (0, 1) or d in (0, 1):
        return False
    for f in range(2, isqrt(abs(d)) + 1):
        if d % (f * f) == 0 and (d // (f * f)) % 4 in (0, 1):
            return False
    return True


def test_kronecker_matches_squares_table():
    for p in primes_up_to(100):
        if p == 2:
            continue
        for d in range(-99, 100):
            assert kronecker(d, p) == squares_table_legendre(d, p), (d, p)


def test_kronecker_examples():
    assert kronecker(7, 1) == 1
    assert kronecker(4, 2) == 0
    assert kronecker(5, 37) == -1
    # 37 = 2 mod 5 and 2 is not a square mod 5
    assert squares_table_legendre(37, 5) == -1


@given(st.integers(-200, 200).filter(lambda d: d % 4 in (0, 1) and d != 0), st.integers(1, 300), st.integers(1, 300))
def test_kronecker_multiplicative(d, m, n):
    assert kronecker(d, m * n) == kronecker(d, m) * kronecker(d, n)


def test_legendre_euler():
    for p in (3, 5, 7, 11, 13):
        for a in range(p):
            e = pow(a, (p - 1) // 2, p)
            assert legendre(a, p) == (0 if a == 0 else (1 if e == 1 else -1))


def test_fundamental_pair_examples():
    fp = fundamental_pair(-4)
    assert (fp.dK, fp.a) == (-4, 1)
    fp = fundamental_pair(-180)
    assert (fp.dK, fp.a) == (-20, Fraction(1, 3))
    assert is_fund_oracle(-20) and not is_fund_oracle(-180)
    fp = fundamental_pair(Fraction(-3, 4))
    assert (fp.dK, fp.a) == (-3, 2)


def test_square_convention():
    fp = fundamental_pair(9)
    assert fp.dK == 1 and fp.a == Fraction(1, 3)
    assert conductor(9) == 1


def test_conductor_examples():
    assert conductor(5) == 5
    assert conductor(-180) == 20


def test_discriminant_pair_examples():
    assert is_discriminant_pair(-3, 1)
    assert is_discriminant_pair(-3, 2)
    assert not is_discriminant_pair(-5, 1)


def test_fundamental_discriminants_against_oracle():
    for sgn in (1, -1):
        got = fundamental_discriminants(300, sgn)
        want = [sgn * m for m in range(2, 301) if is_fund_oracle(sgn * m)]
        assert got == want


rationals = st.builds(
    lambda n, d: Fraction(n, d),
    st.integers(-10**6, 10**6).filter(bool),
    st.integers(1, 10**4),
)


@settings(max_examples=1000)
@given(rationals)
def test_fundamental_pair_identity(D):
    fp = fundamental_pair(D)
    assert D * fp.a * fp.a == fp.dK
    assert fp.a > 0
    assert fp.dK == 1 or is_fund_oracle(fp.dK)


@given(rationals, st.builds(Fraction, st.integers(1, 50), st.integers(1, 50)))
def test_discriminant_pair_criterion(D, a):
    n = D * a * a
    assert is_discriminant_pair(D, a) == (n.denominator == 1 and int(n) % 4 in (0, 1))


@given(rationals, st.integers(1, 30))
def test_discriminant_pair_passes_to_suborders(D, m):
    # Z + m a Z omega sits inside Z + a Z omega
    a = fundamental_pair(D).a
    assert is_discriminant_pair(D, a)
    assert is_discriminant_pair(D, m * a)
    assert is_discriminant_pair(D * m * m, a / m)


def test_fundamental_pair_flag():
    assert is_fundamental_pair(-3, 1)
    assert not is_fundamental_pair(-3, 2)
    assert is_fundamental_pair(Fraction(-3, 4), 2)


@given(st.integers(2, 10**6))
def test_factorint_roundtrip(n):
    f = factorint(n)
    prod = 1
    for p, e in f.items():
        prod *= p**e
        assert all(p % q for q in range(2, isqrt(p) + 1))
    assert prod == n


def test_fundamental_pair_rejects_zero():
    with pytest.raises(ValueError):
        fundamental_pair(0)
