"""Exact integer/rational arithmetic over Q: factorization, quadratic
characters and discriminant pairs (D, a).

A fractional ideal of Q is stored as its positive rational generator, so the
ideal norm N(qZ) is just q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

TRIAL_DIVISION_BOUND = 10**12


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


@lru_cache(maxsize=4096)
def factorint(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    if n > TRIAL_DIVISION_BOUND:
        raise ValueError(f"{n} exceeds trial-division bound {TRIAL_DIVISION_BOUND}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n:
        for p in (d, d + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        d += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> list[int]:
    return sorted(factorint(n))


def is_prime(n: int) -> bool:
    return n >= 2 and factorint(n) == {n: 1}


def primes_up_to(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(bound) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, bound + 1, p)))
    return [i for i, v in enumerate(sieve) if v]


def omega(n: int) -> int:
    """Number of distinct prime factors."""
    return 0 if abs(n) == 1 else len(factorint(n))


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorint(n).values())


def valuation(x, p: int) -> int:
    x = as_fraction(x)
    if x == 0:
        raise ValueError("valuation of 0")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def squarefree_decomposition(m: int) -> tuple[int, int]:
    """Write m = s * g^2 with s squarefree (carrying the sign of m), g > 0."""
    if m == 0:
        raise ValueError("0 has no squarefree decomposition")
    s, g = (1 if m > 0 else -1), 1
    for p, e in factorint(m).items():
        g *= p ** (e // 2)
        if e % 2:
            s *= p
    return s, g


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for integers d, n."""
    d, n = int(d), int(n)
    if n == 0:
        return 1 if abs(d) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if d < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if d % 2 == 0:
            return 0
        if v % 2 and d % 8 in (3, 5):
            result = -result
    # Jacobi symbol (d / n), n odd positive
    a = d % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker_rational(d: int, q) -> int:
    """Character of Q(sqrt d) on the positive rational q (multiplicative)."""
    q = as_fraction(q)
    if q <= 0:
        raise ValueError("expected a positive rational")
    return kronecker(d, q.numerator) * kronecker(d, q.denominator)


@dataclass(frozen=True)
class FundamentalPair:
    """(D, a) with D * a^2 = dK a fundamental discriminant (dK = 1 for squares)."""

    D: Fraction
    a: Fraction
    dK: int

    @property
    def conductor(self) -> int:
        return abs(self.dK)


def fundamental_discriminant(m: int) -> tuple[int, Fraction]:
    """Return (dK, f) with m = dK * f^2, f a positive rational."""
    s, g = squarefree_decomposition(m)
    if s == 1:
        return 1, Fraction(g)
    if s % 4 == 1:
        return s, Fraction(g)
    return 4 * s, Fraction(g, 2)


def fundamental_pair(D) -> FundamentalPair:
    D = as_fraction(D)
    if D == 0:
        raise ValueError("D must be nonzero")
    m = D.numerator * D.denominator
    dK, f = fundamental_discriminant(m)
    a = D.denominator / f
    assert D * a * a == dK
    return FundamentalPair(D, a, dK)


def is_discriminant_pair(D, a) -> bool:
    D, a = as_fraction(D), as_fraction(a)
    if a <= 0:
        return False
    n = D * a * a
    return n.denominator == 1 and n.numerator % 4 in (0, 1)


def is_fundamental_pair(D, a) -> bool:
    D, a = as_fraction(D), as_fraction(a)
    if D == 0 or a <= 0:
        return False
    fp = fundamental_pair(D)
    return fp.a == a


def conductor(D) -> int:
    return fundamental_pair(D).conductor


def fundamental_discriminants(bound: int, sign: int) -> list[int]:
    """All fundamental discriminants d != 1 with sign(d) = sign and |d| <= bound,
    sorted by |d|."""
    out = []
    for m in range(2, bound + 1):
        d = sign * m
        if fundamental_discriminant(d) == (d, 1):
            out.append(d)
    return out


def sign(x) -> int:
    return (x > 0) - (x < 0)


def crt_inverse(x: int, p: int) -> int:
    return pow(x % p, -1, p)
