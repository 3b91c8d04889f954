"""Homogeneous polynomials in three variables with Fraction coefficients.

A polynomial is a dict mapping exponent triples to coefficients; zero
coefficients are dropped.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial

Poly = dict


def monomials(k: int) -> list[tuple[int, int, int]]:
    """Exponent triples of total degree k, in a fixed (lex descending) order."""
    return [(e1, e2, k - e1 - e2) for e1 in range(k, -1, -1) for e2 in range(k - e1, -1, -1)]


def add(P: Poly, Q: Poly, c=1) -> Poly:
    out = dict(P)
    for m, v in Q.items():
        out[m] = out.get(m, 0) + c * v
        if out[m] == 0:
            del out[m]
    return out


def mul(P: Poly, Q: Poly) -> Poly:
    out: Poly = {}
    for m1, v1 in P.items():
        for m2, v2 in Q.items():
            m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
            out[m] = out.get(m, 0) + v1 * v2
    return {m: v for m, v in out.items() if v != 0}


def derivative(P: Poly, i: int) -> Poly:
    out: Poly = {}
    for m, v in P.items():
        if m[i]:
            mm = list(m)
            mm[i] -= 1
            out[tuple(mm)] = out.get(tuple(mm), 0) + v * m[i]
    return {m: v for m, v in out.items() if v != 0}


def laplacian(P: Poly, Ainv) -> Poly:
    """sum_ij Ainv[i][j] d_i d_j P."""
    out: Poly = {}
    for i in range(3):
        Pi = derivative(P, i)
        for j in range(3):
            if Ainv[i][j]:
                out = add(out, derivative(Pi, j), Ainv[i][j])
    return out


def linear_substitute(P: Poly, M) -> Poly:
    """P(z M): variable x_j is replaced by sum_i M[i][j] z_i."""
    forms = []
    for j in range(3):
        f = {}
        for i in range(3):
            if M[i][j]:
                e = [0, 0, 0]
                e[i] = 1
                f[tuple(e)] = Fraction(M[i][j])
        forms.append(f)
    cache: dict = {}

    def power(j, e):
        if (j, e) not in cache:
            r = {(0, 0, 0): Fraction(1)}
            for _ in range(e):
                r = mul(r, forms[j])
            cache[(j, e)] = r
        return cache[(j, e)]

    out: Poly = {}
    for m, v in P.items():
        term = {(0, 0, 0): Fraction(v)}
        for j in range(3):
            if m[j]:
                term = mul(term, power(j, m[j]))
        out = add(out, term)
    return out


def evaluate(P: Poly, y) -> Fraction:
    s = Fraction(0)
    for m, v in P.items():
        s += v * Fraction(y[0]) ** m[0] * Fraction(y[1]) ** m[1] * Fraction(y[2]) ** m[2]
    return s


def to_vector(P: Poly, k: int) -> list[Fraction]:
    return [Fraction(P.get(m, 0)) for m in monomials(k)]


def from_vector(v, k: int) -> Poly:
    return {m: Fraction(c) for m, c in zip(monomials(k), v) if c != 0}


def fischer_diag(m, g) -> Fraction:
    """<x^m, x^m> for the Fischer product attached to diag(g)."""
    out = Fraction(1)
    for e, gi in zip(m, g):
        out *= Fraction(factorial(e)) / Fraction(gi) ** e
    return out
