"""Lattices in Q^n: Hermite normal form, sums/intersections, and short-vector
enumeration for positive definite forms.

Two enumerators live here. ``enumerate_vectors`` is exact (Fractions) and is
meant for the 4-dimensional norm forms used by the class-set and Brandt code.
``ternary_vectors`` is a vectorized numpy enumerator for the large theta sums;
floating point is only used to bound the search box (with integer slack) and
every returned vector is accepted by an exact int64 evaluation of the form.
"""
from __future__ import annotations

import math
from fractions import Fraction
from math import gcd, lcm
from typing import Iterator, Sequence

import numpy as np

from .linalg import common_denominator, det, inverse, matmul, transpose, vecmat


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form of an integer matrix; zero rows dropped."""
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return []
    m = len(A[0])
    r = 0
    for c in range(m):
        # gather gcd of column c (rows >= r) into row r
        for i in range(r + 1, len(A)):
            if A[i][c] == 0:
                continue
            if A[r][c] == 0:
                A[r], A[i] = A[i], A[r]
                continue
            g, x, y = _xgcd(A[r][c], A[i][c])
            u, v = A[r][c] // g, A[i][c] // g
            ra, rb = A[r], A[i]
            A[r] = [x * p + y * q for p, q in zip(ra, rb)]
            A[i] = [u * q - v * p for p, q in zip(ra, rb)]
        if r < len(A) and A[r][c] != 0:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
            piv = A[r][c]
            for i in range(r):
                q = A[i][c] // piv
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
            r += 1
        A = A[:r] + [row for row in A[r:] if any(row)]
        if r == len(A):
            break
    return A[:r]


def lattice_basis(gens) -> list[list[Fraction]]:
    """Canonical (HNF) basis of the Z-span of rational generator rows."""
    gens = [[Fraction(x) for x in g] for g in gens]
    d = common_denominator(gens)
    H = hnf([[int(x * d) for x in g] for g in gens])
    return [[Fraction(x, d) for x in row] for row in H]


def dual_basis(B) -> list[list[Fraction]]:
    return transpose(inverse(B))


def lattice_sum(A, B):
    return lattice_basis(list(A) + list(B))


def lattice_intersection(A, B):
    """Intersection of two full-rank lattices."""
    return lattice_basis(dual_basis(lattice_sum(dual_basis(A), dual_basis(B))))


def covolume(B) -> Fraction:
    return abs(det(B))


def coordinates(B, v) -> list[Fraction]:
    """Coordinates x of v with v = x B (B square, rows = basis)."""
    return vecmat(v, inverse(B))


def contains(B, v) -> bool:
    return all(x.denominator == 1 for x in coordinates(B, v))


def contains_lattice(B, C) -> bool:
    Binv = inverse(B)
    return all(x.denominator == 1 for row in C for x in vecmat(row, Binv))


def basis_key(B) -> str:
    """Deterministic text key for a canonical basis."""
    return ";".join(",".join(str(x) for x in row) for row in B)


def gram_of(B, form) -> list[list[Fraction]]:
    """Gram matrix B * form * B^T."""
    return matmul(matmul(B, form), transpose(B))


# ---------------------------------------------------------------- enumeration


def _ldl(G):
    n = len(G)
    d = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = Fraction(G[i][i]) - sum((d[k] * mu[k][i] ** 2 for k in range(i)), Fraction(0))
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            mu[i][j] = (Fraction(G[i][j]) - sum((d[k] * mu[k][i] * mu[k][j] for k in range(i)), Fraction(0))) / d[i]
    return d, mu


def enumerate_vectors(G, bound, *, exact: bool = False) -> Iterator[tuple[int, ...]]:
    """Yield integer vectors v with v^T G v <= bound (== bound if ``exact``).

    G is a positive definite rational Gram matrix; all comparisons are exact.
    Vectors come out in a fixed deterministic order.
    """
    G = [[Fraction(x) for x in row] for row in G]
    bound = Fraction(bound)
    n = len(G)
    d, mu = _ldl(G)
    x = [0] * n

    def rec(i: int, remaining: Fraction):
        c = -sum((mu[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        if remaining < 0:
            return
        r = math.sqrt(float(remaining / d[i]))
        lo = math.floor(float(c) - r) - 1
        hi = math.ceil(float(c) + r) + 1
        for xi in range(lo, hi + 1):
            t = d[i] * (xi - c) ** 2
            if t > remaining:
                continue
            x[i] = xi
            if i == 0:
                if not exact or t == remaining:
                    yield tuple(x)
            else:
                yield from rec(i - 1, remaining - t)
        x[i] = 0

    yield from rec(n - 1, bound)


def integral_gram(G) -> tuple[list[list[int]], int]:
    """Return (M, s) with M integral and v^T G v = v^T M v / s."""
    s = common_denominator(G)
    return [[int(x * s) for x in row] for row in G], s


def ternary_vectors(M: np.ndarray, bound2: int, chunk_cb=None):
    """All y in Z^3 with y^T M y <= bound2, M a positive definite integer matrix.

    Returns an (n, 3) int64 array and the int64 array of values y^T M y, in a
    deterministic order (outer coordinate y3, then y2, then y1). If
    ``chunk_cb`` is given it is called with each (ys, vals) chunk instead and
    nothing is returned.
    """
    M = np.asarray(M, dtype=np.int64)
    Mf = M.astype(float)
    Minv = np.linalg.inv(Mf)
    b3 = int(math.floor(math.sqrt(max(bound2 * Minv[2, 2], 0.0)))) + 1
    A2 = Mf[:2, :2]
    A2inv = np.linalg.inv(A2)
    cross = Mf[:2, 2]
    out_y, out_v = [], []
    for y3 in range(-b3, b3 + 1):
        # minimise over real (y1, y2) for this y3
        u0 = -A2inv @ (cross * y3)
        m = Mf[2, 2] * y3 * y3 + 2 * (cross @ u0) * y3 + u0 @ A2 @ u0
        rem = bound2 - m
        if rem < -1e-6 * (1 + bound2):
            continue
        rem = max(rem, 0.0)
        w1 = math.sqrt(rem * A2inv[0, 0]) + 1.0
        w2 = math.sqrt(rem * A2inv[1, 1]) + 1.0
        r1 = np.arange(math.floor(u0[0] - w1), math.ceil(u0[0] + w1) + 1, dtype=np.int64)
        r2 = np.arange(math.floor(u0[1] - w2), math.ceil(u0[1] + w2) + 1, dtype=np.int64)
        Y2, Y1 = np.meshgrid(r2, r1, indexing="ij")
        Y1 = Y1.ravel()
        Y2 = Y2.ravel()
        vals = (
            M[0, 0] * Y1 * Y1
            + M[1, 1] * Y2 * Y2
            + M[2, 2] * y3 * y3
            + 2 * M[0, 1] * Y1 * Y2
            + 2 * M[0, 2] * Y1 * y3
            + 2 * M[1, 2] * Y2 * y3
        )
        keep = vals <= bound2
        if not keep.any():
            continue
        ys = np.empty((int(keep.sum()), 3), dtype=np.int64)
        ys[:, 0] = Y1[keep]
        ys[:, 1] = Y2[keep]
        ys[:, 2] = y3
        if chunk_cb is not None:
            chunk_cb(ys, vals[keep])
        else:
            out_y.append(ys)
            out_v.append(vals[keep])
    if chunk_cb is not None:
        return None
    if not out_y:
        return np.zeros((0, 3), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(out_y), np.concatenate(out_v)


def lcm_list(xs) -> int:
    return lcm(1, *xs)


def gcd_list(xs) -> int:
    g = 0
    for x in xs:
        g = gcd(g, int(x))
    return g
