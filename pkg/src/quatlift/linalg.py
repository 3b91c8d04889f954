"""Small exact linear algebra over Q (lists of Fractions).

Matrices are lists of rows. Everything here is tiny (dimension <= ~30), so
plain Gaussian elimination is fine.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fractions(M) -> Matrix:
    return [[Fraction(x) for x in row] for row in M]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(n: int, m: int) -> Matrix:
    return [[Fraction(0)] * m for _ in range(n)]


def transpose(M):
    return [list(col) for col in zip(*M)]


def matmul(A, B) -> Matrix:
    Bt = transpose(B)
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def matvec(A, v) -> list[Fraction]:
    return [sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A]


def vecmat(v, A) -> list[Fraction]:
    """Row vector times matrix."""
    n = len(A[0])
    out = [Fraction(0)] * n
    for x, row in zip(v, A):
        if x:
            for j in range(n):
                out[j] += x * row[j]
    return out


def matadd(A, B) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matscale(c, A) -> Matrix:
    return [[c * a for a in row] for row in A]


def dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def rref(M) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    A = [list(map(Fraction, row)) for row in M]
    if not A:
        return A, []
    nrows, ncols = len(A), len(A[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(nrows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return A, pivots


def rank(M) -> int:
    return len(rref(M)[1]) if M else 0


def kernel(M, ncols: int | None = None) -> Matrix:
    """Basis (rows) of the right nullspace {x : M x = 0}."""
    if not M:
        n = ncols or 0
        return identity(n)
    A, pivots = rref(M)
    n = len(A[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(A, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def left_kernel(M) -> Matrix:
    """Rows x with x M = 0."""
    return kernel(transpose(M), len(M))


def solve(A, b) -> list[Fraction]:
    """Solve A x = b for square invertible A."""
    n = len(A)
    aug = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(A, b)]
    R, pivots = rref(aug)
    if len(pivots) != n or pivots[-1] == n:
        raise ZeroDivisionError("singular system")
    return [R[i][n] for i in range(n)]


def inverse(A) -> Matrix:
    n = len(A)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def det(A) -> Fraction:
    M = [list(map(Fraction, row)) for row in A]
    n = len(M)
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d *= M[c][c]
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] / M[c][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return d


def charpoly(A) -> list[Fraction]:
    """Coefficients [c_0, ..., c_n] (c_n = 1) of det(x I - A), Faddeev-LeVerrier."""
    n = len(A)
    A = to_fractions(A)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = zeros(n, n)
    for k in range(1, n + 1):
        M = matadd(matmul(A, M), matscale(coeffs[n - k + 1], identity(n)))
        AM = matmul(A, M)
        coeffs[n - k] = -sum(AM[i][i] for i in range(n)) / k
    return coeffs


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def rational_roots(coeffs: Sequence[Fraction]) -> list[tuple[Fraction, int]]:
    """Rational roots with multiplicity of sum coeffs[i] x^i."""
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    roots: list[tuple[Fraction, int]] = []
    zero_mult = 0
    while c and c[0] == 0:
        c.pop(0)
        zero_mult += 1
    if zero_mult:
        roots.append((Fraction(0), zero_mult))
    if len(c) <= 1:
        return roots
    den = lcm(*(x.denominator for x in c))
    ints = [int(x * den) for x in c]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    cands = set()
    for p in _divisors(ints[0]):
        for q in _divisors(ints[-1]):
            cands.add(Fraction(p, q))
            cands.add(Fraction(-p, q))
    poly = [Fraction(x) for x in ints]
    for r in sorted(cands):
        m = 0
        while len(poly) > 1:
            q, rem = _synthetic_div(poly, r)
            if rem != 0:
                break
            poly = q
            m += 1
        if m:
            roots.append((r, m))
    return roots


def _synthetic_div(poly, r):
    # poly low-to-high
    n = len(poly) - 1
    out = [Fraction(0)] * n
    acc = Fraction(0)
    for i in range(n, 0, -1):
        acc = acc * r + poly[i]
        out[i - 1] = acc
    rem = acc * r + poly[0]
    return out, rem


def block_matrix(blocks) -> Matrix:
    rows = []
    for brow in blocks:
        for i in range(len(brow[0])):
            rows.append([x for blk in brow for x in blk[i]])
    return rows


def span_basis(rows) -> Matrix:
    """Row-reduced basis of the span of the given rows."""
    R, piv = rref(rows)
    return R[: len(piv)]


def common_denominator(rows) -> int:
    return lcm(1, *(Fraction(x).denominator for row in rows for x in row))
