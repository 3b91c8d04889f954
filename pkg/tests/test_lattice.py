import itertools
from fractions import Fraction

import numpy as np
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from quatlift.lattice import (
    contains,
    covolume,
    dual_basis,
    enumerate_vectors,
    hnf,
    lattice_basis,
    lattice_intersection,
    lattice_sum,
    ternary_vectors,
)
from quatlift.linalg import charpoly, det, inverse, kernel, matmul, rank, rational_roots, rref

small_int = st.integers(-6, 6)
matrix3 = st.lists(st.lists(small_int, min_size=3, max_size=3), min_size=3, max_size=3)


def _brute(G, bound, box):
    out = []
    for v in itertools.product(range(-box, box + 1), repeat=len(G)):
        q = sum(G[i][j] * v[i] * v[j] for i in range(len(G)) for j in range(len(G)))
        if q <= bound:
            out.append(v)
    return sorted(out)


def test_enumerate_vectors_against_box():
    G = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]
    got = sorted(enumerate_vectors(G, 12))
    assert got == _brute(G, 12, 6)
    exact = sorted(enumerate_vectors(G, 12, exact=True))
    assert exact == [v for v in got if sum(G[i][j] * v[i] * v[j] for i in range(3) for j in range(3)) == 12]


def test_enumerate_rational_gram():
    G = [[Fraction(3, 2), Fraction(1, 2)], [Fraction(1, 2), Fraction(5, 2)]]
    got = sorted(enumerate_vectors(G, 10))
    want = [v for v in itertools.product(range(-5, 6), repeat=2) if Fraction(3, 2) * v[0] ** 2 + v[0] * v[1] + Fraction(5, 2) * v[1] ** 2 <= 10]
    assert got == sorted(want)


def test_ternary_vectors_against_box():
    M = np.array([[12, 0, 22], [0, 11, 0], [22, 0, 44]])
    ys, vals = ternary_vectors(M, 200)
    got = sorted(map(tuple, ys.tolist()))
    assert got == _brute(M.tolist(), 200, 40)
    assert all(int(y @ M @ y) == v for y, v in zip(ys, vals))


def test_ternary_vectors_chunks():
    M = np.array([[2, 1, 0], [1, 2, 1], [0, 1, 2]])
    seen = []
    ternary_vectors(M, 50, chunk_cb=lambda ys, vals: seen.extend(map(tuple, ys.tolist())))
    ys, _ = ternary_vectors(M, 50)
    assert seen == list(map(tuple, ys.tolist()))


@settings(max_examples=50)
@given(matrix3)
def test_hnf_rank_and_generation(rows):
    H = hnf(rows)
    assert len(H) == sympy.Matrix(rows).rank()
    for h in H:
        # each HNF row is a combination of the input rows
        sympy.Matrix(rows).T.gauss_jordan_solve(sympy.Matrix(h))


@settings(max_examples=50)
@given(matrix3.filter(lambda m: sympy.Matrix(m).det() != 0))
def test_hnf_same_lattice(rows):
    H = [list(map(Fraction, h)) for h in hnf(rows)]
    A = [list(map(Fraction, r)) for r in rows]
    assert all(contains(H, r) for r in A)
    assert all(contains(A, h) for h in H)


@settings(max_examples=40)
@given(matrix3.filter(lambda m: sympy.Matrix(m).det() != 0))
def test_inverse_and_det(rows):
    A = [[Fraction(x) for x in r] for r in rows]
    assert det(A) == sympy.Matrix(rows).det()
    I = matmul(A, inverse(A))
    assert I == [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    assert covolume(A) == abs(det(A))


@settings(max_examples=40)
@given(matrix3)
def test_kernel_and_rank(rows):
    A = [[Fraction(x) for x in r] for r in rows]
    K = kernel(A, 3)
    assert rank(A) + len(K) == 3
    for v in K:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in A)
    R, piv = rref(A)
    assert len(piv) == rank(A)


@settings(max_examples=30)
@given(matrix3)
def test_charpoly_against_sympy(rows):
    cp = charpoly([[Fraction(x) for x in r] for r in rows])
    x = sympy.symbols("x")
    want = sympy.Poly(sympy.Matrix(rows).charpoly(x).as_expr(), x).all_coeffs()[::-1]
    assert [int(c) for c in cp] == [int(c) for c in want]
    roots = dict(rational_roots(cp))
    want_roots = {r: m for r, m in sympy.roots(sympy.Poly(want[::-1], x)).items() if r.is_rational}
    assert {sympy.Rational(r.numerator, r.denominator): m for r, m in roots.items()} == want_roots


def test_sum_intersection_dual():
    A = lattice_basis([[2, 0], [0, 3]])
    B = lattice_basis([[3, 0], [0, 2]])
    assert covolume(lattice_sum(A, B)) == 1
    assert covolume(lattice_intersection(A, B)) == 36
    D = dual_basis(A)
    assert covolume(D) == Fraction(1, 6)
