"""Ternary lattices L = R/Z and the local weight functions w_p on L/pL.

L is embedded in the pure quaternions by x -> x - conj(x), where the
discriminant form is Delta(z) = -n(z). A local weight w_p is supported on the
isotropic cone mod p, scales by the Legendre symbol under scalars, and
transforms under SO(Delta mod p) by the spinor norm. It is built by a
breadth-first closure from a seed vector with value +1.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm

import numpy as np

from .arith import fundamental_pair, kronecker, legendre, prime_divisors
from .errors import PropagationConflict
from .lattice import lattice_basis
from .linalg import inverse, matmul, transpose, vecmat

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TernaryLattice:
    """Basis rows are pure-quaternion coordinates (i, j, k)."""

    basis: tuple
    gram: tuple  # Gram of Delta: Delta(sum y_i b_i) = y^T gram y
    level: int

    @cached_property
    def gram2(self) -> np.ndarray:
        """Integer matrix of 2*Delta (checks integrality)."""
        M = [[2 * x for x in row] for row in self.gram]
        assert all(x.denominator == 1 for row in M for x in row)
        return np.array([[int(x) for x in row] for row in M], dtype=np.int64)

    def delta(self, y) -> Fraction:
        return sum((Fraction(y[i]) * self.gram[i][j] * Fraction(y[j]) for i in range(3) for j in range(3)), Fraction(0))

    def to_pure(self, y) -> list[Fraction]:
        return vecmat([Fraction(t) for t in y], self.basis)

    def coords(self, z) -> list[Fraction]:
        return vecmat([Fraction(t) for t in z], inverse(self.basis))


def pure_image(x) -> list[Fraction]:
    """Image of a quaternion in W: coordinates of x - conj(x)."""
    return [2 * Fraction(x[1]), 2 * Fraction(x[2]), 2 * Fraction(x[3])]


def lattice_level(gram) -> int:
    """Smallest N with N * Delta(L^#) in Z, where L^# is the dual lattice for
    the bilinear form with B(x, x) = Delta(x)."""
    H = inverse([list(r) for r in gram])  # Delta on the dual basis
    entries = [H[i][i] for i in range(3)] + [2 * H[i][j] for i in range(3) for j in range(i + 1, 3)]
    return lcm(*(e.denominator for e in entries))


def ternary_lattice(R) -> TernaryLattice:
    """L = R/Z as a lattice in the pure quaternions, with the Delta Gram."""
    B = R.algebra
    gens = [pure_image(v) for v in R.quats]
    basis = lattice_basis(gens)
    assert len(basis) == 3
    A = B.delta_gram()
    gram = matmul(matmul(basis, A), transpose(basis))
    return TernaryLattice(tuple(tuple(r) for r in basis), tuple(tuple(Fraction(x) for x in r) for r in gram), lattice_level(gram))


def ternary_lattice_of_basis(B, order_basis) -> TernaryLattice:
    gens = [pure_image(v) for v in order_basis]
    basis = lattice_basis(gens)
    A = B.delta_gram()
    gram = matmul(matmul(basis, A), transpose(basis))
    return TernaryLattice(tuple(tuple(r) for r in basis), tuple(tuple(Fraction(x) for x in r) for r in gram), lattice_level(gram))


# ------------------------------------------------------------------ local tables


@dataclass
class LocalWeightTable:
    p: int
    values: np.ndarray  # int8 of length p^3, index x0 + p x1 + p^2 x2
    seed: int
    gram_mod: np.ndarray = field(repr=False, default=None)

    def index(self, x) -> int:
        p = self.p
        return int(x[0]) % p + p * (int(x[1]) % p) + p * p * (int(x[2]) % p)

    def __call__(self, x) -> int:
        return int(self.values[self.index(x)])

    def vector(self, idx: int) -> tuple[int, int, int]:
        p = self.p
        return (idx % p, (idx // p) % p, idx // (p * p))


def _all_vectors(p: int) -> np.ndarray:
    idx = np.arange(p**3)
    return np.stack([idx % p, (idx // p) % p, idx // (p * p)], axis=1).astype(np.int64)


def _q(M: np.ndarray, X: np.ndarray, p: int) -> np.ndarray:
    """x^T M x mod p for rows of X."""
    return np.einsum("ni,ij,nj->n", X, M, X) % p


def _reflection_matrix(M: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """Matrix (acting on row vectors) of r_v(x) = x - 2 (x^T M v)/(v^T M v) v,
    where M is the matrix of 2*Delta."""
    qv = int(v @ M @ v) % p
    c = 2 * pow(qv, -1, p) % p
    Mv = (M @ v) % p
    # x -> x - c (x . Mv) v
    return (np.eye(3, dtype=np.int64) - c * np.outer(Mv, v)) % p


def build_local_weight(L: TernaryLattice, p: int, l=None, *, seed: int | None = None, n_generators: int = 12) -> LocalWeightTable:
    """Local weight function on L/pL (p odd, p not dividing the level).

    ``l`` is accepted for interface symmetry; the table only depends on L and p.
    ``seed`` optionally overrides the seed vector index (default: the
    lexicographically smallest nonzero isotropic vector).
    """
    if p == 2 or L.level % p == 0:
        raise ValueError(f"p={p} must be odd and prime to the level")
    M = L.gram2 % p  # 2*Delta mod p
    X = _all_vectors(p)
    qv = _q(M, X, p)
    iso = np.flatnonzero((qv == 0) & (X.any(axis=1)))
    assert len(iso) == p * p - 1, "form mod p is degenerate"
    # lexicographic order on (x0, x1, x2) coordinates
    lex = sorted(iso.tolist(), key=lambda i: (i % p, (i // p) % p, i // (p * p)))
    seed_idx = lex[0] if seed is None else seed
    if seed_idx not in set(iso.tolist()):
        raise ValueError("seed must be a nonzero isotropic vector")

    aniso = [X[i] for i in range(1, p**3) if qv[i] != 0]
    v0 = aniso[0]
    d0 = int(v0 @ M @ v0) % p
    r0 = _reflection_matrix(M, v0, p)

    def rotations(count):
        out = []
        step = max(1, len(aniso) // count)
        for v in aniso[1::step][:count]:
            dv = int(v @ M @ v) % p
            # 2*Delta values; the factor 4 is a square
            sign = legendre(dv * d0, p)
            out.append(((r0 @ _reflection_matrix(M, v, p)) % p, sign))
        return out

    g = next(x for x in range(2, p) if legendre(x, p) == -1) if p > 2 else 1
    count = n_generators
    while True:
        gens = [((g * np.eye(3, dtype=np.int64)) % p, legendre(g, p))] + rotations(count)
        values = np.zeros(p**3, dtype=np.int8)
        values[seed_idx] = 1
        queue = deque([seed_idx])
        pw = np.array([1, p, p * p], dtype=np.int64)
        while queue:
            i = queue.popleft()
            x = X[i]
            for G, s in gens:
                j = int(((x @ G) % p) @ pw)
                val = s * values[i]
                if values[j] == 0:
                    values[j] = val
                    queue.append(j)
                elif values[j] != val:
                    raise PropagationConflict(f"conflicting signs at vector {X[j].tolist()} mod {p}")
        if np.count_nonzero(values) == p * p - 1:
            break
        if count > len(aniso):
            raise PropagationConflict("rotation closure does not reach the whole cone")
        count *= 2
    return LocalWeightTable(p, values, seed_idx, M)


def rotation_group_sample(L: TernaryLattice, p: int, n: int, rng) -> list:
    """Random products of two reflections with their spinor signs."""
    M = L.gram2 % p
    out = []
    while len(out) < n:
        v1 = rng.integers(0, p, 3)
        v2 = rng.integers(0, p, 3)
        d1, d2 = int(v1 @ M @ v1) % p, int(v2 @ M @ v2) % p
        if d1 == 0 or d2 == 0:
            continue
        S = (_reflection_matrix(M, v1, p) @ _reflection_matrix(M, v2, p)) % p
        out.append((S, legendre(d1 * d2, p)))
    return out


def check_axioms(L: TernaryLattice, table: LocalWeightTable, rng=None, n_rotations: int = 200) -> dict:
    """Exhaustive check of the weight-function axioms; returns violation counts."""
    p = table.p
    M = L.gram2 % p
    X = _all_vectors(p)
    qv = _q(M, X, p)
    vals = table.values.astype(np.int64)
    pw = np.array([1, p, p * p], dtype=np.int64)
    out = {}
    out["support"] = int(np.count_nonzero(vals[qv != 0]))
    nz = X.any(axis=1)
    out["nonvanishing"] = int(np.count_nonzero((vals == 0) & (qv == 0) & nz))
    sc = 0
    for xi in range(1, p):
        img = ((X * xi) % p) @ pw
        sc += int(np.count_nonzero(vals[img] != legendre(xi, p) * vals))
    out["scalar"] = sc
    if rng is None:
        rng = np.random.default_rng(0)
    rot = 0
    for S, s in rotation_group_sample(L, p, n_rotations, rng):
        img = ((X @ S) % p) @ pw
        rot += int(np.count_nonzero(vals[img] != s * vals))
    out["rotation"] = rot
    return out


# ------------------------------------------------------------------ adelic weight


@dataclass
class AdelicWeight:
    L: TernaryLattice
    tables: dict  # p -> LocalWeightTable
    l: Fraction
    b: Fraction
    dK: int

    @property
    def conductor(self) -> int:
        return abs(self.dK)


def adelic_weight(L: TernaryLattice, l, *, seeds: dict | None = None) -> AdelicWeight:
    l = Fraction(l)
    fp = fundamental_pair(l)
    f = abs(fp.dK)
    primes = prime_divisors(f) if f > 1 else []
    tables = {p: build_local_weight(L, p, l, seed=(seeds or {}).get(p)) for p in primes}
    return AdelicWeight(L, tables, l, fp.a, fp.dK)


def eval_weight(w: AdelicWeight, y, c=1) -> int:
    """w(y; c) for y given in L-coordinates (rationals) and c > 0 rational."""
    c = Fraction(c)
    z = [c * Fraction(t) for t in y]
    if any(t.denominator != 1 for t in z):
        return 0
    val = 1
    for p, tab in w.tables.items():
        zz = [t.numerator % p for t in z]
        val *= tab(zz)
        if val == 0:
            return 0
    return val


def weight_character(w: AdelicWeight, m) -> int:
    """chi^l on a positive rational coprime to f(l)."""
    m = Fraction(m)
    return kronecker(w.dK, m.numerator) * kronecker(w.dK, m.denominator)
