"""Quaternionic modular forms: harmonic coefficient spaces, height pairing,
Brandt matrices, the Eisenstein/cusp split, Atkin-Lehner signs and rational
eigenforms.

A form of weight k is stored as a list (one entry per ideal class) of
coordinate vectors in the harmonic basis of V_k. The Hecke operator T_m maps
phi to

    (T_m phi)(i) = sum_j m^k / (2 t_j) * sum_beta phi(j) . beta

with beta running over conj(I_j) I_i with n(beta) = m N(I_i) N(I_j), and
(P . beta)(z) = P(beta z beta^{-1}).
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial

from . import poly
from .arith import is_prime, prime_divisors
from .errors import DimensionMismatch, IrrationalEigenvalue, NotEigen
from .linalg import (
    charpoly,
    identity,
    inverse,
    kernel,
    matadd,
    matmul,
    matscale,
    matvec,
    rational_roots,
    rref,
    span_basis,
    transpose,
    zeros,
)
from .quatalg import (
    AtkinLehner,
    IdealClassSet,
    conj_lattice,
    elements_of_norm,
    lattice_product,
)

log = logging.getLogger(__name__)


# ------------------------------------------------------------------ V_k


@dataclass
class HarmonicSpace:
    k: int
    gram: list  # 3x3 Gram of Delta (negative definite)
    basis: list  # polynomials (dicts)
    inner: list  # Gram of the invariant inner product on the basis

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def _coord_data(self):
        mons = poly.monomials(self.k)
        rows = [poly.to_vector(P, self.k) for P in self.basis]
        R, piv = rref(transpose(rows))  # columns = basis vectors
        sub = [[rows[r][c] for r in range(len(rows))] for c in piv]
        return mons, piv, inverse(sub)

    def coords(self, P) -> list[Fraction]:
        """Coordinates of a harmonic polynomial in the basis."""
        mons, piv, inv = self._coord_data
        v = poly.to_vector(P, self.k)
        return matvec(inv, [v[c] for c in piv])

    def poly_of(self, c) -> dict:
        out: dict = {}
        for ci, P in zip(c, self.basis):
            if ci:
                out = poly.add(out, P, ci)
        return out

    def pair(self, u, v) -> Fraction:
        return sum((u[r] * self.inner[r][s] * v[s] for r in range(self.dim) for s in range(self.dim) if u[r] and v[s]), Fraction(0))

    def action_matrix(self, M) -> list[list[Fraction]]:
        """Matrix (acting on coordinate columns) of P -> P(z M)."""
        cols = [self.coords(poly.linear_substitute(P, M)) for P in self.basis]
        return transpose(cols)


def fischer_product(P, Q, Ginv) -> Fraction:
    """P(G^{-1} d) Q for homogeneous P, Q of equal degree."""
    Pd = poly.linear_substitute(P, Ginv)
    s = Fraction(0)
    for m, v in Pd.items():
        if m in Q:
            s += v * Q[m] * factorial(m[0]) * factorial(m[1]) * factorial(m[2])
    return s


def harmonic_space(k: int, gram) -> HarmonicSpace:
    """Delta-harmonic homogeneous polynomials of degree k, with the Fischer
    product of the positive definite form -Delta."""
    gram = [[Fraction(x) for x in row] for row in gram]
    A_inv = inverse(gram)
    mons = poly.monomials(k)
    if k < 2:
        basis = [{m: Fraction(1)} for m in mons]
    else:
        lower = poly.monomials(k - 2)
        idx = {m: r for r, m in enumerate(lower)}
        cols = []
        for m in mons:
            lap = poly.laplacian({m: Fraction(1)}, A_inv)
            col = [Fraction(0)] * len(lower)
            for mm, v in lap.items():
                col[idx[mm]] = v
            cols.append(col)
        K = kernel(transpose(cols), len(mons))
        basis = [poly.from_vector(v, k) for v in K]
    G = [[-x for x in row] for row in gram]
    Ginv = inverse(G)
    inner = [[fischer_product(P, Q, Ginv) for Q in basis] for P in basis]
    assert len(basis) == 2 * k + 1
    return HarmonicSpace(k, gram, basis, inner)


# ------------------------------------------------------------------ forms


@dataclass
class FormSpace:
    """M_k(R) as the direct sum of the Gamma_x-invariants of V_k."""

    classes: IdealClassSet
    V: HarmonicSpace
    blocks: list  # per class: list of basis vectors (V-coords) of V^{Gamma_x}
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return sum(len(b) for b in self.blocks)

    @cached_property
    def offsets(self) -> list[int]:
        out, s = [], 0
        for b in self.blocks:
            out.append(s)
            s += len(b)
        return out

    def unfold(self, c) -> list[list[Fraction]]:
        """Coordinates in M_k -> per-class V-coordinates (a QuaternionicForm)."""
        out = []
        for off, blk in zip(self.offsets, self.blocks):
            v = [Fraction(0)] * self.V.dim
            for r, bv in enumerate(blk):
                x = c[off + r]
                if x:
                    v = [a + x * b for a, b in zip(v, bv)]
            out.append(v)
        return out

    def fold(self, form) -> list[Fraction]:
        c = []
        for blk, v in zip(self.blocks, form):
            if not blk:
                continue
            # least squares-free exact solve via pivots
            cols = transpose(blk)
            R, piv = rref([row + [x] for row, x in zip(cols, v)])
            if len(blk) in piv:
                raise DimensionMismatch("vector is not in the invariant subspace")
            sol = [Fraction(0)] * len(blk)
            for row, pc in zip(R, piv):
                sol[pc] = row[-1]
            c.extend(sol)
        return c


def conj_action(classes: IdealClassSet, V: HarmonicSpace, g, scale: Fraction = Fraction(1)):
    M = classes.algebra.conj_matrix(g)
    A = V.action_matrix(M)
    return matscale(scale, A) if scale != 1 else A


def form_space(classes: IdealClassSet, V: HarmonicSpace) -> FormSpace:
    blocks = []
    for units in classes.units:
        if V.k == 0:
            blocks.append([[Fraction(1)]])
            continue
        rows = []
        seen = set()
        for u in units:
            key = tuple(u) if u[0] >= 0 else tuple(-t for t in u)
            if key in seen:
                continue
            seen.add(key)
            A = conj_action(classes, V, u)
            rows.extend(matadd(A, matscale(-1, identity(V.dim))))
        blocks.append(kernel(rows, V.dim) if rows else identity(V.dim))
    return FormSpace(classes, V, blocks)


def height_pairing(phi, psi, classes: IdealClassSet, V: HarmonicSpace) -> Fraction:
    """sum_x (1/t_x) <phi(x), psi(x)>."""
    if len(phi) != len(psi) or len(phi) != classes.h:
        raise DimensionMismatch("forms must have one entry per class")
    s = Fraction(0)
    for t, u, v in zip(classes.unit_orders, phi, psi):
        if len(u) != V.dim or len(v) != V.dim:
            raise DimensionMismatch("coefficient vectors must lie in V_k")
        s += V.pair(u, v) / t
    return s


@dataclass
class HeckeMatrix:
    m: int
    blocks: list  # h x h array of dim V matrices
    matrix: list  # on M_k coordinates

    def apply(self, form) -> list:
        out = []
        for i in range(len(self.blocks)):
            acc = [Fraction(0)] * len(form[0])
            for j in range(len(self.blocks)):
                acc = [a + b for a, b in zip(acc, matvec(self.blocks[i][j], form[j]))]
            out.append(acc)
        return out


def brandt_blocks(classes: IdealClassSet, V: HarmonicSpace, m: int) -> list:
    B = classes.algebra
    h = classes.h
    d = V.dim
    blocks = [[zeros(d, d) for _ in range(h)] for _ in range(h)]
    scale = Fraction(m) ** V.k
    for i in range(h):
        for j in range(h):
            P = lattice_product(B, conj_lattice(classes.ideals[j]), classes.ideals[i])
            betas = elements_of_norm(B, P, m * classes.norms[i] * classes.norms[j])
            if not betas:
                continue
            c = Fraction(1, 2 * classes.unit_orders[j])
            if V.k == 0:
                blocks[i][j] = [[c * len(betas)]]
                continue
            acc = zeros(d, d)
            for beta in betas:
                acc = matadd(acc, conj_action(classes, V, beta))
            blocks[i][j] = matscale(c * scale, acc)
    return blocks


def _restrict_to_space(S: FormSpace, blocks) -> list:
    """Matrix of the block operator in M_k coordinates."""
    cols = []
    for c in identity(S.dim):
        form = S.unfold(c)
        img = []
        for i in range(len(blocks)):
            acc = [Fraction(0)] * S.V.dim
            for j in range(len(blocks)):
                acc = [a + b for a, b in zip(acc, matvec(blocks[i][j], form[j]))]
            img.append(acc)
        cols.append(S.fold(img))
    return transpose(cols)


def brandt_matrix(S: FormSpace, m: int) -> HeckeMatrix:
    key = ("T", m)
    if key not in S._cache:
        blocks = brandt_blocks(S.classes, S.V, m)
        S._cache[key] = HeckeMatrix(m, blocks, _restrict_to_space(S, blocks))
    return S._cache[key]


def eisenstein_and_cusp_split(S: FormSpace):
    """(Eisenstein basis, cusp basis) as lists of M_k coordinate vectors."""
    if S.V.k > 0:
        return [], identity(S.dim)
    ones = [Fraction(1)] * S.dim
    w = [Fraction(1, t) for t in S.classes.unit_orders]
    cusp = kernel([w], S.dim)
    return [ones], cusp


def atkin_lehner_matrix(S: FormSpace, al: AtkinLehner) -> list:
    h = S.classes.h
    d = S.V.dim
    blocks = [[zeros(d, d) for _ in range(h)] for _ in range(h)]
    for i, (j, g) in enumerate(zip(al.perm, al.gammas)):
        blocks[i][j] = identity(d) if S.V.k == 0 else conj_action(S.classes, S.V, g)
    return _restrict_to_space(S, blocks)


# ------------------------------------------------------------------ eigenforms


def _restrict(T, W):
    """Matrix X of T on the span of the rows of W, i.e. T W^T = W^T X."""
    cols = transpose(W)
    TW = matmul(T, cols)
    sel = rref(W)[1]
    A = [[cols[r][c] for c in range(len(W))] for r in sel]
    return matmul(inverse(A), [TW[r] for r in sel])


@dataclass
class Eigenform:
    coords: list  # M_k coordinates
    form: list  # per-class V-coordinates
    eigenvalues: dict


def _split(T, W):
    """Split span(W) into T-eigenspaces with rational eigenvalue; second item is
    the part whose characteristic polynomial has no rational roots."""
    X = _restrict(T, W)
    cp = charpoly(X)
    out = []
    found = 0
    for lam, mult in rational_roots(cp):
        K = kernel(matadd(X, matscale(-lam, identity(len(X)))), len(X))
        vecs = [[sum((k[r] * W[r][c] for r in range(len(W))), Fraction(0)) for c in range(len(W[0]))] for k in K]
        out.append((lam, vecs))
        found += len(K)
    return out, found < len(W)


def eigenforms(S: FormSpace, primes, *, space=None) -> tuple[list[Eigenform], int]:
    """Rational simultaneous eigenforms of the cusp space for the given Hecke
    primes. Returns the eigenforms and the dimension left unsplit (irrational
    or repeated systems)."""
    if space is None:
        space = eisenstein_and_cusp_split(S)[1]
    pending = [(space, {})] if space else []
    done = []
    skipped = 0
    for p in primes:
        T = brandt_matrix(S, p).matrix
        nxt = []
        for W, ev in pending:
            parts, irr = _split(T, W)
            if irr:
                got = sum(len(v) for _, v in parts)
                skipped += len(W) - got
                log.info("T_%d has irrational eigenvalues on a %d-dim piece", p, len(W) - got)
            for lam, vecs in parts:
                nxt.append((span_basis(vecs), {**ev, p: lam}))
        pending = nxt
    for W, ev in pending:
        if len(W) == 1:
            v = W[0]
            done.append(Eigenform(v, S.unfold(v), ev))
        else:
            skipped += len(W)
    if skipped:
        warnings.warn(f"{skipped} dimensions not split into rational eigenlines", stacklevel=2)
    return done, skipped


def eigenvalue(S: FormSpace, ef: Eigenform, m: int) -> Fraction:
    T = brandt_matrix(S, m).matrix
    img = matvec(T, ef.coords)
    r = next(i for i, x in enumerate(ef.coords) if x)
    lam = img[r] / ef.coords[r]
    if any(a != lam * b for a, b in zip(img, ef.coords)):
        raise NotEigen(f"not an eigenvector of T_{m}")
    return lam


def al_sign(S: FormSpace, coords, al: AtkinLehner) -> int:
    W = atkin_lehner_matrix(S, al)
    img = matvec(W, coords)
    for s in (1, -1):
        if all(a == s * b for a, b in zip(img, coords)):
            return s
    raise NotEigen(f"Atkin-Lehner at {al.p} does not scale the form")


def ramanujan_ok(ap: Fraction, p: int, k: int) -> bool:
    ok = float(ap) ** 2 <= 4 * p ** (2 * k + 1) + 1e-9
    if not ok:
        warnings.warn(f"a_{p} = {ap} exceeds the Ramanujan bound", stacklevel=2)
    return ok


def match_eigenform(S: FormSpace, forms: list[Eigenform], expected: dict) -> Eigenform:
    """The unique eigenform whose eigenvalues agree with ``expected``."""
    hits = []
    for ef in forms:
        if all(eigenvalue(S, ef, p) == v for p, v in expected.items()):
            hits.append(ef)
    if len(hits) != 1:
        raise NotEigen(f"{len(hits)} eigenforms match the requested system")
    return hits[0]


def hecke_primes(N: int, bound: int, extra_bad: int = 1) -> list[int]:
    return [p for p in range(2, bound + 1) if is_prime(p) and N % p and extra_bad % p]
