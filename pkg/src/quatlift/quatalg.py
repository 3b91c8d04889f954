"""Definite quaternion algebras over Q, Eichler orders of squarefree level and
their ideal class sets.

Elements are 4-tuples of Fractions in the basis 1, i, j, k with i^2 = a,
j^2 = b, k = ij. Ideal classes are represented by left R-ideals I (so R I = I)
up to I ~ I g; the varying orders attached to the classes are the right orders
R_x = conj(I) I / N(I). Conjugating everything swaps left and right, so this is
the same class set as the one built from right ideals.
"""
from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt

from .arith import (
    factorint,
    fundamental_discriminant,
    is_squarefree,
    kronecker,
    legendre,
    prime_divisors,
    primes_up_to,
    valuation,
)
from .errors import MassMismatch, ParityViolation, ScopeError, SearchExhausted
from .lattice import (
    basis_key,
    contains,
    covolume,
    dual_basis,
    enumerate_vectors,
    lattice_basis,
    lattice_intersection,
)
from .linalg import det, inverse, vecmat

log = logging.getLogger(__name__)

Quat = tuple  # (x0, x1, x2, x3) of Fractions

INFINITY = "inf"


# ------------------------------------------------------------------ symbols


def _unit_part(x: int, p: int) -> tuple[int, int]:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, x


def hilbert_symbol(a, b, p) -> int:
    """Local Hilbert symbol (a, b)_p for p a prime or ``"inf"``."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol needs nonzero entries")
    # clear denominators by squares
    a = a.numerator * a.denominator
    b = b.numerator * b.denominator
    if p == INFINITY or p == 0:
        return -1 if (a < 0 and b < 0) else 1
    alpha, u = _unit_part(a, p)
    beta, v = _unit_part(b, p)
    if p == 2:
        eps = lambda t: ((t - 1) // 2) % 2  # noqa: E731
        om = lambda t: ((t * t - 1) // 8) % 2  # noqa: E731
        e = eps(u) * eps(v) + alpha * om(v) + beta * om(u)
        return -1 if e % 2 else 1
    s = (-1) ** (alpha * beta * ((p - 1) // 2))
    if beta % 2:
        s *= legendre(u, p)
    if alpha % 2:
        s *= legendre(v, p)
    return s


def ramified_primes(a: int, b: int) -> frozenset[int]:
    cands = set(prime_divisors(2 * a * b))
    return frozenset(p for p in cands if hilbert_symbol(a, b, p) == -1)


def chi_star(l, p: int) -> int:
    """Character of Q(sqrt l) at the prime p (p not dividing its conductor)."""
    l = Fraction(l)
    dK, _ = fundamental_discriminant(l.numerator * l.denominator)
    return kronecker(dK, p)


def sigma_l(N: int, eps_g: dict[int, int], l) -> frozenset[int]:
    """Finite part of the ramification set attached to (N, eps_g, l)."""
    out = set()
    for p, e in factorint(N).items():
        if chi_star(l, p) ** e * eps_g[p] == -1:
            out.add(p)
    if len(out) % 2 == 0:
        raise ParityViolation(
            f"Hl1 fails: finite ramification set {sorted(out)} has even size for l={l}, N={N}"
        )
    return frozenset(out)


# ------------------------------------------------------------------ algebra


@dataclass(frozen=True)
class QuaternionAlgebra:
    a: int
    b: int

    def __post_init__(self):
        if not (self.a < 0 and self.b < 0):
            raise ValueError("only definite algebras (a, b < 0) are supported")

    @cached_property
    def ramified_finite(self) -> frozenset[int]:
        return ramified_primes(self.a, self.b)

    @property
    def disc(self) -> int:
        d = 1
        for p in self.ramified_finite:
            d *= p
        return d

    def mul(self, x, y) -> Quat:
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        )

    @staticmethod
    def conj(x) -> Quat:
        return (x[0], -x[1], -x[2], -x[3])

    def norm(self, x) -> Fraction:
        a, b = self.a, self.b
        return x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2] + a * b * x[3] * x[3]

    @staticmethod
    def trace(x) -> Fraction:
        return 2 * x[0]

    def inv(self, x) -> Quat:
        n = Fraction(self.norm(x))
        c = self.conj(x)
        return tuple(Fraction(t) / n for t in c)

    def norm_gram(self, basis) -> list[list[Fraction]]:
        """Gram matrix G with n(sum c_i v_i) = c^T G c."""
        G = [[Fraction(0)] * len(basis) for _ in basis]
        for i, u in enumerate(basis):
            for j, v in enumerate(basis):
                if j < i:
                    G[i][j] = G[j][i]
                    continue
                G[i][j] = Fraction(self.trace(self.mul(u, self.conj(v)))) / 2
        return G

    def trace_gram(self, basis) -> list[list[Fraction]]:
        return [[Fraction(self.trace(self.mul(u, v))) for v in basis] for u in basis]

    def products(self, A, B):
        return [self.mul(u, v) for u in A for v in B]

    def conj_matrix(self, g) -> list[list[Fraction]]:
        """3x3 matrix M (rows) of z -> g z g^{-1} on pure quaternions, so that
        the image of sum z_i e_i is sum_j (sum_i z_i M[i][j]) e_j."""
        gi = self.inv(g)
        rows = []
        for e in ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)):
            e = tuple(Fraction(t) for t in e)
            img = self.mul(self.mul(g, e), gi)
            rows.append([img[1], img[2], img[3]])
        return rows

    def delta_gram(self) -> list[list[Fraction]]:
        """Gram of Delta(z) = -n(z) on pure quaternions (coords i, j, k)."""
        a, b = self.a, self.b
        return [[Fraction(a), 0, 0], [0, Fraction(b), 0], [0, 0, Fraction(-a * b)]]


def algebra_for_ramification(S, bound: int = 400) -> QuaternionAlgebra:
    """Definite algebra ramified exactly at the finite primes S (|S| odd)."""
    S = frozenset(S)
    if not S or len(S) % 2 == 0:
        raise ValueError("S must be a nonempty set of odd cardinality")
    pairs = []
    for A in range(1, bound + 1):
        if not is_squarefree(A):
            continue
        for Bv in range(A, bound + 1):
            if A * Bv > bound * 4 or not is_squarefree(Bv):
                continue
            if gcd(A, Bv) != 1:
                continue
            pairs.append((A * Bv, A, Bv))
    pairs.sort()
    for _, A, Bv in pairs:
        if ramified_primes(-A, -Bv) == S:
            return QuaternionAlgebra(-A, -Bv)
    raise SearchExhausted(f"no (a, b) with |a|,|b| <= {bound} ramified exactly at {sorted(S)}")


# ------------------------------------------------------------------ orders


def _as_quats(basis) -> list[Quat]:
    return [tuple(Fraction(x) for x in row) for row in basis]


def reduced_disc(B: QuaternionAlgebra, basis) -> int:
    d2 = abs(det(B.trace_gram(_as_quats(basis))))
    if d2.denominator != 1 or isqrt(d2.numerator) ** 2 != d2.numerator:
        raise ValueError("trace form determinant is not a square integer")
    return isqrt(d2.numerator)


def _is_integral_lattice(B: QuaternionAlgebra, basis) -> bool:
    return all(x.denominator == 1 for row in B.trace_gram(basis) for x in row) and all(
        Fraction(B.norm(v)).denominator == 1 for v in basis
    )


def _ring_closure(B: QuaternionAlgebra, gens, max_iter: int = 20):
    """Smallest ring containing the lattice gens, or None if it is not an order."""
    basis = lattice_basis(gens)
    for _ in range(max_iter):
        qs = _as_quats(basis)
        if not _is_integral_lattice(B, qs):
            return None
        new = lattice_basis(list(basis) + [list(p) for p in B.products(qs, qs)])
        if new == basis:
            return basis
        basis = new
    return None


@dataclass(frozen=True)
class QuaternionOrder:
    algebra: QuaternionAlgebra
    basis: tuple  # 4 rows of Fractions in coordinates 1, i, j, k
    disc: int
    eichler_invariants: dict

    @cached_property
    def quats(self) -> list[Quat]:
        return _as_quats(self.basis)

    @property
    def level(self) -> int:
        return self.disc // self.algebra.disc

    def contains(self, x) -> bool:
        return contains(self.basis, list(x))

    def key(self) -> str:
        return f"{self.algebra.a},{self.algebra.b}|{basis_key(self.basis)}"


def maximal_order(B: QuaternionAlgebra) -> QuaternionOrder:
    """A maximal order, found by saturating Z<1, i, j, k> prime by prime."""
    one = Fraction(1)
    basis = lattice_basis([[one, 0, 0, 0], [0, one, 0, 0], [0, 0, one, 0], [0, 0, 0, one]])
    target = B.disc
    d = reduced_disc(B, basis)
    while d != target:
        ratio = d // target
        p = min(prime_divisors(ratio))
        improved = False
        qs = _as_quats(basis)
        for coeffs in itertools.product(range(p), repeat=4):
            if not any(coeffs):
                continue
            x = tuple(sum((Fraction(c, p) * v[t] for c, v in zip(coeffs, qs)), Fraction(0)) for t in range(4))
            if Fraction(B.norm(x)).denominator != 1 or Fraction(B.trace(x)).denominator != 1:
                continue
            new = _ring_closure(B, list(basis) + [list(x)])
            if new is None:
                continue
            nd = reduced_disc(B, new)
            if nd < d:
                basis, d, improved = new, nd, True
                break
        if not improved:
            raise SearchExhausted(f"could not saturate order at p={p}")
    return QuaternionOrder(B, tuple(tuple(r) for r in basis), d, {p: -1 for p in B.ramified_finite})


def _kernel_mod_p(M: list[list[int]], p: int) -> list[list[int]]:
    """Right kernel of an integer matrix over F_p."""
    A = [[x % p for x in row] for row in M]
    n = len(A[0])
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    out = []
    for f in (c for c in range(n) if c not in pivots):
        v = [0] * n
        v[f] = 1
        for row, pc in zip(A, pivots):
            v[pc] = (-row[f]) % p
        out.append(v)
    return out


def _coords_int(order_basis_inv, x) -> list[int]:
    c = vecmat(list(x), order_basis_inv)
    assert all(t.denominator == 1 for t in c)
    return [int(t) for t in c]


def _eichler_sublevel(O: QuaternionOrder, q: int) -> list[list[Fraction]]:
    """Basis of an Eichler order of level q inside O (q split in B)."""
    B = O.algebra
    qs = O.quats
    one = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
    e = None
    for coeffs in itertools.product(range(q), repeat=4):
        x = tuple(sum((c * v[t] for c, v in zip(coeffs, qs)), Fraction(0)) for t in range(4))
        if B.trace(x) % q == 1 and B.norm(x) % q == 0:
            e = x
            break
    if e is None:
        raise SearchExhausted(f"no idempotent mod {q}")
    ome = tuple(u - v for u, v in zip(one, e))
    Binv = inverse([list(v) for v in qs])
    cols = [_coords_int(Binv, B.mul(B.mul(ome, v), e)) for v in qs]
    # x = sum c_i v_i is kept iff sum c_i cols[i] = 0 mod q
    M = [[cols[i][r] for i in range(4)] for r in range(4)]
    ker = _kernel_mod_p(M, q)
    gens = [[sum((Fraction(c) * v[t] for c, v in zip(kv, qs)), Fraction(0)) for t in range(4)] for kv in ker]
    gens += [[q * t for t in v] for v in qs]
    return lattice_basis(gens)


def eichler_order(B: QuaternionAlgebra, N: int) -> QuaternionOrder:
    """Order of reduced discriminant N: maximal at ramified primes, Eichler of
    level p at the remaining primes p | N."""
    if not is_squarefree(N):
        raise ScopeError(f"level {N} is not squarefree")
    D = B.disc
    if N % D or any((N // D) % p == 0 for p in prime_divisors(D)):
        raise ScopeError(f"disc(B)={D} must divide N={N} with coprime cofactor")
    O = maximal_order(B)
    basis = [list(r) for r in O.basis]
    for q in prime_divisors(N // D) if N // D > 1 else []:
        sub = _eichler_sublevel(O, q)
        basis = lattice_intersection(basis, sub)
    d = reduced_disc(B, basis)
    if d != N:
        raise SearchExhausted(f"constructed order has discriminant {d}, expected {N}")
    inv = {p: (-1 if p in B.ramified_finite else 1) for p in prime_divisors(N)} if N > 1 else {}
    return QuaternionOrder(B, tuple(tuple(r) for r in basis), d, inv)


def order_for_level(N: int, ramified) -> QuaternionOrder:
    return eichler_order(algebra_for_ramification(ramified), N)


def eichler_mass(order: QuaternionOrder) -> Fraction:
    m = Fraction(1, 12)
    for p in order.algebra.ramified_finite:
        m *= p - 1
    lev = order.level
    for p in prime_divisors(lev) if lev > 1 else []:
        m *= p + 1
    return m


# ------------------------------------------------------------------ ideals


def ideal_norm(order: QuaternionOrder, basis) -> Fraction:
    """Reduced norm N(I) of a lattice with left order ``order``."""
    r = covolume(basis) / covolume(order.basis)
    num, den = isqrt(r.numerator), isqrt(r.denominator)
    if num * num != r.numerator or den * den != r.denominator:
        raise ValueError("covolume ratio is not a square")
    return Fraction(num, den)


def lattice_product(B: QuaternionAlgebra, I, J):
    return lattice_basis([list(p) for p in B.products(_as_quats(I), _as_quats(J))])


def conj_lattice(I):
    return lattice_basis([[r[0], -r[1], -r[2], -r[3]] for r in I])


def right_order(B: QuaternionAlgebra, I, nI: Fraction):
    P = lattice_product(B, conj_lattice(I), I)
    return lattice_basis([[x / nI for x in row] for row in P])


def left_order(B: QuaternionAlgebra, I, nI: Fraction):
    P = lattice_product(B, I, conj_lattice(I))
    return lattice_basis([[x / nI for x in row] for row in P])


def elements_of_norm(B: QuaternionAlgebra, basis, n) -> list[Quat]:
    """All elements of the lattice with reduced norm exactly n."""
    qs = _as_quats(basis)
    G = B.norm_gram(qs)
    out = []
    for c in enumerate_vectors(G, n, exact=True):
        out.append(tuple(sum((ci * v[t] for ci, v in zip(c, qs)), Fraction(0)) for t in range(4)))
    return out


def find_element_of_norm(B: QuaternionAlgebra, basis, n):
    qs = _as_quats(basis)
    G = B.norm_gram(qs)
    for c in enumerate_vectors(G, n, exact=True):
        return tuple(sum((ci * v[t] for ci, v in zip(c, qs)), Fraction(0)) for t in range(4))
    return None


@dataclass
class IdealClassSet:
    order: QuaternionOrder
    ideals: list  # canonical bases of left R-ideals, first = R
    norms: list
    unit_orders: list
    right_order_bases: list
    units: list = field(default_factory=list)  # norm-1 elements of each R_x

    def __len__(self) -> int:
        return len(self.ideals)

    @property
    def h(self) -> int:
        return len(self.ideals)

    @property
    def mass(self) -> Fraction:
        return sum((Fraction(1, t) for t in self.unit_orders), Fraction(0))

    @property
    def algebra(self) -> QuaternionAlgebra:
        return self.order.algebra

    def class_of(self, I, nI) -> tuple[int, Quat]:
        """Index j and g with I = I_j g."""
        B = self.algebra
        for j, (Ij, nj) in enumerate(zip(self.ideals, self.norms)):
            beta = equivalence_witness(B, Ij, nj, I, nI)
            if beta is not None:
                # I_j beta = N(I_j) I
                return j, tuple(t / nj for t in beta)
        raise MassMismatch("ideal not equivalent to any representative")


def equivalence_witness(B: QuaternionAlgebra, I, nI, J, nJ):
    """beta in conj(I) J with n(beta) = N(I) N(J), or None if I, J are inequivalent."""
    P = lattice_product(B, conj_lattice(I), J)
    return find_element_of_norm(B, P, nI * nJ)


def smallest_good_prime(N: int) -> int:
    for q in primes_up_to(1000):
        if N % q:
            return q
    raise SearchExhausted("no prime coprime to N")


def neighbours(B: QuaternionAlgebra, I, nI, Rx, q: int) -> list:
    """The q + 1 left subideals J of I with N(J) = q N(I)."""
    qs = _as_quats(Rx)
    Iq = _as_quats(I)
    seen = {}
    for coeffs in itertools.product(range(q), repeat=4):
        if not any(coeffs):
            continue
        alpha = tuple(sum((c * v[t] for c, v in zip(coeffs, qs)), Fraction(0)) for t in range(4))
        if B.norm(alpha) % q:
            continue
        gens = [list(B.mul(u, alpha)) for u in Iq] + [[q * t for t in u] for u in Iq]
        J = lattice_basis(gens)
        if ideal_norm_ratio(J, I) != q:
            continue
        seen.setdefault(basis_key(J), J)
        if len(seen) == q + 1:
            break
    return list(seen.values())


def ideal_norm_ratio(J, I) -> Fraction:
    r = covolume(J) / covolume(I)
    return Fraction(isqrt(r.numerator), isqrt(r.denominator))


def _class_data(B, I, nI):
    Rx = right_order(B, I, nI)
    units = elements_of_norm(B, Rx, 1)
    return Rx, units


def right_ideal_classes(R: QuaternionOrder) -> IdealClassSet:
    """Representatives of the ideal classes of R, certified by the mass formula."""
    B = R.algebra
    q = smallest_good_prime(R.disc)
    target = eichler_mass(R)
    I0 = [list(r) for r in R.basis]
    Rx0, units0 = _class_data(B, I0, Fraction(1))
    cls = IdealClassSet(R, [I0], [Fraction(1)], [len(units0) // 2], [Rx0], [units0])
    queue = deque([0])
    while queue and cls.mass < target:
        i = queue.popleft()
        for J in neighbours(B, cls.ideals[i], cls.norms[i], cls.right_order_bases[i], q):
            nJ = cls.norms[i] * q
            Rx, units = _class_data(B, J, nJ)
            t = len(units) // 2
            new = True
            for Ij, nj, tj in zip(cls.ideals, cls.norms, cls.unit_orders):
                if tj == t and equivalence_witness(B, Ij, nj, J, nJ) is not None:
                    new = False
                    break
            if new:
                cls.ideals.append(J)
                cls.norms.append(nJ)
                cls.unit_orders.append(t)
                cls.right_order_bases.append(Rx)
                cls.units.append(units)
                queue.append(len(cls.ideals) - 1)
                log.debug("class %d: norm %s, t=%d", len(cls.ideals) - 1, nJ, t)
                if cls.mass >= target:
                    break
    if cls.mass != target:
        raise MassMismatch(f"mass {cls.mass} != Eichler mass {target}")
    return cls


def rescale_ideal(cls: IdealClassSet, idx: int, bad: int):
    """Replace representative idx by an equivalent integral ideal of norm
    coprime to ``bad``; returns (ideal, norm, g) with new = old * g."""
    B = cls.algebra
    I, nI = cls.ideals[idx], cls.norms[idx]
    if gcd(nI.numerator * nI.denominator, bad) == 1:
        return I, nI, (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
    cI = conj_lattice(I)
    G = B.norm_gram(_as_quats(cI))
    bound = nI
    while True:
        bound *= 2
        for c in enumerate_vectors(G, bound * nI):
            if not any(c):
                continue
            beta = tuple(sum((ci * v[t] for ci, v in zip(c, _as_quats(cI))), Fraction(0)) for t in range(4))
            m = B.norm(beta) / nI
            if m.denominator == 1 and gcd(m.numerator, bad) == 1:
                g = tuple(t / nI for t in beta)
                J = lattice_basis([list(B.mul(u, g)) for u in _as_quats(I)])
                return J, ideal_norm(cls.order, J), g


# ------------------------------------------------------------------ Atkin-Lehner


@dataclass(frozen=True)
class AtkinLehner:
    p: int
    perm: tuple
    gammas: tuple  # J_p I_i = I_perm[i] * gammas[i]


def two_sided_ideal(R: QuaternionOrder, p: int):
    """The integral two-sided ideal of reduced norm p (p | disc R)."""
    B = R.algebra
    T = B.trace_gram(R.quats)
    # trace dual basis: rows d_j with tr(d_j v_i) = delta
    Tinv = inverse(T)
    dual = [[sum((Tinv[j][i] * R.quats[i][t] for i in range(4)), Fraction(0)) for t in range(4)] for j in range(4)]
    pdual = [[p * x for x in row] for row in lattice_basis(dual)]
    return lattice_intersection([list(r) for r in R.basis], pdual)


def atkin_lehner(R: QuaternionOrder, cls: IdealClassSet, p: int) -> AtkinLehner:
    if R.disc % p:
        raise ValueError(f"{p} does not divide disc {R.disc}")
    B = R.algebra
    J = two_sided_ideal(R, p)
    assert ideal_norm(R, J) == p
    perm, gammas = [], []
    for I, nI in zip(cls.ideals, cls.norms):
        JI = lattice_product(B, J, I)
        j, g = cls.class_of(JI, nI * p)
        perm.append(j)
        gammas.append(g)
    return AtkinLehner(p, tuple(perm), tuple(gammas))


def is_two_sided(B: QuaternionAlgebra, R: QuaternionOrder, J) -> bool:
    RJ = lattice_product(B, R.basis, J)
    JR = lattice_product(B, J, R.basis)
    return RJ == lattice_basis(J) and JR == lattice_basis(J)
