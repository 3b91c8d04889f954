"""Special points, genus characters and the Gegenbauer kernel.

This is a second route to the theta coefficients. Vectors of discriminant
Delta c^2 in each L_x are grouped into unit orbits; every orbit contributes
<phi(x), P_Delta> / [O_omega^x : Z^x], with P_Delta the reproducing kernel of
the weighted point evaluation on V_k.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .arith import as_fraction, fundamental_pair, kronecker, prime_divisors
from .errors import NoCoprimeValue, SingularGram, VerificationFailure
from .lattice import enumerate_vectors, lattice_basis
from .linalg import inverse, matmul, matvec, transpose
from .poly import evaluate
from .quatalg import IdealClassSet, _as_quats
from .weightfn import pure_image

# ------------------------------------------------------------------ forms


@dataclass(frozen=True)
class BinaryForm:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def reduce(self) -> "BinaryForm":
        a, b, c = self.a, self.b, self.c
        while True:
            if c < a or (c == a and b < 0):
                a, b, c = c, -b, a
                continue
            if b > a or b <= -a:
                r = (a - b) // (2 * a)
                b, c = b + 2 * r * a, a * r * r + b * r + c
                continue
            break
        if a == c and b < 0:
            b = -b
        return BinaryForm(a, b, c)

    def compose(self, other: "BinaryForm") -> "BinaryForm":
        """Dirichlet composition, reduced."""
        d = self.disc
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        e = gcd(gcd(a1, a2), (b1 + b2) // 2)
        A = a1 * a2 // (e * e)
        for B in range(-A, A + 1):
            if (B - b1) % (2 * a1 // e) == 0 and (B - b2) % (2 * a2 // e) == 0 and (B * B - d) % (4 * A) == 0:
                return BinaryForm(A, B, (B * B - d) // (4 * A)).reduce()
        raise ArithmeticError("composition failed")


def reduced_forms(d: int) -> list[BinaryForm]:
    """Primitive reduced positive definite forms of discriminant d < 0."""
    out = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(BinaryForm(a, b, c))
        a += 1
    return out


@dataclass(frozen=True)
class QuadFieldData:
    delta: Fraction
    dK: int
    hK: int
    tK: int
    mK: int
    form_classes: tuple


def quad_field(delta) -> QuadFieldData:
    delta = as_fraction(delta)
    if delta >= 0:
        raise ValueError("Delta must be negative")
    dK = fundamental_pair(delta).dK
    forms = tuple(reduced_forms(dK))
    tK = 3 if dK == -3 else 2 if dK == -4 else 1
    return QuadFieldData(delta, dK, len(forms), tK, 1, forms)


def genus_character(Q: QuadFieldData, l, bad: int = 1, bound: int = 200) -> dict:
    """Xi(C) = chi^l(m) for an integer m > 0 represented by C and coprime to
    f(l) * bad."""
    l = as_fraction(l)
    dl = fundamental_pair(l).dK
    modulus = abs(dl) * abs(bad) * abs(Q.dK)
    out = {}
    for F in Q.form_classes:
        val = None
        for r in range(1, bound):
            for x in range(-r, r + 1):
                for y in (r - abs(x), -(r - abs(x))):
                    m = F(x, y)
                    if m > 0 and gcd(m, modulus) == 1 and gcd(x, y) == 1:
                        val = kronecker(dl, m)
                        break
                if val is not None:
                    break
            if val is not None:
                break
        if val is None:
            raise NoCoprimeValue(f"no represented value of {F} prime to {modulus}")
        out[F] = val
    return out


# ------------------------------------------------------------------ kernel


def gegenbauer_kernel(V, omega, weight_value) -> list[Fraction]:
    """Coordinates of P_Delta with <P, P_Delta> = weight_value * P(omega)."""
    rhs = [weight_value * evaluate(P, omega) for P in V.basis]
    try:
        return matvec(inverse(V.inner), rhs)
    except ZeroDivisionError as exc:
        raise SingularGram("inner product Gram is singular") from exc


# ------------------------------------------------------------------ points


@dataclass(frozen=True)
class SpecialPoint:
    class_index: int
    embedding: tuple  # pure coordinates of y with Delta(y) = Delta, y in c^{-1} L_x
    stabilizer: int  # [O_y^x : Z^x]
    orbit_size: int


def _pure_lattice(B, Rx):
    return lattice_basis([pure_image(v) for v in _as_quats(Rx)])


def _conj_pure(B, u, z):
    q = (Fraction(0), z[0], z[1], z[2])
    r = B.mul(B.mul(u, q), B.inv(u))
    assert r[0] == 0
    return (r[1], r[2], r[3])


def _vectors_of_disc(B, basis, target):
    """Pure vectors in span(basis) with Delta = target (< 0)."""
    gram = matmul(matmul(basis, B.delta_gram()), transpose(basis))
    G = [[-x for x in row] for row in gram]
    out = []
    for c in enumerate_vectors(G, -target, exact=True):
        out.append(tuple(sum((ci * row[t] for ci, row in zip(c, basis)), Fraction(0)) for t in range(3)))
    return out


def special_points(classes: IdealClassSet, delta, c, *, pick: str = "first") -> list[SpecialPoint]:
    """Unit-orbit representatives of A_{Delta,c}(L_x), over all classes.

    ``pick`` selects which orbit member represents the orbit ("first" in
    enumeration order or "max" in the tuple order)."""
    delta, c = as_fraction(delta), as_fraction(c)
    B = classes.algebra
    target = delta * c * c
    if target.denominator != 1:
        return []
    out = []
    for x, (Rx, units) in enumerate(zip(classes.right_order_bases, classes.units)):
        basis = _pure_lattice(B, Rx)
        vecs = _vectors_of_disc(B, basis, target)
        seen = set()
        for z in vecs:
            if z in seen:
                continue
            orbit = {_conj_pure(B, u, z) for u in units}
            seen |= orbit
            if pick == "max":
                z = max(orbit)
            stab = sum(1 for u in units if _conj_pure(B, u, z) == z) // 2
            y = tuple(t / c for t in z)
            out.append(SpecialPoint(x, y, stab, len(orbit)))
    return out


def point_weight(data, w, x: int, y, c) -> int:
    """w_x(y; c) through the rescaled representative of class x."""
    B = data.classes.algebra
    ct = data.cts[x]
    gi = B.inv(ct.g)
    z = _conj_pure(B, gi, tuple(Fraction(c) * t for t in y))
    coords = matvec(transpose(inverse(ct.basis)), list(z))
    if any(t.denominator != 1 for t in coords):
        return 0
    val = ct.chi
    for p, tab in w.tables.items():
        v = (np.array([int(t) for t in coords], dtype=np.int64) @ ct.cmod[p]) % p
        val *= tab(v)
    return val


def eta_pairing(form, D, a, data, V, w, config, *, pick: str = "first") -> Fraction:
    """<phi, eta^l_{D,a}>, summed over special points of (l D, a b).

    For a fundamental (D, a) prime to f(l) every point must carry a nonzero
    weight; a zero there raises VerificationFailure."""
    D, a = as_fraction(D), as_fraction(a)
    l = config.l
    delta = l * D
    c = a * config.b
    if (delta * c * c).denominator != 1:
        return Fraction(0)
    fp = fundamental_pair(D)
    strict = fp.a == a and gcd(fp.dK, w.dK) == 1
    total = Fraction(0)
    for sp in special_points(data.classes, delta, c, pick=pick):
        wv = point_weight(data, w, sp.class_index, sp.embedding, c)
        if wv == 0:
            if strict:
                raise VerificationFailure(f"zero weight at a special point for D={D}, a={a}")
            continue
        ker = gegenbauer_kernel(V, sp.embedding, wv)
        total += V.pair(form[sp.class_index], ker) / sp.stabilizer
    return total


def count_law_holds(classes: IdealClassSet, delta) -> tuple[bool, int, int]:
    """(holds, count, expected) for a fundamental Delta prime to the level."""
    Q = quad_field(delta)
    pts = special_points(classes, Q.dK, 1)
    N = classes.order.disc
    expected = Q.hK * 2 ** len(prime_divisors(N))
    return len(pts) in (0, expected), len(pts), expected
