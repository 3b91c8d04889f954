"""Theta lifts: exact coefficients lambda(D, a) of the lift of a quaternionic
form, computed by enumerating the ternary lattices L_x = R_x/Z.

Keys are canonical pairs (dK, f) with D a^2 = dK f^2. For a class x with
representative I_x (norm prime to f(l)) and polynomial P_x = phi(x),

    lambda(D, a) = (1/a) (ab)^{-k} sum_x (1/t_x) S_x(dK(l) D a^2),
    S_x(t)       = sum_{z in L_x, Delta(z) = t} w_x(z) P_x(z),

with w_x(z) = chi^l(N(I_x)) prod_{p | f(l)} w_p(z mod p). Non-canonical pairs
follow from lambda(D m^2, a/m) = m^(k+1) lambda(D, a).
"""
from __future__ import annotations

import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from . import poly
from .arith import (
    as_fraction,
    fundamental_discriminant,
    fundamental_pair,
    is_discriminant_pair,
    kronecker,
    sign,
)
from .errors import ConductorClash, RangeError, SignViolation
from .lattice import enumerate_vectors, lattice_basis, ternary_vectors
from .linalg import inverse, matmul, transpose
from .quatalg import IdealClassSet, _as_quats, rescale_ideal, right_order, sigma_l
from .weightfn import AdelicWeight, pure_image

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LiftConfig:
    l: Fraction
    b: Fraction
    u: int
    k: int
    skew: bool = False

    def header(self) -> dict:
        return {"l": str(self.l), "b": str(self.b), "u": str(self.u), "k": str(self.k), "skew": str(self.skew).lower()}


def validate_l(l, N: int, eps_g: dict, k: int, skew: bool = False):
    """Check Hl1/Hl2 and coprimality; returns (finite ramification set, b, u)."""
    l = as_fraction(l)
    fp = fundamental_pair(l)
    if gcd(abs(fp.dK), 2 * N) != 1:
        raise ConductorClash(f"conductor of l={l} is not coprime to 2N={2 * N}")
    S = sigma_l(N, eps_g, l)
    u = sign(l)
    if not skew and u != (-1) ** k:
        raise SignViolation(f"Hl2 fails: sgn(l)={u} but (-1)^k={(-1) ** k}")
    if skew and u == (-1) ** k:
        raise SignViolation("skew mode needs sgn(l) = -(-1)^k")
    return S, fp.a, u


def make_config(l, N: int, eps_g: dict, k: int, skew: bool = False) -> LiftConfig:
    _, b, u = validate_l(l, N, eps_g, k, skew)
    return LiftConfig(as_fraction(l), b, u, k, skew)


def vectors_with_disc(L, c, delta) -> list[tuple]:
    """The vectors y in c^{-1} L with Delta(y) = delta, as L-coordinates."""
    c, delta = as_fraction(c), as_fraction(delta)
    if delta >= 0:
        raise ValueError("delta must be negative")
    target = -delta * c * c
    if target.denominator != 1:
        return []
    G = [[-x for x in row] for row in L.gram]
    return [tuple(Fraction(t) / c for t in v) for v in enumerate_vectors(G, target, exact=True)]


# ------------------------------------------------------------------ per-class data


@dataclass
class ClassTheta:
    g: tuple  # new representative = old * g
    norm: Fraction
    t: int
    basis: list  # rows: pure coordinates of an L_x basis
    M2: np.ndarray  # integer matrix of -2 Delta on that basis
    den: int
    Bint: np.ndarray  # den * basis, integer
    chi: int
    cmod: dict  # p -> integer 3x3 matrix, L_x-coords -> L-coords mod p


def prepare_classes(classes: IdealClassSet, w: AdelicWeight) -> list[ClassTheta]:
    B = classes.algebra
    f = w.conductor
    Linv = inverse([list(r) for r in w.L.basis])
    out = []
    for idx in range(classes.h):
        I, nI, g = rescale_ideal(classes, idx, f if f > 1 else 1)
        Rx = right_order(B, I, nI)
        basis = lattice_basis([pure_image(v) for v in _as_quats(Rx)])
        gram = matmul(matmul(basis, B.delta_gram()), transpose(basis))
        M2 = np.array([[int(-2 * x) for x in row] for row in gram], dtype=np.int64)
        den = 1
        for row in basis:
            for x in row:
                den = den * x.denominator // gcd(den, x.denominator)
        Bint = np.array([[int(x * den) for x in row] for row in basis], dtype=np.int64)
        C = matmul(basis, Linv)
        cmod = {}
        for p in w.tables:
            cmod[p] = np.array([[x.numerator * pow(x.denominator, -1, p) % p for x in row] for row in C], dtype=np.int64)
        chi = kronecker(w.dK, nI.numerator) * kronecker(w.dK, nI.denominator)
        out.append(ClassTheta(g, nI, classes.unit_orders[idx], basis, M2, den, Bint, chi, cmod))
    return out


def class_weights(ct: ClassTheta, w: AdelicWeight, ys: np.ndarray) -> np.ndarray:
    vals = np.full(len(ys), ct.chi, dtype=np.int64)
    for p, tab in w.tables.items():
        pw = np.array([1, p, p * p], dtype=np.int64)
        idx = ((ys @ ct.cmod[p]) % p) @ pw
        vals *= tab.values[idx].astype(np.int64)
    return vals


def _moments_for_class(args):
    ct, w, k, T = args
    mons = poly.monomials(k)
    mom = np.zeros((len(mons), T + 1), dtype=np.int64)

    def consume(ys, vals):
        tt = vals // 2
        wt = class_weights(ct, w, ys)
        nz = wt != 0
        if not nz.any():
            return
        ys, tt, wt = ys[nz], tt[nz], wt[nz]
        if k == 0:
            mom[0] += np.bincount(tt, weights=wt, minlength=T + 1).astype(np.int64)
            return
        pure = ys @ ct.Bint
        for r, m in enumerate(mons):
            v = wt.copy()
            for i in range(3):
                for _ in range(m[i]):
                    v *= pure[:, i]
            np.add.at(mom[r], tt, v)

    ternary_vectors(ct.M2, 2 * T, chunk_cb=consume)
    return mom


@dataclass
class ThetaData:
    """Weighted monomial sums per class: mom[x][alpha][|t|]."""

    classes: IdealClassSet
    w: AdelicWeight
    k: int
    T: int
    cts: list
    mom: list

    def class_sum(self, x: int, P_pure: dict, t: int) -> Fraction:
        """S_x(-t) for the polynomial P_pure (in pure coordinates)."""
        if t > self.T:
            raise RangeError(f"|Delta|={t} exceeds enumerated range {self.T}")
        mons = poly.monomials(self.k)
        s = 0
        for r, m in enumerate(mons):
            c = P_pure.get(m, 0)
            if c:
                s += Fraction(c) * int(self.mom[x][r][t])
        return Fraction(s) / Fraction(self.cts[x].den) ** self.k


def theta_data(classes: IdealClassSet, w: AdelicWeight, k: int, T: int, workers: int = 1) -> ThetaData:
    cts = prepare_classes(classes, w)
    jobs = [(ct, w, k, T) for ct in cts]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            moms = list(ex.map(_moments_for_class, jobs))
    else:
        moms = [_moments_for_class(j) for j in jobs]
    return ThetaData(classes, w, k, T, cts, moms)


def class_polys(data: ThetaData, V, form) -> list[dict]:
    """phi(x) transported to the rescaled representatives, as pure-coordinate polynomials."""
    B = data.classes.algebra
    out = []
    for ct, c in zip(data.cts, form):
        P = V.poly_of(c)
        if data.k > 0:
            P = poly.linear_substitute(P, B.conj_matrix(ct.g))
        out.append(P)
    return out


def raw_sums(data: ThetaData, V, form) -> dict[int, Fraction]:
    """sum_x (1/t_x) S_x(-t) for every t <= T with a nonzero value."""
    polys = class_polys(data, V, form)
    mons = poly.monomials(data.k)
    terms = []
    for x, (ct, P) in enumerate(zip(data.cts, polys)):
        scale = Fraction(1, ct.t) / Fraction(ct.den) ** data.k
        for r, m in enumerate(mons):
            c = P.get(m, 0)
            if c:
                terms.append((Fraction(c) * scale, data.mom[x][r]))
    if not terms:
        return {}
    # exact integer accumulation over a common denominator
    den = lcm(*(c.denominator for c, _ in terms))
    big = sum(abs(c.numerator) * (den // c.denominator) * int(np.abs(mom).max(initial=0)) for c, mom in terms)
    dtype = np.int64 if big < 2**62 else object
    total = np.zeros(data.T + 1, dtype=dtype)
    for c, mom in terms:
        total = total + mom.astype(dtype) * (c.numerator * (den // c.denominator))
    nz = np.flatnonzero(total)
    return {int(t): Fraction(int(total[t]), den) for t in nz}


# ------------------------------------------------------------------ tables


def canonical_key(D, a) -> tuple[Fraction, Fraction, Fraction] | None:
    """(dK, f, m) with lambda(D, a) = m^(k+1) lambda(dK, f), or None if (D, a)
    is not a discriminant pair."""
    D, a = as_fraction(D), as_fraction(a)
    if not is_discriminant_pair(D, a):
        return None
    fp = fundamental_pair(D)
    f = a / fp.a
    return Fraction(fp.dK), f, 1 / fp.a


@dataclass
class CoefficientTable:
    config: LiftConfig
    bound: int  # entries cover |D a^2| <= bound
    entries: dict = field(default_factory=dict)  # (dK, f) -> lambda
    support_violations: list = field(default_factory=list)

    def get(self, D, a) -> Fraction:
        key = canonical_key(D, a)
        if key is None:
            return Fraction(0)
        dK, f, m = key
        if abs(dK) * f * f > self.bound:
            raise RangeError(f"({D}, {a}) outside table bound {self.bound}")
        return m ** (self.config.k + 1) * self.entries.get((dK, f), Fraction(0))

    def nonzero(self) -> dict:
        return {k: v for k, v in self.entries.items() if v != 0}

    def plus_space_ok(self) -> bool:
        return not self.support_violations and all(
            is_discriminant_pair(D, a) for (D, a), v in self.entries.items() if v != 0
        )

    def to_text(self) -> str:
        buf = io.StringIO()
        for key, val in self.config.header().items():
            buf.write(f"# {key} = {val}\n")
        buf.write(f"# bound = {self.bound}\n")
        buf.write("D\ta\tlambda\n")
        for (D, a) in sorted(self.entries, key=lambda kv: (abs(kv[0] * kv[1] ** 2), kv[1], kv[0])):
            buf.write(f"{D}\t{a}\t{self.entries[(D, a)]}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "CoefficientTable":
        hdr = {}
        entries = {}
        for line in text.splitlines():
            if line.startswith("#"):
                k, _, v = line[1:].partition("=")
                hdr[k.strip()] = v.strip()
            elif line and not line.startswith("D\t"):
                D, a, lam = line.split("\t")
                entries[(Fraction(D), Fraction(a))] = Fraction(lam)
        cfg = LiftConfig(Fraction(hdr["l"]), Fraction(hdr["b"]), int(hdr["u"]), int(hdr["k"]), hdr["skew"] == "true")
        return cls(cfg, int(hdr["bound"]), entries)

    def __add__(self, other: "CoefficientTable") -> "CoefficientTable":
        keys = set(self.entries) | set(other.entries)
        ent = {k: self.entries.get(k, Fraction(0)) + other.entries.get(k, Fraction(0)) for k in keys}
        return CoefficientTable(self.config, min(self.bound, other.bound), ent)


def discriminants_up_to(bound: int, sgn: int) -> list[tuple[int, int]]:
    """(dK, f) with dK f^2 a discriminant of sign sgn and |dK f^2| <= bound."""
    out = []
    for n in range(1, bound + 1):
        d = sgn * n
        if d % 4 not in (0, 1):
            continue
        dK, f = fundamental_discriminant(d)
        if f.denominator == 1:
            out.append((dK, int(f)))
    return out


def lift(form, data: ThetaData, V, config: LiftConfig, D_bound: int) -> CoefficientTable:
    """Coefficient table over all discriminant pairs with |D a^2| <= D_bound."""
    l_dK = fundamental_pair(config.l).dK
    if abs(l_dK) * D_bound > data.T:
        raise RangeError(f"need |Delta| up to {abs(l_dK) * D_bound}, enumerated {data.T}")
    sums = raw_sums(data, V, form)
    table = CoefficientTable(config, D_bound)
    # plus-space support: every nonzero raw sum sits at dK(l) * (discriminant)
    for t, v in sums.items():
        if abs(l_dK) * D_bound < t:
            continue
        q = Fraction(t, abs(l_dK))
        n = -config.u * q  # D a^2, with sgn(D) = -sgn(l)
        if q.denominator != 1 or int(n) % 4 not in (0, 1):
            table.support_violations.append(t)
    for dK, f in discriminants_up_to(D_bound, -config.u):
        s = sums.get(abs(l_dK) * abs(dK) * f * f, Fraction(0))
        table.entries[(Fraction(dK), Fraction(f))] = s / f / (f * config.b) ** config.k
    return table


def theta_coefficient(form, data: ThetaData, V, config: LiftConfig, D, a) -> Fraction:
    """lambda(-uD, a) for a single pair."""
    key = canonical_key(D, a)
    if key is None:
        return Fraction(0)
    dK, f, m = key
    l_dK = fundamental_pair(config.l).dK
    t = abs(l_dK) * abs(dK) * f * f
    if t.denominator != 1:
        return Fraction(0)
    t = int(t)
    polys = class_polys(data, V, form)
    s = sum((data.class_sum(x, P, t) / ct.t for x, (ct, P) in enumerate(zip(data.cts, polys))), Fraction(0))
    return m ** (config.k + 1) * s / f / (f * config.b) ** config.k


def hecke_identity_check(table_Tp: CoefficientTable, table: CoefficientTable, p: int, D_bound: int, *, eigenvalue=None) -> bool:
    """Three-term relation lambda_{T_p phi}(D, a) = p^k lambda(D, a/p)
    + (D a^2 / p) p^k lambda(D, a) + p^(k+1) lambda(D, p a) for all
    |D a^2| <= D_bound."""
    if D_bound * p * p > table.bound:
        raise RangeError(f"need table bound {D_bound * p * p}, have {table.bound}")
    if D_bound > table_Tp.bound:
        raise RangeError("T_p table does not cover D_bound")
    k = table.config.k
    for (dK, f), lhs in table_Tp.entries.items():
        if abs(dK) * f * f > D_bound:
            continue
        n = int(dK * f * f)
        rhs = p**k * (table.entries.get((dK, f / p), Fraction(0)) if f % p == 0 else Fraction(0))
        rhs += kronecker(n, p) * p**k * table.entries.get((dK, f), Fraction(0))
        rhs += p ** (k + 1) * table.entries.get((dK, f * p), Fraction(0))
        if eigenvalue is not None and lhs != eigenvalue * table.entries.get((dK, f), Fraction(0)):
            return False
        if lhs != rhs:
            log.info("Hecke relation fails at (%s, %s): %s != %s", dK, f, lhs, rhs)
            return False
    return True
