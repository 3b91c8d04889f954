"""Central values of quadratic twists and the ratio test for the theta
coefficients.

L-values use the arithmetic normalization: for a newform of weight 2 + 2k and
level M the completed function (sqrt(M)/2pi)^s Gamma(s) L(s) has center
s = k + 1, and with root number +1

    L(k+1) = 2 sum_n a_n n^{-(k+1)} G_k(2 pi n / sqrt(M)),
    G_k(x) = e^{-x} sum_{j <= k} x^j / j!.

The twist by a fundamental discriminant d prime to N has level N d^2 and root
number sign_fe * chi_d(-N).
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import (
    as_fraction,
    fundamental_discriminants,
    fundamental_pair,
    kronecker,
    prime_divisors,
    primes_up_to,
    sign,
)
from .errors import InsufficientPrecision, MissingPrime, PrecisionUnreachable, VerificationFailure

log = logging.getLogger(__name__)

M_K = 1  # order of ker(Cl(Q) -> Cl(K)); Cl(Q) is trivial
H_F = 1


# ------------------------------------------------------------------ eigen systems


@dataclass
class EigenSystem:
    N: int
    k: int
    ap: dict  # prime -> exact eigenvalue
    eps: dict  # p | N -> Atkin-Lehner sign eps_g(p)
    label: str = ""

    def __post_init__(self):
        for p in prime_divisors(self.N):
            want = -self.eps[p] * p**self.k
            got = self.ap.setdefault(p, Fraction(want))
            if got != want:
                raise ValueError(f"a_{p} = {got} but -eps_g(p) p^k = {want}")

    @property
    def sign_fe(self) -> int:
        s = (-1) ** (self.k + 1)
        for p in prime_divisors(self.N):
            s *= self.eps[p]
        return s

    def twist_sign(self, dK: int) -> int:
        if dK == 1:
            return self.sign_fe
        return self.sign_fe * kronecker(dK, -self.N)

    def with_primes(self, source, bound: int) -> "EigenSystem":
        """Copy with a_p filled in from ``source(p)`` for every prime p <= bound
        not already present."""
        ap = dict(self.ap)
        for p in primes_up_to(bound):
            if p not in ap:
                ap[p] = Fraction(source(p))
        return EigenSystem(self.N, self.k, ap, dict(self.eps), self.label)


def _spf(bound: int) -> np.ndarray:
    spf = np.zeros(bound + 1, dtype=np.int64)
    for p in range(2, bound + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def extend_coefficients(es: EigenSystem, bound: int) -> list[int]:
    """a_n for 0 <= n <= bound (a_0 = 0) from the prime eigenvalues."""
    for p in primes_up_to(bound):
        if p not in es.ap:
            raise MissingPrime(f"a_{p} is needed for coefficients up to {bound}")
        if es.ap[p].denominator != 1:
            raise MissingPrime(f"a_{p} = {es.ap[p]} is not an integer")
    a = [0] * (bound + 1)
    if bound >= 1:
        a[1] = 1
    spf = _spf(bound)
    w = 2 * es.k + 1
    for n in range(2, bound + 1):
        p = int(spf[n])
        m, e = n, 0
        while m % p == 0:
            m //= p
            e += 1
        if m > 1:
            a[n] = a[n // m] * a[m]
            continue
        ap = int(es.ap[p])
        if es.N % p == 0:
            a[n] = ap**e
        elif e == 1:
            a[n] = ap
        else:
            a[n] = ap * a[n // p] - p**w * a[n // (p * p)]
    return a


# ------------------------------------------------------------------ curves


CURVES = {
    "11a1": (0, -1, 1, -10, -20),
    "37a1": (0, 0, 1, -1, 0),
}


def curve_ap(ainvs, p: int) -> int:
    """p + 1 - #E(F_p) by direct point counting."""
    a1, a2, a3, a4, a6 = ainvs
    x = np.arange(p, dtype=np.int64)
    if p == 2:
        count = 1
        for xx in range(2):
            for yy in range(2):
                lhs = yy * yy + a1 * xx * yy + a3 * yy
                rhs = xx**3 + a2 * xx * xx + a4 * xx + a6
                count += (lhs - rhs) % 2 == 0
        return p + 1 - count
    f = (((x * x % p) * x) + a2 * (x * x % p) + a4 * x + a6) % p
    h = (a1 * x + a3) % p
    disc = (h * h + 4 * f) % p
    chi = -np.ones(p, dtype=np.int64)
    chi[(x * x) % p] = 1
    chi[0] = 0
    count = 1 + int(np.sum(1 + chi[disc]))
    return p + 1 - count


def curve_system(label: str, eps: dict | None = None) -> EigenSystem:
    """The weight-2 system of a builtin curve, with a_p for p <= 50 and the
    Atkin-Lehner signs read off from the bad-prime coefficients."""
    ainvs = CURVES[label]
    N = {"11a1": 11, "37a1": 37}[label]
    if eps is None:
        eps = {p: -curve_ap(ainvs, p) for p in prime_divisors(N)}
    ap = {p: Fraction(curve_ap(ainvs, p)) for p in primes_up_to(50) if N % p}
    return EigenSystem(N, 0, ap, eps, label)


def curve_for(es: EigenSystem) -> str | None:
    """Label of a builtin curve whose a_p agree with ``es`` on every stored prime."""
    if es.k != 0:
        return None
    for label, ainvs in CURVES.items():
        ref = curve_system(label)
        if ref.N == es.N and all(curve_ap(ainvs, p) == v for p, v in es.ap.items() if es.N % p):
            return label
    return None


# ------------------------------------------------------------------ L-values


@dataclass(frozen=True)
class LValue:
    value: float
    error: float
    terms: int
    sign: int


def _g_kernel(x: np.ndarray, k: int) -> np.ndarray:
    s = np.ones_like(x)
    term = np.ones_like(x)
    for j in range(1, k + 1):
        term = term * x / j
        s = s + term
    return np.exp(-x) * s


def _tail_bound(n0: int, c: float, k: int) -> float:
    """Bound for 2 sum_{n > n0} d(n) n^{-1/2} G_k(c n), using d(n) <= 2 sqrt(n)."""
    n = n0 + 1
    first = 4.0 * float(_g_kernel(np.array([c * n]), k)[0])
    r = math.exp(-c) * (1 + 1 / n) ** k
    if r >= 1:
        return math.inf
    return first / (1 - r)


def _char_table(dK: int) -> np.ndarray:
    m = abs(dK)
    return np.array([kronecker(dK, r) for r in range(m)], dtype=np.float64)


def series_cutoff(es: EigenSystem, dK: int, precision: float, max_terms: int = 200000) -> int:
    """Number of terms after which the tail bound drops below precision / 2."""
    k = es.k
    c = 2 * math.pi / math.sqrt(es.N * dK * dK)
    n0 = max(10, int(math.ceil((k + 5) / c)))
    while _tail_bound(n0, c, k) > precision / 2:
        n0 = int(n0 * 1.25) + 1
        if n0 > max_terms:
            raise PrecisionUnreachable(f"precision {precision} needs more than {max_terms} terms for D={dK}")
    return n0


def twisted_central_value(es: EigenSystem, D, precision: float = 1e-8, *, coeffs=None, max_terms: int = 200000, cutoff: int | None = None) -> LValue:
    """L(1/2, g x chi_D) with a tail bound below ``precision``.

    ``coeffs`` may hold precomputed a_n (as returned by extend_coefficients);
    ``cutoff`` forces a fixed number of terms instead of the automatic one.
    """
    dK = fundamental_pair(as_fraction(D)).dK
    if math.gcd(dK, es.N) != 1:
        raise ValueError(f"dK={dK} is not prime to N={es.N}")
    s = es.twist_sign(dK)
    if s == -1:
        return LValue(0.0, 0.0, 0, -1)
    k = es.k
    c = 2 * math.pi / math.sqrt(es.N * dK * dK)
    n0 = cutoff if cutoff is not None else series_cutoff(es, dK, precision, max_terms)
    if coeffs is None or len(coeffs) <= n0:
        coeffs = extend_coefficients(es, n0)
    n = np.arange(1, n0 + 1, dtype=np.float64)
    a = np.array(coeffs[1 : n0 + 1], dtype=np.float64)
    chi = _char_table(dK)[np.arange(1, n0 + 1) % abs(dK)] if abs(dK) > 1 else np.ones(n0)
    terms = 2.0 * a * chi * n ** (-(k + 1.0)) * _g_kernel(c * n, k)
    value = math.fsum(terms.tolist())
    err = float(_tail_bound(n0, c, k) + n0 * np.finfo(float).eps * float(np.max(np.abs(terms))))
    if cutoff is None and err > precision:
        raise PrecisionUnreachable(f"error bound {err:.2e} exceeds the requested {precision:g} (double precision limit)")
    return LValue(value, err, n0, 1)


# ------------------------------------------------------------------ report


def permitted_discriminants(N: int, eps_g: dict, l, bound: int) -> list[tuple[int, Fraction]]:
    """Fundamental pairs (D, 1) with sgn(D) = -sgn(l), |D| <= bound, f(D) prime to
    2N f(l) and chi_D(p) = eps_g(p) at every p | N."""
    l = as_fraction(l)
    fl = abs(fundamental_pair(l).dK)
    out = []
    for d in fundamental_discriminants(bound, -sign(l)):
        if math.gcd(d, 2 * N) != 1 or math.gcd(d, fl) != 1:
            continue
        if all(kronecker(d, p) == eps_g[p] for p in prime_divisors(N)):
            out.append((d, Fraction(1)))
    return out


@dataclass
class RatioRow:
    D: int
    a: Fraction
    lam: Fraction
    L_l: float
    L_D: float
    error: float
    ratio: float | None
    deviation: float | None = None


@dataclass
class RatioReport:
    rows: list = field(default_factory=list)
    constancy: float | None = None
    zero_matches: list = field(default_factory=list)
    floor: float = 1e-8
    L_l: LValue | None = None

    @property
    def all_zero_match(self) -> bool:
        return all(self.zero_matches)

    def to_text(self) -> str:
        lines = ["D\ta\tlambda\tL_l\tL_D\tratio\tdeviation"]
        for r in self.rows:
            ratio = "" if r.ratio is None else f"{r.ratio:.12e}"
            dev = "" if r.deviation is None else f"{r.deviation:.3e}"
            lines.append(f"{r.D}\t{r.a}\t{r.lam}\t{r.L_l:.12e}\t{r.L_D:.12e}\t{ratio}\t{dev}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "constancy": self.constancy,
            "zero_matches": self.zero_matches,
            "floor": self.floor,
            "rows": [
                {"D": r.D, "a": str(r.a), "lambda": str(r.lam), "L_l": r.L_l, "L_D": r.L_D, "error": r.error, "ratio": r.ratio, "deviation": r.deviation}
                for r in self.rows
            ],
        }


def _lvalue_job(args):
    es, d, precision, coeffs = args
    return twisted_central_value(es, d, precision, coeffs=coeffs)


def waldspurger_report(table, es: EigenSystem, l, bound: int, precision: float = 1e-8, *, workers: int = 1) -> RatioReport:
    """ratio(D) = L(g x chi_l) L(g x chi_D) (-lD)^(k+1/2) / (N(ab) lambda(D)^2)
    over the permitted D with |D| <= bound.

    Rows with a twist of root number -1 (possible only in skew mode) carry
    no ratio."""
    assert M_K == 1 and H_F == 1
    l = as_fraction(l)
    cfg = table.config
    k = es.k
    dl = fundamental_pair(l).dK
    L_l = twisted_central_value(es, dl, precision)
    Ds = permitted_discriminants(es.N, es.eps, l, bound)
    n_max = max((series_cutoff(es, d, precision) for d, _ in Ds), default=0)
    coeffs = extend_coefficients(es, n_max) if Ds else None
    jobs = [(es, d, precision, coeffs) for d, _ in Ds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            vals = list(ex.map(_lvalue_job, jobs, chunksize=8))
    else:
        vals = [_lvalue_job(j) for j in jobs]
    report = RatioReport(floor=precision, L_l=L_l)
    nonzero = [abs(v.value) for v in vals if abs(v.value) > precision]
    if nonzero and max(v.error for v in vals) > 0.01 * min(nonzero):
        raise InsufficientPrecision("L-value errors exceed 1% of the smallest nonzero value")
    for (d, a), v in zip(Ds, vals):
        if v.sign == -1 and not cfg.skew:
            raise VerificationFailure(f"permitted D={d} has twist sign -1")
        lam = table.get(Fraction(d), a)
        ratio = None
        if lam != 0 and abs(v.value) > precision and abs(L_l.value) > precision:
            delta = -l * d
            ratio = L_l.value * v.value * float(delta) ** (k + 0.5) / (float(a * cfg.b) * float(lam) ** 2)
        report.rows.append(RatioRow(d, a, lam, L_l.value, v.value, v.error, ratio))
        report.zero_matches.append((lam == 0) == (abs(v.value) <= precision))
    ratios = [r.ratio for r in report.rows if r.ratio is not None]
    if ratios:
        ref = float(np.median(ratios))
        for r in report.rows:
            if r.ratio is not None:
                r.deviation = r.ratio / ref - 1
        report.constancy = (max(ratios) - min(ratios)) / abs(ref)
    return report
