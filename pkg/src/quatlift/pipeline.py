"""End-to-end pipeline shared by the command line and the experiment scripts."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arith import fundamental_pair, prime_divisors, primes_up_to
from .brandt import FormSpace, HarmonicSpace, al_sign, eigenforms, form_space, harmonic_space
from .brandt import eigenvalue as hecke_eigenvalue
from .brandt import hecke_primes
from .cache import Cache
from .config import RunConfig
from .errors import MissingPrime, MassMismatch, NotEigen, ScopeError
from .lvalues import CURVES, EigenSystem, RatioReport, curve_ap, curve_system, series_cutoff, twisted_central_value, waldspurger_report
from .quatalg import IdealClassSet, atkin_lehner, eichler_mass, order_for_level, right_ideal_classes, sigma_l
from .thetalift import CoefficientTable, LiftConfig, lift, make_config, theta_data
from .weightfn import AdelicWeight, adelic_weight, ternary_lattice

log = logging.getLogger(__name__)

CURVE_LEVELS = {11: "11a1", 37: "37a1"}


def default_eps(cfg: RunConfig) -> dict:
    if cfg.eps_g:
        return dict(cfg.eps_g)
    label = CURVE_LEVELS.get(cfg.N)
    if label is not None and cfg.k == 0:
        return dict(curve_system(label).eps)
    raise ScopeError(f"eps_g must be given for N={cfg.N}")


def ramification(cfg: RunConfig) -> frozenset:
    """Finite ramification for the order-level commands (classes, eigen):
    the explicit list, else every prime dividing N."""
    if cfg.ramified:
        return frozenset(cfg.ramified)
    ps = prime_divisors(cfg.N)
    if len(ps) % 2 == 0:
        raise ScopeError(f"N={cfg.N} has an even number of prime factors; give the ramified primes")
    return frozenset(ps)


@dataclass
class ClassSummary:
    N: int
    ramified: tuple
    h: int
    t: list
    mass: Fraction
    expected_mass: Fraction

    def to_text(self) -> str:
        return (
            f"N={self.N} ramified={','.join(map(str, self.ramified))} "
            f"h={self.h} mass={self.mass} t={' '.join(map(str, self.t))}\n"
        )


def class_summary(N: int, ramified) -> tuple[ClassSummary, IdealClassSet]:
    R = order_for_level(N, frozenset(ramified))
    cls = right_ideal_classes(R)
    want = eichler_mass(R)
    if cls.mass != want:
        raise MassMismatch(f"mass {cls.mass} != {want}")
    return ClassSummary(N, tuple(sorted(ramified)), cls.h, list(cls.unit_orders), cls.mass, want), cls


@dataclass
class Context:
    cfg: RunConfig
    eps: dict
    lift_config: LiftConfig
    ramified: frozenset
    classes: IdealClassSet
    V: HarmonicSpace
    space: FormSpace
    _weight: AdelicWeight | None = field(default=None, repr=False)

    @property
    def weight(self) -> AdelicWeight:
        if self._weight is None:
            self._weight = adelic_weight(ternary_lattice(self.classes.order), self.cfg.l)
        return self._weight


def build_space(N: int, ramified, k: int):
    _, cls = class_summary(N, ramified)
    V = harmonic_space(k, cls.algebra.delta_gram())
    return cls, V, form_space(cls, V)


def build_context(cfg: RunConfig) -> Context:
    """Validate Hl1/Hl2 first, then build the class set and form space."""
    eps = default_eps(cfg)
    lc = make_config(cfg.l, cfg.N, eps, cfg.k, cfg.skew)
    S = sigma_l(cfg.N, eps, cfg.l)
    cls, V, space = build_space(cfg.N, S, cfg.k)
    return Context(cfg, eps, lc, S, cls, V, space)


# ------------------------------------------------------------------ eigen


@dataclass
class EigenEntry:
    coords: list
    form: list
    ap: dict
    al: dict

    def to_text(self) -> str:
        ap = " ".join(f"a{p}={v}" for p, v in sorted(self.ap.items()))
        al = " ".join(f"w{p}={s:+d}" for p, s in sorted(self.al.items()))
        return f"{ap} {al}".strip()


def eigen_listing(cls: IdealClassSet, space: FormSpace, N: int, prime_bound: int) -> tuple[list[EigenEntry], int]:
    split_primes = hecke_primes(N, 7) or hecke_primes(N, 13)
    efs, skipped = eigenforms(space, split_primes)
    out = []
    R = cls.order
    als = [atkin_lehner(R, cls, p) for p in prime_divisors(N)]
    for ef in efs:
        ap = {p: hecke_eigenvalue(space, ef, p) for p in hecke_primes(N, prime_bound)}
        al = {a.p: al_sign(space, ef.coords, a) for a in als}
        out.append(EigenEntry(ef.coords, ef.form, ap, al))
    return out, skipped


def target_system(ctx: Context) -> EigenSystem | None:
    """The system g: a builtin curve for k = 0 at levels 11 and 37, or the
    contents of ``ap_file``."""
    cfg = ctx.cfg
    if cfg.ap_file is not None:
        ap = {}
        for line in Path(cfg.ap_file).read_text().splitlines():
            line = line.split("#", 1)[0].split()
            if len(line) == 2:
                ap[int(line[0])] = Fraction(line[1])
        return EigenSystem(cfg.N, cfg.k, ap, dict(ctx.eps), str(cfg.ap_file))
    label = CURVE_LEVELS.get(cfg.N)
    if label is None or cfg.k != 0:
        return None
    es = curve_system(label)
    if es.eps != ctx.eps:
        return None
    return es


def target_form(ctx: Context, es: EigenSystem | None, entries: list[EigenEntry]) -> EigenEntry:
    expected = dict(ctx.cfg.ap)
    if not expected and es is not None:
        expected = {p: v for p, v in es.ap.items() if ctx.cfg.N % p and p <= ctx.cfg.prime_bound}
    if expected:
        hits = [e for e in entries if all(e.ap.get(p, v) == v for p, v in expected.items())]
    else:
        hits = entries
    if len(hits) != 1:
        raise NotEigen(f"{len(hits)} rational eigenforms match the requested system")
    return hits[0]


def check_against_system(entry: EigenEntry, es: EigenSystem) -> list[int]:
    """Primes where the Brandt eigenvalue differs from the reference."""
    return [p for p, v in entry.ap.items() if p in es.ap and es.ap[p] != v]


# ------------------------------------------------------------------ lift


def lift_request(ctx: Context, form_coords, D_bound: int) -> dict:
    cfg = ctx.cfg
    return {
        "kind": "lift",
        "version": __version__,
        "N": cfg.N,
        "ramified": sorted(ctx.ramified),
        "eps": {str(p): v for p, v in sorted(ctx.eps.items())},
        "config": ctx.lift_config.header(),
        "D_bound": D_bound,
        "form": [str(x) for x in form_coords],
    }


def lift_table(ctx: Context, entry: EigenEntry, D_bound: int, cache: Cache | None = None) -> CoefficientTable:
    req = lift_request(ctx, entry.coords, D_bound)
    if cache is not None:
        hit = cache.get(req)
        if hit is not None:
            return CoefficientTable.from_text(hit)
    w = ctx.weight
    T = abs(fundamental_pair(ctx.cfg.l).dK) * D_bound
    data = theta_data(ctx.classes, w, ctx.cfg.k, T, workers=ctx.cfg.n_workers)
    table = lift(entry.form, data, ctx.V, ctx.lift_config, D_bound)
    if cache is not None:
        cache.put(req, table.to_text())
    return table


# ------------------------------------------------------------------ verify


@dataclass
class VerifyResult:
    report: RatioReport
    table: CoefficientTable
    L_l: float
    checks: dict
    status: str  # PASS, FAIL or WARN

    def summary(self) -> str:
        lines = [f"L(g x chi_l) = {self.L_l:.12e}"]
        for name, (ok, detail) in self.checks.items():
            lines.append(f"{name}: {'ok' if ok else 'FAILED'} {detail}".rstrip())
        lines.append(f"status: {self.status}")
        return "\n".join(lines) + "\n"


def coefficient_bound(es: EigenSystem, D_bound: int, precision: float) -> int:
    return series_cutoff(es, D_bound, precision)


def complete_system(es: EigenSystem, D_bound: int, precision: float = 1e-8) -> EigenSystem:
    """Fill a_p for large p from the builtin curve when there is one."""
    need = coefficient_bound(es, D_bound, precision)
    label = es.label if es.label in CURVES else None
    if label is None:
        missing = [p for p in primes_up_to(need) if p not in es.ap]
        if missing:
            raise MissingPrime(f"a_p needed up to {need}; first missing prime {missing[0]}")
        return es
    return es.with_primes(lambda p: curve_ap(CURVES[label], p), need)


def run_verify(ctx: Context, cache: Cache | None = None) -> VerifyResult:
    cfg = ctx.cfg
    es = target_system(ctx)
    if es is None:
        raise MissingPrime("verify needs a builtin curve (k = 0, N in {11, 37}) or an ap_file")
    entries, _ = eigen_listing(ctx.classes, ctx.space, cfg.N, cfg.prime_bound)
    entry = target_form(ctx, es, entries)
    checks = {}
    bad = check_against_system(entry, es)
    checks["eigenvalues"] = (not bad, f"mismatch at {bad}" if bad else f"{len(entry.ap)} primes")
    dl = fundamental_pair(cfg.l).dK
    es = complete_system(es, max(cfg.D_bound, abs(dl)), cfg.precision)
    L_l = twisted_central_value(es, dl, cfg.precision)
    table = lift_table(ctx, entry, cfg.D_bound, cache)
    report = waldspurger_report(table, es, cfg.l, cfg.D_bound, cfg.precision, workers=cfg.n_workers)
    checks["plus_space"] = (table.plus_space_ok(), "")
    checks["zero_matching"] = (report.all_zero_match, f"{sum(report.zero_matches)}/{len(report.zero_matches)} rows")
    nz = len(table.nonzero())
    if not cfg.skew and abs(L_l.value) > cfg.precision:
        checks["nonvanishing"] = (nz > 0, f"{nz} nonzero coefficients")
    if report.constancy is None:
        checks["constancy"] = (False, "undefined (no row with lambda != 0 and L != 0)")
    else:
        checks["constancy"] = (report.constancy < cfg.threshold, f"{report.constancy:.3e} < {cfg.threshold:g}")
    ok = all(v[0] for v in checks.values())
    status = "PASS" if ok else ("WARN" if cfg.skew else "FAIL")
    return VerifyResult(report, table, L_l.value, checks, status)
