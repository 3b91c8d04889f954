"""Exact check of the three-term Hecke relation on theta coefficients,
for eigenforms and random forms, in weight k.

    python scripts/run_hecke.py --N 11 --l 1 --primes 3,7,13 --bound 400
    python scripts/run_hecke.py --N 11 --l -7 --eps 11:-1 --k 1 --bound 60
"""
from __future__ import annotations

import argparse
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from quatlift.arith import fundamental_pair
from quatlift.brandt import brandt_matrix, eigenforms, eigenvalue, form_space, harmonic_space
from quatlift.config import _parse_map
from quatlift.quatalg import order_for_level, right_ideal_classes, sigma_l
from quatlift.thetalift import hecke_identity_check, lift, make_config, theta_data
from quatlift.weightfn import adelic_weight, ternary_lattice


@dataclass
class HeckeRun:
    N: int = 11
    l: Fraction = Fraction(1)
    eps: dict = field(default_factory=lambda: {11: -1})
    k: int = 0
    primes: tuple = (3, 7, 13)
    bound: int = 400
    random_forms: int = 2
    seed: int = 0


def run(cfg: HeckeRun) -> list[tuple]:
    lc = make_config(cfg.l, cfg.N, cfg.eps, cfg.k)
    R = order_for_level(cfg.N, sigma_l(cfg.N, cfg.eps, cfg.l))
    cls = right_ideal_classes(R)
    V = harmonic_space(cfg.k, cls.algebra.delta_gram())
    S = form_space(cls, V)
    w = adelic_weight(ternary_lattice(R), cfg.l)
    pmax = max(cfg.primes)
    t0 = time.perf_counter()
    data = theta_data(cls, w, cfg.k, abs(fundamental_pair(cfg.l).dK) * cfg.bound * pmax * pmax)
    print(f"N={cfg.N} l={cfg.l} k={cfg.k} h={cls.h} dim M_k={S.dim}; enumeration {time.perf_counter() - t0:.1f}s")
    rng = random.Random(cfg.seed)
    forms = [(f"random{i}", S.unfold([Fraction(rng.randint(-5, 5)) for _ in range(S.dim)]), None) for i in range(cfg.random_forms)]
    if S.dim:
        efs, _ = eigenforms(S, [p for p in (2, 3, 5, 7) if cfg.N % p][:2])
        forms += [(f"eigen{i}", ef.form, ef) for i, ef in enumerate(efs)]
    rows = []
    bad = 2 * cfg.N * abs(fundamental_pair(cfg.l).dK)
    for p in cfg.primes:
        if bad % p == 0:
            print(f"p={p} divides 2N f(l); skipped")
            continue
        T = brandt_matrix(S, p)
        for name, form, ef in forms:
            ap = eigenvalue(S, ef, p) if ef is not None else None
            tab = lift(form, data, V, lc, cfg.bound * p * p)
            tab_p = lift(T.apply(form), data, V, lc, cfg.bound)
            ok = hecke_identity_check(tab_p, tab, p, cfg.bound, eigenvalue=ap)
            rows.append((p, name, ap, len(tab_p.nonzero()), ok))
            print(f"p={p:<3d} {name:<8s} a_p={'' if ap is None else ap!s:<4s} nonzero={len(tab_p.nonzero()):<5d} {'ok' if ok else 'FAILED'}")
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description="Hecke relation sweep")
    ap.add_argument("--N", type=int, default=11)
    ap.add_argument("--l", type=Fraction, default=Fraction(1))
    ap.add_argument("--eps", type=_parse_map, default=None)
    ap.add_argument("--k", type=int, default=0)
    ap.add_argument("--primes", default="3,7,13")
    ap.add_argument("--bound", type=int, default=400)
    ap.add_argument("--random-forms", type=int, default=2)
    ns = ap.parse_args(argv)
    eps = ns.eps or {ns.N: -1 if ns.N == 11 else 1}
    cfg = HeckeRun(ns.N, ns.l, eps, ns.k, tuple(int(p) for p in ns.primes.split(",")), ns.bound, ns.random_forms)
    rows = run(cfg)
    raise SystemExit(0 if all(r[-1] for r in rows) else 1)


if __name__ == "__main__":
    main()
