"""Weight-function axioms and special-point counts on the test levels.

    python scripts/run_local_checks.py --levels 11,37 --primes 3,5,7,13 --discs 30
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from quatlift.arith import fundamental_discriminants
from quatlift.quatalg import order_for_level, right_ideal_classes
from quatlift.specialpts import count_law_holds
from quatlift.weightfn import build_local_weight, check_axioms, ternary_lattice


@dataclass
class LocalChecks:
    levels: tuple = (11, 37)
    primes: tuple = (3, 5, 7, 13)
    discs: int = 30
    rotations: int = 200


def weight_rows(cfg: LocalChecks):
    for N in cfg.levels:
        L = ternary_lattice(order_for_level(N, {N}))
        for p in cfg.primes:
            if N % p == 0:
                continue
            tab = build_local_weight(L, p)
            viol = check_axioms(L, tab, n_rotations=cfg.rotations)
            neg = int(np.flatnonzero(tab.values == -1)[0])
            flip = np.array_equal(build_local_weight(L, p, seed=neg).values, -tab.values)
            yield N, p, int(np.count_nonzero(tab.values)), viol, flip


def count_rows(cfg: LocalChecks):
    for N in cfg.levels:
        cls = right_ideal_classes(order_for_level(N, {N}))
        ds = [d for d in fundamental_discriminants(10 * cfg.discs, -1) if d % N][: cfg.discs]
        for d in ds:
            yield (N, d) + count_law_holds(cls, d)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", default="11,37")
    ap.add_argument("--primes", default="3,5,7,13")
    ap.add_argument("--discs", type=int, default=30)
    ns = ap.parse_args(argv)
    cfg = LocalChecks(tuple(map(int, ns.levels.split(","))), tuple(map(int, ns.primes.split(","))), ns.discs)
    failures = 0
    print("N\tp\tsupport\tviolations\tseed_flip")
    for N, p, support, viol, flip in weight_rows(cfg):
        failures += sum(viol.values()) + (not flip)
        print(f"{N}\t{p}\t{support}\t{sum(viol.values())}\t{'global sign' if flip else 'MISMATCH'}")
    print("\nN\tDelta\tpoints\texpected\tok")
    for N, d, ok, n, expected in count_rows(cfg):
        failures += not ok
        print(f"{N}\t{d}\t{n}\t0|{expected}\t{ok}")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
