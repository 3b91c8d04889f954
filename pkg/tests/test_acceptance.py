"""Acceptance criteria 1-10.

Run under pytest (one line per criterion is printed in the terminal summary)
or directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from math import gcd
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE, _level, brute_curve_ap  # noqa: E402

from quatlift.arith import conductor, fundamental_discriminants, fundamental_pair, is_discriminant_pair, is_fundamental_pair, primes_up_to  # noqa: E402
from quatlift.brandt import brandt_matrix, eigenvalue  # noqa: E402
from quatlift.cache import Cache  # noqa: E402
from quatlift.config import RunConfig  # noqa: E402
from quatlift.errors import HypothesisViolation  # noqa: E402
from quatlift.lvalues import CURVES  # noqa: E402
from quatlift.pipeline import build_context, run_verify  # noqa: E402
from quatlift.quatalg import eichler_mass, order_for_level, right_ideal_classes, sigma_l  # noqa: E402
from quatlift.specialpts import count_law_holds, eta_pairing  # noqa: E402
from quatlift.thetalift import hecke_identity_check, lift, theta_coefficient  # noqa: E402
from quatlift.weightfn import build_local_weight, check_axioms, ternary_lattice  # noqa: E402

D_MAX = 400 * 169


def levels():
    return _level(11, 1, D_MAX), _level(37, 5, D_MAX)


def criterion_1():
    worst = 0.0
    for N, S in [(2, {2}), (3, {3}), (11, {11}), (37, {37}), (6, {2}), (6, {3})]:
        t0 = time.perf_counter()
        R = order_for_level(N, S)
        cls = right_ideal_classes(R)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        if cls.mass != eichler_mass(R) or dt >= 10:
            return False, f"N={N}: mass {cls.mass} vs {eichler_mass(R)} in {dt:.1f}s"
    return True, f"6 orders exact, slowest {worst:.2f}s"


def criterion_2():
    checked = 0
    for lv, label in zip(levels(), ("11a1", "37a1")):
        want = {p: brute_curve_ap(CURVES[label], p) for p in primes_up_to(50) if lv.N % p}
        hits = [ef for ef in lv.eigen if all(eigenvalue(lv.space, ef, p) == v for p, v in want.items())]
        if len(hits) != 1:
            return False, f"level {lv.N}: {len(hits)} matching eigenforms"
        checked += len(want)
    return True, f"{checked} eigenvalues equal to point counts"


def criterion_3():
    total = 0
    for N in (11, 37):
        L = ternary_lattice(order_for_level(N, {N}))
        for p in (3, 5, 7, 13):
            tab = build_local_weight(L, p)
            viol = sum(check_axioms(L, tab, n_rotations=200).values())
            neg = int(np.flatnonzero(tab.values == -1)[0])
            flipped = build_local_weight(L, p, seed=neg).values
            if viol or not np.array_equal(flipped, -tab.values):
                return False, f"N={N} p={p}: {viol} violations, seed flip global={np.array_equal(flipped, -tab.values)}"
            total += 1
    return True, f"{total} tables, zero violations, seed flip = global sign"


def criterion_4():
    tables = 0
    for lv in levels():
        forms = [e.form for e in lv.eigen] + [lv.random_form(s) for s in range(3)]
        for f in forms:
            tab = lift(f, lv.data, lv.V, lv.config, 2000)
            tables += 1
            if not tab.plus_space_ok() or any(not is_discriminant_pair(*key) for key in tab.nonzero()):
                return False, "plus-space violation"
    rng = random.Random(2024)
    pairs = 0
    ls = [Fraction(1), Fraction(5), Fraction(-7, 4), Fraction(-3), Fraction(13, 9)]
    while pairs < 500:
        D = Fraction(rng.choice([-1, 1]) * rng.randint(1, 400), rng.randint(1, 40))
        l = rng.choice(ls)
        if gcd(conductor(D), conductor(l)) != 1:
            continue
        a = fundamental_pair(D).a * Fraction(rng.randint(1, 4), rng.randint(1, 3))
        b = fundamental_pair(l).a
        if is_fundamental_pair(D, a) != is_fundamental_pair(l * D, a * b):
            return False, f"transfer fails at D={D}, a={a}, l={l}"
        pairs += 1
    return True, f"{tables} tables supported on discriminants, {pairs} transfer pairs"


def criterion_5():
    checked = 0
    for lv in levels():
        forms = [e.form for e in lv.eigen] + [lv.random_form(9)]
        for form in forms:
            for d in fundamental_discriminants(100, -lv.config.u):
                for a in (Fraction(1), Fraction(2), Fraction(1, 3)):
                    D = Fraction(d) / (a * a)
                    lam = theta_coefficient(form, lv.data, lv.V, lv.config, D, a)
                    eta = eta_pairing(form, D, a, lv.data, lv.V, lv.weight, lv.config)
                    if a * lam != eta:
                        return False, f"N={lv.N} D={D} a={a}: {a * lam} != {eta}"
                    checked += 1
    return True, f"{checked} exact agreements"


def criterion_6():
    checked = 0
    for lv in levels():
        for p in (3, 7, 13):
            T = brandt_matrix(lv.space, p)
            forms = [(ef.form, eigenvalue(lv.space, ef, p)) for ef in lv.eigen] + [(lv.random_form(7), None)]
            for form, ap in forms:
                tab = lift(form, lv.data, lv.V, lv.config, 400 * p * p)
                tab_p = lift(T.apply(form), lv.data, lv.V, lv.config, 400)
                if not hecke_identity_check(tab_p, tab, p, 400, eigenvalue=ap):
                    return False, f"N={lv.N} p={p} fails"
                checked += 1
    return True, f"{checked} (level, p, form) cases exact up to |dK| <= 400"


def criterion_7():
    counts = []
    for lv in levels():
        ds = [d for d in fundamental_discriminants(200, -1) if d % lv.N][:30]
        for d in ds:
            holds, n, expected = count_law_holds(lv.classes, d)
            if not holds:
                return False, f"N={lv.N} d={d}: {n} points, expected 0 or {expected}"
            counts.append(n)
    return True, f"{len(counts)} discriminants, {sum(c > 0 for c in counts)} nonempty"


def _verify(**kw):
    cfg = RunConfig()
    cfg.update({k: str(v) for k, v in kw.items()})
    t0 = time.perf_counter()
    res = run_verify(build_context(cfg), Cache(None))
    return res, time.perf_counter() - t0


def criterion_8():
    res, dt = _verify(N=11, l=1, D_bound=200, precision=1e-8)
    rep = res.report
    ok = res.status == "PASS" and rep.constancy < 1e-6 and rep.all_zero_match and dt < 300
    n = sum(r.ratio is not None for r in rep.rows)
    return ok, f"deviation {rep.constancy:.2e} over {n} rows, zero-matching {sum(rep.zero_matches)}/{len(rep.rows)}, {dt:.1f}s"


def criterion_9():
    sigma_l(37, {37: 1}, 5)  # Hl1
    res, dt = _verify(N=37, l=5, D_bound=200, precision=1e-8, tolerance=1e-5)
    rep = res.report
    nz = len(res.table.nonzero())
    ok = (
        res.status == "PASS"
        and abs(res.L_l) > 1e-8
        and nz > 0
        and rep.constancy is not None
        and rep.constancy < 1e-5
        and dt < 600
    )
    detail = f"L(g x chi_5) = {res.L_l:.6f}, {nz} nonzero lambda, deviation {rep.constancy:.2e}, {dt:.1f}s"
    return ok, detail


def criterion_10():
    try:
        build_context(RunConfig(N=11, l=Fraction(-3), skew=True))
        stated = "l=-3 accepted"
    except HypothesisViolation as exc:
        stated = f"l=-3 rejected ({type(exc).__name__})"
    res, dt = _verify(N=11, l=-7, skew=True, D_bound=200, precision=1e-8)
    plus = res.table.plus_space_ok()
    c = res.report.constancy
    dev = "undefined" if c is None else f"{c:.2e}"
    detail = f"{stated}; substitute l=-7: plus-space {plus}, {len(res.table.nonzero())} nonzero lambda, deviation {dev}"
    if not plus:
        return False, detail
    return ("PASS" if c is not None and c < 1e-4 else "WARN"), detail


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def evaluate(n: int) -> str:
    t0 = time.perf_counter()
    ok, detail = CRITERIA[n - 1]()
    status = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
    line = f"criterion {n}: {status} ({detail}) [{time.perf_counter() - t0:.1f}s]"
    print(line)
    ACCEPTANCE.append(line)
    return status


def test_criterion_1():
    assert evaluate(1) == "PASS"


def test_criterion_2():
    assert evaluate(2) == "PASS"


def test_criterion_3():
    assert evaluate(3) == "PASS"


def test_criterion_4():
    assert evaluate(4) == "PASS"


def test_criterion_5():
    assert evaluate(5) == "PASS"


def test_criterion_6():
    assert evaluate(6) == "PASS"


def test_criterion_7():
    assert evaluate(7) == "PASS"


def test_criterion_8():
    assert evaluate(8) == "PASS"


def test_criterion_9():
    assert evaluate(9) == "PASS"


def test_criterion_10():
    # optional-pass: a warning is an accepted outcome
    assert evaluate(10) in ("PASS", "WARN")


if __name__ == "__main__":
    results = [evaluate(n) for n in range(1, len(CRITERIA) + 1)]
    sys.exit(0 if "FAIL" not in results else 1)
