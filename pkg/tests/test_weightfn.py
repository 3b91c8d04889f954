from fractions import Fraction

import numpy as np
import pytest

from quatlift.arith import legendre
from quatlift.quatalg import order_for_level
from quatlift.weightfn import (
    adelic_weight,
    build_local_weight,
    check_axioms,
    eval_weight,
    lattice_level,
    ternary_lattice,
    weight_character,
)

PRIMES = [3, 5, 7, 13]


@pytest.fixture(scope="module", params=[11, 37])
def lattice(request):
    return ternary_lattice(order_for_level(request.param, {request.param}))


def test_lattice_level(lattice):
    assert lattice.level in (11, 37)
    assert lattice_level(lattice.gram) == lattice.level
    # Delta is negative definite and 2*Delta is integral
    assert all(lattice.delta(e) < 0 for e in ([1, 0, 0], [0, 1, 0], [0, 0, 1]))
    assert lattice.gram2.dtype == np.int64


def _brute_axioms(L, tab):
    """Direct loops over L/pL for support, nonvanishing and scalar behaviour."""
    p = tab.p
    bad = 0
    for a in range(p):
        for b in range(p):
            for c in range(p):
                q = L.delta([a, b, c]) % p
                v = tab((a, b, c))
                if q != 0 and v != 0:
                    bad += 1
                if q == 0 and (a, b, c) != (0, 0, 0) and v == 0:
                    bad += 1
                for s in range(1, p):
                    if tab((s * a, s * b, s * c)) != legendre(s, p) * v:
                        bad += 1
    return bad


@pytest.mark.parametrize("p", PRIMES)
def test_axioms_exhaustive(lattice, p):
    tab = build_local_weight(lattice, p)
    viol = check_axioms(lattice, tab, n_rotations=300)
    assert viol == {"support": 0, "nonvanishing": 0, "scalar": 0, "rotation": 0}
    if p <= 7:
        assert _brute_axioms(lattice, tab) == 0


@pytest.mark.parametrize("p", PRIMES)
def test_seed_flip_is_global_sign(lattice, p):
    tab = build_local_weight(lattice, p)
    neg = int(np.flatnonzero(tab.values == -1)[0])
    pos = int(np.flatnonzero(tab.values == 1)[-1])
    assert np.array_equal(build_local_weight(lattice, p, seed=neg).values, -tab.values)
    assert np.array_equal(build_local_weight(lattice, p, seed=pos).values, tab.values)


def test_broken_table_is_detected(lattice):
    tab = build_local_weight(lattice, 5)
    i = int(np.flatnonzero(tab.values)[3])
    tab.values[i] = -tab.values[i]
    viol = check_axioms(lattice, tab)
    assert viol["scalar"] > 0 or viol["rotation"] > 0


def test_rejects_level_prime(lattice):
    with pytest.raises(ValueError):
        build_local_weight(lattice, lattice.level)
    with pytest.raises(ValueError):
        build_local_weight(lattice, 2)


def test_adelic_weight(lattice):
    w = adelic_weight(lattice, 5)
    assert w.dK == 5 and w.conductor == 5 and set(w.tables) == {5}
    w1 = adelic_weight(lattice, 1)
    assert w1.tables == {} and eval_weight(w1, [1, 2, 3]) == 1
    # non-integral point gets weight zero
    assert eval_weight(w, [Fraction(1, 2), 0, 0]) == 0
    assert weight_character(w, Fraction(2, 3)) == legendre(2, 5) * legendre(3, 5)
    w3 = adelic_weight(lattice, Fraction(-7, 4))
    assert w3.dK == -7 and w3.b == 2
