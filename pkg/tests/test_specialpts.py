import random
from fractions import Fraction

import pytest

from quatlift import poly
from quatlift.arith import fundamental_discriminants, fundamental_pair, kronecker
from quatlift.brandt import harmonic_space
from quatlift.errors import SingularGram
from quatlift.specialpts import (
    BinaryForm,
    count_law_holds,
    eta_pairing,
    gegenbauer_kernel,
    genus_character,
    quad_field,
    reduced_forms,
    special_points,
)
from quatlift.thetalift import theta_coefficient


def class_number_oracle(d):
    """Analytic class number formula for d < 0."""
    w = 6 if d == -3 else 4 if d == -4 else 2
    s = sum(a * kronecker(d, a) for a in range(1, abs(d)))
    return Fraction(-w * s, 2 * abs(d))


def test_quad_field_examples():
    Q = quad_field(-7)
    assert (Q.dK, Q.hK, Q.tK) == (-7, 1, 1)
    assert quad_field(-23).hK == 3
    assert quad_field(Fraction(-20, 9)).dK == -20
    assert quad_field(-3).tK == 3 and quad_field(-4).tK == 2
    with pytest.raises(ValueError):
        quad_field(5)


def test_class_numbers_against_formula():
    for d in fundamental_discriminants(500, -1):
        assert quad_field(d).hK == class_number_oracle(d), d


def test_reduction_is_idempotent_and_preserves_disc():
    rng = random.Random(0)
    for _ in range(200):
        a, c = rng.randint(1, 60), rng.randint(1, 60)
        b = rng.randint(-60, 60)
        F = BinaryForm(a, b, c)
        if F.disc >= 0:
            continue
        R = F.reduce()
        assert R.disc == F.disc and R.reduce() == R
        assert abs(R.b) <= R.a <= R.c


def test_genus_character_trivial_for_l_one():
    Q = quad_field(-56)
    assert set(genus_character(Q, 1).values()) == {1}


def test_genus_character_is_a_character():
    d = -455  # 5 * (-91)
    Q = quad_field(d)
    xi = genus_character(Q, 5)
    principal = reduced_forms(d)[0]
    assert principal == BinaryForm(1, 1, 114)
    assert xi[principal] == 1
    assert set(xi.values()) == {1, -1}
    rng = random.Random(1)
    forms = list(Q.form_classes)
    for _ in range(50):
        F, G = rng.choice(forms), rng.choice(forms)
        H = F.compose(G)
        assert H.disc == d
        assert xi[H] == xi[F] * xi[G]


@pytest.mark.parametrize("k", [0, 1, 2])
def test_gegenbauer_reproducing(level11, k):
    V = harmonic_space(k, level11.classes.algebra.delta_gram())
    omega = (Fraction(1), Fraction(2), Fraction(-1))
    ker = gegenbauer_kernel(V, omega, -1)
    rng = random.Random(k)
    for _ in range(5):
        c = [Fraction(rng.randint(-4, 4)) for _ in range(V.dim)]
        assert V.pair(c, ker) == -poly.evaluate(V.poly_of(c), omega)
    if k == 0:
        assert ker == [Fraction(-1)]


def test_gegenbauer_singular():
    V = harmonic_space(1, [[-1, 0, 0], [0, -1, 0], [0, 0, -1]])
    V.inner = [[Fraction(0)] * 3 for _ in range(3)]
    with pytest.raises(SingularGram):
        gegenbauer_kernel(V, (1, 0, 0), 1)


def _thirty(N):
    return [d for d in fundamental_discriminants(200, -1) if d % N][:30]


@pytest.mark.parametrize("name", ["level11", "level37"])
def test_count_law(name, request):
    lv = request.getfixturevalue(name)
    ds = _thirty(lv.N)
    assert len(ds) == 30
    nonempty = 0
    for d in ds:
        holds, count, expected = count_law_holds(lv.classes, d)
        assert holds, (d, count, expected)
        nonempty += count > 0
    assert nonempty > 0


def test_count_examples(level11):
    # 11 is inert in Q(sqrt -3), Q(i), Q(sqrt -23) and splits in Q(sqrt -7)
    assert count_law_holds(level11.classes, -3)[1] == 2
    assert count_law_holds(level11.classes, -4)[1] == 2
    assert count_law_holds(level11.classes, -23)[1:] == (6, 6)
    assert count_law_holds(level11.classes, -7)[1:] == (0, 2)
    assert special_points(level11.classes, Fraction(-1, 3), 1) == []


def _pairs(lv):
    """All fundamental (D, a) with |D a^2| <= 100 and sgn(D) = -sgn(l)."""
    out = []
    for d in fundamental_discriminants(100, -lv.config.u):
        for a in (Fraction(1), Fraction(2), Fraction(1, 3)):
            D = Fraction(d) / (a * a)
            assert fundamental_pair(D).a == a
            out.append((D, a))
    return out


@pytest.mark.parametrize("name", ["level11", "level37"])
def test_cross_path_identity(name, request):
    lv = request.getfixturevalue(name)
    forms = [e.form for e in lv.eigen] + [lv.random_form(9)]
    for form in forms:
        for D, a in _pairs(lv):
            lam = theta_coefficient(form, lv.data, lv.V, lv.config, D, a)
            eta = eta_pairing(form, D, a, lv.data, lv.V, lv.weight, lv.config)
            assert a * lam == eta, (D, a)


def test_embedding_choice_irrelevant(level37):
    lv = level37
    form = lv.random_form(4)
    for D, a in _pairs(lv)[:40]:
        first = eta_pairing(form, D, a, lv.data, lv.V, lv.weight, lv.config)
        assert eta_pairing(form, D, a, lv.data, lv.V, lv.weight, lv.config, pick="max") == first
