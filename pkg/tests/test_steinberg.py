import random
from fractions import Fraction
from itertools import product

import pytest

from stabletrace.exactalg import LaurentPoly, evaluate
from stabletrace.rootdata import build, weyl_discriminant
from stabletrace.steinberg import (base_discriminant, char_map, express_in_base, pullback,
                                   sl2_chart, verify_hc1)

A1, A2 = build("A1"), build("A2")


def test_char_map_examples():
    assert char_map(A1, (1,)).coords == (2,)
    assert char_map(A1, (-1,)).coords == (-2,)
    assert char_map(A2, (1, 1)).coords == (3, 3)


def test_base_discriminant_examples():
    d1 = base_discriminant(A1)
    assert str(d1) == "b^2 - 4"
    d2 = base_discriminant(A2)
    assert d2.at((3, 3)) == 0
    b1, b2 = LaurentPoly.variable(1, 2), LaurentPoly.variable(2, 2)
    classical = b1 ** 2 * b2 ** 2 - 4 * b1 ** 3 - 4 * b2 ** 3 + 18 * b1 * b2 - 27
    assert d2.poly == classical


@pytest.mark.parametrize("rs", [A1, A2], ids=["A1", "A2"])
def test_pullback_identity(rs):
    d = base_discriminant(rs)
    assert pullback(rs, d.poly) == d.sign * weyl_discriminant(rs)


def test_pullback_on_random_points():
    rng = random.Random(7)
    d = base_discriminant(A2)
    for _ in range(200):
        pt = tuple(Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9)) for _ in range(2))
        lhs = d.at(char_map(A2, pt).coords)
        assert lhs == d.sign * evaluate(weyl_discriminant(A2), pt)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_discriminant_zero_exactly_on_root_hyperplanes(p):
    d = base_discriminant(A1)
    for t in range(1, p):
        b = char_map(A1, (t,), modulus=p).coords
        singular = pow(t, 2, p) == 1
        assert (d.at(b, modulus=p) == 0) == singular


def test_hc1_exact():
    for rs in (A1, A2):
        r = verify_hc1(rs)
        assert r.ok and r.residual.is_zero() and r.sign == 1


def test_hc1_detects_perturbation():
    b1, b2 = A2.fundamental_chars
    r = verify_hc1(A2, [b1 + 1, b2 * b2])
    assert not r.ok and not r.residual.is_zero()
    r = verify_hc1(A2, [b1 + 1, b2])
    assert r.ok  # constants are killed by the log derivative
    r = verify_hc1(A2, [b1 * b1, b2])
    assert not r.ok


def test_express_in_base_round_trip():
    b1, b2 = A2.fundamental_chars
    f = b1 ** 3 - 2 * b1 * b2 + 7
    assert pullback(A2, express_in_base(A2, f)) == f


def test_sl2_chart():
    assert str(sl2_chart(2)) == "X^2 - 2*X + 1" and sl2_chart(2).discriminant == 0
    assert str(sl2_chart(0)) == "X^2 + 1"
    assert str(sl2_chart(1)) == "X^2 - X + 1" and sl2_chart(1).discriminant == -3


def test_a2_singular_points_small_field():
    p = 7
    d = base_discriminant(A2)
    for t in product(range(1, p), repeat=2):
        b = char_map(A2, t, modulus=p).coords
        singular = any(evaluate(LaurentPoly.monomial(a), t, p) == 1 for a in A2.roots)
        assert (d.at(b, modulus=p) == 0) == singular
