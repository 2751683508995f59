import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from stabletrace.errors import NotRegularError, ParameterError, PrecisionError
from stabletrace.localfield import (PAdicApprox, TorusClass, classify_torus_sl2, delta_norm_sl2,
                                    is_square, legendre, local_l_factor, norm)

P = PAdicApprox


def test_norm_examples():
    assert norm(P.from_residue(10, 5, 6)) == Fraction(1, 5)
    assert norm(P.zero(5, 4)) == 0
    assert norm(P.from_residue(3, 7, 4)) == 1


def test_is_square_examples():
    assert is_square(P.from_residue(-4, 5, 4))
    assert not is_square(P.from_residue(-3, 5, 4))
    assert not is_square(P.from_residue(5, 5, 4))


def test_is_square_needs_precision():
    with pytest.raises(PrecisionError):
        is_square(P(5, 0, 4, 1))


def test_classify_examples():
    assert classify_torus_sl2(0, 5, 4) is TorusClass.SPLIT
    assert classify_torus_sl2(1, 5, 4) is TorusClass.UNRAMIFIED
    assert classify_torus_sl2(3, 5, 4) is TorusClass.RAMIFIED
    with pytest.raises(NotRegularError):
        classify_torus_sl2(2, 5, 4)


def test_l_factor_examples():
    assert local_l_factor(TorusClass.SPLIT, 5)(1) == Fraction(5, 4)
    assert local_l_factor(TorusClass.UNRAMIFIED, 5)(1) == Fraction(5, 6)
    ram = local_l_factor(TorusClass.RAMIFIED, 5)
    assert ram(1) == 1 and ram(3) == 1 and ram(mpmath.mpf("1.7")) == 1


def test_l_factor_accepts_rational_s():
    v = local_l_factor(TorusClass.SPLIT, 3)(Fraction(3, 2))
    assert abs(v - 1 / (1 - 3 ** -1.5)) < 1e-14


def test_delta_norm_examples():
    assert delta_norm_sl2(0, 5, 4) == 1
    assert math.isclose(delta_norm_sl2(3, 5, 4), 5 ** -0.5)
    assert math.isclose(delta_norm_sl2(1, 3, 4), 3 ** -0.5)


def test_principal_part():
    x = P.from_rational(Fraction(7, 25), 5, 6)
    assert x.principal_part() == Fraction(7, 25)
    assert P.from_rational(Fraction(1, 3), 5, 4).principal_part() == 0
    with pytest.raises(PrecisionError):
        P(5, -3, 1, -1).principal_part()


def test_zero_times_unit_keeps_precision():
    z = P.zero(5, 3)
    assert (z * P.from_residue(1, 5, 10)).abs_prec == 3


def test_rejects_bad_prime():
    with pytest.raises(ParameterError):
        P(1, 0, 1, 3)


rationals = st.builds(Fraction, st.integers(-10 ** 6, 10 ** 6).filter(bool), st.integers(1, 10 ** 4))
primes = st.sampled_from([3, 5, 7, 11])


@given(rationals, rationals, primes)
def test_norm_multiplicative_and_ultrametric(a, b, p):
    x, y = P.from_rational(a, p, 30), P.from_rational(b, p, 30)
    assert norm(x * y) == norm(x) * norm(y)
    assume(a + b != 0)
    assert norm(x + y) <= max(norm(x), norm(y))


@given(rationals, rationals, primes)
def test_arithmetic_matches_rationals(a, b, p):
    x, y = P.from_rational(a, p, 20), P.from_rational(b, p, 20)
    for got, want in ((x + y, a + b), (x - y, a - b), (x * y, a * b)):
        if want == 0:
            continue
        w = P.from_rational(want, p, 1)
        assert got.valuation == w.valuation
        m = p ** got.N
        assert (got.unit - P.from_rational(want, p, got.N).unit) % m == 0


@given(st.integers(0, 10 ** 6), st.sampled_from([3, 5, 7]), st.integers(3, 6))
def test_classification_precision_stable(b, p, N):
    D = b * b - 4
    assume(D % p ** N != 0)
    v = 0
    while D % p ** (v + 1) == 0:
        v += 1
    assume(v <= N - 2)
    assert classify_torus_sl2(b, p, N) is classify_torus_sl2(b, p, N + 2)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19, 23])
def test_class_counts_mod_p(p):
    split = unram = 0
    for b in range(p):
        if (b * b - 4) % p == 0:
            continue
        tc = classify_torus_sl2(b, p, 3)
        split += tc is TorusClass.SPLIT
        unram += tc is TorusClass.UNRAMIFIED
    assert split + unram == p - 2
    assert split == (p - 3) // 2


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("s", [1, 2, Fraction(11, 10), 3])
def test_l_factor_range(p, s):
    top = 1 / (1 - Fraction(1, p))
    for tc in TorusClass:
        v = local_l_factor(tc, p)(s)
        assert 0 < float(v) <= float(top) * (1 + 1e-15)


def test_legendre_table():
    assert [legendre(a, 5) for a in range(5)] == [0, 1, -1, -1, 1]
