import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from stabletrace.adelic import (INFINITY, RationalAdele, TestFunction, TruncationSet, chi_component,
                                chi_global, getz_bound, getz_decompose, poisson_truncated,
                                random_adele, truncation_set)
from stabletrace.errors import ParameterError
from stabletrace.localfield import PAdicApprox


def test_chi_component_examples():
    assert abs(chi_component(INFINITY, Fraction(1, 3)) - cmath.exp(-2j * math.pi / 3)) < 1e-15
    assert abs(chi_component(5, Fraction(1, 5)) - cmath.exp(2j * math.pi / 5)) < 1e-15
    assert chi_component(7, 3) == 1


def test_chi_global_examples():
    assert abs(chi_global(RationalAdele.diagonal(Fraction(1, 5))) - 1) < 1e-12
    assert abs(chi_global(RationalAdele(Fraction(1, 2))) + 1) < 1e-12


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(0, 6), st.integers(0, 6))
def test_chi_trivial_on_rationals_in_z_half_third(n, i, j):
    q = Fraction(n, 2 ** i * 3 ** j)
    assert abs(chi_global(RationalAdele.diagonal(q)) - 1) < 1e-9


def test_chi_trivial_on_random_rationals():
    rng = random.Random(3)
    for _ in range(100):
        q = Fraction(rng.randint(-10 ** 5, 10 ** 5), rng.randint(1, 10 ** 4))
        assert abs(chi_global(RationalAdele.diagonal(q)) - 1) < 1e-9


def test_getz_bound_examples():
    assert str(getz_bound({INFINITY}, 2, 3)) == "{inf,2,3,5,7}"
    assert str(getz_bound({INFINITY}, 1, 5)) == "{inf}"
    assert str(getz_bound({INFINITY, 11}, 2, 2)) == "{inf,2,3,11}"
    with pytest.raises(ParameterError):
        getz_bound({INFINITY}, 0.5, 1)


def test_decompose_integral_adele_is_trivial():
    a = RationalAdele(Fraction(3, 7), {5: PAdicApprox.from_rational(Fraction(2, 3), 5, 10)})
    d = getz_decompose(a, truncation_set(3))
    assert d.rational == 0 and d.verify(a)


def test_decompose_one_eleventh():
    a = RationalAdele.diagonal(Fraction(1, 11))
    Sp = TruncationSet(frozenset({2, 3}))
    d = getz_decompose(a, Sp)
    assert d.rational - Fraction(1, 11) == int(d.rational - Fraction(1, 11))
    assert d.integral_part.is_integral_at(11) and d.verify(a)


def test_decompose_random_adeles():
    rng = random.Random(11)
    Sp = truncation_set(5)
    for _ in range(1000):
        a = random_adele(rng)
        d = getz_decompose(a, Sp)
        assert d.verify(a)
        for p in a.support:
            if p not in Sp:
                x = d.integral_part.finite[p]
                assert x.is_zero() or x.valuation >= 0


def test_subtraction_refuses_unknown_components():
    with pytest.raises(ParameterError):
        RationalAdele(Fraction(0)) - Fraction(1, 7)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_gaussian_transform_against_quadrature(t):
    g = TestFunction(t).transform()
    for y in (0.0, 0.3, 1.0, 1.7):
        num, _ = quad(lambda x: math.exp(-math.pi * t * x * x) * math.cos(2 * math.pi * x * y),
                      -math.inf, math.inf, epsabs=1e-13, limit=200)
        assert abs(num - g(Fraction(y))) < 1e-10


def test_double_transform_is_involutive():
    f = TestFunction(0.7, {2: 1, 3: -2}, 1.5)
    ff = f.transform().transform()
    assert ff.levels == f.levels and math.isclose(ff.t, f.t) and math.isclose(ff.scale, f.scale)
    assert TestFunction(1.0).transform() == TestFunction(1.0)


def test_poisson_self_dual():
    r = poisson_truncated(TestFunction(1.0), TruncationSet(frozenset()))
    assert r.gap == 0.0


@pytest.mark.parametrize("k", [0, 1])
def test_poisson_over_inf_2(k):
    r = poisson_truncated(TestFunction(1.0, {2: k}), truncation_set(2))
    assert r.gap < 1e-8
    if k == 1:
        # the dual side lives on (1/2)Z with mass 1/2
        assert TestFunction(1.0, {2: 1}).transform().scale == 0.5


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 4.0])
@pytest.mark.parametrize("levels", [{}, {2: 2}, {2: -1, 3: 1}])
def test_poisson_gap_within_tail_plus_rounding(t, levels):
    Sp = truncation_set(3)
    r = poisson_truncated(TestFunction(t, levels), Sp)
    rounding = 64 * 2.0 ** -52 * (abs(r.lhs) + abs(r.rhs))
    assert r.gap <= r.tail_bound + rounding


def test_poisson_rejects_levels_outside():
    with pytest.raises(ParameterError):
        poisson_truncated(TestFunction(1.0, {5: 1}), truncation_set(3))
