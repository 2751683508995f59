from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from stabletrace.errors import EvaluationError, StructuralError
from stabletrace.exactalg import (LaurentPoly, add, determinant, evaluate, jacobian_log_det,
                                  log_derive, mul, render, substitute)

xi = LaurentPoly.variable(1, 1)
inv = xi ** -1
x1, x2 = LaurentPoly.variable(1, 2), LaurentPoly.variable(2, 2)


def polys(rank=2):
    mono = st.tuples(*[st.integers(-3, 3)] * rank)
    return st.dictionaries(mono, st.integers(-5, 5), max_size=5).map(lambda d: LaurentPoly(d, rank))


def points(rank=2):
    nz = st.integers(-6, 6).filter(bool)
    return st.tuples(*[st.builds(Fraction, nz, st.integers(1, 5))] * rank)


def test_add_examples():
    assert add(xi + inv, LaurentPoly.zero(1)) == xi + inv
    assert add(xi, -xi).is_zero() and add(xi, -xi).terms == {}
    assert add(xi + 1, inv + 1) == xi + 2 + inv


def test_mul_examples():
    assert mul(xi - inv, xi + inv) == xi ** 2 - xi ** -2
    assert mul(xi + 3, LaurentPoly.const(1, 1)) == xi + 3
    assert mul(xi - 1, inv - 1) == 2 - xi - inv


def test_log_derive_examples():
    assert log_derive(xi + inv, 1) == xi - inv
    assert log_derive(LaurentPoly.const(7, 1), 1).is_zero()
    m = LaurentPoly.monomial((2, -1))
    assert log_derive(m, 2) == -m


def test_jacobian_examples():
    assert jacobian_log_det([xi + inv]) == xi - inv
    assert jacobian_log_det([x1, x2]) == x1 * x2


def test_evaluate_examples():
    assert evaluate(xi + inv, [2]) == Fraction(5, 2)
    assert evaluate(xi - inv, [3], modulus=25) == 11
    p = 3 * x1 ** 2 * x2 ** -1 - 5 * x2 + 4
    assert evaluate(p, [1, 1]) == 2


def test_negative_powers():
    assert (x1 ** 2) ** -2 == LaurentPoly.monomial((-4, 0))
    assert (-x1) ** -3 == -LaurentPoly.monomial((-3, 0))
    with pytest.raises(EvaluationError):
        (x1 + 1) ** -1
    with pytest.raises(EvaluationError):
        (2 * x1) ** -1


def test_render_is_stable():
    assert render(x1 ** 2 * x2 ** -1 - 2) == "x1^2*x2^-1 - 2"
    assert render(xi + inv) == "x + x^-1"
    assert render(LaurentPoly.zero(2)) == "0"


def test_structural_errors():
    with pytest.raises(StructuralError):
        x1 + xi
    with pytest.raises(StructuralError):
        log_derive(x1, 3)
    with pytest.raises(StructuralError):
        determinant([[x1, x2]])


def test_evaluate_rejects_non_invertible():
    with pytest.raises(EvaluationError):
        evaluate(inv, [5], modulus=25)


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p + q == q + p and p * q == q * p
    assert p * (q + r) == p * q + p * r


@given(polys(), polys(), st.integers(1, 2))
def test_leibniz(p, q, j):
    assert log_derive(p * q, j) == log_derive(p, j) * q + p * log_derive(q, j)


@given(polys(), polys(), points())
def test_evaluate_is_homomorphism(p, q, pt):
    assert evaluate(p * q, pt) == evaluate(p, pt) * evaluate(q, pt)
    assert evaluate(p + q, pt) == evaluate(p, pt) + evaluate(q, pt)


@given(polys(), polys(), st.integers(1, 48).filter(lambda a: a % 7))
def test_evaluate_mod_is_homomorphism(p, q, a):
    pt = (a, 3)
    assert evaluate(p * q, pt, 49) == evaluate(p, pt, 49) * evaluate(q, pt, 49) % 49


@given(polys(), polys())
def test_jacobian_alternating(p, q):
    assert jacobian_log_det([p, q]) == -jacobian_log_det([q, p])


@given(polys(), points())
def test_substitute_composes_with_evaluate(p, pt):
    images = [x1 * x2, x2 ** -1]
    lhs = evaluate(substitute(p, images), pt)
    assert lhs == evaluate(p, [pt[0] * pt[1], 1 / pt[1]])
