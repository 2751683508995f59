from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from stabletrace import orbital
from stabletrace.errors import NotRegularError, ParameterError, PrecisionError
from stabletrace.localfield import TorusClass
from stabletrace.orbital import (brute_force_trace_counts, class_masses, count_fiber,
                                 dominant_product, fit_breakdown_coefficients, odd_primes,
                                 rational_interpolate, theta_at, theta_hat_exact, theta_hat_zero,
                                 torus_breakdown, verify_transversal_lemma)


def test_count_fiber_examples():
    assert count_fiber(3, 1, 0).count == 6
    assert sum(count_fiber(3, 1, b).count for b in range(3)) == 24
    # the singular trace still has a count; the brute-force oracle fixes it
    assert count_fiber(5, 1, 2).count == brute_force_trace_counts(5, 1)[2]


@pytest.mark.parametrize("p,N", [(3, 1), (3, 2), (5, 1), (7, 1)])
def test_fast_equals_brute_force(p, N):
    assert [count_fiber(p, N, b).count for b in range(p ** N)] == brute_force_trace_counts(p, N)


@pytest.mark.parametrize("p,N", [(3, 1), (3, 3), (5, 2), (7, 2), (11, 1), (13, 2)])
def test_telescope(p, N):
    total = sum(count_fiber(p, N, b).count for b in range(p ** N))
    assert total == p ** (3 * N) - p ** (3 * N - 2)
    assert sum(t.count * t.multiplicity for t in orbital.fiber_count_table(p, N)) == total


def test_theta_examples():
    assert theta_at(5, 4, 0).value == Fraction(6, 5)
    assert theta_at(5, 4, 1).value == Fraction(4, 5)
    assert theta_at(3, 2, 0).value == Fraction(2, 3)
    assert theta_at(5, 4, 0).torus_class is TorusClass.SPLIT


def test_theta_errors():
    with pytest.raises(NotRegularError):
        theta_at(5, 3, 2)
    with pytest.raises(PrecisionError):
        theta_at(5, 2, 3)  # val(D) = 1 needs N >= 4
    with pytest.raises(ParameterError):
        theta_at(9, 2, 0)


@given(st.sampled_from([3, 5, 7]), st.integers(0, 10 ** 6))
def test_stabilization(p, b):
    D = b * b - 4
    v = 0
    while D % p ** (v + 1) == 0 and v < 3:
        v += 1
    N = 2 * v + 2
    if p ** (N + 1) > 10 ** 6 or D % p ** N == 0:
        return
    base = count_fiber(p, N, b).count
    for k in range(p):
        assert count_fiber(p, N + 1, b + k * p ** N).count == p * p * base


def test_transversal_examples():
    rep = verify_transversal_lemma(5, 4)
    assert rep.passed and rep.counts() == {"split": 1, "unramified": 2}
    assert sorted(rep.checked) == [0, 1, 4]
    rep3 = verify_transversal_lemma(3, 4)
    assert rep3.passed and list(rep3.checked) == [0] and rep3.checked[0][1] == Fraction(2, 3)


@pytest.mark.parametrize("p", odd_primes(50))
def test_transversal_lemma_up_to_50(p):
    rep = verify_transversal_lemma(p, 2)
    assert rep.passed
    for tc, val in rep.checked.values():
        assert val == Fraction(p + 1 if tc is TorusClass.SPLIT else p - 1, p)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_theta_hat_mass(p):
    assert theta_hat_zero(p, 3, 1).value == 1 - Fraction(1, p * p)
    assert theta_hat_exact(p, 1) == 1 - Fraction(1, p * p)


def test_theta_hat_p5_s2_within_estimate():
    C = 1.0
    v = float(theta_hat_exact(5, 2))
    assert abs(v - 1) <= C * 5 ** -1.5


@pytest.mark.parametrize("p", [3, 5, 7])
def test_theta_hat_counted_interval_contains_exact(p):
    exact = theta_hat_exact(p, 2)
    for N in (3, 4):
        iv = theta_hat_zero(p, N, 2)
        assert iv.lower <= exact <= iv.upper


def test_theta_hat_approaches_one():
    devs = [abs(float(theta_hat_exact(p, 2)) - 1) for p in odd_primes(97)]
    assert devs[-1] < devs[0] / 50


@pytest.mark.parametrize("p", [3, 5, 7])
def test_class_masses_match_counts(p):
    N = 5 if p == 3 else 4
    counted = orbital.counted_class_masses(p, N)
    assert counted == orbital.partial_class_masses(p, N - 2)


def test_breakdown_row():
    for p in (3, 5, 7, 29):
        r = torus_breakdown(p, None)
        assert r.C_split + r.C_unram + r.C_ram == 1 - Fraction(1, p * p)
        assert r.K_ram == 0
    r5 = torus_breakdown(5, 3)
    assert abs(r5.K_split + r5.K_unram) <= Fraction(1, 5)


def test_held_out_prime():
    rows = [torus_breakdown(p, None) for p in odd_primes(97) if p != 29 and p % 4 == 1]
    target = class_masses(29)
    for name, tc in (("C_split", TorusClass.SPLIT), ("C_unram", TorusClass.UNRAMIFIED),
                     ("C_ram", TorusClass.RAMIFIED)):
        f = rational_interpolate([(Fraction(1, r.p), getattr(r, name)) for r in rows])
        assert f(Fraction(1, 29)) == target[tc]


def test_fit_identities():
    fit = fit_breakdown_coefficients([torus_breakdown(p, None) for p in odd_primes(97)])
    c = fit.coefficients
    assert c["a1"] + c["b1"] == 1
    assert c["a2"] + c["b2"] + c["c2"] == 0
    assert fit.passed
    assert fit.k_sum_bound <= 1


def test_fit_needs_enough_primes():
    with pytest.raises(ParameterError):
        fit_breakdown_coefficients([torus_breakdown(p, None) for p in (3, 5, 7)])


def test_rational_interpolation_recovers_known_function():
    f = lambda x: (1 - x + 2 * x * x) / (1 + x)
    pts = [(Fraction(1, p), f(Fraction(1, p))) for p in (3, 5, 7, 11, 13, 17, 19)]
    g = rational_interpolate(pts)
    assert all(g(x) == y for x, y in pts)
    assert g(Fraction(1, 101)) == f(Fraction(1, 101))


def test_dominant_product_examples():
    for pm in (3, 50, 500):
        assert dominant_product(pm, 1).gap == 0
    import math
    assert abs(float(dominant_product(500, 1).euler_product_with_2) - 6 / math.pi ** 2) < 1e-3
    g100 = abs(dominant_product(100, Fraction(3, 2)).gap)
    g500 = abs(dominant_product(500, Fraction(3, 2)).gap)
    assert g500 < g100
    with pytest.raises(ParameterError):
        dominant_product(2000, 1)
