"""Rational adeles: the standard character, truncation sets, the
decomposition A = A^{S'} + Q, and truncated Poisson sums."""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import mpmath

from .errors import ParameterError
from .localfield import PAdicApprox, valuation

INFINITY = "inf"


def primes_upto(n: float) -> list[int]:
    n = int(math.floor(n + 1e-9))
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i in range(n + 1) if sieve[i]]


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class RationalAdele:
    """Real component plus finitely many p-adic components.

    Primes not in ``finite`` carry some integral component that never
    matters for the operations here.
    """

    real: Fraction | float
    finite: Mapping[int, PAdicApprox] = field(default_factory=dict)

    def __post_init__(self):
        for p, x in self.finite.items():
            if x.p != p:
                raise ParameterError(f"component at {p} has prime {x.p}")

    @classmethod
    def diagonal(cls, q, N: int = 20) -> "RationalAdele":
        """The rational q placed at every place (components kept where q is not integral)."""
        q = Fraction(q)
        comps = {p: PAdicApprox.from_rational(q, p, N) for p in _prime_factors(q.denominator)}
        return cls(q, comps)

    @property
    def support(self) -> list[int]:
        return sorted(self.finite)

    def component(self, p: int) -> PAdicApprox | None:
        return self.finite.get(p)

    def __sub__(self, q) -> "RationalAdele":
        """Subtract a rational diagonally."""
        q = Fraction(q)
        real = self.real - q if isinstance(self.real, Fraction) else self.real - float(q)
        comps = {p: x - q for p, x in self.finite.items()}
        stray = [p for p in _prime_factors(q.denominator) if p not in comps]
        if stray:
            raise ParameterError(f"components at {stray} are unknown integral values")
        return RationalAdele(real, comps)

    def is_integral_at(self, p: int) -> bool:
        x = self.finite.get(p)
        return x is None or x.is_zero() or x.valuation >= 0


@dataclass(frozen=True)
class TruncationSet:
    primes: frozenset

    includes_infinity = True

    def __contains__(self, p) -> bool:
        return p == INFINITY or p in self.primes

    def sorted(self) -> list:
        return [INFINITY] + sorted(self.primes)

    def __str__(self) -> str:
        return "{" + ",".join(["inf"] + [str(p) for p in sorted(self.primes)]) + "}"


def chi_component(place, x) -> complex:
    """exp(-2 pi i x) at infinity, exp(2 pi i x') at p with x' the principal part."""
    if place == INFINITY:
        if isinstance(x, (int, Fraction)):
            frac = Fraction(x) - math.floor(Fraction(x))
            return cmath.exp(-2j * math.pi * float(frac))
        return cmath.exp(-2j * math.pi * (float(x) % 1.0))
    if not isinstance(x, PAdicApprox):
        x = PAdicApprox.from_rational(x, place, 20)
    if x.p != place:
        raise ParameterError(f"component for {x.p} passed at place {place}")
    return cmath.exp(2j * math.pi * float(x.principal_part()))


def chi_global(a: RationalAdele) -> complex:
    val = chi_component(INFINITY, a.real)
    for p in a.support:
        val *= chi_component(p, a.finite[p])
    return val


def getz_bound(S, A: float, n: int) -> TruncationSet:
    """S union {inf} union {p : p <= A^n}."""
    if A < 1 or n < 1:
        raise ParameterError("need A >= 1 and n >= 1")
    finite = {p for p in S if p != INFINITY}
    return TruncationSet(frozenset(finite | set(primes_upto(A ** n))))


def truncation_set(n: float) -> TruncationSet:
    """{inf} union {p : p <= n}."""
    return TruncationSet(frozenset(primes_upto(n)))


@dataclass(frozen=True)
class Decomposition:
    integral_part: RationalAdele
    rational: Fraction
    Sp: TruncationSet

    def verify(self, original: RationalAdele) -> bool:
        a1 = self.integral_part
        for p in a1.support:
            if p not in self.Sp and not a1.is_integral_at(p):
                return False
        # a1 + b reproduces the original component by component
        for p, x in original.finite.items():
            if (a1.finite[p] + self.rational) != x:
                return False
        return a1.real + (self.rational if isinstance(a1.real, Fraction) else float(self.rational)) == original.real


def getz_decompose(a: RationalAdele, Sp: TruncationSet) -> Decomposition:
    """a = a' + b with b rational and a' integral outside Sp.

    b is the sum of the principal parts of a at the offending primes; each
    principal part is integral at every other prime, so the sum clears all
    denominators outside Sp at once.
    """
    b = Fraction(0)
    for p in a.support:
        if p in Sp:
            continue
        x = a.finite[p]
        if not x.is_zero() and x.valuation < 0:
            b += x.principal_part()
    return Decomposition(a - b, b, Sp)


def random_adele(rng: random.Random, primes=(3, 5, 7, 11, 13, 17, 19, 23), N: int = 12) -> RationalAdele:
    """A random adele with a few non-integral finite components."""
    support = rng.sample(list(primes), rng.randint(1, min(4, len(primes))))
    comps = {}
    for p in support:
        v = rng.randint(-4, 2)
        unit = rng.randrange(1, p ** N)
        while unit % p == 0:
            unit = rng.randrange(1, p ** N)
        comps[p] = PAdicApprox(p, v, unit, v + N)
    real = Fraction(rng.randint(-10 ** 6, 10 ** 6), 10 ** 3)
    return RationalAdele(real, comps)


# ------------------------------------------------------------------ Poisson


@dataclass(frozen=True)
class TestFunction:
    """c * exp(-pi t x^2) at infinity times prod 1_{p^k Z_p} at the listed primes."""

    __test__ = False  # not a pytest class

    t: float = 1.0
    levels: Mapping[int, int] = field(default_factory=dict)
    scale: float = 1.0

    def __post_init__(self):
        if not self.t > 0:
            raise ParameterError("Gaussian parameter t must be positive")

    @property
    def lattice_step(self) -> Fraction:
        """The support in F_{S'} is step * Z."""
        step = Fraction(1)
        for p, k in self.levels.items():
            step *= Fraction(p) ** k
        return step

    def __call__(self, x) -> float:
        x = Fraction(x)
        for p, k in self.levels.items():
            if x != 0 and valuation(x.numerator, p) - valuation(x.denominator, p) < k:
                return 0.0
        return self.scale * math.exp(-math.pi * self.t * float(x) ** 2)

    def transform(self) -> "TestFunction":
        """Fourier transform for the self-dual measures (Z_p has mass 1, dx at infinity)."""
        factor = self.t ** -0.5
        for p, k in self.levels.items():
            factor *= float(Fraction(p) ** (-k))
        return TestFunction(1.0 / self.t, {p: -k for p, k in self.levels.items()}, self.scale * factor)

    def describe(self) -> str:
        parts = [f"{self.scale:g}*exp(-pi*{self.t:g}*x^2)"]
        parts += [f"1[{p}^{k} Z_{p}]" for p, k in sorted(self.levels.items())]
        return " * ".join(parts)


def _gauss_tail(a: float, H: int) -> float:
    # sum_{|n| > H} exp(-a n^2) <= 2 e^{-a(H+1)^2} / (1 - e^{-2a(H+1)})
    head = math.exp(-a * (H + 1) ** 2)
    return 2 * head / (1 - math.exp(-2 * a * (H + 1)))


def _lattice_sum(f: TestFunction, H: int) -> float:
    step = f.lattice_step
    return math.fsum(f(step * n) for n in range(-H, H + 1))


@dataclass(frozen=True)
class PoissonResult:
    Sp: TruncationSet
    test_function: str
    lhs: float
    rhs: float
    gap: float
    tail_bound: float
    H: int

    def record(self) -> dict:
        return {"Sp": str(self.Sp), "test_function": self.test_function, "lhs": self.lhs,
                "rhs": self.rhs, "gap": self.gap, "tail_bound": self.tail_bound, "H": self.H}


def poisson_truncated(f: TestFunction, Sp: TruncationSet, rel_tail: float = 1e-12,
                      max_height: int = 10 ** 6) -> PoissonResult:
    """Both sides of sum_b f(b) = sum_b fhat(-b) over b in F_{S'}.

    The lattice F_{S'} meets the support of f in step*Z, so each side is a
    one-dimensional Gaussian sum truncated at |n| <= H with a rigorous tail.
    """
    if any(p not in Sp for p in f.levels):
        raise ParameterError("test function has local conditions outside S'")
    # unlisted primes of S' carry the unit-ball indicator
    f = TestFunction(f.t, {p: f.levels.get(p, 0) for p in Sp.primes}, f.scale)
    g = f.transform()
    a_l = math.pi * f.t * float(f.lattice_step) ** 2
    a_r = math.pi * g.t * float(g.lattice_step) ** 2
    H = 1
    while True:
        tail = f.scale * _gauss_tail(a_l, H) + g.scale * _gauss_tail(a_r, H)
        # each side is at least its n = 0 term, which is its scale
        if tail < rel_tail * min(f.scale, g.scale):
            break
        H *= 2
        if H > max_height:
            raise ParameterError("Gaussian too flat: truncation height would exceed the cap")
    lhs = _lattice_sum(f, H)
    rhs = _lattice_sum(g, H)
    if tail > rel_tail * max(abs(lhs), abs(rhs)):
        raise ParameterError("tail bound not below the requested relative size")
    return PoissonResult(Sp, f.describe(), lhs, rhs, abs(lhs - rhs), tail, H)


def gaussian_transform_residual(t: float, ys=(0.0, 0.25, 0.5, 1.0, 1.5, 2.0)) -> float:
    """max |quadrature of the real transform - closed form| over the sample points.

    The closed form t^-1/2 exp(-pi y^2 / t) is the self-dual statement at
    infinity; the quadrature side integrates exp(-pi t x^2) cos(2 pi x y)
    directly.
    """
    f = TestFunction(t)
    g = f.transform()
    worst = 0.0
    with mpmath.workdps(30):
        for y in ys:
            num = mpmath.quad(lambda x: mpmath.exp(-mpmath.pi * t * x * x) * mpmath.cos(2 * mpmath.pi * x * y),
                              [-mpmath.inf, 0, mpmath.inf])
            worst = max(worst, abs(float(num) - g(Fraction(y))))
    return worst
