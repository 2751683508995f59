"""Finite-precision p-adic numbers, SL(2) torus types and local L-factors."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import NotRegularError, ParameterError, PrecisionError


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def legendre(a: int, p: int) -> int:
    """Euler's criterion: 1, -1, or 0 when p divides a."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@dataclass(frozen=True)
class PAdicApprox:
    """x = p^valuation * unit, known modulo p^abs_prec.

    ``valuation is None`` encodes an element that is zero to the known
    precision.  The relative precision ``N`` is ``abs_prec - valuation``;
    the unit is stored modulo p^N.
    """

    p: int
    valuation: int | None
    unit: int
    abs_prec: int

    def __post_init__(self):
        if self.p < 2:
            raise ParameterError(f"{self.p} is not a prime")
        if self.valuation is None:
            if self.unit != 0:
                raise ParameterError("zero element must have unit 0")
            return
        if self.abs_prec <= self.valuation:
            raise PrecisionError("relative precision must be at least 1")
        if self.unit % self.p == 0:
            raise ParameterError("unit part divisible by p")
        object.__setattr__(self, "unit", self.unit % self.p ** self.N)

    @property
    def N(self) -> int:
        return 0 if self.valuation is None else self.abs_prec - self.valuation

    def is_zero(self) -> bool:
        return self.valuation is None

    @classmethod
    def zero(cls, p: int, abs_prec: int) -> "PAdicApprox":
        return cls(p, None, 0, abs_prec)

    @classmethod
    def from_residue(cls, n: int, p: int, abs_prec: int) -> "PAdicApprox":
        """The integer ``n`` known modulo p^abs_prec."""
        if abs_prec < 1:
            raise PrecisionError("absolute precision must be positive")
        n %= p ** abs_prec
        if n == 0:
            return cls.zero(p, abs_prec)
        v = valuation(n, p)
        return cls(p, v, n // p ** v, abs_prec)

    @classmethod
    def from_rational(cls, x, p: int, N: int) -> "PAdicApprox":
        """Embed a rational with relative precision ``N``."""
        x = Fraction(x)
        if N < 1:
            raise PrecisionError("relative precision must be positive")
        if x == 0:
            return cls.zero(p, N)
        num, den = x.numerator, x.denominator
        vn = valuation(num, p)
        vd = valuation(den, p)
        v = vn - vd
        mod = p ** N
        unit = (num // p ** vn) * pow(den // p ** vd, -1, mod) % mod
        return cls(p, v, unit, v + N)

    # arithmetic

    def _shifted(self, m: int, top: int) -> int:
        # integer representative of x / p^m modulo p^(top - m)
        if self.valuation is None:
            return 0
        return self.unit * self.p ** (self.valuation - m) % self.p ** (top - m)

    def _combine(self, other: "PAdicApprox", sign: int) -> "PAdicApprox":
        if other.p != self.p:
            raise ParameterError("primes differ")
        top = min(self.abs_prec, other.abs_prec)
        vals = [v for v in (self.valuation, other.valuation) if v is not None]
        m = min(vals + [top])
        total = (self._shifted(m, top) + sign * other._shifted(m, top)) % self.p ** (top - m)
        if total == 0:
            return PAdicApprox.zero(self.p, top)
        v = valuation(total, self.p)
        return PAdicApprox(self.p, m + v, total // self.p ** v, top)

    def __add__(self, other):
        other = self._lift(other)
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return self._combine(other, -1)

    def __rsub__(self, other):
        return self._lift(other)._combine(self, -1)

    def __neg__(self):
        if self.valuation is None:
            return self
        return PAdicApprox(self.p, self.valuation, -self.unit, self.abs_prec)

    def __mul__(self, other):
        other = self._lift(other)
        if self.valuation is None or other.valuation is None:
            bound = []
            for a, b in ((self, other), (other, self)):
                if a.valuation is None:
                    shift = 0 if b.valuation is None else b.valuation
                    bound.append(a.abs_prec + shift)
            return PAdicApprox.zero(self.p, min(bound))
        n = min(self.N, other.N)
        v = self.valuation + other.valuation
        return PAdicApprox(self.p, v, self.unit * other.unit, v + n)

    __rmul__ = __mul__

    def _lift(self, other) -> "PAdicApprox":
        if isinstance(other, PAdicApprox):
            return other
        if isinstance(other, (int, Fraction)):
            x = Fraction(other)
            if x == 0:
                return PAdicApprox.zero(self.p, self.abs_prec)
            v = valuation(x.numerator, self.p) - valuation(x.denominator, self.p)
            return PAdicApprox.from_rational(x, self.p, max(self.abs_prec - v, 1))
        return NotImplemented

    def residue(self) -> int:
        """Integer representative modulo p^abs_prec; needs valuation >= 0."""
        if self.valuation is None:
            return 0
        if self.valuation < 0:
            raise PrecisionError("element is not integral")
        return self.unit * self.p ** self.valuation % self.p ** self.abs_prec

    def principal_part(self) -> Fraction:
        """The rational x' with p-power denominator and |x' - x|_p <= 1."""
        if self.valuation is None or self.valuation >= 0:
            return Fraction(0)
        depth = -self.valuation
        if self.N < depth:
            raise PrecisionError(f"need {depth} unit digits for the principal part, have {self.N}")
        return Fraction(self.unit % self.p ** depth, self.p ** depth)

    def to_fraction(self) -> Fraction:
        if self.valuation is None:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.valuation


def norm(x: PAdicApprox) -> Fraction:
    """|x|_p = p^-valuation, 0 for zero."""
    if x.valuation is None:
        return Fraction(0)
    return Fraction(x.p) ** (-x.valuation)


def is_square(x: PAdicApprox) -> bool:
    if x.p == 2:
        raise ParameterError("p = 2 is not supported")
    if x.is_zero():
        raise ParameterError("squareness of 0 is not asked")
    if x.N < 2:
        raise PrecisionError(f"need abs precision >= valuation + 2, have relative precision {x.N}")
    return x.valuation % 2 == 0 and legendre(x.unit, x.p) == 1


class TorusClass(str, enum.Enum):
    SPLIT = "split"
    UNRAMIFIED = "unramified"
    RAMIFIED = "ramified"


def _as_padic(b, p: int | None, N: int | None) -> PAdicApprox:
    if isinstance(b, PAdicApprox):
        return b
    if p is None or N is None:
        raise ParameterError("integer input needs p and N")
    return PAdicApprox.from_residue(int(b), p, N)


def sl2_discriminant(b, p: int | None = None, N: int | None = None) -> PAdicApprox:
    b = _as_padic(b, p, N)
    return b * b - 4


def classify_torus_sl2(b, p: int | None = None, N: int | None = None) -> TorusClass:
    """Split / unramified / ramified type of the centralizer over b.

    Accepts a PAdicApprox, or an integer together with p and the precision N.
    """
    D = sl2_discriminant(b, p, N)
    if D.p == 2:
        raise ParameterError("p = 2 is not supported")
    if D.is_zero():
        raise NotRegularError("b^2 - 4 vanishes at working precision")
    if D.valuation % 2:
        if D.N < 1:
            raise PrecisionError("discriminant not known")
        return TorusClass.RAMIFIED
    return TorusClass.SPLIT if is_square(D) else TorusClass.UNRAMIFIED


@dataclass(frozen=True)
class LocalLFactor:
    """(1 - eta p^-s)^-1 with eta the quadratic character of the torus."""

    p: int
    eta: int

    def __call__(self, s):
        if isinstance(s, (int, Fraction)) and Fraction(s).denominator == 1:
            return 1 / (1 - self.eta * Fraction(1, self.p) ** int(s))
        s = mpmath.mpf(s.numerator) / s.denominator if isinstance(s, Fraction) else mpmath.mpf(s)
        return 1 / (1 - self.eta * mpmath.power(self.p, -s))

    def ratio(self, s):
        """L(s) / L(1)."""
        return self(s) / self(1)

    def log_derivative_at_one(self) -> Fraction:
        """Exact c with (d/ds log L)(1) = c * log(p) / p."""
        x = Fraction(1, self.p)
        return -self.eta / (1 - self.eta * x)


_ETA = {TorusClass.SPLIT: 1, TorusClass.UNRAMIFIED: -1, TorusClass.RAMIFIED: 0}


def local_l_factor(tc: TorusClass, p: int) -> LocalLFactor:
    return LocalLFactor(p, _ETA[TorusClass(tc)])


def delta_norm_exponent(b, p: int | None = None, N: int | None = None) -> Fraction:
    """e with |Delta|_p = p^-e, i.e. val(b^2 - 4) / 2."""
    D = sl2_discriminant(b, p, N)
    if D.is_zero():
        raise NotRegularError("b^2 - 4 vanishes at working precision")
    return Fraction(D.valuation, 2)


def delta_norm_sl2(b, p: int | None = None, N: int | None = None) -> float:
    e = delta_norm_exponent(b, p, N)
    prime = b.p if isinstance(b, PAdicApprox) else p
    return math.pow(prime, -float(e))
