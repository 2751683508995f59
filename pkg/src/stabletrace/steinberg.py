"""The Steinberg-Hitchin base: the character map, the discriminant on the
base, and the exact Jacobian identity db_1 ^ ... ^ db_r = +-Delta in the
invariant (logarithmic) frame."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import StructuralError, UnsupportedError
from .exactalg import LaurentPoly, evaluate, jacobian_log_det, render, substitute
from .rootdata import RootSystem, is_weyl_invariant, weyl_delta, weyl_discriminant


@dataclass(frozen=True)
class SteinbergBasePoint:
    coords: tuple

    def __len__(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class BaseDiscriminant:
    """Discriminant as a polynomial in b_1..b_r.

    ``sign`` records the convention: pulling ``poly`` back through the
    character map gives ``sign * weyl_discriminant``.  We store the
    classical discriminant of the characteristic polynomial, which is
    ``(-1)^{#positive roots}`` times the product over roots.
    """

    label: str
    poly: LaurentPoly
    sign: int

    def __str__(self) -> str:
        return render(self.poly).replace("x", "b")

    def at(self, coords: Sequence, modulus: int | None = None):
        if len(coords) != self.poly.rank:
            raise StructuralError("base point has the wrong length")
        return evaluate(self.poly, coords, modulus)


@dataclass(frozen=True)
class HC1Result:
    ok: bool
    sign: int
    jacobian: LaurentPoly
    delta: LaurentPoly
    residual: LaurentPoly


@dataclass(frozen=True)
class CharPoly:
    """X^2 - b X + 1, the stable class datum of SL(2) over b."""

    b: object

    @property
    def coeffs(self) -> tuple:
        return (1, -self.b, 1)

    @property
    def discriminant(self):
        return self.b * self.b - 4

    def __str__(self) -> str:
        b = self.b
        if b == 0:
            return "X^2 + 1"
        mid = f" - {b}*X" if b > 0 else f" + {-b}*X"
        mid = mid.replace(" 1*X", " X")
        return f"X^2{mid} + 1"


def char_map(rs: RootSystem, torus_point: Sequence, modulus: int | None = None) -> SteinbergBasePoint:
    if len(torus_point) != rs.rank:
        raise StructuralError(f"torus point must have {rs.rank} coordinates")
    return SteinbergBasePoint(tuple(evaluate(b, torus_point, modulus) for b in rs.fundamental_chars))


def _height(rs: RootSystem, weight: tuple[int, ...]) -> int:
    # pairing with rho-check: positive on every positive root
    return sum(weight)


def express_in_base(rs: RootSystem, f: LaurentPoly) -> LaurentPoly:
    """Write a Weyl-invariant Laurent polynomial as a polynomial in the b_i.

    Peels off the highest dominant weight term with the matching monomial in
    the fundamental characters until nothing is left.  The result is a
    LaurentPoly of rank r whose variables stand for b_1..b_r.
    """
    if f.rank != rs.rank:
        raise StructuralError("rank mismatch")
    if not is_weyl_invariant(rs, f):
        raise StructuralError("polynomial is not Weyl-invariant")
    result: dict[tuple[int, ...], int] = {}
    rest = f
    while not rest.is_zero():
        dominant = [m for m in rest.terms if all(e >= 0 for e in m)]
        top = max(dominant, key=lambda m: (_height(rs, m), m))
        c = rest.coeff(top)
        result[top] = result.get(top, 0) + c
        term = LaurentPoly.const(c, rs.rank)
        for b, e in zip(rs.fundamental_chars, top):
            term = term * b ** e
        rest = rest - term
    return LaurentPoly(result, rs.rank)


def pullback(rs: RootSystem, base_poly: LaurentPoly) -> LaurentPoly:
    """Compose a polynomial in b_1..b_r with the character map."""
    return substitute(base_poly, list(rs.fundamental_chars))


def base_discriminant(rs: RootSystem) -> BaseDiscriminant:
    if rs.label not in ("A1", "A2"):
        raise UnsupportedError(f"no base discriminant for {rs.label}")
    sign = -1 if len(rs.positive_roots) % 2 else 1
    reduced = express_in_base(rs, weyl_discriminant(rs))
    return BaseDiscriminant(rs.label, sign * reduced, sign)


def verify_hc1(rs: RootSystem, chars: Sequence[LaurentPoly] | None = None) -> HC1Result:
    """Check jacobian_log_det(b_1..b_r) == +-Delta exactly."""
    chars = rs.fundamental_chars if chars is None else tuple(chars)
    jac = jacobian_log_det(chars)
    delta = weyl_delta(rs)
    if (jac - delta).is_zero():
        return HC1Result(True, 1, jac, delta, LaurentPoly.zero(rs.rank))
    if (jac + delta).is_zero():
        return HC1Result(True, -1, jac, delta, LaurentPoly.zero(rs.rank))
    return HC1Result(False, 0, jac, delta, jac - delta)


def sl2_chart(b) -> CharPoly:
    return CharPoly(b)
