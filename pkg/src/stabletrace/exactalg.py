"""Exact multivariate Laurent polynomials with integer coefficients.

Torus characters, the fundamental characters ``b_i`` and the Weyl
denominator all live here.  A monomial is an exponent tuple in the torus
coordinates ``xi_1, ..., xi_r``; exponents may be negative.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import EvaluationError, StructuralError

Monomial = tuple[int, ...]


class LaurentPoly:
    """Immutable sparse Laurent polynomial over the integers."""

    __slots__ = ("_terms", "_rank", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | Iterable[tuple[Monomial, int]], rank: int):
        if rank < 1:
            raise StructuralError(f"rank must be positive, got {rank}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, int] = {}
        for mono, coeff in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != rank:
                raise StructuralError(f"monomial {mono} does not have length {rank}")
            acc[mono] = acc.get(mono, 0) + int(coeff)
        self._terms = {m: c for m, c in acc.items() if c != 0}
        self._rank = rank
        self._hash = None

    # construction helpers

    @classmethod
    def zero(cls, rank: int) -> "LaurentPoly":
        return cls({}, rank)

    @classmethod
    def const(cls, c: int, rank: int) -> "LaurentPoly":
        return cls({(0,) * rank: c}, rank)

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: int = 1) -> "LaurentPoly":
        return cls({tuple(exponents): coeff}, len(exponents))

    @classmethod
    def variable(cls, j: int, rank: int) -> "LaurentPoly":
        """The coordinate ``xi_j`` (1-based)."""
        if not 1 <= j <= rank:
            raise StructuralError(f"coordinate index {j} outside 1..{rank}")
        e = [0] * rank
        e[j - 1] = 1
        return cls.monomial(e)

    # accessors

    @property
    def rank(self) -> int:
        return self._rank

    @property
    def terms(self) -> dict[Monomial, int]:
        return dict(self._terms)

    def coeff(self, mono: Monomial) -> int:
        return self._terms.get(tuple(mono), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms.items(), reverse=True))

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(other, self._rank)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._rank == other._rank and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._rank, frozenset(self._terms.items())))
        return self._hash

    # ring operations

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, int):
            return LaurentPoly.const(other, self._rank)
        if not isinstance(other, LaurentPoly):
            raise TypeError(f"cannot combine LaurentPoly with {type(other).__name__}")
        if other._rank != self._rank:
            raise StructuralError(f"rank mismatch: {self._rank} vs {other._rank}")
        return other

    def __add__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        return LaurentPoly(list(self._terms.items()) + list(other._terms.items()), self._rank)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({m: -c for m, c in self._terms.items()}, self._rank)

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        acc: dict[Monomial, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = acc.get(m, 0) + c1 * c2
        return LaurentPoly(acc, self._rank)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if len(self._terms) != 1:
                raise EvaluationError("only monomials can be inverted")
            (m, c), = self._terms.items()
            if c not in (1, -1):
                raise EvaluationError("monomial coefficient is not a unit")
            return LaurentPoly({tuple(n * e for e in m): c ** (-n)}, self._rank)
        result = LaurentPoly.const(1, self._rank)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def map_exponents(self, f) -> "LaurentPoly":
        """Apply ``f`` to every exponent vector (e.g. a Weyl reflection)."""
        return LaurentPoly([(f(m), c) for m, c in self._terms.items()], self._rank)

    def __repr__(self) -> str:
        return f"LaurentPoly({render(self)!r}, rank={self._rank})"

    def __str__(self) -> str:
        return render(self)


def add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p + q


def mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p * q


def log_derive(p: LaurentPoly, j: int) -> LaurentPoly:
    """Apply the invariant derivation ``xi_j d/dxi_j`` (``j`` is 1-based)."""
    if not 1 <= j <= p.rank:
        raise StructuralError(f"coordinate index {j} outside 1..{p.rank}")
    return LaurentPoly({m: c * m[j - 1] for m, c in p.terms.items()}, p.rank)


def determinant(matrix: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    """Cofactor expansion along the first row; fine for the r <= 3 in use."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise StructuralError("matrix is not square")
    if n == 1:
        return matrix[0][0]
    total = None
    for col in range(n):
        minor = [row[:col] + row[col + 1:] for row in matrix[1:]]
        term = matrix[0][col] * determinant(minor)
        if col % 2:
            term = -term
        total = term if total is None else total + term
    return total


def jacobian_log_det(ps: Sequence[LaurentPoly]) -> LaurentPoly:
    """det[xi_j d p_i / d xi_j] for r polynomials in rank r."""
    r = len(ps)
    if r == 0:
        raise StructuralError("need at least one polynomial")
    if any(p.rank != r for p in ps):
        raise StructuralError(f"expected {r} polynomials of rank {r}")
    return determinant([[log_derive(p, j) for j in range(1, r + 1)] for p in ps])


def evaluate(p: LaurentPoly, point: Sequence, modulus: int | None = None):
    """Substitute ``point`` for the coordinates.

    With ``modulus`` the computation happens in Z/modulus.  A coordinate
    must be a unit only if it appears with a negative exponent.  Without a
    modulus, ints are promoted to Fractions so that negative exponents stay
    exact; floats and complexes pass through.
    """
    if len(point) != p.rank:
        raise StructuralError(f"point has length {len(point)}, rank is {p.rank}")
    needs_inverse = [any(m[i] < 0 for m in p.terms) for i in range(p.rank)]
    if modulus is not None:
        coords = [int(x) % modulus for x in point]
        try:
            invs = [pow(x, -1, modulus) if need else None for x, need in zip(coords, needs_inverse)]
        except ValueError as exc:
            raise EvaluationError(f"coordinate not invertible mod {modulus}") from exc
        total = 0
        for mono, c in p.terms.items():
            v = c
            for x, xi, e in zip(coords, invs, mono):
                v = v * (pow(x, e, modulus) if e >= 0 else pow(xi, -e, modulus))
            total = (total + v) % modulus
        return total
    coords = [Fraction(x) if isinstance(x, int) else x for x in point]
    if any(x == 0 and need for x, need in zip(coords, needs_inverse)):
        raise EvaluationError("zero coordinate is not invertible")
    total = 0
    for mono, c in p.terms.items():
        v = c
        for x, e in zip(coords, mono):
            v = v * x ** e
        total = total + v
    return total


def substitute(p: LaurentPoly, images: Sequence[LaurentPoly]) -> LaurentPoly:
    """Compose: replace coordinate ``j`` of ``p`` by ``images[j-1]``.

    Negative exponents are allowed only where the image is a unit monomial.
    """
    if len(images) != p.rank:
        raise StructuralError("need one image per coordinate")
    rank = images[0].rank
    total = LaurentPoly.zero(rank)
    cache: dict[tuple[int, int], LaurentPoly] = {}
    for mono, c in p.terms.items():
        term = LaurentPoly.const(c, rank)
        for j, e in enumerate(mono):
            if e:
                key = (j, e)
                if key not in cache:
                    cache[key] = images[j] ** e
                term = term * cache[key]
        total = total + term
    return total


def _var_name(j: int, rank: int) -> str:
    return "x" if rank == 1 else f"x{j + 1}"


def render(p: LaurentPoly) -> str:
    """Canonical text: terms in descending lex order of exponents, explicit signs."""
    if p.is_zero():
        return "0"
    pieces = []
    for mono, c in sorted(p.terms.items(), reverse=True):
        factors = []
        for j, e in enumerate(mono):
            if e == 1:
                factors.append(_var_name(j, p.rank))
            elif e:
                factors.append(f"{_var_name(j, p.rank)}^{e}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        sign = "-" if c < 0 else "+"
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out

