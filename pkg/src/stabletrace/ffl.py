"""Dirichlet characters of F_p[t] and their L-functions on U in P^1.

Two independent routes give the coefficients of the L-series: summing the
character over effective divisors of each degree, and expanding the Euler
product over closed points.  Their agreement is the formal-series identity
at GL(1).

Convention at infinity: an odd character is ramified there and infinity
is left out of U; an even character is unramified there and we keep
infinity in U with Frobenius value 1, which removes the trivial factor
(1 - u) from the L-polynomial.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb

import numpy as np

from .errors import FalsificationError, ParameterError


# ------------------------------------------------------------ polynomials


@dataclass(frozen=True)
class FqPolynomial:
    """Polynomial over F_p, coefficients from the constant term up."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(a) % self.p for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, p: int, roots) -> "FqPolynomial":
        f = cls(p, (1,))
        for r in roots:
            f = f * cls(p, (-r, 1))
        return f

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __mul__(self, other: "FqPolynomial") -> "FqPolynomial":
        if self.is_zero() or other.is_zero():
            return FqPolynomial(self.p, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return FqPolynomial(self.p, tuple(out))

    def __sub__(self, other: "FqPolynomial") -> "FqPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return FqPolynomial(self.p, tuple(x - y for x, y in zip(a, b)))

    def __divmod__(self, other: "FqPolynomial"):
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        p = self.p
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return FqPolynomial(p, ()), self
        quot = [0] * (dq + 1)
        inv = pow(other.coeffs[-1], -1, p)
        for i in range(dq, -1, -1):
            c = rem[i + len(other.coeffs) - 1] * inv % p
            quot[i] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[i + j] = (rem[i + j] - c * b) % p
        return FqPolynomial(p, tuple(quot)), FqPolynomial(p, tuple(rem))

    def __mod__(self, other: "FqPolynomial") -> "FqPolynomial":
        return divmod(self, other)[1]

    def __floordiv__(self, other: "FqPolynomial") -> "FqPolynomial":
        return divmod(self, other)[0]

    def monic(self) -> "FqPolynomial":
        inv = pow(self.coeffs[-1], -1, self.p)
        return FqPolynomial(self.p, tuple(c * inv for c in self.coeffs))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            coef = str(c) if (c != 1 or i == 0) else ""
            parts.append(coef + ("*" if coef and mono else "") + mono)
        return " + ".join(parts)


def poly_gcd(a: FqPolynomial, b: FqPolynomial) -> FqPolynomial:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def _powmod_t(p: int, e: int, f: FqPolynomial) -> FqPolynomial:
    result = FqPolynomial(p, (1,)) % f
    base = FqPolynomial(p, (0, 1)) % f
    while e:
        if e & 1:
            result = (result * base) % f
        base = (base * base) % f
        e >>= 1
    return result


def is_irreducible(f: FqPolynomial) -> bool:
    """Ben-Or: no factor of degree i <= deg/2 divides t^(p^i) - t."""
    n = f.degree
    if n < 1:
        return False
    t = FqPolynomial(f.p, (0, 1))
    for i in range(1, n // 2 + 1):
        h = _powmod_t(f.p, f.p ** i, f) - t
        if poly_gcd(f, h).degree > 0:
            return False
    return True


def monic_polys(p: int, d: int):
    for low in product(range(p), repeat=d):
        yield FqPolynomial(p, low + (1,))


@lru_cache(maxsize=None)
def irreducibles(p: int, d: int) -> tuple[FqPolynomial, ...]:
    """Monic irreducibles of degree exactly d (closed points of A^1 of degree d)."""
    return tuple(f for f in monic_polys(p, d) if is_irreducible(f))


def factor_support(f: FqPolynomial) -> list[FqPolynomial]:
    """Distinct monic irreducible factors of f."""
    out = []
    rest = f.monic() if not f.is_zero() else f
    for d in range(1, rest.degree + 1):
        for P in irreducibles(f.p, d):
            if rest.degree < d:
                break
            if (rest % P).is_zero():
                out.append(P)
                while (rest % P).is_zero():
                    rest = rest // P
    return out


# --------------------------------------------------------------- characters


def _residue_index(coeffs, p: int, n: int) -> int:
    c = tuple(coeffs) + (0,) * (n - len(coeffs))
    return sum(a * p ** i for i, a in enumerate(c[:n]))


@dataclass(frozen=True)
class ResidueGroup:
    """(F_p[t]/f)^x with elements indexed by their coefficient vectors in base p."""

    modulus: FqPolynomial
    elements: tuple[int, ...]

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def n(self) -> int:
        return self.modulus.degree

    def poly(self, idx: int) -> FqPolynomial:
        c = []
        for _ in range(self.n):
            c.append(idx % self.p)
            idx //= self.p
        return FqPolynomial(self.p, tuple(c))

    def index(self, g: FqPolynomial) -> int:
        return _residue_index((g % self.modulus).coeffs, self.p, self.n)

    def mul(self, i: int, j: int) -> int:
        return self.index(self.poly(i) * self.poly(j))


@lru_cache(maxsize=None)
def residue_group(modulus: FqPolynomial) -> ResidueGroup:
    if not modulus.is_monic():
        raise ParameterError("modulus must be monic")
    p, n = modulus.p, modulus.degree
    if n == 0:
        return ResidueGroup(modulus, (0,))
    els = []
    for idx in range(p ** n):
        g = ResidueGroup(modulus, ()).poly(idx)
        if not g.is_zero() and poly_gcd(g, modulus).degree == 0:
            els.append(idx)
    return ResidueGroup(modulus, tuple(els))


@dataclass(frozen=True)
class DirichletCharacterFF:
    """A character of (F_p[t]/f)^x with values exp(2 pi i * exponent)."""

    modulus: FqPolynomial
    index: int
    table: dict = field(hash=False, compare=False)   # residue index -> Fraction in [0,1)
    size: int = 0
    even: bool | None = field(default=None, compare=False)

    @property
    def p(self) -> int:
        return self.modulus.p

    def exponent(self, g: FqPolynomial) -> Fraction | None:
        """None when g shares a factor with the modulus."""
        n = self.modulus.degree
        idx = 0 if n == 0 else _residue_index((g % self.modulus).coeffs, self.p, n)
        return self.table.get(idx)

    def __call__(self, g: FqPolynomial) -> complex:
        e = self.exponent(g)
        return 0j if e is None else root_of_unity(e)

    def is_trivial(self) -> bool:
        return all(e == 0 for e in self.table.values())

    def is_even(self) -> bool:
        """Trivial on the constants F_p^x."""
        if self.even is None:
            object.__setattr__(self, "even", all(
                self.exponent(FqPolynomial(self.p, (c,))) == 0 for c in range(1, self.p)))
        return self.even

    @property
    def value_at_infinity(self) -> complex:
        return 1 + 0j if self.is_even() else 0j

    def is_primitive(self) -> bool:
        """Not induced from any proper divisor of the modulus."""
        return conductor(self) == self.modulus

    def describe(self) -> str:
        return f"chi[{self.modulus}]#{self.index}"


def monic_divisors(f: FqPolynomial) -> list[FqPolynomial]:
    out = []
    for d in range(f.degree + 1):
        out.extend(g for g in monic_polys(f.p, d) if (f % g).is_zero())
    return out


def conductor(chi: DirichletCharacterFF) -> FqPolynomial:
    """Smallest monic divisor g of the modulus with chi trivial on units = 1 mod g."""
    G = residue_group(chi.modulus)
    one = FqPolynomial(chi.p, (1,))
    for g in monic_divisors(chi.modulus):
        if all(e == 0 for idx, e in chi.table.items()
               if g.degree == 0 or ((G.poly(idx) - one) % g).is_zero()):
            return g
    return chi.modulus


def primitive_character(chi: DirichletCharacterFF) -> DirichletCharacterFF:
    """The primitive character inducing chi, taken from the list for its conductor."""
    g = conductor(chi)
    G = residue_group(chi.modulus)
    table = {}
    for idx, e in chi.table.items():
        r = G.poly(idx) % g if g.degree else FqPolynomial(chi.p, ())
        table.setdefault(_residue_index(r.coeffs, chi.p, g.degree) if g.degree else 0, e)
    for cand in characters(g):
        if cand.table == table:
            return cand
    raise ValueError("induced table is not a character of the conductor")


def root_of_unity(e: Fraction) -> complex:
    return cmath.exp(2j * math.pi * float(e))


@lru_cache(maxsize=None)
def characters(modulus: FqPolynomial) -> tuple[DirichletCharacterFF, ...]:
    """All characters of (F_p[t]/f)^x, built by extending along cyclic steps."""
    G = residue_group(modulus)
    one = G.index(FqPolynomial(modulus.p, (1,))) if modulus.degree else 0
    H = [one]
    in_H = {one}
    chars = [{one: Fraction(0)}]
    for g in G.elements:
        if g in in_H:
            continue
        powers = [one]
        cur = g
        while cur not in in_H:
            powers.append(cur)
            cur = G.mul(cur, g)
        k, gk = len(powers), cur  # g^k is the first power back in H
        new_chars = []
        for psi in chars:
            base = psi[gk]
            for t in range(k):
                val = (base + t) / k
                chi = {}
                for j, gj in enumerate(powers):
                    for h in H:
                        chi[G.mul(h, gj) if j else h] = (psi[h] + j * val) % 1
                new_chars.append(chi)
        H = [G.mul(h, gj) if j else h for j, gj in enumerate(powers) for h in H]
        in_H = set(H)
        chars = new_chars
    chars.sort(key=lambda c: [c[e] for e in G.elements])
    return tuple(DirichletCharacterFF(modulus, i, c, len(G.elements)) for i, c in enumerate(chars))


# ----------------------------------------------------------- divisor sums


@lru_cache(maxsize=None)
def _residue_histogram(modulus: FqPolynomial, d: int) -> np.ndarray:
    """Counts of monic degree-d polynomials by residue index mod f."""
    p, n = modulus.p, modulus.degree
    if n == 0:
        return np.array([p ** d], dtype=np.int64)
    powers = [_powmod_t(p, i, modulus) for i in range(d + 1)]
    R = np.array([list(P.coeffs) + [0] * (n - len(P.coeffs)) for P in powers], dtype=np.int64)
    if d == 0:
        vec = R[0:1] % p
    else:
        grid = np.indices((p,) * d, dtype=np.int64).reshape(d, -1).T
        vec = (grid @ R[:d] + R[d]) % p
    idx = vec @ (p ** np.arange(n, dtype=np.int64))
    return np.bincount(idx, minlength=p ** n)


def _finite_divisor_sum(chi: DirichletCharacterFF, d: int) -> complex:
    """Sum of chi over monic degree-d polynomials coprime to the modulus."""
    hist = _residue_histogram(chi.modulus, d)
    grouped: dict[Fraction, int] = {}
    for idx, e in chi.table.items():
        c = int(hist[idx])
        if c:
            grouped[e] = grouped.get(e, 0) + c
    re = math.fsum(c * math.cos(2 * math.pi * float(e)) for e, c in grouped.items())
    im = math.fsum(c * math.sin(2 * math.pi * float(e)) for e, c in grouped.items())
    return complex(re, im)


def divisor_sum(chi: DirichletCharacterFF, d: int) -> complex:
    """Sum of chi over effective divisors of degree d on U.

    The divisors supported at infinity only enter for even characters
    (see the module docstring).
    """
    if d < 0:
        raise ParameterError("degree must be >= 0")
    if chi.is_even():
        return sum((_finite_divisor_sum(chi, j) for j in range(d + 1)), 0j)
    return _finite_divisor_sum(chi, d)


@lru_cache(maxsize=None)
def _closed_point_table(modulus: FqPolynomial, dmax: int) -> dict[tuple[int, int], int]:
    """(degree, residue index) -> number of closed points of A^1 \\ supp(f)."""
    p, n = modulus.p, modulus.degree
    units = set(residue_group(modulus).elements)
    out: dict[tuple[int, int], int] = {}
    for k in range(1, dmax + 1):
        for P in irreducibles(p, k):
            idx = _residue_index((P % modulus).coeffs, p, n) if n else 0
            if idx in units:
                out[(k, idx)] = out.get((k, idx), 0) + 1
    return out


def euler_coefficients(chi: DirichletCharacterFF, dmax: int) -> list[complex]:
    """Coefficients of u^0..u^dmax in prod_v (1 - chi(v) u^deg v)^-1 over v in U."""
    if dmax > 12:
        raise ParameterError("desk scale: d <= 12")
    series = [0j] * (dmax + 1)
    series[0] = 1 + 0j
    factors = [(k, chi.table[idx], count) for (k, idx), count in _closed_point_table(chi.modulus, dmax).items()]
    if chi.is_even():
        factors.append((1, Fraction(0), 1))
    for k, e, mult in sorted(factors):
        c = root_of_unity(e)
        # (1 - c u^k)^-mult = sum_j binom(mult + j - 1, j) c^j u^{kj}
        local = [0j] * (dmax + 1)
        for j in range(dmax // k + 1):
            local[k * j] = comb(mult + j - 1, j) * c ** j
        series = [sum(series[i] * local[m - i] for i in range(m + 1)) for m in range(dmax + 1)]
    return series


def euler_coeff(chi: DirichletCharacterFF, d: int) -> complex:
    return euler_coefficients(chi, d)[d]


# --------------------------------------------------------------- L-polynomial


@dataclass
class LPolynomial:
    character: str
    coeffs: list
    roots: list
    degree: int
    bound: int
    checked_upto: int
    primitive: bool
    infinity_included: bool

    def weil_deviation(self, q: int) -> float:
        """max | |alpha| - sqrt(q) | / sqrt(q) over the roots (0 when there are none)."""
        r = math.sqrt(q)
        return max((abs(abs(a) - r) / r for a in self.roots), default=0.0)

    def record(self) -> dict:
        return {"character": self.character, "degree": self.degree, "bound": self.bound,
                "coeffs": [[c.real, c.imag] for c in self.coeffs],
                "roots": [[a.real, a.imag] for a in self.roots],
                "abs_roots": [abs(a) for a in self.roots], "primitive": self.primitive,
                "infinity_included": self.infinity_included}


def gos_degree_bound(chi: DirichletCharacterFF) -> int:
    """deg L <= -2 + deg(finite conductor) + (1 if ramified at infinity)."""
    return chi.modulus.degree - 2 + (0 if chi.is_even() else 1)


def l_polynomial(chi: DirichletCharacterFF, tol: float = 1e-9) -> LPolynomial:
    if chi.is_trivial():
        raise ParameterError("trivial character: H^0 / H^2 contribute, no pure L-polynomial")
    bound = max(gos_degree_bound(chi), 0)
    upto = max(2 * bound, bound + 1)
    coeffs = [divisor_sum(chi, d) for d in range(upto + 1)]
    observed = max(d for d, c in enumerate(coeffs) if abs(c) > tol)
    upto = max(upto, 2 * observed)
    while len(coeffs) <= upto:
        coeffs.append(divisor_sum(chi, len(coeffs)))
    stray = [d for d in range(observed + 1, upto + 1) if abs(coeffs[d]) > tol]
    if observed > bound or stray:
        raise FalsificationError(f"{chi.describe()}: divisor sums do not vanish past degree {bound}",
                                 {"observed": observed, "bound": bound, "nonzero_at": stray})
    poly = coeffs[: observed + 1]
    roots = list(np.roots(np.array(poly, dtype=complex))) if observed > 0 else []
    return LPolynomial(chi.describe(), poly, [complex(r) for r in roots], observed, bound, upto,
                       chi.is_primitive(), chi.is_even())


def elementary_symmetric(roots) -> list[complex]:
    """e_0..e_m of the roots."""
    e = [1 + 0j]
    for a in roots:
        e = [x + (a * e[i - 1] if i else 0) for i, x in enumerate(e + [0j])]
    return e


@dataclass
class SymPowReport:
    character: str
    m: int
    rows: list
    max_residual: float
    passed: bool


def symmetric_power_check(chi: DirichletCharacterFF, dmax: int, tol: float = 1e-9) -> SymPowReport:
    """divisor_sum(chi, d) = (-1)^d e_d(alphas) for d <= m and 0 for m < d <= dmax."""
    L = l_polynomial(chi, tol)
    e = elementary_symmetric(L.roots)
    rows = []
    worst = 0.0
    for d in range(dmax + 1):
        lhs = divisor_sum(chi, d)
        rhs = (-1) ** d * e[d] if d < len(e) else 0j
        res = abs(lhs - rhs)
        worst = max(worst, res)
        rows.append({"d": d, "divisor_sum": lhs, "predicted": rhs, "residual": res})
    report = SymPowReport(chi.describe(), L.degree, rows, worst, worst <= tol)
    if not report.passed:
        raise FalsificationError(f"{chi.describe()}: symmetric-power identity fails", report)
    return report


def moduli(p: int, max_degree: int) -> list[FqPolynomial]:
    out = []
    for d in range(max_degree + 1):
        out.extend(monic_polys(p, d))
    return out


def serie_rows(p: int, dmax: int = 6, max_modulus_degree: int = 2) -> list[dict]:
    """One row per (q, modulus, character, d) comparing the two routes."""
    rows = []
    for f in moduli(p, max_modulus_degree):
        for chi in characters(f):
            euler = euler_coefficients(chi, dmax)
            for d in range(dmax + 1):
                ds = divisor_sum(chi, d)
                rows.append({"q": p, "modulus": str(f), "character": chi.index, "d": d,
                             "divisor_sum": ds, "euler_coeff": euler[d],
                             "residual": abs(ds - euler[d])})
    return rows


def induced_factorization_residual(chi: DirichletCharacterFF, L: LPolynomial | None = None) -> float:
    """Compare L(chi) with L(chi') * prod (1 - chi'(P) u^deg P) over P | f, P not | cond.

    chi' is the primitive character inducing chi.  The extra factors carry
    roots of absolute value 1; the rest of the roots are those of chi'.
    """
    L = L or l_polynomial(chi)
    prim = primitive_character(chi)
    target = l_polynomial(prim).coeffs
    g = prim.modulus
    for P in factor_support(chi.modulus):
        if g.degree and (g % P).is_zero():
            continue
        factor = [0j] * (P.degree + 1)
        factor[0] = 1 + 0j
        factor[P.degree] = -prim(P)
        target = list(np.convolve(target, factor))
    n = max(len(target), len(L.coeffs))
    a = list(L.coeffs) + [0j] * (n - len(L.coeffs))
    b = list(target) + [0j] * (n - len(target))
    return max(abs(x - y) for x, y in zip(a, b))
