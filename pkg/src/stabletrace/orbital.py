"""SL(2) local densities by exact fiber counting over Z/p^N.

The test function is the indicator of SL_2(Z_p).  The fiber of the trace
map over b is the whole stable class, so the counts below are already
stable orbital integrals; no kappa-decomposition is involved.

Notation: x = 1/p, q = p^N, D = b^2 - 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import ModelDegreeError, NotRegularError, ParameterError, PrecisionError
from .localfield import TorusClass, legendre, local_l_factor, valuation

MAX_MODULUS = 50_000_000
CLASSES = (TorusClass.SPLIT, TorusClass.UNRAMIFIED, TorusClass.RAMIFIED)


def _check_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or any(p % d == 0 for d in range(3, int(p ** 0.5) + 1, 2)):
        raise ParameterError(f"p must be an odd prime, got {p}")


def odd_primes(pmax: int) -> list[int]:
    sieve = bytearray([1]) * (pmax + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(pmax ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [n for n in range(3, pmax + 1) if sieve[n]]


def _is_one(s) -> bool:
    return isinstance(s, (int, Fraction)) and s == 1


# ---------------------------------------------------------------- counting


@dataclass(frozen=True)
class FiberCount:
    p: int
    N: int
    b: int
    count: int


def pair_count(k: int, p: int, N: int) -> int:
    """#{(y, z) in (Z/p^N)^2 : yz = m} for any m with min(val m, N) = k."""
    q = p ** N
    step = q - q // p
    if k < N:
        return (k + 1) * step
    return N * step + q


def _valuations(m: np.ndarray, p: int, N: int) -> np.ndarray:
    val = np.zeros(m.shape, dtype=np.int64)
    pk = 1
    for _ in range(N):
        pk *= p
        val += (m % pk == 0)
    return val


def count_fiber(p: int, N: int, b: int) -> FiberCount:
    """#{g in SL_2(Z/p^N) : tr g = b}, summing the closed yz-count over x."""
    _check_prime(p)
    if N < 1:
        raise ParameterError("N must be >= 1")
    q = p ** N
    if q > MAX_MODULUS:
        raise ParameterError(f"p^N = {q} exceeds the desk-scale limit {MAX_MODULUS}")
    b %= q
    x = np.arange(q, dtype=np.int64)
    m = (x * ((b - x) % q) - 1) % q
    hist = np.bincount(_valuations(m, p, N), minlength=N + 1)
    total = sum(int(hist[k]) * pair_count(k, p, N) for k in range(N + 1))
    return FiberCount(p, N, b, total)


def brute_force_trace_counts(p: int, N: int) -> list[int]:
    """Enumerate every 2x2 matrix over Z/p^N; index the result by trace."""
    q = p ** N
    if q ** 4 > 3 ** 8 * 16:
        raise ParameterError("brute force only for tiny rings")
    counts = [0] * q
    r = range(q)
    for a in r:
        for d in r:
            ad = a * d
            t = (a + d) % q
            for bb in r:
                for c in r:
                    if (ad - bb * c) % q == 1:
                        counts[t] += 1
    return counts


def group_order(p: int, N: int) -> int:
    """|SL_2(Z/p^N)| = p^{3N} (1 - p^-2)."""
    return p ** (3 * N - 2) * (p * p - 1)


@dataclass(frozen=True)
class _TypeBucket:
    val: int        # min(val(D), N)
    chi: int        # Legendre symbol of the unit part of D, 0 when D = 0 mod p^N
    representative: int
    multiplicity: int
    count: int


def _discriminant_types(p: int, N: int):
    """Group b mod p^N by the orbit of D/4 under unit squares.

    After x = y + b/2 the count only sees c = D/4 up to c -> c v^2, and
    those orbits are labelled by (min(val c, N), square class of the unit).
    """
    q = p ** N
    b = np.arange(q, dtype=np.int64)
    D = (b * b - 4) % q
    val = _valuations(D, p, N)
    pw = np.power(np.int64(p), np.minimum(val, N - 1))
    unit_mod_p = (D // pw) % p
    squares = np.zeros(p, dtype=np.int64)
    squares[(np.arange(1, p) ** 2) % p] = 1
    chi = np.where(val >= N, 0, np.where(squares[unit_mod_p] == 1, 1, -1))
    keys = val * 3 + (chi + 1)
    uniq, first, mult = np.unique(keys, return_index=True, return_counts=True)
    return [(int(k) // 3, int(k) % 3 - 1, int(f), int(c)) for k, f, c in zip(uniq, first, mult)]


def fiber_count_table(p: int, N: int) -> list[_TypeBucket]:
    """Every trace value mod p^N, bucketed by discriminant type, with its count."""
    _check_prime(p)
    out = []
    for val, chi, rep, mult in _discriminant_types(p, N):
        out.append(_TypeBucket(val, chi, rep, mult, count_fiber(p, N, rep).count))
    return out


def _class_of(val: int, chi: int) -> TorusClass:
    if val % 2:
        return TorusClass.RAMIFIED
    return TorusClass.SPLIT if chi == 1 else TorusClass.UNRAMIFIED


# ------------------------------------------------------------ theta values


@dataclass(frozen=True)
class ThetaValue:
    p: int
    N: int
    b: int
    s: object
    value: object
    torus_class: TorusClass

    def record(self) -> dict:
        return {"p": self.p, "N": self.N, "s": render_number(self.s), "b": self.b,
                "value": render_number(self.value), "torus_class": self.torus_class.value}


def _discriminant_data(p: int, N: int, b: int) -> tuple[int, int]:
    q = p ** N
    D = (b * b - 4) % q
    if D == 0:
        raise NotRegularError(f"b = {b}: b^2 - 4 = 0 mod {p}^{N}")
    v = valuation(D, p)
    return v, legendre(D // p ** v, p)


def theta_at(p: int, N: int, b: int, s=1) -> ThetaValue:
    """theta(b; s) = count/p^{2N} * L(s)/L(1) for the torus over b."""
    _check_prime(p)
    v, chi = _discriminant_data(p, N, b)
    if v > N - 2 or N < 2 * v + 2:
        raise PrecisionError(f"need N >= 2*val(D)+2 = {2 * v + 2}, got N = {N}")
    tc = _class_of(v, chi)
    dens = Fraction(count_fiber(p, N, b).count, p ** (2 * N))
    finer = Fraction(count_fiber(p, N + 1, b).count, p ** (2 * N + 2))
    if finer != dens:
        raise PrecisionError(f"density not stable between N={N} and N={N + 1}")
    if _is_one(s):
        return ThetaValue(p, N, b % p ** N, 1, dens, tc)
    L = local_l_factor(tc, p)
    with mpmath.workdps(40):
        value = mpmath.mpf(dens.numerator) / dens.denominator * L.ratio(s)
    return ThetaValue(p, N, b % p ** N, s, value, tc)


@dataclass
class TransversalReport:
    p: int
    N: int
    checked: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and bool(self.checked)

    def counts(self) -> dict:
        out = {c.value: 0 for c in CLASSES[:2]}
        for _, (tc, _) in self.checked.items():
            out[tc.value] += 1
        return out


def lemma_value(p: int, tc: TorusClass) -> Fraction:
    """q^{-dim G + dim T} |G(F_q)| / |T(F_q)| for SL(2)."""
    torus = p - 1 if tc is TorusClass.SPLIT else p + 1
    return Fraction(p * (p * p - 1), p * p * torus)


def verify_transversal_lemma(p: int, N: int = 2) -> TransversalReport:
    """theta(b;1) against the point-count formula for every unit-discriminant b mod p."""
    _check_prime(p)
    report = TransversalReport(p, N)
    for b in range(p):
        if (b * b - 4) % p == 0:
            continue
        th = theta_at(p, N, b, 1)
        expected = lemma_value(p, th.torus_class)
        report.checked[b] = (th.torus_class, th.value)
        if th.value != expected:
            report.failures.append({"b": b, "class": th.torus_class.value,
                                    "theta": render_number(th.value),
                                    "expected": render_number(expected)})
    return report


# --------------------------------------------------------- shell formulas


def shell_density(p: int, k: int, tc: TorusClass) -> Fraction:
    """Fiber density theta(b;1) for val(D) = k and the given torus type."""
    x = Fraction(1, p)
    tc = TorusClass(tc)
    if tc is TorusClass.RAMIFIED:
        if k % 2 == 0:
            raise ParameterError("ramified needs odd val(D)")
        return (1 + x) * (1 - x ** ((k + 1) // 2))
    if k % 2:
        raise ParameterError("split/unramified need even val(D)")
    if tc is TorusClass.SPLIT:
        return 1 + x
    return 1 + x - 2 * x ** (k // 2 + 1)


def shell_measure(p: int, k: int, tc: TorusClass) -> Fraction:
    """Lebesgue measure of {b in Z_p : val(D) = k, torus type tc}."""
    x = Fraction(1, p)
    tc = TorusClass(tc)
    if k == 0:
        if tc is TorusClass.SPLIT:
            return Fraction(p - 3, 2 * p)
        if tc is TorusClass.UNRAMIFIED:
            return Fraction(p - 1, 2 * p)
        return Fraction(0)
    if (k % 2 == 1) != (tc is TorusClass.RAMIFIED):
        return Fraction(0)
    # b = +-2 + t with val(t) = k; for even k the unit class splits evenly
    both_sides = 2 * (1 - x) * x ** k
    return both_sides if k % 2 else both_sides / 2


def shell_mass(p: int, k: int, tc: TorusClass) -> Fraction:
    m = shell_measure(p, k, tc)
    return m * shell_density(p, k, tc) if m else Fraction(0)


def _geom(z: Fraction, start: int) -> Fraction:
    return z ** start / (1 - z)


def class_masses(p: int) -> dict[TorusClass, Fraction]:
    """Haar mass of the split / unramified / ramified locus in SL_2(Z_p).

    Sum of shell_mass over all k, done with geometric series.
    """
    x = Fraction(1, p)
    x2, x3 = x * x, x * x * x
    split = shell_mass(p, 0, TorusClass.SPLIT) + (1 - x) * (1 + x) * _geom(x2, 1)
    unram = (shell_mass(p, 0, TorusClass.UNRAMIFIED)
             + (1 - x) * (1 + x) * _geom(x2, 1) - 2 * (1 - x) * x * _geom(x3, 1))
    ram = 2 * (1 - x) * (1 + x) * (x * _geom(x2, 0) - x2 * _geom(x3, 0))
    return {TorusClass.SPLIT: split, TorusClass.UNRAMIFIED: unram, TorusClass.RAMIFIED: ram}


def partial_class_masses(p: int, kmax: int) -> dict[TorusClass, Fraction]:
    return {tc: sum((shell_mass(p, k, tc) for k in range(kmax + 1)), Fraction(0)) for tc in CLASSES}


# -------------------------------------------------------- theta-hat(0; s)


@dataclass(frozen=True)
class ThetaHatValue:
    p: int
    N: int | None
    s: object
    lower: object
    upper: object
    residual_mass: Fraction

    @property
    def value(self):
        if self.lower == self.upper:
            return self.lower
        return (self.lower + self.upper) / 2

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def contains(self, v, slack=0) -> bool:
        return self.lower - slack <= v <= self.upper + slack

    def record(self) -> dict:
        return {"p": self.p, "N": self.N, "s": render_number(self.s),
                "value": render_number(self.value), "lower": render_number(self.lower),
                "upper": render_number(self.upper),
                "residual_mass": render_number(self.residual_mass)}


def _ratio(tc: TorusClass, p: int, s):
    if _is_one(s):
        return Fraction(1)
    return local_l_factor(tc, p).ratio(s)


def theta_hat_zero(p: int, N: int, s=1) -> ThetaHatValue:
    """Integral of theta(b; s) over b in Z_p from counts at precision N.

    Trace classes whose torus type is not settled at precision N
    (val(D) >= N - 1) are carried as an interval over the possible L-ratios.
    """
    _check_prime(p)
    if N < 2:
        raise ParameterError("N must be >= 2")
    denom = p ** (3 * N)
    known = Fraction(0)
    residual = Fraction(0)
    with mpmath.workdps(40):
        known_s = mpmath.mpf(0)
        for bucket in fiber_count_table(p, N):
            mass = Fraction(bucket.count * bucket.multiplicity, denom)
            if bucket.val <= N - 2:
                tc = _class_of(bucket.val, bucket.chi)
                if _is_one(s):
                    known += mass
                else:
                    known_s += mpmath.mpf(mass.numerator) / mass.denominator * _ratio(tc, p, s)
            else:
                residual += mass
        if _is_one(s):
            total = known + residual
            return ThetaHatValue(p, N, 1, total, total, residual)
        lo = min(_ratio(tc, p, s) for tc in CLASSES)
        hi = max(_ratio(tc, p, s) for tc in CLASSES)
        r = mpmath.mpf(residual.numerator) / residual.denominator
        return ThetaHatValue(p, N, s, known_s + r * lo, known_s + r * hi, residual)


def theta_hat_exact(p: int, s=1):
    """Integral of theta(b; s) from the exact per-class masses."""
    _check_prime(p)
    masses = class_masses(p)
    if _is_one(s):
        return sum(masses.values(), Fraction(0))
    with mpmath.workdps(40):
        return mpmath.fsum(mpmath.mpf(m.numerator) / m.denominator * _ratio(tc, p, s)
                           for tc, m in masses.items())


# ------------------------------------------------------------- breakdown


@dataclass(frozen=True)
class BreakdownRow:
    p: int
    C_split: Fraction
    C_unram: Fraction
    C_ram: Fraction
    K_split: Fraction
    K_unram: Fraction
    K_ram: Fraction
    N: int | None = None

    def record(self) -> dict:
        return {k: (render_number(v) if isinstance(v, Fraction) else v)
                for k, v in self.__dict__.items()}


def torus_breakdown(p: int, N: int | None = 2) -> BreakdownRow:
    """Per-class mass at s=1 and derivative coefficients K_class.

    K_class is d/ds of the class contribution at s=1 in units of log(p)/p,
    read off the closed form L(s)/L(1).  With N given, the masses of the
    settled shells are rechecked against fiber counts at precision N.
    """
    _check_prime(p)
    masses = class_masses(p)
    if N is not None:
        _crosscheck_shells(p, N)
    K = {tc: masses[tc] * local_l_factor(tc, p).log_derivative_at_one() for tc in CLASSES}
    return BreakdownRow(p, masses[TorusClass.SPLIT], masses[TorusClass.UNRAMIFIED],
                        masses[TorusClass.RAMIFIED], K[TorusClass.SPLIT],
                        K[TorusClass.UNRAMIFIED], K[TorusClass.RAMIFIED], N)


def counted_class_masses(p: int, N: int) -> dict[TorusClass, Fraction]:
    """Masses of the settled shells (val(D) <= N-2), from fiber counts."""
    denom = p ** (3 * N)
    out = {tc: Fraction(0) for tc in CLASSES}
    for bucket in fiber_count_table(p, N):
        if bucket.val <= N - 2:
            out[_class_of(bucket.val, bucket.chi)] += Fraction(bucket.count * bucket.multiplicity, denom)
    return out


def _crosscheck_shells(p: int, N: int) -> None:
    counted = counted_class_masses(p, N)
    predicted = partial_class_masses(p, N - 2)
    if counted != predicted:
        raise ModelDegreeError(f"shell masses disagree with fiber counts at p={p}, N={N}")


# ---------------------------------------------------- rational interpolation


@dataclass(frozen=True)
class RationalInterpolant:
    """P(x)/Q(x) in x = 1/p with Q(0) = 1, coefficients low to high."""

    num: tuple[Fraction, ...]
    den: tuple[Fraction, ...]

    def __call__(self, x: Fraction) -> Fraction:
        P = sum((c * x ** i for i, c in enumerate(self.num)), Fraction(0))
        Q = sum((c * x ** i for i, c in enumerate(self.den)), Fraction(0))
        return P / Q

    def series(self, order: int) -> list[Fraction]:
        """Taylor coefficients at x = 0 up to x^(order-1)."""
        out = []
        for n in range(order):
            c = self.num[n] if n < len(self.num) else Fraction(0)
            for j in range(1, min(n, len(self.den) - 1) + 1):
                c -= self.den[j] * out[n - j]
            out.append(c)
        return out


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    n = len(rows)
    A = [r[:] + [v] for r, v in zip(rows, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [v * inv for v in A[col]]
        for i in range(n):
            if i != col and A[i][col] != 0:
                f = A[i][col]
                A[i] = [a - f * c for a, c in zip(A[i], A[col])]
    return [A[i][n] for i in range(n)]


def rational_interpolate(points: Sequence[tuple[Fraction, Fraction]],
                         max_den_degree: int = 3) -> RationalInterpolant:
    """Lowest-degree exact rational interpolant that also fits every held-out point.

    Tries total degree L + M = 0, 1, ... using the first L+M+1 points and
    accepts the first candidate reproducing all remaining points exactly.
    """
    pts = list(points)
    for total in range(len(pts) - 1):
        for M in range(min(total, max_den_degree) + 1):
            L = total - M
            use = pts[: total + 1]
            rows = [[x ** i for i in range(L + 1)] + [-y * x ** j for j in range(1, M + 1)]
                    for x, y in use]
            sol = _solve(rows, [y for _, y in use])
            if sol is None:
                continue
            cand = RationalInterpolant(tuple(sol[: L + 1]), (Fraction(1),) + tuple(sol[L + 1:]))
            try:
                if all(cand(x) == y for x, y in pts):
                    return cand
            except ZeroDivisionError:
                continue
    raise ModelDegreeError("no rational interpolant of admissible degree reproduces the held-out points")


@dataclass
class BreakdownFit:
    interpolants: dict            # residue class mod 4 -> quantity -> RationalInterpolant
    coefficients: dict            # a1, a2, a3, b1, b2, b3, c1, c2, c3
    identities: dict
    k_sum_bound: Fraction         # max_p |K_split + K_unram| * p
    primes: dict

    @property
    def passed(self) -> bool:
        return all(self.identities.values())

    def record(self) -> dict:
        return {"coefficients": {k: render_number(v) for k, v in self.coefficients.items()},
                "identities": self.identities,
                "k_sum_bound": render_number(self.k_sum_bound),
                "primes": self.primes,
                "interpolants": {str(r): {q: {"num": [render_number(c) for c in f.num],
                                              "den": [render_number(c) for c in f.den]}
                                          for q, f in d.items()}
                                 for r, d in self.interpolants.items()}}


_QUANTITIES = ("C_split", "C_unram", "C_ram", "K_split", "K_unram")


def fit_breakdown_coefficients(rows: Iterable[BreakdownRow], min_per_class: int = 6) -> BreakdownFit:
    """Exact interpolation of each per-class quantity in 1/p, per p mod 4.

    The leading Taylor coefficients give the constants of the hand
    computation: C_split ~ a1 + a2/p, C_unram ~ b1 + b2/p, C_ram ~ c2/p,
    K_split -> a3, K_unram -> b3.
    """
    rows = sorted(rows, key=lambda r: r.p)
    by_class = {1: [r for r in rows if r.p % 4 == 1], 3: [r for r in rows if r.p % 4 == 3]}
    for cls, rs in by_class.items():
        if len(rs) < min_per_class:
            raise ParameterError(f"need >= {min_per_class} primes = {cls} mod 4, got {len(rs)}")
    interps: dict = {}
    coeffs_by_class: dict = {}
    for cls, rs in by_class.items():
        interps[cls] = {}
        for name in _QUANTITIES:
            pts = [(Fraction(1, r.p), getattr(r, name)) for r in rs]
            interps[cls][name] = rational_interpolate(pts)
        f = interps[cls]
        s_split, s_unram, s_ram = (f[n].series(3) for n in _QUANTITIES[:3])
        coeffs_by_class[cls] = {
            "a1": s_split[0], "a2": s_split[1], "b1": s_unram[0], "b2": s_unram[1],
            "c1": s_ram[0], "c2": s_ram[1],
            "a3": f["K_split"].series(1)[0], "b3": f["K_unram"].series(1)[0],
        }
    c1, c3 = coeffs_by_class[1], coeffs_by_class[3]
    coeffs = dict(c1)
    identities = {
        "classes_agree": c1 == c3,
        "c1 = 0": coeffs["c1"] == 0,
        "a1 + b1 = 1": coeffs["a1"] + coeffs["b1"] == 1,
        "a2 + b2 + c2 = 0": coeffs["a2"] + coeffs["b2"] + coeffs["c2"] == 0,
        "a3 + b3 = 0": coeffs["a3"] + coeffs["b3"] == 0,
    }
    bound = max(abs(r.K_split + r.K_unram) * r.p for r in rows)
    return BreakdownFit(interps, coeffs, identities, bound,
                        {str(k): [r.p for r in v] for k, v in by_class.items()})


# ------------------------------------------------------- dominant product


@dataclass(frozen=True)
class DominantProduct:
    pmax: int
    s: object
    theta_product: object
    tamagawa_product: object
    gap: object
    euler_product_with_2: object

    def record(self) -> dict:
        return {"pmax": self.pmax, "s": render_number(self.s),
                "theta_product": render_number(self.theta_product),
                "tamagawa_product": render_number(self.tamagawa_product),
                "gap": render_number(self.gap),
                "euler_product_with_2": render_number(self.euler_product_with_2)}


def dominant_product(pmax: int, s=1) -> DominantProduct:
    """Partial products of theta-hat_p(0;s) and of 1 - p^-2 over odd p <= pmax.

    The place 2 is left out of both (it lies in the bad set); the Euler
    product including the factor 3/4 at 2 is reported separately.
    """
    if pmax > 1000 or pmax < 3:
        raise ParameterError("pmax must lie in [3, 1000]")
    if not _is_one(s) and float(s) < 1:
        raise ParameterError("s must be >= 1")
    primes = odd_primes(pmax)
    tam = Fraction(1)
    for p in primes:
        tam *= 1 - Fraction(1, p * p)
    with_2 = tam * Fraction(3, 4)
    if _is_one(s):
        th = Fraction(1)
        for p in primes:
            th *= theta_hat_exact(p, 1)
        return DominantProduct(pmax, 1, th, tam, th - tam, with_2)
    with mpmath.workdps(40):
        th = mpmath.mpf(1)
        for p in primes:
            th *= theta_hat_exact(p, s)
        tam_f = mpmath.mpf(tam.numerator) / tam.denominator
        return DominantProduct(pmax, s, th, tam_f, th - tam_f,
                               mpmath.mpf(with_2.numerator) / with_2.denominator)


def render_number(v) -> str | int | float | None:
    """Bit-exact 'num/den' for rationals; decimal strings for mp reals."""
    if v is None:
        return None
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, 30)
    return repr(float(v)) if isinstance(v, float) else str(v)
