"""The acceptance suite as plain functions, shared by ``verify-all`` and pytest."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import adelic, ffl, orbital, rootdata, steinberg
from .adelic import TestFunction, getz_bound, getz_decompose, poisson_truncated, random_adele


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0
    budget: float | None = None
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        timing = f" ({self.elapsed:.2f}s" + (f" / budget {self.budget:g}s)" if self.budget else ")")
        return f"[{status}] {self.number:2d} {self.name}: {self.detail}{timing}"

    def record(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "detail": self.detail, "budget_s": self.budget}


def _timed(number: int, name: str, budget: float | None):
    def wrap(fn: Callable[[], tuple[bool, str]]):
        def run() -> CriterionResult:
            t0 = time.perf_counter()
            ok, detail = fn()
            dt = time.perf_counter() - t0
            within = budget is None or dt < budget
            if not within:
                detail += "; over the time budget"
            return CriterionResult(number, name, ok and within, detail, dt, budget)
        run.__name__ = fn.__name__
        run.number = number
        return run
    return wrap


@_timed(1, "HC1 identity in the log frame", 1.0)
def hc1_exact():
    out = []
    for label in ("A1", "A2"):
        r = steinberg.verify_hc1(rootdata.build(label))
        out.append((label, r.ok and r.residual.is_zero(), r.sign))
    ok = all(o for _, o, _ in out)
    return ok, ", ".join(f"{l} sign={s:+d} residual={'0' if o else 'nonzero'}" for l, o, s in out)


@_timed(2, "transversal lemma by fiber counting", 30.0)
def transversal_lemma():
    checked, bad = 0, []
    for p in orbital.odd_primes(13):
        rep = orbital.verify_transversal_lemma(p, N=4)
        checked += len(rep.checked)
        if not rep.passed:
            bad.append(p)
    return not bad, f"{checked} trace classes over p<=13 at N=4, mismatches at {bad or 'none'}"


@_timed(3, "mass telescope at s=1", None)
def mass_telescope():
    bad = []
    for p in orbital.odd_primes(97):
        target = 1 - Fraction(1, p * p)
        if orbital.theta_hat_exact(p, 1) != target:
            bad.append(("closed form", p))
        N = 3 if p <= 13 else 2
        th = orbital.theta_hat_zero(p, N, 1)
        total = sum(b.count * b.multiplicity for b in orbital.fiber_count_table(p, N))
        if th.value != target or total != p ** (3 * N) - p ** (3 * N - 2):
            bad.append(("counts", p))
    return not bad, f"odd p<=97, closed form and counts, failures: {bad or 'none'}"


S_GRID = (Fraction(11, 10), Fraction(3, 2), 2, 3)


@_timed(4, "estimate 1 + O(p^-3/2)", 300.0)
def estimate():
    series = []
    for p in orbital.odd_primes(97):
        dev = max(abs(float(orbital.theta_hat_exact(p, s)) - 1) for s in S_GRID)
        series.append((p, dev * p ** 1.5))
    running, increases = 0.0, []
    for p, v in series:
        if p >= 13 and running and v > running:
            increases.append(p)
        running = max(running, v)
    tail_max = max(v for p, v in series if p >= 13)
    return not increases, (f"max |theta_hat-1|p^1.5 over 13<=p<=97 = {tail_max:.4f}, "
                           f"running max rises at {increases or 'no prime'}")


@_timed(5, "SL(2) hand identities by exact interpolation", None)
def hand_identities():
    rows = [orbital.torus_breakdown(p, N=3 if p <= 13 else None) for p in orbital.odd_primes(97)]
    fit = orbital.fit_breakdown_coefficients(rows, min_per_class=6)
    ok = fit.identities["a1 + b1 = 1"] and fit.identities["a2 + b2 + c2 = 0"] and fit.k_sum_bound <= 1
    c = fit.coefficients
    return ok, (f"a1+b1={c['a1'] + c['b1']}, a2+b2+c2={c['a2'] + c['b2'] + c['c2']}, "
                f"max |K_split+K_unram|*p = {float(fit.k_sum_bound):.4f}")


@_timed(6, "dominant product", None)
def dominant():
    exact_ok = all(orbital.dominant_product(pm, 1).gap == 0 for pm in (13, 97, 500, 1000))
    d500 = orbital.dominant_product(500, 1)
    zeta_gap = abs(float(d500.euler_product_with_2) - 6 / math.pi ** 2)
    trend = {}
    for s in (Fraction(3, 2), 2):
        g100 = abs(orbital.dominant_product(100, s).gap)
        g500 = abs(orbital.dominant_product(500, s).gap)
        trend[str(s)] = (float(g100), float(g500))
    trend_ok = all(b < a for a, b in trend.values())
    ok = exact_ok and zeta_gap < 1e-3 and trend_ok
    shown = ", ".join(f"s={s}: {a:.6f}->{b:.6f}" for s, (a, b) in trend.items())
    return ok, f"s=1 gap exactly 0: {exact_ok}; |prod-6/pi^2|={zeta_gap:.2e}; {shown}"


@_timed(7, "truncation lemmas", None)
def truncation_lemmas():
    S = getz_bound({adelic.INFINITY}, 2, 3)
    bound_ok = str(S) == "{inf,2,3,5,7}"
    rng = random.Random(20240607)
    Sp = adelic.truncation_set(5)
    fails = 0
    for _ in range(1000):
        a = random_adele(rng)
        if not getz_decompose(a, Sp).verify(a):
            fails += 1
    return bound_ok and fails == 0, f"getz_bound={S}; 1000 random adeles, {fails} failures"


@_timed(8, "Poisson summation", None)
def poisson():
    self_dual = max(adelic.gaussian_transform_residual(t) for t in (1.0, 0.5, 2.0))
    transform_fixed = TestFunction(1.0).transform() == TestFunction(1.0)
    Sp = adelic.truncation_set(2)
    worst, tails = 0.0, []
    for t in (0.2, 1.0, 3.0):
        for k in (-1, 0, 1, 2):
            r = poisson_truncated(TestFunction(t, {2: k}), Sp)
            worst = max(worst, r.gap / max(abs(r.lhs), abs(r.rhs)))
            tails.append(r.tail_bound)
    ok = self_dual < 1e-10 and transform_fixed and worst < 1e-8
    return ok, (f"self-dual residual {self_dual:.1e}, S'={Sp} worst relative gap {worst:.1e}, "
                f"max tail bound {max(tails):.1e}")


@_timed(9, "function-field Euler product identity", 120.0)
def function_field():
    worst_serie, worst_weil, worst_extra, nchars, nprim = 0.0, 0.0, 0.0, 0, 0
    for q in (3, 5):
        worst_serie = max(worst_serie, max(r["residual"] for r in ffl.serie_rows(q, 6, 2)))
        for f in ffl.moduli(q, 2):
            for chi in ffl.characters(f):
                nchars += 1
                if chi.is_trivial():
                    continue
                ffl.symmetric_power_check(chi, 6)  # raises on any mismatch
                L = ffl.l_polynomial(chi)
                if chi.is_primitive():
                    nprim += 1
                    worst_weil = max(worst_weil, L.weil_deviation(q))
                else:
                    worst_extra = max(worst_extra, ffl.induced_factorization_residual(chi, L))
    ok = worst_serie <= 1e-9 and worst_weil <= 1e-9 and worst_extra <= 1e-9
    return ok, (f"{nchars} characters, serie residual {worst_serie:.1e}; "
                f"Weil deviation over {nprim} primitive {worst_weil:.1e}; "
                f"imprimitive L = primitive L times removed factors to {worst_extra:.1e}")


@_timed(10, "fast counting equals brute force", None)
def oracle_equivalence():
    pairs = [(p, N) for p in orbital.odd_primes(13) for N in range(1, 4) if p ** (4 * N) <= 3 ** 8]
    bad = []
    for p, N in pairs:
        brute = orbital.brute_force_trace_counts(p, N)
        fast = [orbital.count_fiber(p, N, b).count for b in range(p ** N)]
        if brute != fast:
            bad.append((p, N))
    return not bad, f"pairs {pairs}, mismatches {bad or 'none'}"


CRITERIA = (hc1_exact, transversal_lemma, mass_telescope, estimate, hand_identities,
            dominant, truncation_lemmas, poisson, function_field, oracle_equivalence)


def run_all() -> list[CriterionResult]:
    return [c() for c in CRITERIA]
