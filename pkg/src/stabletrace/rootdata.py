"""Split root data of type A1 and A2 in fundamental-weight coordinates.

The torus coordinate ``xi_i`` is the fundamental weight ``mu_i``, so a
weight is an integer vector of its coefficients on the ``mu_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import combinations

from .errors import UnsupportedError
from .exactalg import LaurentPoly

SUPPORTED = ("A1", "A2")


@dataclass(frozen=True)
class RootSystem:
    label: str
    rank: int
    positive_roots: tuple[tuple[int, ...], ...]
    simple_roots: tuple[tuple[int, ...], ...]
    rho: tuple[int, ...]
    fundamental_chars: tuple[LaurentPoly, ...]

    @property
    def roots(self) -> tuple[tuple[int, ...], ...]:
        return self.positive_roots + tuple(tuple(-e for e in a) for a in self.positive_roots)

    def reflect(self, i: int, weight: tuple[int, ...]) -> tuple[int, ...]:
        """Simple reflection ``s_i`` (0-based) on a weight."""
        alpha = self.simple_roots[i]
        return tuple(w - weight[i] * a for w, a in zip(weight, alpha))

    def weyl_orbit(self, weight: tuple[int, ...]) -> set[tuple[int, ...]]:
        seen = {tuple(weight)}
        frontier = [tuple(weight)]
        while frontier:
            w = frontier.pop()
            for i in range(self.rank):
                v = self.reflect(i, w)
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)
        return seen


def _eigenvalue_weights(n: int) -> list[tuple[int, ...]]:
    # x_1 = xi_1, x_k = xi_k / xi_{k-1}, x_{n+1} = 1 / xi_n
    weights = []
    for k in range(n + 1):
        w = [0] * n
        if k < n:
            w[k] += 1
        if k > 0:
            w[k - 1] -= 1
        weights.append(tuple(w))
    return weights


def build(label: str) -> RootSystem:
    if label not in SUPPORTED:
        raise UnsupportedError(f"root system {label!r} not built; choose from {SUPPORTED}")
    n = int(label[1:])
    eig = _eigenvalue_weights(n)
    positive = tuple(
        tuple(a - b for a, b in zip(eig[i], eig[j])) for i, j in combinations(range(n + 1), 2)
    )
    simple = tuple(
        tuple(a - b for a, b in zip(eig[i], eig[i + 1])) for i in range(n)
    )
    doubled = [sum(a[k] for a in positive) for k in range(n)]
    assert all(c % 2 == 0 for c in doubled)
    rho = tuple(c // 2 for c in doubled)

    chars = []
    for k in range(1, n + 1):
        terms = {}
        for subset in combinations(eig, k):
            mono = tuple(sum(w[i] for w in subset) for i in range(n))
            terms[mono] = terms.get(mono, 0) + 1
        chars.append(LaurentPoly(terms, n))
    return RootSystem(label, n, positive, simple, rho, tuple(chars))


def _root_minus_one(alpha: tuple[int, ...]) -> LaurentPoly:
    return LaurentPoly.monomial(alpha) - 1


def weyl_delta(rs: RootSystem) -> LaurentPoly:
    """t^{-rho} * prod over positive roots of (t^alpha - 1), expanded."""
    prod = reduce(lambda acc, a: acc * _root_minus_one(a), rs.positive_roots,
                  LaurentPoly.const(1, rs.rank))
    return LaurentPoly.monomial(tuple(-e for e in rs.rho)) * prod


def weyl_discriminant(rs: RootSystem) -> LaurentPoly:
    """Product of (t^alpha - 1) over all roots."""
    return reduce(lambda acc, a: acc * _root_minus_one(a), rs.roots,
                  LaurentPoly.const(1, rs.rank))


def is_weyl_invariant(rs: RootSystem, p: LaurentPoly) -> bool:
    return all(p.map_exponents(lambda e, i=i: rs.reflect(i, e)) == p for i in range(rs.rank))
