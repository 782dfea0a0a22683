"""Exact vanishing test for sums of roots of unity.

``root_sum_vanishes(phases)`` decides ``sum_k w_k exp(2 pi i phase_k) == 0``
for rational phases. With ``D`` the common denominator, ``rad`` its radical
and ``s = D / rad``, the powers ``1, z, ..., z^(s-1)`` of a primitive
``D``-th root ``z`` are a basis of Q(zeta_D) over Q(zeta_rad). The sum
vanishes iff each residue class of exponents mod ``s`` gives a polynomial
divisible by the cyclotomic polynomial ``Phi_rad``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

_SMALL_PRIMES_LIMIT = 10_000


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n and p <= _SMALL_PRIMES_LIMIT:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        if p * p > n:
            out.append(n)
        else:
            from sympy import factorint

            out.extend(factorint(n))
    return sorted(out)


def _poly_divmod_monic(num: list[int], den: tuple[int, ...]) -> list[int]:
    """Remainder of ``num`` by monic ``den`` (coefficient lists, lowest degree first)."""
    r = list(num)
    dd = len(den) - 1
    for k in range(len(r) - 1, dd - 1, -1):
        c = r[k]
        if c:
            for t in range(dd + 1):
                r[k - dd + t] -= c * den[t]
    return r[:dd]


def _poly_exact_div(num: list[int], den: tuple[int, ...]) -> list[int]:
    n = list(num)
    dd = len(den) - 1
    q = [0] * (len(n) - dd)
    for k in range(len(n) - 1, dd - 1, -1):
        c = n[k]
        if c:
            q[k - dd] = c
            for t in range(dd + 1):
                n[k - dd + t] -= c * den[t]
    assert not any(n), "inexact cyclotomic division"
    return q


@lru_cache(maxsize=256)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of ``Phi_n`` (lowest degree first)."""
    if n == 1:
        return (-1, 1)
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_exact_div(num, cyclotomic_poly(d))
    return tuple(num)


def root_sum_vanishes(phases: Iterable[Fraction], weights: Sequence[int] | None = None) -> bool:
    """Exact test of ``sum w_k exp(2 pi i phases[k]) == 0`` for rational phases."""
    phases = [Fraction(p) for p in phases]
    D = 1
    for p in phases:
        D = math.lcm(D, p.denominator)
    return int_root_sum_vanishes([p.numerator * (D // p.denominator) for p in phases], D, weights)


def int_root_sum_vanishes(numerators: Iterable[int], den: int, weights: Sequence[int] | None = None) -> bool:
    """Exact test of ``sum w_k exp(2 pi i n_k / den) == 0``; ``den`` need not be minimal."""
    if den < 0:
        numerators, den = [-n for n in numerators], -den
    numerators = list(numerators)
    if weights is None:
        weights = [1] * len(numerators)
    coeff: dict[int, int] = defaultdict(int)
    for n, w in zip(numerators, weights):
        coeff[n % den] += w
    coeff = {e: c for e, c in coeff.items() if c}
    if not coeff:
        return True
    g = den
    for e in coeff:
        g = math.gcd(g, e)
    D = den // g
    if D == 1:
        return False
    coeff = {e // g: c for e, c in coeff.items()}
    rad = math.prod(prime_factors(D))
    s = D // rad
    phi = cyclotomic_poly(rad)
    groups: dict[int, dict[int, int]] = defaultdict(dict)
    for e, c in coeff.items():
        groups[e % s][e // s] = c
    for grp in groups.values():
        poly = [0] * rad
        for t, c in grp.items():
            poly[t] = c
        if any(_poly_divmod_monic(poly, phi)):
            return False
    return True
