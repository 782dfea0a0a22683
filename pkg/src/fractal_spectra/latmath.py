"""Exact integer and rational lattice arithmetic.

Matrices are tuples of row tuples, vectors are tuples. Entries are ``int``
or ``fractions.Fraction``; nothing in this module touches floating point
except the optional numeric expansivity fallback.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

Number = Union[int, Fraction]
Vector = tuple
Matrix = tuple

NUMERIC_MARGIN = 1e-9


class Expansivity(enum.Enum):
    EXPANSIVE = "expansive"
    NOT_EXPANSIVE = "not expansive"
    INDETERMINATE = "indeterminate"


class IndeterminateError(ArithmeticError):
    """Numeric expansivity test could not separate an eigenvalue from the unit circle."""


# ---------------------------------------------------------------------------
# coercion


def _scalar(x) -> Number:
    if isinstance(x, (bool, np.bool_)):
        raise TypeError("boolean entries are not allowed")
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return _scalar(Fraction(x))
    if isinstance(x, (float, np.floating)) and float(x).is_integer():
        return int(x)
    raise TypeError(f"expected an exact number, got {x!r}")


def as_matrix(obj) -> Matrix:
    """Coerce ``4``, ``[[4]]``, nested lists or an integer array to a square matrix."""
    if isinstance(obj, (int, np.integer, Fraction)):
        return ((_scalar(obj),),)
    rows = [list(r) if isinstance(r, (list, tuple, np.ndarray)) else [r] for r in obj]
    d = len(rows)
    if d == 0 or any(len(r) != d for r in rows):
        raise ValueError(f"matrix must be square and non-empty, got shape {[len(r) for r in rows]}")
    return tuple(tuple(_scalar(x) for x in r) for r in rows)


def as_vector(obj, dim: int | None = None) -> Vector:
    if isinstance(obj, (int, np.integer, Fraction, str)):
        v = (_scalar(obj),)
    else:
        v = tuple(_scalar(x) for x in obj)
    if dim is not None and len(v) != dim:
        raise ValueError(f"vector {v} has dimension {len(v)}, expected {dim}")
    return v


def as_digits(obj, dim: int | None = None) -> tuple[Vector, ...]:
    """Coerce a digit list; 1-D digits may be given as plain integers.

    Raises ``ValueError`` on repeated digits or a missing zero digit.
    """
    digits = tuple(as_vector(x, dim) for x in obj)
    if not digits:
        raise ValueError("digit set is empty")
    dims = {len(v) for v in digits}
    if len(dims) != 1:
        raise ValueError(f"digits have mixed dimensions {sorted(dims)}")
    if any(isinstance(x, Fraction) for v in digits for x in v):
        raise ValueError("digits must be integer vectors")
    if len(set(digits)) != len(digits):
        raise ValueError("digit set has repeated vectors")
    if tuple(0 for _ in digits[0]) not in digits:
        raise ValueError("digit set must contain the zero vector")
    return digits


def is_integral(v: Iterable[Number]) -> bool:
    return all(isinstance(x, int) or x.denominator == 1 for x in v)


def normalize(v: Iterable[Number]) -> Vector:
    """Fractions with unit denominator become ints."""
    return tuple(int(x) if isinstance(x, int) or x.denominator == 1 else x for x in v)


# ---------------------------------------------------------------------------
# basic matrix algebra


def identity(d: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    Bt = transpose(B)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def mat_vec(A: Matrix, v: Sequence[Number]) -> Vector:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def mat_pow(A: Matrix, n: int) -> Matrix:
    if n < 0:
        return mat_pow(inverse(A), -n)
    result = identity(len(A))
    base = A
    while n:
        if n & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        n >>= 1
    return result


def dot(u: Sequence[Number], v: Sequence[Number]) -> Number:
    return sum(a * b for a, b in zip(u, v))


def vec_add(u, v) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def det(A: Matrix) -> Number:
    """Determinant by fraction-free Bareiss elimination."""
    n = len(A)
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                M[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else num / prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def inverse(A: Matrix) -> Matrix:
    """Exact inverse over the rationals (Gauss-Jordan)."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("matrix is singular")
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return tuple(normalize(row[n:]) for row in M)


def adjugate(A: Matrix) -> Matrix:
    """Integer adjugate, so that ``A @ adj(A) == det(A) * I``."""
    D = det(A)
    inv = inverse(A)
    return tuple(tuple(_scalar(x * D) for x in row) for row in inv)


def solve(A: Matrix, v: Sequence[Number]) -> Vector:
    return normalize(mat_vec(inverse(A), v))


def common_denominator(entries: Iterable[Number]) -> int:
    q = 1
    for x in entries:
        if isinstance(x, Fraction):
            q = math.lcm(q, x.denominator)
    return q


# ---------------------------------------------------------------------------
# expansivity


def charpoly(A: Matrix) -> list[int]:
    """Coefficients ``[c_0, ..., c_d]`` of ``det(zI - A)`` (Faddeev-LeVerrier)."""
    d = len(A)
    coeffs = [0] * (d + 1)
    coeffs[d] = 1
    Mk = [[0] * d for _ in range(d)]
    for k in range(1, d + 1):
        # M_k = A M_{k-1} + c_{d-k+1} I
        AM = [[sum(A[i][t] * Mk[t][j] for t in range(d)) for j in range(d)] for i in range(d)]
        for i in range(d):
            AM[i][i] += coeffs[d - k + 1]
        Mk = AM
        tr = sum(sum(A[i][t] * Mk[t][i] for t in range(d)) for i in range(d))
        c = Fraction(-tr, k)
        coeffs[d - k] = c.numerator if c.denominator == 1 else c
    return coeffs


def schur_stable(coeffs: Sequence[Number]) -> bool:
    """True iff every root of ``sum coeffs[k] z^k`` lies in the open unit disk.

    Exact Schur-Cohn reduction; coefficients must be real and exact.
    """
    a = list(coeffs)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    while len(a) > 1:
        n = len(a) - 1
        if abs(a[0]) >= abs(a[n]):
            return False
        a = [a[n] * a[k + 1] - a[0] * a[n - 1 - k] for k in range(n)]
    return a[0] != 0


def expansivity(M, numeric: bool = False) -> Expansivity:
    """Decide whether every eigenvalue of ``M`` has modulus > 1.

    Integer and rational matrices are decided exactly with the Schur-Cohn test
    on the reversed characteristic polynomial. ``numeric=True`` (or a float
    matrix) uses eigenvalues with a margin of ``NUMERIC_MARGIN``.
    """
    try:
        A = None if numeric else as_matrix(M)
    except TypeError:
        A = None
    if A is not None:
        p = charpoly(A)
        if p[0] == 0:  # eigenvalue 0; the reversed polynomial would drop a root
            return Expansivity.NOT_EXPANSIVE
        return Expansivity.EXPANSIVE if schur_stable(p[::-1]) else Expansivity.NOT_EXPANSIVE
    mods = np.abs(np.linalg.eigvals(np.asarray(M, dtype=float)))
    if np.any(np.abs(mods - 1.0) <= NUMERIC_MARGIN):
        return Expansivity.INDETERMINATE
    return Expansivity.EXPANSIVE if np.all(mods > 1.0) else Expansivity.NOT_EXPANSIVE


def is_expansive(M, numeric: bool = False) -> bool:
    verdict = expansivity(M, numeric=numeric)
    if verdict is Expansivity.INDETERMINATE:
        raise IndeterminateError("an eigenvalue modulus lies within the numeric margin of 1")
    return verdict is Expansivity.EXPANSIVE


# ---------------------------------------------------------------------------
# Hermite normal form and lattices


def hnf_columns(gens: Sequence[Sequence[int]], dim: int) -> Matrix:
    """Column-style HNF of the lattice spanned by integer generator vectors.

    Returns a ``dim x r`` matrix (tuple of rows) whose columns form the unique
    lower-echelon basis with positive pivots and entries left of each pivot
    reduced into ``[0, pivot)``.
    """
    cols = [list(g) for g in gens if any(g)]
    basis: list[list[int]] = []
    pivots: list[int] = []
    for row in range(dim):
        active = [c for c in cols if c[row] != 0]
        rest = [c for c in cols if c[row] == 0]
        if not active:
            continue
        # Euclid on the entries of this row
        while len(active) > 1:
            active.sort(key=lambda c: abs(c[row]))
            p = active[0]
            nxt = [p]
            for c in active[1:]:
                q = c[row] // p[row]
                c = [x - q * y for x, y in zip(c, p)]
                if c[row] != 0:
                    nxt.append(c)
                elif any(c):
                    rest.append(c)
            active = nxt
        p = active[0]
        if p[row] < 0:
            p = [-x for x in p]
        basis.append(p)
        pivots.append(row)
        cols = rest
    # reduce entries to the left of each pivot
    for k, (p, r) in enumerate(zip(basis, pivots)):
        for j in range(k):
            q = basis[j][r] // p[r]
            if q:
                basis[j] = [x - q * y for x, y in zip(basis[j], p)]
    return tuple(tuple(basis[k][i] for k in range(len(basis))) for i in range(dim))


@dataclass(frozen=True)
class Lattice:
    """Lattice given by its canonical (column HNF) basis; columns are generators."""

    basis: Matrix
    full_rank: bool

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def rank(self) -> int:
        return len(self.basis[0]) if self.basis else 0

    def columns(self) -> list[Vector]:
        return [tuple(row[k] for row in self.basis) for k in range(self.rank)]

    def coordinates(self, v: Sequence[Number]) -> Vector | None:
        """Coordinates of ``v`` in the basis (rational), or None if ``v`` is off the span."""
        coords = []
        v = [Fraction(x) for x in v]
        cols = self.columns()
        k = 0
        for i in range(self.dim):
            if k < len(cols) and cols[k][i] != 0 and all(cols[k][t] == 0 for t in range(i)):
                c = v[i] / cols[k][i]
                coords.append(c)
                v = [a - c * b for a, b in zip(v, cols[k])]
                k += 1
            elif v[i] != 0:
                return None
        return tuple(coords)

    def contains(self, v: Sequence[Number]) -> bool:
        c = self.coordinates(v)
        return c is not None and is_integral(c)

    def index(self) -> Number:
        """Covolume ``|det basis|`` for full-rank lattices."""
        if not self.full_rank:
            raise ValueError("index of a non-full-rank lattice is undefined")
        return abs(math.prod(self.basis[i][i] for i in range(self.dim)))


def lattice_from_generators(gens: Iterable[Sequence[Number]], dim: int) -> Lattice:
    """Canonical lattice spanned by rational generators."""
    gens = [tuple(g) for g in gens]
    q = common_denominator(x for g in gens for x in g)
    ints = [tuple(_scalar(x * q) for x in g) for g in gens]
    H = hnf_columns(ints, dim)
    rank = len(H[0]) if H else 0
    basis = tuple(normalize(Fraction(x, q) for x in row) for row in H)
    return Lattice(basis=basis, full_rank=rank == dim)


def smallest_invariant_lattice(R, B) -> Lattice:
    """HNF basis of the smallest ``R``-invariant lattice containing ``B``."""
    R = as_matrix(R)
    d = len(R)
    B = as_digits(B, d)
    gens = []
    Rk = identity(d)
    for _ in range(d):
        gens.extend(mat_vec(Rk, b) for b in B)
        Rk = mat_mul(R, Rk)
    lat = lattice_from_generators(gens, d)
    # Cayley-Hamilton closes the span; check it anyway
    assert all(lat.contains(mat_vec(R, c)) for c in lat.columns()), "lattice not R-invariant"
    return lat


def dual_lattice(lat: Lattice) -> Lattice:
    """``{x : <x, v> in Z for all v in lat}`` for a full-rank lattice."""
    if not lat.full_rank:
        raise ValueError("dual lattice requires a full-rank lattice")
    dual_basis = transpose(inverse(lat.basis))
    return lattice_from_generators(transpose(dual_basis), lat.dim)


class TooManyPoints(OverflowError):
    def __init__(self, cap: int, points: list):
        super().__init__(f"more than {cap} lattice points in box")
        self.points = points


def lattice_points_in_box(lat: Lattice, lo: Sequence[Number], hi: Sequence[Number], cap: int = 10**6) -> list[Vector]:
    """All lattice points of a full-rank lattice inside the closed box ``[lo, hi]``.

    Raises :class:`TooManyPoints` (carrying the first ``cap`` points) beyond ``cap``.
    """
    if not lat.full_rank:
        raise ValueError("enumeration requires a full-rank lattice")
    d = lat.dim
    H = lat.basis
    out: list[Vector] = []

    def rec(i: int, partial: list[Number], coeffs: list[int]):
        # coordinate i = sum_{k<i} H[i][k] z_k + H[i][i] z_i
        base = sum(H[i][k] * coeffs[k] for k in range(i))
        h = H[i][i]
        zmin = math.ceil(Fraction(lo[i] - base) / h)
        zmax = math.floor(Fraction(hi[i] - base) / h)
        for z in range(zmin, zmax + 1):
            x = base + h * z
            if i + 1 == d:
                out.append(normalize(partial + [x]))
                if len(out) > cap:
                    raise TooManyPoints(cap, out[:cap])
            else:
                rec(i + 1, partial + [x], coeffs + [z])

    rec(0, [], [])
    return out


# ---------------------------------------------------------------------------
# residues


def reduce_mod(M, v: Sequence[int], hnf: Matrix | None = None) -> Vector:
    """Canonical representative of ``v`` modulo ``M Z^d`` (box of the HNF pivots)."""
    if hnf is None:
        M = as_matrix(M)
        hnf = hnf_columns(transpose(M), len(M))
    v = list(v)
    for i in range(len(v)):
        h = hnf[i][i]
        q = v[i] // h
        if q:
            v = [a - q * hnf[t][i] for t, a in enumerate(v)]
    return tuple(v)


def residues_distinct(R, B) -> bool:
    """True iff distinct digits are pairwise non-congruent modulo ``R Z^d``."""
    R = as_matrix(R)
    d = len(R)
    B = [as_vector(b, d) for b in B]
    if det(R) == 0:
        raise ValueError("R is singular")
    H = hnf_columns(transpose(R), d)
    reps = {reduce_mod(R, b, H) for b in B}
    return len(reps) == len(set(B))


def congruent(R, u: Sequence[int], v: Sequence[int]) -> bool:
    """Exact test of ``R^{-1}(u - v) in Z^d``."""
    return is_integral(solve(as_matrix(R), vec_sub(u, v)))


def complete_residues(R) -> list[Vector]:
    """``|det R|`` representatives of ``Z^d / R Z^d`` in the parallelepiped ``R [0,1)^d``.

    Coset representatives come from the HNF box, then each is shifted by
    ``-R floor(R^{-1} x)`` into the fundamental parallelepiped.
    """
    R = as_matrix(R)
    d = len(R)
    if det(R) == 0:
        raise ValueError("R is singular")
    H = hnf_columns(transpose(R), d)
    Rinv = inverse(R)
    out = []
    for x in itertools.product(*(range(H[i][i]) for i in range(d))):
        y = mat_vec(Rinv, x)
        shift = tuple(math.floor(t) for t in y)
        out.append(vec_sub(x, mat_vec(R, shift)))
    out.sort(key=lambda v: (sum(abs(t) for t in v), v))
    return out


def smith_form(A) -> tuple[tuple[int, ...], Matrix, Matrix]:
    """Invariant factors ``s`` with unimodular ``U, V`` such that ``U A V = diag(s)``.

    ``Z^d / A Z^d`` is then isomorphic to ``Z/s_1 x ... x Z/s_d`` through
    ``x -> U x mod s``.
    """
    from sympy import Matrix as SMatrix, ZZ
    from sympy.matrices.normalforms import smith_normal_decomp

    A = as_matrix(A)
    if det(A) == 0:
        raise ValueError("matrix is singular")
    S, U, V = smith_normal_decomp(SMatrix(A), domain=ZZ)
    d = len(A)
    s = [abs(int(S[i, i])) for i in range(d)]
    U = [[int(U[i, j]) for j in range(d)] for i in range(d)]
    for i in range(d):
        if S[i, i] < 0:  # flip the sign into U so every factor is positive
            U[i] = [-t for t in U[i]]
    V = tuple(tuple(int(V[i, j]) for j in range(d)) for i in range(d))
    return tuple(s), tuple(tuple(r) for r in U), V
